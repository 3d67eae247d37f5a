#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "nsbound/converse.hpp"
#include "nsbound/types.hpp"
#include "support.hpp"

using namespace nsbound;

namespace {

double binomial(int n, int k) {
  double c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return std::round(c);
}

std::vector<std::size_t> digits_of(std::size_t v, std::size_t k, int n) {
  std::vector<std::size_t> d(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    d[static_cast<std::size_t>(i)] = v % k;
    v /= k;
  }
  return d;
}

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

std::vector<int> pair_counts(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y, std::size_t B,
                             std::size_t A) {
  std::vector<int> c(A * B, 0);
  for (std::size_t i = 0; i < x.size(); ++i) ++c[x[i] * B + y[i]];
  return c;
}

// |T| by counting all string pairs; m by fixing one y of the right output
// type and counting x.
struct Brute {
  long T = 0;
  long m = 0;
};

Brute brute_force(const JointType& jt) {
  const std::size_t A = jt.a_size, B = jt.b_size;
  const std::size_t NX = ipow(A, jt.n), NY = ipow(B, jt.n);
  Brute out;
  std::vector<std::size_t> fixed_y;
  for (std::size_t x = 0; x < NX; ++x)
    for (std::size_t y = 0; y < NY; ++y)
      if (pair_counts(digits_of(x, A, jt.n), digits_of(y, B, jt.n), B, A) == jt.counts) {
        ++out.T;
        if (fixed_y.empty()) fixed_y = digits_of(y, B, jt.n);
      }
  for (std::size_t x = 0; x < NX; ++x)
    if (pair_counts(digits_of(x, A, jt.n), fixed_y, B, A) == jt.counts) ++out.m;
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Enumerate, SpecExamples) {
  EXPECT_EQ(enumerate_joint_types(1, 1, 7).size(), 1u);
  const auto t = enumerate_joint_types(2, 1, 2);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.types[0].counts, (std::vector<int>{2, 0}));
  EXPECT_EQ(t.types[1].counts, (std::vector<int>{1, 1}));
  EXPECT_EQ(t.types[2].counts, (std::vector<int>{0, 2}));
  EXPECT_EQ(enumerate_joint_types(2, 2, 2).size(), 10u);
}

TEST(Enumerate, CountMatchesBinomialAndIsComplete) {
  for (std::size_t a = 1; a <= 3; ++a)
    for (std::size_t b = 1; b <= 3; ++b)
      for (int n = 1; n <= 4; ++n) {
        const auto t = enumerate_joint_types(a, b, n);
        const int k = static_cast<int>(a * b);
        EXPECT_EQ(static_cast<double>(t.size()), binomial(n + k - 1, k - 1));
        std::set<std::vector<int>> seen;
        for (std::size_t i = 0; i < t.size(); ++i) {
          const auto& jt = t.types[i];
          int sum = 0;
          for (int c : jt.counts) {
            EXPECT_GE(c, 0);
            sum += c;
          }
          EXPECT_EQ(sum, n);
          EXPECT_TRUE(seen.insert(jt.counts).second);
          if (i > 0) {
            EXPECT_TRUE(t.types[i - 1].counts > jt.counts);
          }
          EXPECT_EQ(t.input_types[t.input_of[i]], jt.marginal_a());
          EXPECT_EQ(t.output_types[t.output_of[i]], jt.marginal_b());
        }
        // every string pair lands on an enumerated type
        if (ipow(a * b, n) <= 4096) {
          for (std::size_t x = 0; x < ipow(a, n); ++x)
            for (std::size_t y = 0; y < ipow(b, n); ++y)
              EXPECT_TRUE(seen.count(pair_counts(digits_of(x, a, n), digits_of(y, b, n), b, a)));
        }
      }
}

TEST(Enumerate, LimitExceeded) {
  try {
    enumerate_joint_types(4, 4, 60, 1e5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::limit_exceeded);
  }
  EXPECT_THROW(enumerate_joint_types(2, 2, 0), Error);
}

TEST(Multiplicities, SpecExamples) {
  JointType diag{2, 2, 2, {1, 0, 0, 1}};
  auto ex = exact_multiplicities(diag);
  EXPECT_EQ(ex.T, 2);
  EXPECT_EQ(ex.m, 1);
  JointType one_cell{3, 2, 2, {0, 3, 0, 0}};
  ex = exact_multiplicities(one_cell);
  EXPECT_EQ(ex.T, 1);
  EXPECT_EQ(ex.m, 1);
  const auto lm = log_multiplicities(diag);
  EXPECT_NEAR(lm.log_T, std::log(2.0), 1e-14);
  EXPECT_NEAR(lm.log_m, 0.0, 1e-14);
}

// counts(a=0,b=0) = counts(a=0,b=1) = 1: with the output string fixed, the
// input string must be 00, so m = 1. Reading the pairs as (b, a) gives the
// type with counts(0,0) = counts(1,0) = 1, where m = 2.
TEST(Multiplicities, PairOrderingOfSharedRowExample) {
  JointType ab{2, 2, 2, {1, 1, 0, 0}};
  const auto brute_ab = brute_force(ab);
  EXPECT_EQ(brute_ab.T, 2);
  EXPECT_EQ(brute_ab.m, 1);
  EXPECT_EQ(exact_multiplicities(ab).T, 2);
  EXPECT_EQ(exact_multiplicities(ab).m, 1);
  JointType ba{2, 2, 2, {1, 0, 1, 0}};
  const auto brute_ba = brute_force(ba);
  EXPECT_EQ(brute_ba.T, 2);
  EXPECT_EQ(brute_ba.m, 2);
  EXPECT_EQ(exact_multiplicities(ba).m, 2);
}

TEST(Multiplicities, MatchBruteForce) {
  for (std::size_t a = 1; a <= 3; ++a)
    for (std::size_t b = 1; b <= 3; ++b)
      for (int n = 1; n <= 3; ++n) {
        const auto t = enumerate_joint_types(a, b, n);
        for (const auto& jt : t.types) {
          const auto br = brute_force(jt);
          const auto ex = exact_multiplicities(jt);
          EXPECT_EQ(ex.T, br.T);
          EXPECT_EQ(ex.m, br.m);
        }
      }
}

TEST(Multiplicities, LogIdentityAndExactAgreement) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 20; ++n) {
    const auto t = enumerate_joint_types(2, 2, n);
    for (std::size_t i = 0; i < t.size(); i += 1 + t.size() / 40) {
      const auto& jt = t.types[i];
      const auto lm = log_multiplicities(jt);
      const auto ex = exact_multiplicities(jt);
      EXPECT_EQ(ex.T, ex.m * exact_multinomial(n, jt.marginal_b()));
      EXPECT_NEAR(lm.log_T, lm.log_m + detail::log_multinomial(n, jt.marginal_b()), 1e-10);
      EXPECT_LE(rel(std::exp(lm.log_T), ex.T.convert_to<double>()), 1e-9);
      EXPECT_LE(rel(std::exp(lm.log_m), ex.m.convert_to<double>()), 1e-9);
    }
  }
}

TEST(TypeTable, ChannelWeightsSumToOnePerInputType) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto ch = fixtures::random_channel(rng, fixtures::random_size(rng, 1, 3), fixtures::random_size(rng, 1, 3));
    const int n = static_cast<int>(fixtures::random_size(rng, 1, 12));
    const auto t = enumerate_joint_types(ch.input_size(), ch.output_size(), n);
    const auto co = reduced_coefficients(t, ch);
    std::vector<CompensatedSum> sums(t.input_types.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      // count of y per fixed x times E^n
      const double lw = log_channel_weight(t.types[i], ch);
      if (!std::isinf(lw)) sums[t.input_of[i]].add(std::exp(t.log_T[i] - t.log_T_input[t.input_of[i]] + lw));
      EXPECT_LE(co.r[i], 1.0);
      EXPECT_GT(co.r[i], 0.0);
    }
    for (auto& s : sums) EXPECT_NEAR(s.value(), 1.0, 1e-9);
    EXPECT_EQ(co.dropped, 0u);
  }
}

TEST(TypeTable, ZeroCellsKeepPackingButNotObjective) {
  auto z = z_channel(0.3);
  const auto t = enumerate_joint_types(2, 2, 3);
  const auto co = reduced_coefficients(t, z);
  const auto lp = build_reduced_size_lp(t, co, 0.1);
  std::size_t zero_weight = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (co.W[i] == 0) ++zero_weight;
  EXPECT_GT(zero_weight, 0u);
  std::size_t packed = 0;
  for (const auto& row : lp.rows)
    if (row.name.rfind("pack_", 0) == 0) packed += row.terms.size();
  EXPECT_EQ(packed, t.size());
}

TEST(TypeTable, UnderflowIsCounted) {
  auto ch = validate_channel<double>({{1 - 1e-200, 1e-200}, {0.5, 0.5}});
  const auto t = enumerate_joint_types(2, 2, 2);
  EXPECT_GT(reduced_coefficients(t, ch).dropped, 0u);
}

TEST(ReducedError, SpecExamples) {
  EXPECT_NEAR(reduced_min_error(bsc(0.1), 1, 2).p_err, 0.1, 1e-10);
  const auto two = reduced_min_error(bsc(0.1), 2, 2);
  EXPECT_NEAR(two.p_err, min_error(tensor_power(bsc(0.1), 2), 2).p_err, 1e-7);
  EXPECT_NEAR(reduced_min_error(useless({0.5, 0.5}), 3, 2).p_err, 0.5, 1e-10);
}

TEST(ReducedSize, SpecExamples) {
  EXPECT_NEAR(reduced_max_size(bsc(0.1), 1, 0.1).M_beta, 2.0, 1e-9);
  const double explicit_value = max_size(tensor_power(bsc(0.1), 2), 0.01).M_beta;
  EXPECT_LE(rel(reduced_max_size(bsc(0.1), 2, 0.01).M_beta, explicit_value), 1e-6);
  const auto perfect = reduced_max_size(noiseless(2), 5, 0.0);
  EXPECT_NEAR(perfect.M_beta, 32.0, 1e-8);
  EXPECT_EQ(perfect.M_NS, 32);
}

TEST(Reduced, MatchesExplicitTensorPower) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 12; ++trial) {
    auto ch = fixtures::random_channel(rng, fixtures::random_size(rng, 1, 3), fixtures::random_size(rng, 1, 3));
    const int n = static_cast<int>(fixtures::random_size(rng, 1, 3));
    const auto big = tensor_power(ch, n);
    const std::int64_t M = static_cast<std::int64_t>(fixtures::random_size(rng, 1, 6));
    const double eps = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    EXPECT_LE(rel(reduced_min_error(ch, n, M).p_err, min_error(big, M).p_err), 1e-7) << trial;
    const double Mb = max_size(big, eps).M_beta;
    EXPECT_LE(std::abs(reduced_max_size(ch, n, eps).M_beta - Mb) / Mb, 1e-7) << trial;
  }
}

TEST(Reduced, ExactModeAgreesWithFloat) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 4; ++trial) {
    auto ch = fixtures::random_decimal_channel(rng, 2, 2, 10);
    const auto ex = reduced_max_size(to_exact(ch), 2, Rational(1, 10));
    const auto fl = reduced_max_size(ch, 2, 0.1);
    EXPECT_LE(std::abs(to_double(ex.M_beta) - fl.M_beta) / fl.M_beta, 1e-9);
    EXPECT_EQ(ex.M_NS, fl.M_NS);
    const auto co = reduced_coefficients(ex.table, to_exact(ch));
    const auto check = certify_reduced_size(ex.table, co, ex.eps, ex.dual);
    EXPECT_TRUE(check.valid);
    EXPECT_EQ(check.exact_bound, to_string(ex.M_beta));
    const auto er = reduced_min_error(to_exact(ch), 2, 3);
    EXPECT_NEAR(to_double(er.p_err), reduced_min_error(ch, 2, 3).p_err, 1e-9);
  }
}

TEST(Reduced, CuttingPlanesMatchFullLp) {
  std::mt19937_64 rng(33);
  ReducedOptions full, cuts;
  full.method = ReducedMethod::full;
  cuts.method = ReducedMethod::cutting_plane;
  struct Case {
    std::size_t a, b;
    int n;
  };
  for (const Case c : {Case{2, 2, 10}, Case{2, 3, 5}, Case{3, 2, 5}, Case{2, 2, 7}, Case{3, 3, 3}}) {
    auto ch = fixtures::random_channel(rng, c.a, c.b);
    for (double eps : {0.0, 0.05, 0.3}) {
      const auto f = reduced_max_size(ch, c.n, eps, full);
      const auto k = reduced_max_size(ch, c.n, eps, cuts);
      EXPECT_EQ(k.method, "cutting-plane");
      EXPECT_LE(std::abs(k.M_beta - f.M_beta) / f.M_beta, 1e-7) << c.a << "x" << c.b << " n=" << c.n << " eps=" << eps;
      EXPECT_LE(k.M_lower, k.M_beta * (1 + 1e-12));
      EXPECT_GE(k.M_beta, f.M_beta * (1 - 1e-9));
      const auto co = reduced_coefficients(k.table, ch);
      EXPECT_TRUE(certify_reduced_size(k.table, co, eps, k.dual).valid);
      // witness feasibility in the reduced size LP
      const auto lp = build_reduced_size_lp(k.table, co, eps);
      std::vector<double> point = k.a;
      point.insert(point.end(), k.V.begin(), k.V.end());
      EXPECT_TRUE(check_point(lp, point, 1e-7).feasible);
    }
    const std::int64_t M = 3;
    const auto fe = reduced_min_error(ch, c.n, M, full);
    const auto ke = reduced_min_error(ch, c.n, M, cuts);
    EXPECT_NEAR(ke.p_err, fe.p_err, 1e-7);
    EXPECT_LE(ke.p_err, ke.p_err_upper + 1e-12);
  }
}

TEST(Reduced, ExpandedCertificateAndWitnessAreExplicitlyValid) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 4; ++trial) {
    auto ch = fixtures::random_channel(rng, 2, fixtures::random_size(rng, 2, 3));
    const int n = 3;
    const auto big = tensor_power(ch, n);
    const auto rs = reduced_max_size(ch, n, 0.1);
    const auto cert = expand_size_certificate(rs);
    const auto verdict = certify_size(big, 0.1, cert, 1e-8);
    EXPECT_TRUE(verdict.valid);
    EXPECT_LE(rel(verdict.bound, rs.M_beta), 1e-8);

    const auto re = reduced_min_error(ch, n, 2);
    const auto w = expand_error_witness(re);
    const auto lp = build_error_lp(big, 0.5);
    std::vector<double> point(w.R.data().begin(), w.R.data().end());
    point.insert(point.end(), w.p.begin(), w.p.end());
    const auto rep = check_point(lp, point, 1e-8);
    EXPECT_TRUE(rep.feasible);
    EXPECT_NEAR(rep.objective, 1 - re.p_err, 1e-8);
  }
}

TEST(Reduced, RelabelingInvariance) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    auto ch = fixtures::random_channel(rng, 2, 2);
    const auto big = tensor_power(ch, 3);
    std::vector<std::size_t> px(big.input_size()), py(big.output_size());
    std::iota(px.begin(), px.end(), 0);
    std::iota(py.begin(), py.end(), 0);
    std::shuffle(px.begin(), px.end(), rng);
    std::shuffle(py.begin(), py.end(), rng);
    std::vector<std::vector<double>> rows(big.input_size(), std::vector<double>(big.output_size()));
    for (std::size_t x = 0; x < big.input_size(); ++x)
      for (std::size_t y = 0; y < big.output_size(); ++y) rows[px[x]][py[y]] = big(x, y);
    const Channel shuffled(std::move(rows));
    for (std::int64_t M : {2, 3, 5}) EXPECT_NEAR(min_error(shuffled, M).p_err, min_error(big, M).p_err, 1e-9);
  }
}

TEST(Reduced, WitnessJsonIsKeyedByCounts) {
  const auto r = reduced_min_error(bsc(0.2), 2, 2);
  const auto doc = reduced_witness_json(r.table, r.a, r.P, "p");
  EXPECT_EQ(doc["n"], 2);
  ASSERT_FALSE(doc["types"].empty());
  for (const auto& e : doc["types"]) {
    ASSERT_EQ(e["counts"].size(), 2u);
    int sum = 0;
    for (const auto& row : e["counts"])
      for (const auto& c : row) sum += c.get<int>();
    EXPECT_EQ(sum, 2);
  }
  double total = 0;
  for (const auto& e : doc["inputs"]) {
    const std::vector<int> counts = e["counts"];
    total += e["p"].get<double>() * std::exp(detail::log_multinomial(2, counts));
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(Reduced, LargeBlocklengthBsc) {
  // i.i.d. uniform input is optimal for the BSC; the certificate must close the gap.
  const auto r = reduced_max_size(bsc(0.11), 64, 0.05);
  EXPECT_EQ(r.method, "cutting-plane");
  EXPECT_LE((r.M_beta - r.M_lower) / r.M_beta, 1e-8);
  EXPECT_GT(std::log2(r.M_beta), 20.0);
  EXPECT_LT(std::log2(r.M_beta), 64 * 0.5002);
}
