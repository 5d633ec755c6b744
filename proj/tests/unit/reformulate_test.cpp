#include "pubo/reformulate.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "pubo/extbp.hpp"
#include "test_util.hpp"

using pubo::Polynomial;
using pubo::Relation;
using pubo::VarId;
using testutil::bits_of;
using testutil::iota_vars;

namespace {

Polynomial x(VarId v) { return Polynomial::variable(v); }

int popcount_of(const std::vector<std::uint8_t>& a, std::size_t n) {
  int s = 0;
  for (std::size_t k = 0; k < n; ++k) s += a[k];
  return s;
}

}  // namespace

// ---- closed-form binary-valued penalties ----

TEST(EqPenalty, TwoVarsOne) {
  const auto vars = iota_vars(2);
  const auto p = pubo::eq_penalty(vars, 1);
  EXPECT_EQ(p.poly, Polynomial::constant(1) - x(0) - x(1) + 2.0 * x(0) * x(1));
  EXPECT_EQ(p.kind, pubo::PenaltyKind::BinaryValued);
}

TEST(EqPenalty, TwoVarsZeroIsOr) {
  const auto vars = iota_vars(2);
  EXPECT_EQ(pubo::eq_penalty(vars, 0).poly, x(0) + x(1) - x(0) * x(1));
}

TEST(EqPenalty, ThreeVarsOne) {
  const auto vars = iota_vars(3);
  const Polynomial want = Polynomial::constant(1) - x(0) - x(1) - x(2) +
                          2.0 * (x(0) * x(1) + x(0) * x(2) + x(1) * x(2)) - 3.0 * x(0) * x(1) * x(2);
  const auto p = pubo::eq_penalty(vars, 1).poly;
  EXPECT_EQ(p, want);
  EXPECT_DOUBLE_EQ(p.evaluate(std::vector<std::uint8_t>{1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(p.evaluate(std::vector<std::uint8_t>{1, 0, 0}), 0.0);
}

TEST(EqPenalty, RejectsOutOfRange) {
  const auto vars = iota_vars(2);
  EXPECT_THROW(pubo::eq_penalty(vars, 3), std::invalid_argument);
  EXPECT_THROW(pubo::eq_penalty(vars, -1), std::invalid_argument);
}

TEST(LePenalty, TwoVarsOne) {
  const auto vars = iota_vars(2);
  EXPECT_EQ(pubo::le_penalty(vars, 1).poly, x(0) * x(1));
}

TEST(LePenalty, ThreeVarsOne) {
  const auto vars = iota_vars(3);
  const Polynomial want = x(0) * x(1) + x(0) * x(2) + x(1) * x(2) - 2.0 * x(0) * x(1) * x(2);
  const auto p = pubo::le_penalty(vars, 1).poly;
  EXPECT_EQ(p, want);
  EXPECT_DOUBLE_EQ(p.evaluate(std::vector<std::uint8_t>{1, 1, 1}), 1.0);
}

TEST(LePenalty, NeverViolatedIsZero) {
  const auto vars = iota_vars(3);
  EXPECT_TRUE(pubo::le_penalty(vars, 3).poly.is_zero());
  EXPECT_TRUE(pubo::le_penalty(vars, 7).poly.is_zero());
}

TEST(GePenalty, TwoVarsOne) {
  const auto vars = iota_vars(2);
  const auto p = pubo::ge_penalty(vars, 1).poly;
  EXPECT_EQ(p, Polynomial::constant(1) - x(0) - x(1) + x(0) * x(1));
  EXPECT_DOUBLE_EQ(p.evaluate(std::vector<std::uint8_t>{0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(p.evaluate(std::vector<std::uint8_t>{1, 1}), 0.0);
}

TEST(GePenalty, SingleVariable) {
  const auto vars = iota_vars(1);
  EXPECT_EQ(pubo::ge_penalty(vars, 1).poly, Polynomial::constant(1) - x(0));
}

TEST(GePenalty, RejectsZero) {
  const auto vars = iota_vars(2);
  EXPECT_THROW(pubo::ge_penalty(vars, 0), std::invalid_argument);
  EXPECT_THROW(pubo::ge_penalty(vars, 3), std::invalid_argument);
}

TEST(GePenalty, ThreeTwoIsEqMinusLe) {
  const auto vars = iota_vars(3);
  EXPECT_TRUE(pubo::approx_equal(pubo::ge_penalty(vars, 2).poly,
                                 pubo::eq_penalty(vars, 2).poly - pubo::le_penalty(vars, 2).poly));
}

TEST(ElementarySymmetric, MatchesSubsetCount) {
  const auto vars = iota_vars(6);
  const auto e = pubo::elementary_symmetric(vars);
  ASSERT_EQ(e.size(), 7u);
  for (std::uint64_t z = 0; z < 64; ++z) {
    const auto a = bits_of(z, 6);
    const int s = popcount_of(a, 6);
    double binom = 1.0;
    for (int k = 0; k <= 6; ++k) {
      EXPECT_DOUBLE_EQ(e[static_cast<std::size_t>(k)].evaluate(a), binom);
      binom = binom * (s - k) / (k + 1);
    }
  }
}

TEST(SymmetricPenalty, CapOnVariables) {
  const auto vars = iota_vars(pubo::kMaxSymmetricVars + 1);
  EXPECT_THROW(pubo::le_penalty(vars, 1), std::invalid_argument);
}

// Exhaustive soundness: 0 on satisfying assignments and exactly 1 otherwise.
TEST(SymmetricPenalty, SoundOnAllSmallCases) {
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto vars = iota_vars(n);
    for (std::int64_t c = 0; c <= static_cast<std::int64_t>(n); ++c) {
      const auto eq = pubo::eq_penalty(vars, c).poly;
      const auto le = pubo::le_penalty(vars, c).poly;
      std::optional<Polynomial> ge;
      if (c >= 1) ge = pubo::ge_penalty(vars, c).poly;
      for (std::uint64_t z = 0; z < (1u << n); ++z) {
        const auto a = bits_of(z, n);
        const int s = popcount_of(a, n);
        ASSERT_EQ(eq.evaluate(a), s == c ? 0.0 : 1.0) << n << " " << c << " " << z;
        ASSERT_EQ(le.evaluate(a), s <= c ? 0.0 : 1.0) << n << " " << c << " " << z;
        if (ge) ASSERT_EQ(ge->evaluate(a), s >= c ? 0.0 : 1.0) << n << " " << c << " " << z;
      }
    }
  }
}

TEST(SymmetricPenalty, GeIsEqMinusLeCoefficientWise) {
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto vars = iota_vars(n);
    for (std::int64_t c = 1; c <= static_cast<std::int64_t>(n); ++c) {
      const auto diff = pubo::eq_penalty(vars, c).poly - pubo::le_penalty(vars, c).poly;
      EXPECT_TRUE(pubo::approx_equal(pubo::ge_penalty(vars, c).poly, diff)) << n << " " << c;
    }
  }
}

// ---- product penalty ----

TEST(ProductPenalty, UnitSumLeOne) {
  const auto c = pubo::canonicalize(Relation::LessEqual, x(0) + x(1), 1).front();
  const auto p = pubo::product_penalty(c);
  EXPECT_EQ(p.kind, pubo::PenaltyKind::ProductForm);
  EXPECT_DOUBLE_EQ(p.poly.evaluate(std::vector<std::uint8_t>{1, 1}), 24.0);
  EXPECT_DOUBLE_EQ(p.poly.evaluate(std::vector<std::uint8_t>{1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(p.poly.evaluate(std::vector<std::uint8_t>{0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(p.poly.evaluate(std::vector<std::uint8_t>{0, 0}), 0.0);
}

TEST(ProductPenalty, SingleVariable) {
  const auto c = pubo::canonicalize(Relation::LessEqual, x(0), 0).front();
  EXPECT_EQ(pubo::product_penalty(c).poly, 2.0 * x(0));
}

TEST(ProductPenalty, AlwaysSatisfiedIsZeroOnCube) {
  const auto c = pubo::canonicalize(Relation::LessEqual, -x(0), 0).front();
  const auto p = pubo::product_penalty(c).poly;
  EXPECT_EQ(p.evaluate(std::vector<std::uint8_t>{0}), 0.0);
  EXPECT_EQ(p.evaluate(std::vector<std::uint8_t>{1}), 0.0);
}

TEST(ProductPenalty, RefusesInexactExpansion) {
  Polynomial lhs;
  for (VarId v = 0; v < 12; ++v) lhs = lhs + x(v);
  const auto c = pubo::canonicalize(Relation::LessEqual, lhs, 6).front();
  EXPECT_THROW(pubo::product_penalty(c), std::invalid_argument);
}

TEST(ProductPenalty, CapAndIntegrality) {
  Polynomial big;
  for (VarId v = 0; v < 11; ++v) big = big + Polynomial::variable(v, 2);
  const auto c = pubo::canonicalize(Relation::LessEqual, big, 3).front();
  EXPECT_THROW(pubo::product_penalty(c), std::invalid_argument);
  pubo::Constraint frac{0.5 * x(0), {}};
  EXPECT_THROW(pubo::product_penalty(frac), std::invalid_argument);
}

TEST(ProductPenalty, SoundOnRandomConstraints) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> nvars(1, 12);
  std::uniform_int_distribution<int> coeff(-2, 2);
  int tested = 0;
  for (int trial = 0; trial < 200 && tested < 40; ++trial) {
    const std::size_t n = static_cast<std::size_t>(nvars(rng));
    Polynomial lhs;
    for (VarId v = 0; v < n; ++v) lhs = lhs + Polynomial::variable(v, coeff(rng));
    if (rng() % 3 == 0 && n >= 2) lhs = lhs + Polynomial::monomial({0, static_cast<VarId>(n - 1)}, coeff(rng));
    std::uniform_int_distribution<int> rhs(-2, 3);
    const auto c = pubo::canonicalize(Relation::LessEqual, lhs, rhs(rng)).front();
    double ub = 0.0;
    for (const auto& [k, v] : c.lhs.terms()) ub += std::abs(v);
    if (ub > pubo::kDefaultProductCap) continue;
    pubo::Polynomial p;
    try {
      p = pubo::product_penalty(c).poly;
    } catch (const std::invalid_argument&) {
      continue;  // outside the exact range
    }
    ++tested;
    for (std::uint64_t z = 0; z < (1u << n); ++z) {
      const auto a = bits_of(z, n);
      const double v = p.evaluate(a);
      if (c.lhs.evaluate(a) <= 0) {
        ASSERT_NEAR(v, 0.0, 1e-6);
      } else {
        ASSERT_GE(v, 1.0 - 1e-9);
      }
    }
  }
  EXPECT_GE(tested, 20);
}

TEST(BinaryValuedPenalty, SelectsClosedForms) {
  const auto le = pubo::canonicalize(Relation::LessEqual, x(0) + x(1) + x(2), 1).front();
  EXPECT_EQ(pubo::binary_valued_penalty(le)->poly, pubo::le_penalty(iota_vars(3), 1).poly);
  const auto ge = pubo::canonicalize(Relation::GreaterEqual, x(0) + x(1), 1).front();
  EXPECT_EQ(pubo::binary_valued_penalty(ge)->poly, pubo::ge_penalty(iota_vars(2), 1).poly);
  const auto eq = pubo::canonicalize(Relation::Equal, x(0) + x(1), 1);
  EXPECT_EQ(pubo::binary_valued_penalty(eq[0])->poly, pubo::eq_penalty(iota_vars(2), 1).poly);
  EXPECT_TRUE(pubo::binary_valued_penalty(eq[1])->poly.is_zero());
  const auto weighted = pubo::canonicalize(Relation::LessEqual, 2.0 * x(0) + x(1), 1).front();
  EXPECT_FALSE(pubo::binary_valued_penalty(weighted).has_value());
}

// ---- quadratization ----

TEST(PenLin, TruthTable) {
  const auto p = pubo::pen_lin(0, 1, 2);
  // (xi, xj, y) -> value; zero exactly when y == xi xj.
  const int want[8] = {0, 0, 0, 1, 3, 1, 1, 0};
  for (std::uint64_t z = 0; z < 8; ++z) {
    const auto a = bits_of(z, 3);
    EXPECT_DOUBLE_EQ(p.evaluate(a), want[z]) << z;
  }
  EXPECT_DOUBLE_EQ(p.evaluate(std::vector<std::uint8_t>{1, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(p.evaluate(std::vector<std::uint8_t>{0, 0, 1}), 3.0);
  EXPECT_DOUBLE_EQ(p.evaluate(std::vector<std::uint8_t>{1, 1, 1}), 0.0);
}

TEST(ReduceToQuadratic, SingleCubic) {
  pubo::VarTable vars({"a", "b", "c"});
  const double lambda = 5.0;
  const auto q = pubo::reduce_to_quadratic(Polynomial::monomial({0, 1, 2}), lambda, vars);
  ASSERT_EQ(q.substitutions.size(), 1u);
  EXPECT_EQ(q.substitutions[0].a, 0u);
  EXPECT_EQ(q.substitutions[0].b, 1u);
  EXPECT_EQ(q.substitutions[0].replacement, 3u);
  EXPECT_EQ(vars.size(), 4u);
  EXPECT_EQ(q.poly, Polynomial::monomial({2, 3}) + lambda * pubo::pen_lin(0, 1, 3));
  EXPECT_EQ(q.poly.degree(), 2u);
}

TEST(ReduceToQuadratic, QuadraticUnchanged) {
  pubo::VarTable vars({"a", "b", "c"});
  const Polynomial p = x(0) * x(1) - 2.0 * x(2) + 1.0;
  const auto q = pubo::reduce_to_quadratic(p, 3.0, vars);
  EXPECT_EQ(q.poly, p);
  EXPECT_TRUE(q.substitutions.empty());
  EXPECT_EQ(vars.size(), 3u);
}

TEST(ReduceToQuadratic, PicksMostFrequentPair) {
  // Pair (1, 2) is in all three cubic terms; (0, 1) in only one.
  pubo::VarTable vars({"a", "b", "c", "d", "e"});
  const Polynomial p = Polynomial::monomial({0, 1, 2}) + Polynomial::monomial({1, 2, 3}) +
                       Polynomial::monomial({1, 2, 4});
  const auto q = pubo::reduce_to_quadratic(p, 4.0, vars);
  ASSERT_EQ(q.substitutions.size(), 1u);
  EXPECT_EQ(q.substitutions[0].a, 1u);
  EXPECT_EQ(q.substitutions[0].b, 2u);
}

TEST(ReduceToQuadratic, ReplayReproducesReduced) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = testutil::to_poly(testutil::random_terms(rng, 6, 8, 5));
    pubo::VarTable vars(std::vector<std::string>(6, "v"));
    const auto q = pubo::reduce_to_quadratic(p, 2.0, vars);
    EXPECT_EQ(pubo::apply_substitutions(p, q.substitutions), q.reduced);
    EXPECT_LE(q.poly.degree(), 2u);
  }
}

// Degree <= 2, value preserved where each helper equals its product, and the
// same global minimum over the extended cube.
TEST(ReduceToQuadratic, PreservesMinimum) {
  std::mt19937_64 rng(29);
  int tested = 0;
  for (int trial = 0; trial < 40 && tested < 12; ++trial) {
    constexpr std::size_t n = 7;
    const auto p = testutil::to_poly(testutil::random_terms(rng, n, 6, 4, 4));
    pubo::VarTable vars(std::vector<std::string>(n, "v"));
    const double lambda = pubo::lambda_default(p);
    const auto q = pubo::reduce_to_quadratic(p, lambda, vars);
    const std::size_t total = vars.size();
    if (total > 14) continue;
    ++tested;
    ASSERT_LE(q.poly.degree(), 2u);
    double pmin = std::numeric_limits<double>::infinity();
    for (std::uint64_t z = 0; z < (1u << n); ++z) pmin = std::min(pmin, p.evaluate_bits(z));
    double qmin = std::numeric_limits<double>::infinity();
    for (std::uint64_t z = 0; z < (std::uint64_t{1} << total); ++z) {
      const double v = q.poly.evaluate_bits(z);
      qmin = std::min(qmin, v);
      bool consistent = true;
      for (const auto& s : q.substitutions) {
        const auto prod = ((z >> s.a) & 1U) & ((z >> s.b) & 1U);
        consistent = consistent && ((z >> s.replacement) & 1U) == prod;
      }
      if (consistent) ASSERT_NEAR(v, p.evaluate_bits(z & ((1u << n) - 1)), 1e-9);
    }
    EXPECT_NEAR(qmin, pmin, 1e-9);
  }
  EXPECT_GE(tested, 5);
}

TEST(ReduceToQuadratic, RejectsShortTable) {
  pubo::VarTable vars({"a"});
  EXPECT_THROW(pubo::reduce_to_quadratic(Polynomial::monomial({0, 1, 2}), 1.0, vars), std::invalid_argument);
}

// ---- slack penalty ----

namespace {

std::string slack_name(std::size_t bit, std::size_t) { return "s" + std::to_string(bit); }

double min_over_slack(const Polynomial& p, std::uint64_t fixed, std::size_t n, std::size_t slack_bits) {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << slack_bits); ++s) best = std::min(best, p.evaluate_bits(fixed | (s << n)));
  return best;
}

}  // namespace

TEST(SlackPenalty, UniqueGroupConstraint) {
  pubo::VarTable vars({"y0", "y1"});
  const auto c = pubo::canonicalize(Relation::LessEqual, x(0) + x(1), 1).front();
  const auto p = pubo::slack_penalty(c, vars, slack_name);
  ASSERT_EQ(p.slack_vars.size(), 1u);
  EXPECT_EQ(p.kind, pubo::PenaltyKind::SlackQuadratic);
  const Polynomial lin = x(0) + x(1) + x(2) - 1.0;
  EXPECT_EQ(p.poly, lin * lin);
  EXPECT_GE(p.poly.evaluate_bits(0b011), 1.0);
  EXPECT_GE(p.poly.evaluate_bits(0b111), 1.0);
}

TEST(SlackPenalty, CapacityTwoGroups) {
  pubo::VarTable vars({"x", "y0", "y1"});
  const auto c = pubo::canonicalize(Relation::LessEqual, x(1) + x(2) - 2.0 * x(0), 0).front();
  const auto p = pubo::slack_penalty(c, vars, slack_name);
  ASSERT_EQ(p.slack_vars, (std::vector<VarId>{3, 4}));
  const Polynomial lin = x(1) + x(2) - 2.0 * x(0) + x(3) + 2.0 * x(4);
  EXPECT_EQ(p.poly, lin * lin);
  EXPECT_EQ(vars.name(3), "s0");
}

TEST(SlackPenalty, VacuousConstraintElided) {
  pubo::VarTable vars({"y0"});
  const auto c = pubo::canonicalize(Relation::LessEqual, x(0), 1).front();
  const auto p = pubo::slack_penalty(c, vars, slack_name);
  EXPECT_TRUE(p.poly.is_zero());
  EXPECT_TRUE(p.slack_vars.empty());
  EXPECT_EQ(vars.size(), 1u);
}

TEST(SlackPenalty, RejectsUnsatisfiable) {
  pubo::VarTable vars({"y0"});
  const auto c = pubo::canonicalize(Relation::LessEqual, x(0), -1).front();
  EXPECT_THROW(pubo::slack_penalty(c, vars, slack_name), std::invalid_argument);
}

TEST(SlackPenalty, RejectsNonlinear) {
  pubo::VarTable vars({"a", "b"});
  const auto c = pubo::canonicalize(Relation::LessEqual, x(0) * x(1), 0).front();
  EXPECT_THROW(pubo::slack_penalty(c, vars, slack_name), std::invalid_argument);
}

TEST(SlackPenalty, MinOverSlackIsZeroIffSatisfied) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> coeff(-3, 3);
  int tested = 0;
  for (int trial = 0; trial < 200 && tested < 30; ++trial) {
    const std::size_t n = 2 + rng() % 5;
    Polynomial lhs;
    for (VarId v = 0; v < n; ++v) lhs = lhs + Polynomial::variable(v, coeff(rng));
    const auto c = pubo::canonicalize(Relation::LessEqual, lhs, coeff(rng)).front();
    const auto b = pubo::interval_bounds(c.lhs);
    if (b.lo > 0) continue;
    pubo::VarTable vars(std::vector<std::string>(n, "v"));
    const auto p = pubo::slack_penalty(c, vars, slack_name);
    const std::size_t k = p.slack_vars.size();
    if (n + k > 12) continue;
    ++tested;
    for (std::uint64_t z = 0; z < (1u << n); ++z) {
      const bool sat = c.lhs.evaluate_bits(z) <= 0;
      const double m = min_over_slack(p.poly, z, n, k);
      if (sat) {
        ASSERT_NEAR(m, 0.0, 1e-9);
      } else {
        ASSERT_GE(m, 1.0 - 1e-9);
      }
    }
  }
  EXPECT_GE(tested, 20);
}

// ---- lambda and composition ----

TEST(LambdaDefault, BuiltinInstances) {
  EXPECT_DOUBLE_EQ(pubo::lambda_default(pubo::extbp::objective_polynomial(pubo::extbp::builtin_instance("A"))), 8.0);
  EXPECT_DOUBLE_EQ(pubo::lambda_default(pubo::extbp::objective_polynomial(pubo::extbp::builtin_instance("B"))), 10.0);
  EXPECT_DOUBLE_EQ(pubo::lambda_default(pubo::extbp::objective_polynomial(pubo::extbp::builtin_instance("C"))), 12.0);
}

TEST(Compose, EmptyPenaltiesKeepObjective) {
  const Polynomial f = x(0) - 2.0 * x(1);
  EXPECT_EQ(pubo::compose_unconstrained(f, {}), f);
}

TEST(Compose, EqPenaltyMinimizers) {
  auto pen = pubo::eq_penalty(iota_vars(2), 1);
  pen.lambda = 1.0;
  const std::vector<pubo::PenaltyTerm> pens{pen};
  const auto p = pubo::compose_unconstrained(Polynomial{}, pens);
  EXPECT_EQ(p.evaluate_bits(0b01), 0.0);
  EXPECT_EQ(p.evaluate_bits(0b10), 0.0);
  EXPECT_EQ(p.evaluate_bits(0b00), 1.0);
  EXPECT_EQ(p.evaluate_bits(0b11), 1.0);
}

TEST(Compose, RejectsNonPositiveLambda) {
  auto pen = pubo::eq_penalty(iota_vars(2), 1);
  pen.lambda = 0.0;
  const std::vector<pubo::PenaltyTerm> pens{pen};
  EXPECT_THROW(pubo::compose_unconstrained(x(0), pens), std::invalid_argument);
}

// ---- equivalence of constrained and unconstrained optima ----

namespace {

pubo::Problem random_problem(std::mt19937_64& rng, std::size_t n) {
  pubo::Problem p;
  for (std::size_t k = 0; k < n; ++k) p.add_binary();
  std::uniform_int_distribution<int> coeff(-3, 3);
  Polynomial obj;
  for (VarId v = 0; v < n; ++v) obj = obj + Polynomial::variable(v, coeff(rng));
  obj = obj + Polynomial::monomial({0, 1}, coeff(rng)) + Polynomial::monomial({1, 2, 3}, coeff(rng));
  p.set_objective(obj);
  // One unit-sum constraint of a random kind, one weighted linear constraint.
  std::vector<VarId> pick;
  for (VarId v = 0; v < n; ++v) {
    if (rng() % 2) pick.push_back(v);
  }
  if (pick.size() < 2) pick = {0, 1};
  const auto m = static_cast<std::int64_t>(pick.size());
  const auto rel = static_cast<Relation>(rng() % 3);
  std::uniform_int_distribution<std::int64_t> rhs(rel == Relation::GreaterEqual ? 1 : 0, m);
  p.add_constraint(rel, pubo::linear_sum(pick), rhs(rng));
  Polynomial w;
  std::uniform_int_distribution<int> small(-2, 2);
  for (VarId v = 0; v < n; ++v) w = w + Polynomial::variable(v, small(rng));
  p.add_constraint(Relation::LessEqual, w, 1);
  return p;
}

struct Oracle {
  double optimum = std::numeric_limits<double>::infinity();
  std::set<std::uint64_t> argmin;
  bool any_feasible = false;
};

Oracle constrained_oracle(const pubo::Problem& p, std::size_t n) {
  Oracle o;
  for (std::uint64_t z = 0; z < (1u << n); ++z) {
    const auto a = bits_of(z, n);
    if (!p.is_feasible(a)) continue;
    o.any_feasible = true;
    const double v = p.objective().evaluate(a);
    if (v < o.optimum - 1e-9) {
      o.optimum = v;
      o.argmin.clear();
    }
    if (std::abs(v - o.optimum) <= 1e-9) o.argmin.insert(z);
  }
  return o;
}

void expect_equivalent(const pubo::Reformulation& r, const Oracle& o, std::size_t n) {
  const std::size_t total = r.vars.size();
  ASSERT_LE(total, 22u);
  double best = std::numeric_limits<double>::infinity();
  std::set<std::uint64_t> proj;
  for (std::uint64_t z = 0; z < (std::uint64_t{1} << total); ++z) {
    const double v = r.poly.evaluate_bits(z);
    if (v < best - 1e-9) {
      best = v;
      proj.clear();
    }
    if (std::abs(v - best) <= 1e-9) proj.insert(z & ((1u << n) - 1));
  }
  EXPECT_NEAR(best, o.optimum, 1e-9);
  EXPECT_EQ(proj, o.argmin);
}

}  // namespace

class Equivalence : public ::testing::TestWithParam<int> {};

TEST_P(Equivalence, PuboBinaryValued) {
  std::mt19937_64 rng(100 + static_cast<std::uint64_t>(GetParam()));
  constexpr std::size_t n = 6;
  const auto p = random_problem(rng, n);
  const auto o = constrained_oracle(p, n);
  if (!o.any_feasible) GTEST_SKIP() << "no feasible point";
  const auto r = pubo::to_pubo(p, pubo::PuboStyle::BinaryValued);
  EXPECT_EQ(r.num_decision, n);
  expect_equivalent(r, o, n);
  // Every feasible value lies strictly below every infeasible value.
  double worst_feasible = -std::numeric_limits<double>::infinity();
  double best_infeasible = std::numeric_limits<double>::infinity();
  for (std::uint64_t z = 0; z < (1u << n); ++z) {
    const double v = r.poly.evaluate_bits(z);
    if (p.is_feasible(bits_of(z, n))) {
      worst_feasible = std::max(worst_feasible, v);
    } else {
      best_infeasible = std::min(best_infeasible, v);
    }
  }
  EXPECT_LT(worst_feasible, best_infeasible);
}

TEST_P(Equivalence, PuboProductForm) {
  std::mt19937_64 rng(100 + static_cast<std::uint64_t>(GetParam()));
  constexpr std::size_t n = 6;
  const auto p = random_problem(rng, n);
  const auto o = constrained_oracle(p, n);
  if (!o.any_feasible) GTEST_SKIP() << "no feasible point";
  expect_equivalent(pubo::to_pubo(p, pubo::PuboStyle::ProductForm), o, n);
}

TEST_P(Equivalence, QuboSlack) {
  std::mt19937_64 rng(100 + static_cast<std::uint64_t>(GetParam()));
  constexpr std::size_t n = 6;
  const auto p = random_problem(rng, n);
  const auto o = constrained_oracle(p, n);
  if (!o.any_feasible) GTEST_SKIP() << "no feasible point";
  const auto r = pubo::to_qubo_slack(p);
  EXPECT_LE(r.poly.degree(), 2u);
  if (r.vars.size() > 22) GTEST_SKIP() << "extended cube too large";
  expect_equivalent(r, o, n);
}

TEST_P(Equivalence, QuboQuadratizedSmall) {
  // Product penalties grow quickly; keep the problem tiny.
  std::mt19937_64 rng(300 + static_cast<std::uint64_t>(GetParam()));
  constexpr std::size_t n = 4;
  pubo::Problem p;
  for (std::size_t k = 0; k < n; ++k) p.add_binary();
  p.set_objective(x(0) - 2.0 * x(1) + x(2) * x(3) - x(0) * x(1) * x(2) + Polynomial::variable(3, -1.0 * (rng() % 3)));
  p.add_constraint(Relation::LessEqual, x(1) + x(2) + x(3), 1 + static_cast<std::int64_t>(rng() % 2));
  const auto o = constrained_oracle(p, n);
  const auto r = pubo::to_qubo_quadratized(p);
  EXPECT_LE(r.poly.degree(), 2u);
  if (r.vars.size() > 22) GTEST_SKIP() << "extended cube too large";
  expect_equivalent(r, o, n);
}

INSTANTIATE_TEST_SUITE_P(Seeds, Equivalence, ::testing::Range(0, 8));
