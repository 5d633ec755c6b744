#include "pubo/reformulate.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace pubo {

namespace {

double binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (std::int64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

double sign_pow(std::int64_t e) { return (e % 2 == 0) ? 1.0 : -1.0; }

void check_symmetric_size(std::span<const VarId> vars) {
  if (vars.size() > kMaxSymmetricVars) {
    throw std::invalid_argument("symmetric penalty over " + std::to_string(vars.size()) +
                                " variables exceeds the cap of " + std::to_string(kMaxSymmetricVars));
  }
}

PenaltyTerm binary_term(Polynomial p) { return {std::move(p), PenaltyKind::BinaryValued, {}, 1.0}; }

VarTable default_table(const Problem& problem) {
  std::vector<std::string> names;
  names.reserve(problem.vars().size());
  for (const auto& v : problem.vars()) names.push_back(v.name);
  return VarTable(std::move(names));
}

void require_binary(const Problem& problem) {
  if (!problem.all_binary()) throw std::invalid_argument("problem must be binarized first");
  problem.validate();
}

}  // namespace

const char* to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::BinaryValued: return "binary-valued";
    case PenaltyKind::ProductForm: return "product-form";
    case PenaltyKind::SlackQuadratic: return "slack-quadratic";
    case PenaltyKind::LinearizationGadget: return "linearization-gadget";
  }
  return "unknown";
}

std::vector<Polynomial> elementary_symmetric(std::span<const VarId> vars) {
  check_symmetric_size(vars);
  std::vector<Polynomial> e(vars.size() + 1);
  e[0] = Polynomial::constant(1.0);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const Polynomial x = Polynomial::variable(vars[i]);
    for (std::size_t k = i + 1; k >= 1; --k) e[k] = e[k] + x * e[k - 1];
  }
  return e;
}

PenaltyTerm eq_penalty(std::span<const VarId> vars, std::int64_t c) {
  const auto n = static_cast<std::int64_t>(vars.size());
  if (c < 0 || c > n) {
    throw std::invalid_argument("sum of " + std::to_string(n) + " binaries cannot equal " + std::to_string(c));
  }
  const auto e = elementary_symmetric(vars);
  Polynomial p;
  if (c == 0) {
    for (std::int64_t k = 1; k <= n; ++k) p = p + sign_pow(k + 1) * e[k];
  } else {
    p = Polynomial::constant(1.0);
    for (std::int64_t k = c; k <= n; ++k) p = p + (sign_pow(k - c + 1) * binomial(k, c)) * e[k];
  }
  return binary_term(std::move(p));
}

PenaltyTerm le_penalty(std::span<const VarId> vars, std::int64_t c) {
  const auto n = static_cast<std::int64_t>(vars.size());
  if (c < 0) throw std::invalid_argument("sum of binaries cannot be <= " + std::to_string(c));
  if (c >= n) return binary_term({});
  const auto e = elementary_symmetric(vars);
  Polynomial p;
  for (std::int64_t k = c + 1; k <= n; ++k) p = p + (sign_pow(k - c + 1) * binomial(k - 1, c)) * e[k];
  return binary_term(std::move(p));
}

PenaltyTerm ge_penalty(std::span<const VarId> vars, std::int64_t c) {
  const auto n = static_cast<std::int64_t>(vars.size());
  if (c < 1) throw std::invalid_argument("ge_penalty needs c >= 1 (c <= 0 is never violated)");
  if (c > n) {
    throw std::invalid_argument("sum of " + std::to_string(n) + " binaries cannot reach " + std::to_string(c));
  }
  const auto e = elementary_symmetric(vars);
  Polynomial p = Polynomial::constant(1.0);
  for (std::int64_t k = c; k <= n; ++k) p = p + (sign_pow(k - c + 1) * binomial(k - 1, c - 1)) * e[k];
  return binary_term(std::move(p));
}

PenaltyTerm product_penalty(const Constraint& c, int ub_cap) {
  if (!has_integer_coefficients(c.lhs)) {
    throw std::invalid_argument("product penalty needs integer coefficients: " + c.lhs.to_string());
  }
  double ub_real = 0.0;
  for (const auto& [key, coeff] : c.lhs.terms()) ub_real += std::abs(coeff);
  const auto ub = static_cast<std::int64_t>(std::llround(ub_real));
  if (ub > ub_cap) {
    throw std::invalid_argument("product penalty needs " + std::to_string(ub + 1) + " factors; cap is " +
                                std::to_string(ub_cap + 1));
  }
  // Every coefficient and partial sum stays an exact integer in a double as
  // long as l1(p) * l1(factor) <= 2^53; past that the penalty could lose its
  // zeros, so refuse instead.
  auto l1 = [](const Polynomial& q) {
    double s = 0.0;
    for (const auto& [key, coeff] : q.terms()) s += std::abs(coeff);
    return s;
  };
  Polynomial p = c.lhs;
  for (std::int64_t j = 1; j <= ub; ++j) {
    if (p.is_zero()) break;
    const Polynomial factor = c.lhs + static_cast<double>(j);
    if (l1(p) * l1(factor) > kExactIntegerLimit) {
      throw std::invalid_argument("product penalty coefficients leave the exact integer range of a double: " +
                                  c.lhs.to_string());
    }
    p = p * factor;
  }
  return {std::move(p), PenaltyKind::ProductForm, {}, 1.0};
}

std::optional<PenaltyTerm> binary_valued_penalty(const Constraint& c) {
  const auto& o = c.origin;
  if (!o.unit_sum) return std::nullopt;
  if (o.mirror) return binary_term({});
  const auto n = static_cast<std::int64_t>(o.unit_vars.size());
  switch (o.relation) {
    case Relation::LessEqual:
      return le_penalty(o.unit_vars, o.rhs);
    case Relation::GreaterEqual:
      if (o.rhs <= 0) return binary_term({});
      return ge_penalty(o.unit_vars, o.rhs);
    case Relation::Equal:
      if (o.rhs < 0 || o.rhs > n) return std::nullopt;
      return eq_penalty(o.unit_vars, o.rhs);
  }
  return std::nullopt;
}

Polynomial pen_lin(VarId xi, VarId xj, VarId y) {
  return Polynomial::from_terms({{{xi, xj}, 1.0}, {{xi, y}, -2.0}, {{xj, y}, -2.0}, {{y}, 3.0}});
}

Quadratized reduce_to_quadratic(const Polynomial& p, double lambda, VarTable& vars) {
  if (vars.size() < p.var_bound()) {
    throw std::invalid_argument("variable table smaller than the polynomial's variable range");
  }
  Quadratized out;
  Polynomial reduced = p;
  Polynomial gadgets;
  for (;;) {
    std::map<std::pair<VarId, VarId>, int> pair_count;
    for (const auto& [key, c] : reduced.terms()) {
      if (key.size() < 3) continue;
      for (std::size_t i = 0; i < key.size(); ++i) {
        for (std::size_t j = i + 1; j < key.size(); ++j) ++pair_count[{key[i], key[j]}];
      }
    }
    if (pair_count.empty()) break;
    auto best = pair_count.begin();
    for (auto it = pair_count.begin(); it != pair_count.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    const auto [a, b] = best->first;
    const VarId y = vars.add("w_" + vars.name(a) + "_" + vars.name(b));
    reduced = replace_product(reduced, a, b, y);
    gadgets = gadgets + pen_lin(a, b, y);
    out.substitutions.push_back({a, b, y});
  }
  out.poly = reduced + lambda * gadgets;
  out.reduced = std::move(reduced);
  return out;
}

Polynomial apply_substitutions(const Polynomial& p, const SubstitutionMap& subs) {
  Polynomial out = p;
  for (const auto& s : subs) out = replace_product(out, s.a, s.b, s.replacement);
  return out;
}

PenaltyTerm slack_penalty(const Constraint& c, VarTable& vars, const SlackNamer& bit_name) {
  if (c.lhs.degree() > 1) {
    throw std::invalid_argument("slack penalty needs a linear constraint: " + c.lhs.to_string());
  }
  if (!has_integer_coefficients(c.lhs)) {
    throw std::invalid_argument("slack penalty needs integer coefficients: " + c.lhs.to_string());
  }
  const Interval range = interval_bounds(c.lhs);
  if (range.lo > 1e-9) {
    throw std::invalid_argument("constraint can never be satisfied: " + c.lhs.to_string() + " <= 0");
  }
  PenaltyTerm term{{}, PenaltyKind::SlackQuadratic, {}, 1.0};
  if (range.hi <= 1e-9) return term;  // never violated

  const auto slack_max = static_cast<std::int64_t>(std::llround(-range.lo));
  const int width = bit_width(slack_max);
  Polynomial shifted = c.lhs;
  for (int k = 0; k < width; ++k) {
    VarId s = vars.add(bit_name(static_cast<std::size_t>(k), static_cast<std::size_t>(width)));
    term.slack_vars.push_back(s);
    shifted = shifted + Polynomial::variable(s, std::ldexp(1.0, k));
  }
  term.poly = shifted * shifted;
  return term;
}

double lambda_default(const Polynomial& objective) { return interval_bounds(objective).width() + 1.0; }

Polynomial compose_unconstrained(const Polynomial& objective, std::span<const PenaltyTerm> penalties) {
  Polynomial out = objective;
  for (const auto& pen : penalties) {
    if (!(pen.lambda > 0.0)) throw std::invalid_argument("penalty coefficients must be positive");
    out = out + pen.lambda * pen.poly;
  }
  return out;
}

Reformulation to_pubo(const Problem& binary, PuboStyle style, std::optional<double> lambda) {
  require_binary(binary);
  Reformulation r;
  r.vars = default_table(binary);
  r.num_decision = binary.vars().size();
  r.lambda = lambda.value_or(lambda_default(binary.objective()));
  for (const auto& c : binary.constraints()) {
    std::optional<PenaltyTerm> pen;
    if (style == PuboStyle::BinaryValued) pen = binary_valued_penalty(c);
    if (!pen) pen = product_penalty(c);
    pen->lambda = r.lambda;
    r.penalties.push_back(std::move(*pen));
  }
  r.poly = compose_unconstrained(binary.objective(), r.penalties);
  return r;
}

Reformulation to_qubo_quadratized(const Problem& binary, std::optional<double> lambda) {
  Reformulation r = to_pubo(binary, PuboStyle::ProductForm, lambda);
  const double gadget_lambda = lambda_default(r.poly);
  Quadratized q = reduce_to_quadratic(r.poly, gadget_lambda, r.vars);
  for (const auto& s : q.substitutions) {
    r.penalties.push_back({pen_lin(s.a, s.b, s.replacement), PenaltyKind::LinearizationGadget, {}, gadget_lambda});
  }
  r.poly = std::move(q.poly);
  return r;
}

Reformulation to_qubo_slack(const Problem& binary, std::optional<double> lambda) {
  require_binary(binary);
  Reformulation r;
  r.vars = default_table(binary);
  r.num_decision = binary.vars().size();
  r.lambda = lambda.value_or(lambda_default(binary.objective()));
  std::size_t index = 0;
  for (const auto& c : binary.constraints()) {
    const std::size_t k = index++;
    if (c.origin.relation == Relation::Equal) {
      if (c.origin.mirror) continue;
      if (c.lhs.degree() > 1) throw std::invalid_argument("slack route needs linear constraints");
      r.penalties.push_back({c.lhs * c.lhs, PenaltyKind::SlackQuadratic, {}, r.lambda});
      continue;
    }
    PenaltyTerm pen = slack_penalty(c, r.vars, [k](std::size_t bit, std::size_t width) {
      return width == 1 ? "s_" + std::to_string(k) : "s_" + std::to_string(k) + "_" + std::to_string(bit);
    });
    pen.lambda = r.lambda;
    r.penalties.push_back(std::move(pen));
  }
  r.poly = compose_unconstrained(binary.objective(), r.penalties);
  if (r.poly.degree() > 2) {
    const double gadget_lambda = lambda_default(r.poly);
    Quadratized q = reduce_to_quadratic(r.poly, gadget_lambda, r.vars);
    for (const auto& s : q.substitutions) {
      r.penalties.push_back({pen_lin(s.a, s.b, s.replacement), PenaltyKind::LinearizationGadget, {}, gadget_lambda});
    }
    r.poly = std::move(q.poly);
  }
  return r;
}

}  // namespace pubo
