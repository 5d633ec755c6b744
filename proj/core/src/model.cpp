#include "pubo/model.hpp"

#include <cmath>
#include <stdexcept>

namespace pubo {

namespace {

bool is_unit_sum(const Polynomial& p, std::vector<VarId>* vars) {
  for (const auto& [key, c] : p.terms()) {
    if (key.size() != 1 || c != 1.0) return false;
  }
  if (vars != nullptr) *vars = p.variables();
  return true;
}

// Simultaneous substitution: each variable v becomes replacement[v].
Polynomial substitute_all(const Polynomial& p, const std::vector<Polynomial>& replacement) {
  Polynomial out;
  for (const auto& [key, c] : p.terms()) {
    Polynomial term = Polynomial::constant(c);
    for (VarId v : key) term = term * replacement.at(v);
    out = out + term;
  }
  return out;
}

}  // namespace

double evaluate_integer(const Polynomial& p, std::span<const std::int64_t> values) {
  double sum = 0.0;
  for (const auto& [key, c] : p.terms()) {
    double term = c;
    for (VarId v : key) term *= static_cast<double>(values[v]);
    sum += term;
  }
  return sum;
}

bool has_integer_coefficients(const Polynomial& p) {
  for (const auto& [key, c] : p.terms()) {
    if (std::abs(c - std::round(c)) > 1e-9) return false;
  }
  return true;
}

std::vector<Constraint> canonicalize(Relation relation, const Polynomial& lhs, std::int64_t rhs) {
  if (!has_integer_coefficients(lhs)) {
    throw std::invalid_argument("constraint coefficients must be integers: " + lhs.to_string());
  }
  ConstraintOrigin origin;
  origin.relation = relation;
  origin.rhs = rhs;
  origin.unit_sum = is_unit_sum(lhs, &origin.unit_vars);
  if (!origin.unit_sum) origin.unit_vars.clear();

  const auto c = static_cast<double>(rhs);
  Constraint le{lhs - c, origin};
  Constraint ge{Polynomial::constant(c) - lhs, origin};
  switch (relation) {
    case Relation::LessEqual:
      return {le};
    case Relation::GreaterEqual:
      return {ge};
    case Relation::Equal:
      ge.origin.mirror = true;
      return {le, ge};
  }
  throw std::logic_error("unreachable relation");
}

VarId Problem::add_var(std::optional<std::int64_t> upper, std::string name) {
  if (upper && *upper < 0) throw std::invalid_argument("variable upper bound must be nonnegative");
  auto id = static_cast<VarId>(vars_.size());
  if (name.empty()) name = "x_" + std::to_string(id);
  vars_.push_back({id, upper, std::move(name)});
  return id;
}

void Problem::add_constraint(Relation relation, const Polynomial& lhs, std::int64_t rhs) {
  for (auto& c : canonicalize(relation, lhs, rhs)) constraints_.push_back(std::move(c));
}

bool Problem::all_binary() const {
  for (const auto& v : vars_) {
    if (!v.upper || *v.upper != 1) return false;
  }
  return true;
}

void Problem::validate() const {
  auto check = [this](const Polynomial& p, const char* what) {
    if (p.var_bound() > vars_.size()) {
      throw std::invalid_argument(std::string(what) + " uses undeclared variable " +
                                  std::to_string(p.var_bound() - 1));
    }
  };
  check(objective_, "objective");
  for (const auto& c : constraints_) check(c.lhs, "constraint");
}

bool Problem::is_feasible(std::span<const std::uint8_t> binary_assignment) const {
  for (const auto& c : constraints_) {
    if (!c.satisfied(binary_assignment)) return false;
  }
  return true;
}

bool Problem::is_feasible_integer(std::span<const std::int64_t> values) const {
  for (const auto& c : constraints_) {
    if (evaluate_integer(c.lhs, values) > 1e-9) return false;
  }
  return true;
}

std::size_t BinCodec::num_bits() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.bits.size();
  return n;
}

std::vector<std::uint8_t> BinCodec::encode(std::span<const std::int64_t> values) const {
  std::vector<std::uint8_t> bits(num_bits(), 0);
  for (const auto& e : entries_) {
    std::int64_t v = values[e.original];
    if (v < 0 || v > e.upper) throw std::out_of_range("value outside variable bounds");
    for (std::size_t j = 0; j < e.bits.size(); ++j) bits[e.bits[j]] = (v >> j) & 1;
  }
  return bits;
}

std::vector<std::int64_t> BinCodec::decode(std::span<const std::uint8_t> bits) const {
  std::vector<std::int64_t> values(entries_.size(), 0);
  for (const auto& e : entries_) {
    std::int64_t v = 0;
    for (std::size_t j = 0; j < e.bits.size(); ++j) {
      if (bits[e.bits[j]] != 0) v += std::int64_t{1} << j;
    }
    values[e.original] = v;
  }
  return values;
}

int bit_width(std::int64_t upper) {
  int bits = 0;
  while (upper > 0) {
    ++bits;
    upper >>= 1;
  }
  return bits;
}

std::pair<Problem, BinCodec> binarize(const Problem& problem) {
  problem.validate();
  Problem out;
  std::vector<BinCodec::Entry> entries;
  std::vector<Polynomial> replacement;
  std::vector<bool> already_binary;

  for (const auto& v : problem.vars()) {
    if (!v.upper) throw std::invalid_argument("variable " + v.name + " has no upper bound");
    BinCodec::Entry e{v.id, *v.upper, {}};
    Polynomial expansion;
    const int width = bit_width(*v.upper);
    for (int j = 0; j < width; ++j) {
      std::string name = width == 1 ? v.name : v.name + "^" + std::to_string(j);
      VarId b = out.add_binary(std::move(name));
      e.bits.push_back(b);
      expansion = expansion + Polynomial::variable(b, std::ldexp(1.0, j));
    }
    replacement.push_back(std::move(expansion));
    already_binary.push_back(*v.upper == 1);
    entries.push_back(std::move(e));
  }

  out.set_objective(substitute_all(problem.objective(), replacement));
  for (const auto& c : problem.constraints()) {
    Constraint nc{substitute_all(c.lhs, replacement), c.origin};
    if (nc.origin.unit_sum) {
      bool keep = true;
      for (VarId& v : nc.origin.unit_vars) {
        if (!already_binary[v]) keep = false;
        else v = entries[v].bits.front();
      }
      if (!keep) {
        nc.origin.unit_sum = false;
        nc.origin.unit_vars.clear();
      }
    }
    out.add_constraint(std::move(nc));
  }
  return {std::move(out), BinCodec(std::move(entries))};
}

}  // namespace pubo
