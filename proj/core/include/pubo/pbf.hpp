#pragma once

// Multilinear pseudo-Boolean polynomials over binary variables.
//
// A Polynomial maps a sorted, duplicate-free list of variable ids to a real
// coefficient. Because every variable is binary, x*x = x and products simply
// take the union of the variable sets. Values are immutable: every operation
// returns a new Polynomial.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pubo {

using VarId = std::uint32_t;

/// Sorted, duplicate-free set of variables; the empty key is the constant term.
using MonomialKey = std::vector<VarId>;

struct Monomial {
  MonomialKey vars;
  double coeff = 0.0;
};

/// Terms whose |coeff| falls below this are dropped.
inline constexpr double kZeroThreshold = 1e-12;

class Polynomial {
 public:
  using TermMap = std::map<MonomialKey, double>;

  Polynomial() = default;

  static Polynomial constant(double value);
  static Polynomial variable(VarId v, double coeff = 1.0);
  /// Builds coeff * prod(vars). Repeated variables collapse (x*x = x).
  static Polynomial monomial(std::vector<VarId> vars, double coeff = 1.0);
  static Polynomial from_terms(const std::vector<Monomial>& terms);

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  double constant_term() const;
  double coefficient(const MonomialKey& vars) const;
  std::size_t degree() const;
  /// Distinct variables appearing in any term, ascending.
  std::vector<VarId> variables() const;
  /// One past the largest variable id, or 0 for a constant.
  std::size_t var_bound() const;

  /// Evaluates at a dense 0/1 assignment indexed by VarId.
  /// Throws std::out_of_range naming the first variable with no value.
  double evaluate(std::span<const std::uint8_t> assignment) const;
  /// Evaluates with bit k of `bits` as the value of variable k (ids < 64).
  double evaluate_bits(std::uint64_t bits) const;

  Polynomial operator-() const;
  Polynomial scaled(double factor) const;

  friend Polynomial operator+(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator-(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(double s, const Polynomial& p) { return p.scaled(s); }
  friend Polynomial operator+(const Polynomial& p, double c) { return p + constant(c); }
  friend Polynomial operator-(const Polynomial& p, double c) { return p + constant(-c); }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  std::string to_string() const;

 private:
  explicit Polynomial(TermMap terms) : terms_(std::move(terms)) {}
  static void accumulate(TermMap& into, MonomialKey key, double coeff);
  static void prune(TermMap& terms);

  TermMap terms_;

  friend Polynomial add(const Polynomial&, const Polynomial&);
  friend Polynomial multiply(const Polynomial&, const Polynomial&);
  friend Polynomial substitute(const Polynomial&, VarId, const Polynomial&);
  friend Polynomial replace_product(const Polynomial&, VarId, VarId, VarId);
};

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial multiply(const Polynomial& p, const Polynomial& q);

/// Replaces every occurrence of `v` by the polynomial `r`.
Polynomial substitute(const Polynomial& p, VarId v, const Polynomial& r);

/// Replaces the product a*b by `y` in every monomial containing both.
Polynomial replace_product(const Polynomial& p, VarId a, VarId b, VarId y);

/// Sum of a list of variables with unit coefficients.
Polynomial linear_sum(std::span<const VarId> vars);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Bounds from the sign of each coefficient: every monomial is 0 or coeff on
/// the hypercube, so [lo, hi] always brackets the true range.
Interval interval_bounds(const Polynomial& p);

/// Coefficient-wise comparison with absolute tolerance.
bool approx_equal(const Polynomial& p, const Polynomial& q, double tol = 1e-9);

/// Symbolic names for variables, indexed by VarId.
class VarTable {
 public:
  VarTable() = default;
  explicit VarTable(std::vector<std::string> names) : names_(std::move(names)) {}

  VarId add(std::string name);
  const std::string& name(VarId v) const { return names_.at(v); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

}  // namespace pubo
