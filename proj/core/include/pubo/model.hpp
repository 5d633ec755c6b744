#pragma once

// Integer polynomial programs: bounded nonnegative integer variables, a
// polynomial objective to minimise and polynomial constraints kept in the
// canonical form lhs <= 0.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pubo/pbf.hpp"

namespace pubo {

struct IntVar {
  VarId id = 0;
  /// Inclusive upper bound; lower bound is 0. Binary variables have upper == 1.
  std::optional<std::int64_t> upper;
  std::string name;
};

enum class Relation { LessEqual, GreaterEqual, Equal };

/// How the user wrote the constraint; kept so that penalty builders can pick
/// a closed-form binary-valued penalty for plain sums of binary variables.
struct ConstraintOrigin {
  Relation relation = Relation::LessEqual;
  std::int64_t rhs = 0;
  /// True when the user-facing lhs was a sum of distinct variables with unit
  /// coefficients and no constant.
  bool unit_sum = false;
  std::vector<VarId> unit_vars;
  /// Second half of an equality split (the >= side); penalty builders that
  /// handle the equality as a whole skip it.
  bool mirror = false;
};

struct Constraint {
  Polynomial lhs;  // feasible iff lhs(x) <= 0
  ConstraintOrigin origin;

  bool satisfied(std::span<const std::uint8_t> assignment) const {
    return lhs.evaluate(assignment) <= 1e-9;
  }
};

/// Evaluates at integer values indexed by VarId. Integer-level polynomials are
/// multilinear in the integer variables (no repeated powers).
double evaluate_integer(const Polynomial& p, std::span<const std::int64_t> values);

/// True when every coefficient is an integer (within 1e-9).
bool has_integer_coefficients(const Polynomial& p);

/// Rewrites `lhs relation rhs` into one (<=, >=) or two (=) canonical
/// constraints. Throws std::invalid_argument on non-integer coefficients.
std::vector<Constraint> canonicalize(Relation relation, const Polynomial& lhs, std::int64_t rhs);

class Problem {
 public:
  Problem() = default;

  VarId add_var(std::optional<std::int64_t> upper, std::string name = {});
  VarId add_binary(std::string name = {}) { return add_var(1, std::move(name)); }

  void set_objective(Polynomial objective) { objective_ = std::move(objective); }
  void add_constraint(Relation relation, const Polynomial& lhs, std::int64_t rhs);
  void add_constraint(Constraint c) { constraints_.push_back(std::move(c)); }

  const std::vector<IntVar>& vars() const { return vars_; }
  const Polynomial& objective() const { return objective_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  bool all_binary() const;
  /// Throws std::invalid_argument if any polynomial uses an undeclared variable.
  void validate() const;

  /// All constraints hold at a 0/1 assignment (binary problems).
  bool is_feasible(std::span<const std::uint8_t> binary_assignment) const;
  /// All constraints hold at integer values indexed by VarId.
  bool is_feasible_integer(std::span<const std::int64_t> values) const;

 private:
  std::vector<IntVar> vars_;
  Polynomial objective_;
  std::vector<Constraint> constraints_;
};

/// Maps each integer variable to its little-endian list of binary variables.
class BinCodec {
 public:
  struct Entry {
    VarId original = 0;
    std::int64_t upper = 0;
    std::vector<VarId> bits;  // weight 2^j for bits[j]
  };

  explicit BinCodec(std::vector<Entry> entries = {}) : entries_(std::move(entries)) {}

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t num_bits() const;

  /// Integer values indexed by original VarId -> 0/1 vector indexed by bit id.
  std::vector<std::uint8_t> encode(std::span<const std::int64_t> values) const;
  std::vector<std::int64_t> decode(std::span<const std::uint8_t> bits) const;

 private:
  std::vector<Entry> entries_;
};

/// Number of bits used for an integer in [0, upper]: floor(log2 upper) + 1,
/// and 0 for upper == 0.
int bit_width(std::int64_t upper);

/// Replaces every integer variable by its binary decomposition. Bits are
/// numbered in declaration order, least significant first.
std::pair<Problem, BinCodec> binarize(const Problem& problem);

}  // namespace pubo
