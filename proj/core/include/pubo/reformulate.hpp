#pragma once

// Penalty functions that move constraints into the objective, and the
// assembly of unconstrained PUBO / QUBO objectives from them.
//
// Every penalty returned here is 0 on assignments satisfying its constraint
// and >= 1 on violating ones. Binary-valued penalties are exactly 1 on
// violations. Slack penalties reach 0 only for a suitable slack value.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pubo/model.hpp"
#include "pubo/pbf.hpp"

namespace pubo {

enum class PenaltyKind { BinaryValued, ProductForm, SlackQuadratic, LinearizationGadget };

const char* to_string(PenaltyKind kind);

struct PenaltyTerm {
  Polynomial poly;
  PenaltyKind kind = PenaltyKind::BinaryValued;
  std::vector<VarId> slack_vars;
  double lambda = 1.0;
};

/// Largest variable count accepted by the closed-form symmetric penalties.
inline constexpr std::size_t kMaxSymmetricVars = 24;
/// Default cap on UB for product penalties (UB + 1 factors).
inline constexpr int kDefaultProductCap = 20;

/// e_0 .. e_n of the given variables, built by incremental convolution.
std::vector<Polynomial> elementary_symmetric(std::span<const VarId> vars);

/// Penalty for sum(vars) == c: 0 when satisfied, 1 otherwise.
/// Throws std::invalid_argument when c > vars.size() or c < 0.
PenaltyTerm eq_penalty(std::span<const VarId> vars, std::int64_t c);

/// Penalty for sum(vars) <= c. Identically zero when c >= vars.size().
PenaltyTerm le_penalty(std::span<const VarId> vars, std::int64_t c);

/// Penalty for sum(vars) >= c with 1 <= c <= vars.size().
PenaltyTerm ge_penalty(std::span<const VarId> vars, std::int64_t c);

/// Coefficient mass up to which integer polynomial arithmetic in doubles is exact.
inline constexpr double kExactIntegerLimit = 9007199254740992.0;  // 2^53

/// prod_{j=0..UB} (lhs + j), UB = sum |coeff| of lhs. Valid for any
/// integer-coefficient polynomial constraint over binary variables.
/// Throws std::invalid_argument when UB exceeds `ub_cap` or when the
/// expansion would need coefficients beyond kExactIntegerLimit.
PenaltyTerm product_penalty(const Constraint& c, int ub_cap = kDefaultProductCap);

/// Closed-form binary-valued penalty for a unit-coefficient sum constraint.
/// Returns std::nullopt when the constraint is not a plain sum. The mirror
/// half of a split equality gets a zero penalty, since the first half's
/// equality penalty already covers it.
std::optional<PenaltyTerm> binary_valued_penalty(const Constraint& c);

/// x_i x_j - 2 x_i y - 2 x_j y + 3 y: zero iff y == x_i x_j.
Polynomial pen_lin(VarId xi, VarId xj, VarId y);

struct Substitution {
  VarId a = 0;
  VarId b = 0;
  VarId replacement = 0;
};
using SubstitutionMap = std::vector<Substitution>;

struct Quadratized {
  Polynomial poly;
  SubstitutionMap substitutions;
  /// Product-free part before the gadget penalties are added.
  Polynomial reduced;
};

/// Lowers `p` to degree <= 2. Each step picks the pair of variables shared by
/// the most monomials of degree >= 3 (ties: lexicographically smallest pair),
/// replaces that product everywhere by a fresh variable registered in `vars`,
/// and adds lambda * pen_lin for it.
Quadratized reduce_to_quadratic(const Polynomial& p, double lambda, VarTable& vars);

/// Replays substitutions on `p` in order (no gadget terms added).
Polynomial apply_substitutions(const Polynomial& p, const SubstitutionMap& subs);

/// (lhs + s)^2 with s encoded on floor(log2(-min lhs)) + 1 fresh bits.
/// Requires a linear lhs with integer coefficients and min lhs <= 0.
/// A constraint that no assignment violates yields a zero penalty and no
/// slack bits. `bit_name(k, width)` names slack bit k.
using SlackNamer = std::function<std::string(std::size_t bit, std::size_t width)>;
PenaltyTerm slack_penalty(const Constraint& c, VarTable& vars, const SlackNamer& bit_name);

/// (hi - lo) + 1 over the interval bounds of the objective.
double lambda_default(const Polynomial& objective);

/// objective + sum lambda_k * penalty_k. Throws if any lambda <= 0.
Polynomial compose_unconstrained(const Polynomial& objective, std::span<const PenaltyTerm> penalties);

// Whole-problem pipelines over an all-binary Problem.

enum class PuboStyle {
  /// Closed-form 0/1 penalties for unit-sum constraints, product form otherwise.
  BinaryValued,
  /// Product penalty for every constraint.
  ProductForm,
};

struct Reformulation {
  Polynomial poly;
  std::vector<PenaltyTerm> penalties;
  VarTable vars;
  /// Variables [0, num_decision) are the problem's own; the rest are auxiliary.
  std::size_t num_decision = 0;
  double lambda = 0.0;
};

Reformulation to_pubo(const Problem& binary, PuboStyle style, std::optional<double> lambda = {});

/// Product-form PUBO followed by quadratization of the whole objective.
Reformulation to_qubo_quadratized(const Problem& binary, std::optional<double> lambda = {});

/// Squared slack penalties; every constraint must be linear. Equalities use
/// lhs^2 directly. An objective of degree > 2 is quadratized afterwards.
Reformulation to_qubo_slack(const Problem& binary, std::optional<double> lambda = {});

}  // namespace pubo
