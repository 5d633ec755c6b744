#include "pubo/extbp.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pubo/model.hpp"
#include "pubo/reformulate.hpp"

namespace pubo::extbp {

namespace {

constexpr double kTol = 1e-9;

VarTable decision_table(const Instance& inst) {
  VarTable t;
  for (std::size_t i = 0; i < inst.trains.size(); ++i) t.add("x_" + std::to_string(i));
  for (std::size_t i = 0; i < inst.trains.size(); ++i) {
    for (int j : inst.trains[i].groups) t.add("y_" + std::to_string(i) + "_" + std::to_string(j));
  }
  return t;
}

VarId x_var(std::size_t train) { return static_cast<VarId>(train); }

VarId y_var(const Instance& inst, int train, int group) {
  return static_cast<VarId>(inst.num_trains() + static_cast<std::size_t>(inst.y_index(train, group)));
}

std::vector<VarId> group_vars(const Instance& inst, int group, const std::vector<int>& trains) {
  std::vector<VarId> out;
  for (int i : trains) out.push_back(y_var(inst, i, group));
  return out;
}

std::vector<VarId> train_vars(const Instance& inst, int train) {
  std::vector<VarId> out;
  for (int j : inst.trains[static_cast<std::size_t>(train)].groups) out.push_back(y_var(inst, train, j));
  return out;
}

// Bit masks over the packed (x, y) pattern.
struct Masks {
  std::vector<std::uint64_t> group;  // y bits of each group
  std::vector<std::uint64_t> train;  // y bits of each train
};

Masks build_masks(const Instance& inst) {
  Masks m;
  m.group.assign(static_cast<std::size_t>(inst.num_groups), 0);
  m.train.assign(inst.num_trains(), 0);
  const std::size_t n = inst.num_trains();
  std::size_t pos = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (int j : inst.trains[i].groups) {
      const std::uint64_t bit = std::uint64_t{1} << pos++;
      m.group[static_cast<std::size_t>(j)] |= bit;
      m.train[i] |= bit;
    }
  }
  return m;
}

bool feasible_bits(const Instance& inst, const Masks& m, std::uint64_t bits) {
  for (std::uint64_t g : m.group) {
    if (std::popcount(bits & g) > 1) return false;
  }
  for (std::size_t i = 0; i < m.train.size(); ++i) {
    const int cap = ((bits >> i) & 1U) != 0 ? inst.cmax : 0;
    if (std::popcount(bits & m.train[i]) > cap) return false;
  }
  return true;
}

double objective_bits(const Instance& inst, std::uint64_t bits) {
  double v = 0.0;
  const std::size_t n = inst.num_trains();
  std::size_t pos = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (((bits >> i) & 1U) != 0) v += inst.trains[i].cost;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < inst.trains[i].groups.size(); ++k) {
      if (((bits >> pos++) & 1U) != 0) v -= inst.trains[i].benefit;
    }
  }
  return v;
}

void check_shape(const Instance& inst, const Assignment& a) {
  if (a.x.size() != inst.num_trains() || a.y.size() != inst.num_y()) {
    throw std::invalid_argument("assignment shape does not match instance " + inst.name);
  }
}

}  // namespace

std::size_t Instance::num_y() const {
  std::size_t q = 0;
  for (const auto& t : trains) q += t.groups.size();
  return q;
}

void Instance::validate() const {
  if (num_groups < 0) throw std::invalid_argument("num_groups must be nonnegative");
  if (cmax < 1) throw std::invalid_argument("cmax must be at least 1");
  for (std::size_t i = 0; i < trains.size(); ++i) {
    const auto& t = trains[i];
    if (t.cost < 0 || t.benefit < 0) {
      throw std::invalid_argument("train " + std::to_string(i) + " has negative cost or benefit");
    }
    std::vector<bool> seen(static_cast<std::size_t>(num_groups), false);
    for (int g : t.groups) {
      if (g < 0 || g >= num_groups) {
        throw std::invalid_argument("train " + std::to_string(i) + " references group " + std::to_string(g) +
                                    " outside [0, " + std::to_string(num_groups) + ")");
      }
      if (seen[static_cast<std::size_t>(g)]) {
        throw std::invalid_argument("train " + std::to_string(i) + " lists group " + std::to_string(g) + " twice");
      }
      seen[static_cast<std::size_t>(g)] = true;
    }
  }
}

std::vector<std::vector<int>> Instance::trains_of_group() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(num_groups));
  for (std::size_t i = 0; i < trains.size(); ++i) {
    for (int g : trains[i].groups) out[static_cast<std::size_t>(g)].push_back(static_cast<int>(i));
  }
  return out;
}

int Instance::y_index(int train, int group) const {
  int pos = 0;
  for (int i = 0; i < static_cast<int>(trains.size()); ++i) {
    const auto& groups = trains[static_cast<std::size_t>(i)].groups;
    for (int g : groups) {
      if (i == train && g == group) return pos;
      ++pos;
    }
  }
  return -1;
}

Instance builtin_instance(const std::string& name) {
  Instance inst;
  inst.name = name;
  inst.cmax = 2;
  if (name == "A") {
    inst.num_groups = 2;
    inst.trains = {{1, 1, {0}}, {1, 1, {1}}, {1, 1, {0, 1}}};
  } else if (name == "B") {
    inst.num_groups = 4;
    inst.trains = {{1, 1, {0, 1}}, {1, 1, {2, 3}}, {1, 1, {0, 3}}};
  } else if (name == "C") {
    // Group 0 is the centre point shared by the two large trains.
    inst.num_groups = 5;
    inst.trains = {{1, 1, {0, 3, 4}}, {1, 1, {0, 1, 2}}, {1, 1, {3, 4}}};
  } else {
    throw std::invalid_argument("unknown builtin instance '" + name + "' (expected A, B or C)");
  }
  return inst;
}

std::vector<std::string> builtin_names() { return {"A", "B", "C"}; }

Assignment unpack(const Instance& inst, std::uint64_t bits) {
  Assignment a;
  const std::size_t n = inst.num_trains();
  const std::size_t q = inst.num_y();
  a.x.resize(n);
  a.y.resize(q);
  for (std::size_t i = 0; i < n; ++i) a.x[i] = (bits >> i) & 1U;
  for (std::size_t k = 0; k < q; ++k) a.y[k] = (bits >> (n + k)) & 1U;
  return a;
}

std::uint64_t pack(const Instance& inst, const Assignment& a) {
  std::uint64_t bits = 0;
  const std::size_t n = inst.num_trains();
  for (std::size_t i = 0; i < a.x.size(); ++i) bits |= std::uint64_t{a.x[i] != 0} << i;
  for (std::size_t k = 0; k < a.y.size(); ++k) bits |= std::uint64_t{a.y[k] != 0} << (n + k);
  return bits;
}

Assignment project(const Instance& inst, std::span<const std::uint8_t> state) {
  const std::size_t n = inst.num_trains();
  const std::size_t q = inst.num_y();
  if (state.size() < n + q) throw std::invalid_argument("state shorter than the decision variables");
  Assignment a;
  a.x.assign(state.begin(), state.begin() + static_cast<std::ptrdiff_t>(n));
  a.y.assign(state.begin() + static_cast<std::ptrdiff_t>(n), state.begin() + static_cast<std::ptrdiff_t>(n + q));
  return a;
}

double objective_value(const Instance& inst, const Assignment& a) {
  check_shape(inst, a);
  return objective_bits(inst, pack(inst, a));
}

bool is_feasible(const Instance& inst, const Assignment& a) {
  check_shape(inst, a);
  return feasible_bits(inst, build_masks(inst), pack(inst, a));
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::Optimal: return "optimal";
    case Classification::FeasibleNonOptimal: return "feasible";
    case Classification::Infeasible: return "infeasible";
  }
  return "unknown";
}

Classification classify(const Instance& inst, const Assignment& a, double optimum) {
  if (!is_feasible(inst, a)) return Classification::Infeasible;
  return std::abs(objective_value(inst, a) - optimum) <= kTol ? Classification::Optimal
                                                              : Classification::FeasibleNonOptimal;
}

BruteForceResult brute_force(const Instance& inst) {
  inst.validate();
  const std::size_t bits = inst.num_trains() + inst.num_y();
  if (bits > kBruteForceMaxBits) {
    throw std::invalid_argument("instance has " + std::to_string(bits) + " decision bits; brute force cap is " +
                                std::to_string(kBruteForceMaxBits));
  }
  const Masks masks = build_masks(inst);
  BruteForceResult r;
  r.optimum = std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> best;
  const std::uint64_t total = std::uint64_t{1} << bits;
  for (std::uint64_t z = 0; z < total; ++z) {
    if (!feasible_bits(inst, masks, z)) continue;
    const double v = objective_bits(inst, z);
    if (v < r.optimum - kTol) {
      r.optimum = v;
      best.clear();
    }
    if (std::abs(v - r.optimum) <= kTol) best.push_back(z);
  }
  for (std::uint64_t z : best) r.optima.push_back(unpack(inst, z));
  return r;
}

const char* to_string(Formulation f) { return f == Formulation::Pubo ? "pubo" : "qubo"; }

Formulation parse_formulation(const std::string& s) {
  if (s == "pubo" || s == "PUBO") return Formulation::Pubo;
  if (s == "qubo" || s == "QUBO") return Formulation::Qubo;
  throw std::invalid_argument("unknown formulation '" + s + "' (expected pubo or qubo)");
}

Polynomial objective_polynomial(const Instance& inst) {
  std::vector<Monomial> terms;
  for (std::size_t i = 0; i < inst.num_trains(); ++i) {
    terms.push_back({{x_var(i)}, inst.trains[i].cost});
    for (int j : inst.trains[i].groups) {
      terms.push_back({{y_var(inst, static_cast<int>(i), j)}, -inst.trains[i].benefit});
    }
  }
  return Polynomial::from_terms(terms);
}

Encoding to_pubo(const Instance& inst, double lambda_uni, double lambda_capa) {
  inst.validate();
  if (!(lambda_uni > 0) || !(lambda_capa > 0)) throw std::invalid_argument("penalty coefficients must be positive");
  Encoding enc;
  enc.formulation = Formulation::Pubo;
  enc.vars = decision_table(inst);
  enc.num_decision = enc.vars.size();
  enc.lambda_uni = lambda_uni;
  enc.lambda_capa = lambda_capa;

  std::vector<PenaltyTerm> penalties;
  const auto groups = inst.trains_of_group();
  for (int j = 0; j < inst.num_groups; ++j) {
    PenaltyTerm uni = le_penalty(group_vars(inst, j, groups[static_cast<std::size_t>(j)]), 1);
    uni.lambda = lambda_uni;
    penalties.push_back(std::move(uni));
  }
  for (int i = 0; i < static_cast<int>(inst.num_trains()); ++i) {
    const auto ys = train_vars(inst, i);
    const Polynomial x = Polynomial::variable(x_var(static_cast<std::size_t>(i)));
    const Polynomial empty_train = eq_penalty(ys, 0).poly;
    const Polynomial over_capacity = le_penalty(ys, inst.cmax).poly;
    PenaltyTerm capa{(Polynomial::constant(1.0) - x) * empty_train + x * over_capacity,
                     PenaltyKind::BinaryValued, {}, lambda_capa};
    penalties.push_back(std::move(capa));
  }
  enc.poly = compose_unconstrained(objective_polynomial(inst), penalties);
  enc.qubit_count = enc.vars.size();
  return enc;
}

Encoding to_qubo(const Instance& inst, double lambda_uni, double lambda_capa) {
  inst.validate();
  if (!(lambda_uni > 0) || !(lambda_capa > 0)) throw std::invalid_argument("penalty coefficients must be positive");
  Encoding enc;
  enc.formulation = Formulation::Qubo;
  enc.vars = decision_table(inst);
  enc.num_decision = enc.vars.size();
  enc.lambda_uni = lambda_uni;
  enc.lambda_capa = lambda_capa;

  std::vector<PenaltyTerm> penalties;
  const auto groups = inst.trains_of_group();
  for (int j = 0; j < inst.num_groups; ++j) {
    const auto ys = group_vars(inst, j, groups[static_cast<std::size_t>(j)]);
    const auto c = canonicalize(Relation::LessEqual, linear_sum(ys), 1).front();
    PenaltyTerm uni = slack_penalty(c, enc.vars, [j](std::size_t bit, std::size_t width) {
      return width == 1 ? "s_" + std::to_string(j) : "s_" + std::to_string(j) + "_" + std::to_string(bit);
    });
    uni.lambda = lambda_uni;
    penalties.push_back(std::move(uni));
  }
  for (int i = 0; i < static_cast<int>(inst.num_trains()); ++i) {
    const auto ys = train_vars(inst, i);
    const Polynomial lhs = linear_sum(ys) - Polynomial::variable(x_var(static_cast<std::size_t>(i)), inst.cmax);
    const auto c = canonicalize(Relation::LessEqual, lhs, 0).front();
    PenaltyTerm capa = slack_penalty(c, enc.vars, [i](std::size_t bit, std::size_t) {
      return "r_" + std::to_string(i) + "_" + std::to_string(bit);
    });
    capa.lambda = lambda_capa;
    penalties.push_back(std::move(capa));
  }
  enc.poly = compose_unconstrained(objective_polynomial(inst), penalties);
  enc.qubit_count = enc.vars.size();
  return enc;
}

Encoding encode(const Instance& inst, Formulation f) {
  const double lambda = lambda_default(objective_polynomial(inst));
  return f == Formulation::Pubo ? to_pubo(inst, lambda, lambda) : to_qubo(inst, lambda, lambda);
}

std::size_t expected_qubits(const Instance& inst, Formulation f) {
  const std::size_t base = inst.num_trains() + inst.num_y();
  if (f == Formulation::Pubo) return base;
  std::size_t uni = 0;
  for (const auto& g : inst.trains_of_group()) {
    if (g.size() >= 2) ++uni;
  }
  std::size_t busy_trains = 0;
  for (const auto& t : inst.trains) {
    if (!t.groups.empty()) ++busy_trains;
  }
  return base + uni + busy_trains * static_cast<std::size_t>(bit_width(inst.cmax));
}

}  // namespace pubo::extbp
