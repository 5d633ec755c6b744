#include "pubo/pbf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pubo {

namespace {

MonomialKey normalize_key(std::vector<VarId> vars) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

MonomialKey key_union(const MonomialKey& a, const MonomialKey& b) {
  MonomialKey out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

void Polynomial::accumulate(TermMap& into, MonomialKey key, double coeff) {
  if (coeff == 0.0) return;
  into[std::move(key)] += coeff;
}

void Polynomial::prune(TermMap& terms) {
  std::erase_if(terms, [](const auto& kv) { return std::abs(kv.second) < kZeroThreshold; });
}

Polynomial Polynomial::constant(double value) {
  TermMap t;
  accumulate(t, {}, value);
  prune(t);
  return Polynomial(std::move(t));
}

Polynomial Polynomial::variable(VarId v, double coeff) { return monomial({v}, coeff); }

Polynomial Polynomial::monomial(std::vector<VarId> vars, double coeff) {
  TermMap t;
  accumulate(t, normalize_key(std::move(vars)), coeff);
  prune(t);
  return Polynomial(std::move(t));
}

Polynomial Polynomial::from_terms(const std::vector<Monomial>& terms) {
  TermMap t;
  for (const auto& m : terms) accumulate(t, normalize_key(m.vars), m.coeff);
  prune(t);
  return Polynomial(std::move(t));
}

double Polynomial::constant_term() const { return coefficient({}); }

double Polynomial::coefficient(const MonomialKey& vars) const {
  auto it = terms_.find(vars);
  return it == terms_.end() ? 0.0 : it->second;
}

std::size_t Polynomial::degree() const {
  std::size_t d = 0;
  for (const auto& [key, c] : terms_) d = std::max(d, key.size());
  return d;
}

std::vector<VarId> Polynomial::variables() const {
  std::vector<VarId> out;
  for (const auto& [key, c] : terms_) out.insert(out.end(), key.begin(), key.end());
  return normalize_key(std::move(out));
}

std::size_t Polynomial::var_bound() const {
  std::size_t bound = 0;
  for (const auto& [key, c] : terms_) {
    if (!key.empty()) bound = std::max<std::size_t>(bound, key.back() + 1);
  }
  return bound;
}

double Polynomial::evaluate(std::span<const std::uint8_t> assignment) const {
  double sum = 0.0;
  for (const auto& [key, c] : terms_) {
    bool on = true;
    for (VarId v : key) {
      if (v >= assignment.size()) {
        throw std::out_of_range("assignment has no value for variable " + std::to_string(v));
      }
      if (assignment[v] == 0) on = false;
    }
    if (on) sum += c;
  }
  return sum;
}

double Polynomial::evaluate_bits(std::uint64_t bits) const {
  double sum = 0.0;
  for (const auto& [key, c] : terms_) {
    bool on = true;
    for (VarId v : key) {
      if (v >= 64) throw std::out_of_range("variable " + std::to_string(v) + " exceeds 64-bit assignment");
      if (((bits >> v) & 1U) == 0) {
        on = false;
        break;
      }
    }
    if (on) sum += c;
  }
  return sum;
}

Polynomial Polynomial::operator-() const { return scaled(-1.0); }

Polynomial Polynomial::scaled(double factor) const {
  TermMap t;
  for (const auto& [key, c] : terms_) accumulate(t, key, c * factor);
  prune(t);
  return Polynomial(std::move(t));
}

Polynomial operator+(const Polynomial& p, const Polynomial& q) { return add(p, q); }
Polynomial operator-(const Polynomial& p, const Polynomial& q) { return add(p, -q); }
Polynomial operator*(const Polynomial& p, const Polynomial& q) { return multiply(p, q); }

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : terms_) {
    double mag = c;
    if (!first) {
      os << (c < 0 ? " - " : " + ");
      mag = std::abs(c);
    } else if (c < 0) {
      os << "-";
      mag = -c;
    }
    first = false;
    if (key.empty() || mag != 1.0) os << mag;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (i > 0 || mag != 1.0) os << "*";
      os << "x" << key[i];
    }
  }
  return os.str();
}

Polynomial add(const Polynomial& p, const Polynomial& q) {
  Polynomial::TermMap t = p.terms_;
  for (const auto& [key, c] : q.terms_) Polynomial::accumulate(t, key, c);
  Polynomial::prune(t);
  return Polynomial(std::move(t));
}

Polynomial multiply(const Polynomial& p, const Polynomial& q) {
  Polynomial::TermMap t;
  for (const auto& [ka, ca] : p.terms_) {
    for (const auto& [kb, cb] : q.terms_) {
      Polynomial::accumulate(t, key_union(ka, kb), ca * cb);
    }
  }
  Polynomial::prune(t);
  return Polynomial(std::move(t));
}

Polynomial substitute(const Polynomial& p, VarId v, const Polynomial& r) {
  Polynomial::TermMap t;
  for (const auto& [key, c] : p.terms_) {
    auto it = std::lower_bound(key.begin(), key.end(), v);
    if (it == key.end() || *it != v) {
      Polynomial::accumulate(t, key, c);
      continue;
    }
    MonomialKey rest(key.begin(), it);
    rest.insert(rest.end(), it + 1, key.end());
    for (const auto& [rk, rc] : r.terms_) {
      Polynomial::accumulate(t, key_union(rest, rk), c * rc);
    }
  }
  Polynomial::prune(t);
  return Polynomial(std::move(t));
}

Polynomial replace_product(const Polynomial& p, VarId a, VarId b, VarId y) {
  Polynomial::TermMap t;
  for (const auto& [key, c] : p.terms_) {
    bool has_a = std::binary_search(key.begin(), key.end(), a);
    bool has_b = std::binary_search(key.begin(), key.end(), b);
    if (!(has_a && has_b)) {
      Polynomial::accumulate(t, key, c);
      continue;
    }
    MonomialKey rest;
    for (VarId v : key) {
      if (v != a && v != b) rest.push_back(v);
    }
    rest.push_back(y);
    Polynomial::accumulate(t, normalize_key(std::move(rest)), c);
  }
  Polynomial::prune(t);
  return Polynomial(std::move(t));
}

Polynomial linear_sum(std::span<const VarId> vars) {
  std::vector<Monomial> terms;
  terms.reserve(vars.size());
  for (VarId v : vars) terms.push_back({{v}, 1.0});
  return Polynomial::from_terms(terms);
}

Interval interval_bounds(const Polynomial& p) {
  Interval iv;
  for (const auto& [key, c] : p.terms()) {
    if (key.empty()) {
      iv.lo += c;
      iv.hi += c;
    } else if (c < 0) {
      iv.lo += c;
    } else {
      iv.hi += c;
    }
  }
  return iv;
}

bool approx_equal(const Polynomial& p, const Polynomial& q, double tol) {
  Polynomial diff = p - q;
  return std::all_of(diff.terms().begin(), diff.terms().end(),
                     [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

VarId VarTable::add(std::string name) {
  names_.push_back(std::move(name));
  return static_cast<VarId>(names_.size() - 1);
}

}  // namespace pubo
