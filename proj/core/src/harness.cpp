#include "pubo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pubo/reformulate.hpp"
#include "pubo/rng.hpp"

namespace pubo::harness {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw std::runtime_error(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("field '") + key + "': " + e.what());
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

// ---- instances ----

extbp::Instance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("instance JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("instance JSON must be an object");
  extbp::Instance inst;
  inst.name = j.value("name", std::string("instance"));
  // The name lands unquoted in a CSV column.
  if (inst.name.empty() || inst.name.find_first_of(",\"\r\n") != std::string::npos)
    throw std::invalid_argument("instance name must be non-empty and free of commas, quotes and newlines");
  inst.cmax = require<int>(j, "cmax");
  inst.num_groups = require<int>(j, "num_groups");
  const auto trains = require<json>(j, "trains");
  if (!trains.is_array()) throw std::runtime_error("field 'trains' must be an array");
  for (const auto& t : trains) {
    extbp::Train train;
    train.cost = t.value("cost", 1.0);
    train.benefit = t.value("benefit", 1.0);
    train.groups = require<std::vector<int>>(t, "groups");
    inst.trains.push_back(std::move(train));
  }
  inst.validate();
  return inst;
}

std::string instance_to_json(const extbp::Instance& inst) {
  json j;
  j["name"] = inst.name;
  j["cmax"] = inst.cmax;
  j["num_groups"] = inst.num_groups;
  j["trains"] = json::array();
  for (const auto& t : inst.trains) {
    j["trains"].push_back({{"cost", t.cost}, {"benefit", t.benefit}, {"groups", t.groups}});
  }
  return j.dump(2) + "\n";
}

extbp::Instance load_instance(const std::string& path) { return instance_from_json(read_file(path)); }

extbp::Instance resolve_instance(const std::string& spec) {
  const auto names = extbp::builtin_names();
  if (std::find(names.begin(), names.end(), spec) != names.end()) return extbp::builtin_instance(spec);
  return load_instance(spec);
}

// ---- encodings ----

extbp::Encoding build_encoding(const extbp::Instance& inst, extbp::Formulation f, const LambdaOverrides& lambdas) {
  const double lambda = lambda_default(extbp::objective_polynomial(inst));
  const double uni = lambdas.uni.value_or(lambda);
  const double capa = lambdas.capa.value_or(lambda);
  return f == extbp::Formulation::Pubo ? extbp::to_pubo(inst, uni, capa) : extbp::to_qubo(inst, uni, capa);
}

std::string export_polynomial(const extbp::Instance& inst, const extbp::Encoding& enc) {
  json j;
  j["instance"] = inst.name;
  j["formulation"] = extbp::to_string(enc.formulation);
  j["qubit_count"] = enc.qubit_count;
  j["num_decision"] = enc.num_decision;
  j["lambda_uni"] = enc.lambda_uni;
  j["lambda_capa"] = enc.lambda_capa;
  j["degree"] = enc.poly.degree();
  j["variables"] = enc.vars.names();
  j["terms"] = json::array();
  for (const auto& [key, c] : enc.poly.terms()) j["terms"].push_back({{"vars", key}, {"coeff", c}});
  return j.dump(2) + "\n";
}

PolynomialFile import_polynomial(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("polynomial JSON: ") + e.what());
  }
  PolynomialFile f;
  f.vars = VarTable(require<std::vector<std::string>>(j, "variables"));
  f.instance = j.value("instance", std::string());
  f.formulation = j.value("formulation", std::string());
  f.qubit_count = j.value("qubit_count", f.vars.size());
  f.num_decision = j.value("num_decision", std::size_t{0});
  f.lambda_uni = j.value("lambda_uni", 0.0);
  f.lambda_capa = j.value("lambda_capa", 0.0);
  std::vector<Monomial> terms;
  for (const auto& t : require<json>(j, "terms")) {
    Monomial m;
    m.vars = require<std::vector<VarId>>(t, "vars");
    m.coeff = require<double>(t, "coeff");
    for (VarId v : m.vars) {
      if (v >= f.vars.size()) {
        throw std::runtime_error("term uses variable " + std::to_string(v) + " outside the name table");
      }
    }
    terms.push_back(std::move(m));
  }
  f.poly = Polynomial::from_terms(terms);
  return f;
}

// ---- hypercube checks ----

Equivalence check_equivalence(const extbp::Instance& inst, const extbp::Encoding& enc,
                              const extbp::BruteForceResult& exact, const qaoa::CostTable* table) {
  qaoa::CostTable local;
  if (table == nullptr) {
    local = qaoa::build_cost_table(enc.poly, enc.qubit_count);
    table = &local;
  }
  Equivalence eq;
  eq.minimum = *std::min_element(table->values.begin(), table->values.end());
  const std::uint64_t decision_mask = (std::uint64_t{1} << enc.num_decision) - 1;
  std::set<std::uint64_t> projected;
  for (std::uint64_t z = 0; z < table->values.size(); ++z) {
    if (std::abs(table->values[z] - eq.minimum) <= 1e-9) {
      ++eq.minimizers;
      projected.insert(z & decision_mask);
    }
  }
  for (std::uint64_t z : projected) eq.projected.push_back(extbp::unpack(inst, z));
  eq.holds = std::abs(eq.minimum - exact.optimum) <= 1e-9 && eq.projected == exact.optima;
  return eq;
}

std::vector<Check> verify(const extbp::Instance& inst) {
  inst.validate();
  std::vector<Check> out;
  const auto exact = extbp::brute_force(inst);
  const Polynomial objective = extbp::objective_polynomial(inst);
  const Interval bounds = interval_bounds(objective);
  const double lambda = lambda_default(objective);

  {
    // The optimum never exceeds the all-zero assignment, which is feasible
    // and scores 0, and never drops below the interval lower bound.
    const bool ok = exact.optimum <= 1e-9 && exact.optimum >= bounds.lo - 1e-9;
    out.push_back({"optimum", ok, format_double(exact.optimum)});
  }
  {
    bool ok = !exact.optima.empty();
    for (const auto& a : exact.optima) {
      ok = ok && extbp::is_feasible(inst, a) && std::abs(extbp::objective_value(inst, a) - exact.optimum) <= 1e-9;
    }
    out.push_back({"optima", ok, std::to_string(exact.optima.size()) + " optimal assignments"});
  }
  {
    double sum_cost = 0.0;
    double sum_benefit = 0.0;
    for (const auto& t : inst.trains) {
      sum_cost += t.cost;
      sum_benefit += t.benefit * static_cast<double>(t.groups.size());
    }
    const bool ok = std::abs(bounds.lo + sum_benefit) <= 1e-9 && std::abs(bounds.hi - sum_cost) <= 1e-9;
    out.push_back({"interval bounds", ok, "(" + format_double(bounds.lo) + ", " + format_double(bounds.hi) + ")"});
  }
  out.push_back({"default lambda", std::abs(lambda - (bounds.width() + 1)) <= 1e-9, format_double(lambda)});

  for (auto f : {extbp::Formulation::Pubo, extbp::Formulation::Qubo}) {
    const auto enc = extbp::encode(inst, f);
    const std::string tag = extbp::to_string(f);
    const std::size_t want = extbp::expected_qubits(inst, f);
    out.push_back({tag + " qubits", enc.qubit_count == want && enc.poly.var_bound() <= enc.qubit_count,
                   std::to_string(enc.qubit_count) + " (expected " + std::to_string(want) + ")"});
    if (f == extbp::Formulation::Qubo) {
      out.push_back({"qubo degree", enc.poly.degree() <= 2, std::to_string(enc.poly.degree())});
    }
    if (enc.qubit_count > qaoa::kMaxQubits) {
      out.push_back({tag + " equivalence", false, "too many qubits to scan"});
      continue;
    }
    const auto eq = check_equivalence(inst, enc, exact);
    out.push_back({tag + " equivalence", eq.holds,
                   "minimum " + format_double(eq.minimum) + ", " + std::to_string(eq.minimizers) + " minimizers, " +
                       std::to_string(eq.projected.size()) + " projections"});
  }
  return out;
}

// ---- experiments ----

void ExperimentConfig::validate() const {
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (instances.empty()) throw std::invalid_argument("no instances given");
  if (formulations.empty()) throw std::invalid_argument("no formulations given");
  qaoa.validate();
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PUBO_THREADS")) {
    int v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec == std::errc{} && ptr == end && v > 0) return v;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Cell {
    extbp::Instance inst;
    extbp::Encoding enc;
    extbp::BruteForceResult exact;
    qaoa::CostTable table;
  };
  std::vector<Cell> cells;
  for (const auto& spec : cfg.instances) {
    const auto inst = resolve_instance(spec);
    const auto exact = extbp::brute_force(inst);
    for (auto f : cfg.formulations) {
      Cell c{inst, build_encoding(inst, f, cfg.lambdas), exact, {}};
      c.table = qaoa::build_cost_table(c.enc.poly, c.enc.qubit_count);
      cells.push_back(std::move(c));
    }
  }

  const std::size_t per_cell = static_cast<std::size_t>(cfg.runs);
  const std::size_t total = cells.size() * per_cell;
  std::vector<RunRow> rows(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= total) return;
      try {
        const Cell& cell = cells[k / per_cell];
        const int idx = static_cast<int>(k % per_cell);
        const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(idx));
        const auto rec = qaoa::run(cell.table, cfg.qaoa, seed);
        RunRow& r = rows[k];
        r.run_id = idx;
        r.instance = cell.inst.name;
        r.formulation = extbp::to_string(cell.enc.formulation);
        r.seed = seed;
        r.n_qubits = cell.enc.qubit_count;
        r.n_iterations = rec.n_iterations;
        r.n_evals = rec.n_evals;
        r.best_bits = rec.best_bits();
        r.best_loss = rec.best_loss;
        const auto a = extbp::unpack(cell.inst, rec.best_state);
        r.classification = extbp::classify(cell.inst, a, cell.exact.optimum);
        r.wall_ms = cfg.record_timing ? rec.wall_ms : 0.0;
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(total);
        return;
      }
    }
  };

  const int threads = std::min<int>(resolve_threads(cfg.threads), static_cast<int>(std::max<std::size_t>(total, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult out;
  out.rows = std::move(rows);
  out.summary = summarize(out.rows);
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<RunRow>& rows) {
  std::vector<SummaryRow> out;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  struct Acc {
    int optimal = 0, feasible = 0, infeasible = 0;
    long long iterations = 0, evals = 0;
    double wall = 0.0;
  };
  std::vector<Acc> acc;
  for (const auto& r : rows) {
    auto [it, fresh] = index.try_emplace({r.instance, r.formulation}, out.size());
    if (fresh) {
      SummaryRow s;
      s.instance = r.instance;
      s.formulation = r.formulation;
      s.qubits = r.n_qubits;
      out.push_back(s);
      acc.emplace_back();
    }
    SummaryRow& s = out[it->second];
    Acc& a = acc[it->second];
    ++s.runs;
    switch (r.classification) {
      case extbp::Classification::Optimal: ++a.optimal; break;
      case extbp::Classification::FeasibleNonOptimal: ++a.feasible; break;
      case extbp::Classification::Infeasible: ++a.infeasible; break;
    }
    a.iterations += r.n_iterations;
    a.evals += r.n_evals;
    a.wall += r.wall_ms;
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double n = out[k].runs;
    out[k].optimal = acc[k].optimal / n;
    out[k].feasible = acc[k].feasible / n;
    out[k].infeasible = acc[k].infeasible / n;
    out[k].mean_iterations = static_cast<double>(acc[k].iterations) / n;
    out[k].mean_evals = static_cast<double>(acc[k].evals) / n;
    out[k].wall_ms = acc[k].wall;
  }
  return out;
}

namespace {

constexpr const char* kCsvHeader =
    "run_id,instance,formulation,seed,n_qubits,n_iterations,n_evals,best_bits,best_loss_unconstrained,"
    "classification,wall_ms";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

template <typename T>
T parse_number(const std::string& s, const char* column) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error(std::string("bad value '") + s + "' in column " + column);
  }
  return v;
}

extbp::Classification parse_classification(const std::string& s) {
  if (s == "optimal") return extbp::Classification::Optimal;
  if (s == "feasible") return extbp::Classification::FeasibleNonOptimal;
  if (s == "infeasible") return extbp::Classification::Infeasible;
  throw std::runtime_error("unknown classification '" + s + "'");
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<RunRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.run_id << ',' << r.instance << ',' << r.formulation << ',' << r.seed << ',' << r.n_qubits << ','
        << r.n_iterations << ',' << r.n_evals << ',' << r.best_bits << ',' << format_double(r.best_loss) << ','
        << extbp::to_string(r.classification) << ',' << fixed(r.wall_ms, 3) << '\n';
  }
}

std::vector<RunRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kCsvHeader)) {
    throw std::runtime_error("CSV header does not match the run schema");
  }
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 11) throw std::runtime_error("CSV row has " + std::to_string(f.size()) + " fields");
    RunRow r;
    r.run_id = parse_number<int>(f[0], "run_id");
    r.instance = f[1];
    r.formulation = f[2];
    r.seed = parse_number<std::uint64_t>(f[3], "seed");
    r.n_qubits = parse_number<std::size_t>(f[4], "n_qubits");
    r.n_iterations = parse_number<int>(f[5], "n_iterations");
    r.n_evals = parse_number<int>(f[6], "n_evals");
    r.best_bits = f[7];
    r.best_loss = parse_number<double>(f[8], "best_loss_unconstrained");
    r.classification = parse_classification(f[9]);
    r.wall_ms = parse_number<double>(f[10], "wall_ms");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string summary_json(const ExperimentConfig& cfg, const std::vector<SummaryRow>& summary) {
  json j;
  j["config"] = {{"instances", cfg.instances},
                 {"runs", cfg.runs},
                 {"master_seed", cfg.master_seed},
                 {"depth", cfg.qaoa.depth},
                 {"shots", cfg.qaoa.shots},
                 {"max_evals", cfg.qaoa.max_evals},
                 {"rho_begin", cfg.qaoa.rho_begin},
                 {"rho_end", cfg.qaoa.rho_end}};
  j["config"]["formulations"] = json::array();
  for (auto f : cfg.formulations) j["config"]["formulations"].push_back(extbp::to_string(f));
  if (cfg.lambdas.uni) j["config"]["lambda_uni"] = *cfg.lambdas.uni;
  if (cfg.lambdas.capa) j["config"]["lambda_capa"] = *cfg.lambdas.capa;
  j["cells"] = json::array();
  for (const auto& s : summary) {
    j["cells"].push_back({{"instance", s.instance},
                          {"formulation", s.formulation},
                          {"qubits", s.qubits},
                          {"runs", s.runs},
                          {"optimal", s.optimal},
                          {"feasible", s.feasible},
                          {"infeasible", s.infeasible},
                          {"mean_iterations", s.mean_iterations},
                          {"mean_evals", s.mean_evals},
                          {"wall_ms", s.wall_ms}});
  }
  return j.dump(2) + "\n";
}

}  // namespace pubo::harness
