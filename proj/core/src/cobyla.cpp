#include "pubo/cobyla.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace pubo {

namespace {

using Matrix = std::vector<std::vector<double>>;

// Edge lengths above this multiple of rho, or face distances below the
// second, trigger a geometry step instead of a rho reduction.
constexpr double kMaxEdgeFactor = 2.1;
constexpr double kMinHeightFactor = 0.25;
constexpr double kPoorRatio = 0.1;

// Solves a * x = b by Gaussian elimination with partial pivoting.
std::optional<std::vector<double>> solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-300) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      if (m == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

double abs_det(Matrix a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == 0.0) return 0.0;
    std::swap(a[piv], a[col]);
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
    }
  }
  return std::abs(det);
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

class Simplex {
 public:
  Simplex(const ObjectiveFn& f, const OptimizerOptions& opts, OptimizeResult& out)
      : f_(f), opts_(opts), out_(out) {}

  // Returns nullopt once the evaluation budget is spent.
  std::optional<double> eval(const std::vector<double>& x) {
    if (out_.evaluations >= opts_.max_evals) {
      out_.hit_eval_cap = true;
      return std::nullopt;
    }
    const double v = f_(x);
    ++out_.evaluations;
    out_.trace_points.push_back(x);
    out_.trace_values.push_back(v);
    return v;
  }

  std::vector<std::vector<double>> pts;
  std::vector<double> vals;
  std::size_t pole = 0;

  void update_pole() {
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (vals[k] < vals[pole]) pole = k;
    }
  }

  // Rows are the edges from the pole to every other vertex, in vertex order.
  Matrix edges(std::vector<std::size_t>* order = nullptr) const {
    Matrix e;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k == pole) continue;
      std::vector<double> row(pts[k].size());
      for (std::size_t d = 0; d < row.size(); ++d) row[d] = pts[k][d] - pts[pole][d];
      e.push_back(std::move(row));
      if (order != nullptr) order->push_back(k);
    }
    return e;
  }

  double volume_with(std::size_t replaced, const std::vector<double>& x) const {
    const std::size_t ref = replaced == 0 ? 1 : 0;
    Matrix e;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k == ref) continue;
      const auto& p = (k == replaced) ? x : pts[k];
      const auto& r = pts[ref];
      std::vector<double> row(p.size());
      for (std::size_t d = 0; d < row.size(); ++d) row[d] = p[d] - r[d];
      e.push_back(std::move(row));
    }
    return abs_det(std::move(e));
  }

 private:
  const ObjectiveFn& f_;
  const OptimizerOptions& opts_;
  OptimizeResult& out_;
};

}  // namespace

OptimizeResult minimize_cobyla(const ObjectiveFn& f, std::vector<double> x0, const OptimizerOptions& opts) {
  if (x0.empty()) throw std::invalid_argument("optimizer needs at least one parameter");
  if (!(opts.rho_begin > 0) || !(opts.rho_end > 0) || opts.rho_end > opts.rho_begin) {
    throw std::invalid_argument("need 0 < rho_end <= rho_begin");
  }
  OptimizeResult out;
  const std::size_t n = x0.size();
  Simplex s(f, opts, out);
  double rho = opts.rho_begin;

  auto finish = [&]() {
    s.update_pole();
    if (s.pts.empty()) {
      out.x = x0;
      out.value = std::nan("");
    } else {
      out.x = s.pts[s.pole];
      out.value = s.vals[s.pole];
    }
    return out;
  };

  {
    auto v = s.eval(x0);
    if (!v) return finish();
    s.pts.push_back(x0);
    s.vals.push_back(*v);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = x0;
    x[i] += rho;
    auto v = s.eval(x);
    if (!v) return finish();
    s.pts.push_back(std::move(x));
    s.vals.push_back(*v);
  }

  for (;;) {
    s.update_pole();
    std::vector<std::size_t> order;
    const Matrix e = s.edges(&order);

    // Geometry: every edge at most kMaxEdgeFactor * rho and every vertex at
    // least kMinHeightFactor * rho away from its opposite face.
    std::optional<std::size_t> bad_vertex;
    std::vector<double> bad_normal;
    {
      double worst_edge = 0.0;
      for (std::size_t r = 0; r < e.size(); ++r) {
        const double len = norm(e[r]);
        if (len > kMaxEdgeFactor * rho && len > worst_edge) {
          worst_edge = len;
          bad_vertex = r;
        }
      }
      // Columns of E^-1 are normals of the faces opposite each vertex,
      // scaled so that the vertex height is 1 / |column|.
      Matrix inv(n, std::vector<double>(n, 0.0));
      bool singular = false;
      for (std::size_t c = 0; c < n && !singular; ++c) {
        std::vector<double> unit(n, 0.0);
        unit[c] = 1.0;
        auto col = solve(e, unit);
        if (!col) singular = true;
        else
          for (std::size_t r = 0; r < n; ++r) inv[r][c] = (*col)[r];
      }
      if (singular) {
        // Degenerate simplex: rebuild the edge of the last vertex along an axis.
        bad_vertex = e.size() - 1;
        bad_normal.assign(n, 0.0);
        bad_normal[n - 1] = 1.0;
      } else {
        if (!bad_vertex) {
          double worst_height = kMinHeightFactor * rho;
          for (std::size_t r = 0; r < n; ++r) {
            std::vector<double> col(n);
            for (std::size_t d = 0; d < n; ++d) col[d] = inv[d][r];
            const double height = 1.0 / norm(col);
            if (height < worst_height) {
              worst_height = height;
              bad_vertex = r;
            }
          }
        }
        if (bad_vertex) {
          bad_normal.resize(n);
          for (std::size_t d = 0; d < n; ++d) bad_normal[d] = inv[d][*bad_vertex];
          const double len = norm(bad_normal);
          for (double& v : bad_normal) v /= len;
        }
      }
    }

    std::vector<double> df(n);
    for (std::size_t r = 0; r < n; ++r) df[r] = s.vals[order[r]] - s.vals[s.pole];
    auto grad = solve(e, df);

    bool reduce = false;
    if (grad && norm(*grad) > 0.0) {
      const double gnorm = norm(*grad);
      std::vector<double> trial = s.pts[s.pole];
      for (std::size_t d = 0; d < n; ++d) trial[d] -= rho * (*grad)[d] / gnorm;
      auto ft = s.eval(trial);
      if (!ft) return finish();
      ++out.iterations;
      const double predicted = rho * gnorm;
      const double ratio = (s.vals[s.pole] - *ft) / predicted;

      std::size_t replace = s.pole;
      double best_vol = -1.0;
      for (std::size_t k = 0; k < s.pts.size(); ++k) {
        if (k == s.pole && !(*ft < s.vals[s.pole])) continue;
        const double vol = s.volume_with(k, trial);
        if (vol > best_vol) {
          best_vol = vol;
          replace = k;
        }
      }
      s.pts[replace] = std::move(trial);
      s.vals[replace] = *ft;
      if (ratio >= kPoorRatio) continue;
      reduce = !bad_vertex.has_value();
    } else {
      reduce = !bad_vertex.has_value();
    }

    if (!reduce && bad_vertex) {
      // Geometry step: move the offending vertex to distance rho from the
      // pole along its face normal, on the model's downhill side.
      double slope = 0.0;
      if (grad) {
        for (std::size_t d = 0; d < n; ++d) slope += (*grad)[d] * bad_normal[d];
      }
      const double sign = slope > 0 ? -1.0 : 1.0;
      std::vector<double> x = s.pts[s.pole];
      for (std::size_t d = 0; d < n; ++d) x[d] += sign * rho * bad_normal[d];
      auto v = s.eval(x);
      if (!v) return finish();
      ++out.iterations;
      const std::size_t k = order[*bad_vertex];
      s.pts[k] = std::move(x);
      s.vals[k] = *v;
      continue;
    }

    if (rho <= opts.rho_end) return finish();
    rho *= 0.5;
    if (rho <= 1.5 * opts.rho_end) rho = opts.rho_end;
  }
}

}  // namespace pubo
