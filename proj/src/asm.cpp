#include "vtraj/asm.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "vtraj/errors.hpp"
#include "vtraj/format.hpp"
#include "vtraj/parallel.hpp"

namespace vtraj {

namespace {

// Lower envelope of parabolas (Felzenszwalb-Huttenlocher) over one line:
// given squared distances f[q] and their source labels, returns for every q
// the minimum of f[p] + (q - p)^2 and the label of the minimizing p.
void envelope_1d(const std::vector<double>& f, const std::vector<Eigen::Index>& label_in,
                 std::vector<double>& d, std::vector<Eigen::Index>& label_out) {
  const std::size_t n = f.size();
  std::vector<std::size_t> v(n);
  std::vector<double> z(n + 1);
  const double inf = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  std::size_t first = n;
  for (std::size_t q = 0; q < n; ++q)
    if (std::isfinite(f[q])) {
      first = q;
      break;
    }
  d.assign(n, inf);
  label_out.assign(n, -1);
  if (first == n) return;
  v[0] = first;
  z[0] = -inf;
  z[1] = inf;
  for (std::size_t q = first + 1; q < n; ++q) {
    if (!std::isfinite(f[q])) continue;
    const auto intersect = [&](std::size_t p) {
      const auto qd = static_cast<double>(q), pd = static_cast<double>(p);
      return ((f[q] + qd * qd) - (f[p] + pd * pd)) / (2.0 * qd - 2.0 * pd);
    };
    double s = intersect(v[k]);
    while (s <= z[k]) s = intersect(v[--k]);
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    const double diff = static_cast<double>(q) - static_cast<double>(v[k]);
    d[q] = diff * diff + f[v[k]];
    label_out[q] = label_in[v[k]];
  }
}

// Row-major index of the nearest data cell (Euclidean in cell units) for every cell.
template <typename Mask>
std::vector<Eigen::Index> nearest_data_cells(const Mask& has_data, Eigen::Index nt, Eigen::Index nx) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(nt * nx), inf);
  std::vector<Eigen::Index> label(static_cast<std::size_t>(nt * nx), -1);
  std::vector<double> f, d;
  std::vector<Eigen::Index> lin, lout;

  // Pass along t for each column.
  f.resize(static_cast<std::size_t>(nt));
  lin.resize(static_cast<std::size_t>(nt));
  for (Eigen::Index j = 0; j < nx; ++j) {
    for (Eigen::Index i = 0; i < nt; ++i) {
      f[static_cast<std::size_t>(i)] = has_data(i, j) ? 0.0 : inf;
      lin[static_cast<std::size_t>(i)] = i * nx + j;
    }
    envelope_1d(f, lin, d, lout);
    for (Eigen::Index i = 0; i < nt; ++i) {
      dist[static_cast<std::size_t>(i * nx + j)] = d[static_cast<std::size_t>(i)];
      label[static_cast<std::size_t>(i * nx + j)] = lout[static_cast<std::size_t>(i)];
    }
  }
  // Pass along x' for each row.
  f.resize(static_cast<std::size_t>(nx));
  lin.resize(static_cast<std::size_t>(nx));
  for (Eigen::Index i = 0; i < nt; ++i) {
    for (Eigen::Index j = 0; j < nx; ++j) {
      f[static_cast<std::size_t>(j)] = dist[static_cast<std::size_t>(i * nx + j)];
      lin[static_cast<std::size_t>(j)] = label[static_cast<std::size_t>(i * nx + j)];
    }
    envelope_1d(f, lin, d, lout);
    for (Eigen::Index j = 0; j < nx; ++j) label[static_cast<std::size_t>(i * nx + j)] = lout[static_cast<std::size_t>(j)];
  }
  return label;
}

}  // namespace

void AsmParams::validate() const {
  if (!(c_free > 0.0)) throw ConfigError("c_free must be positive");
  if (!(c_cong < 0.0)) throw ConfigError("c_cong must be negative");
  if (!(dv > 0.0)) throw ConfigError("dv must be positive");
  if (!(sigma > 0.0) || !(tau > 0.0)) throw ConfigError("sigma and tau must be positive");
  if (!(cutoff >= 1.0)) throw ConfigError("cutoff must be >= 1");
  if (!std::isfinite(v_crit)) throw ConfigError("v_crit must be finite");
}

DirectionalPass directional_pass(const RawSpeedField& raw, double c, const AsmParams& params, int jobs) {
  params.validate();
  if (c == 0.0 || !std::isfinite(c)) throw ConfigError("characteristic speed must be nonzero");
  const GridSpec& g = raw.grid;
  if (raw.nonempty_count() == 0) throw DataError("no data");

  const double reach_x = params.cutoff * params.sigma;
  const double reach_t = params.cutoff * params.tau;
  const Eigen::Index row_reach = static_cast<Eigen::Index>(std::ceil((reach_t + reach_x / std::abs(c)) / g.dt));

  DirectionalPass out;
  out.z.resize(g.nt, g.nx);
  out.n.resize(g.nt, g.nx);

  parallel_for(static_cast<std::size_t>(g.nt), jobs, [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    const double t = g.t_center(i);
    const Eigen::Index i_lo = std::max<Eigen::Index>(0, i - row_reach);
    const Eigen::Index i_hi = std::min<Eigen::Index>(g.nt - 1, i + row_reach);
    for (Eigen::Index j = 0; j < g.nx; ++j) {
      const double x = g.x_center(i, j);
      double num = 0.0, den = 0.0;
      for (Eigen::Index i2 = i_lo; i2 <= i_hi; ++i2) {
        const double dt_row = g.t_center(i2) - t;
        // Offsets dx allowed by both the spatial and the characteristic-time window.
        double dx_lo = c > 0 ? c * (dt_row - reach_t) : c * (dt_row + reach_t);
        double dx_hi = c > 0 ? c * (dt_row + reach_t) : c * (dt_row - reach_t);
        dx_lo = std::max(dx_lo, -reach_x);
        dx_hi = std::min(dx_hi, reach_x);
        if (dx_lo > dx_hi) continue;
        const double row_shift = g.cwave * (g.t_center(i2) - g.t0);
        const double col_lo = std::ceil((x + dx_lo - row_shift - g.x0) / g.dx - 0.5);
        const double col_hi = std::floor((x + dx_hi - row_shift - g.x0) / g.dx - 0.5);
        const Eigen::Index j_lo = static_cast<Eigen::Index>(std::max(col_lo, 0.0));
        const Eigen::Index j_hi = static_cast<Eigen::Index>(std::min(col_hi, static_cast<double>(g.nx - 1)));
        for (Eigen::Index j2 = j_lo; j2 <= j_hi; ++j2) {
          const double v = raw.v(i2, j2);
          if (std::isnan(v)) continue;
          const double dx = g.x_center(i2, j2) - x;
          const double phi = kernel_weight(dt_row - dx / c, dx, params.sigma, params.tau, params.cutoff);
          const double weight = raw.ttt(i2, j2) * phi;
          num += weight * v;
          den += weight;
        }
      }
      out.n(i, j) = den;
      out.z(i, j) = den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
    }
  });
  return out;
}

SmoothedField blend(const FieldArray& z_free, const FieldArray& z_cong, const FieldArray& n_free,
                    const FieldArray& n_cong, const GridSpec& grid, const AsmParams& params) {
  params.validate();
  if (z_free.rows() != grid.nt || z_free.cols() != grid.nx || z_cong.rows() != grid.nt ||
      z_cong.cols() != grid.nx || n_free.rows() != grid.nt || n_free.cols() != grid.nx ||
      n_cong.rows() != grid.nt || n_cong.cols() != grid.nx)
    throw DataError("blend inputs do not share the grid");

  const FieldArray free = (n_free > 0.0).select(z_free, z_cong);
  const FieldArray cong = (n_cong > 0.0).select(z_cong, z_free);

  SmoothedField out;
  out.grid = grid;
  out.params = params;
  out.w = congestion_weight(free.min(cong), params);
  out.v = free + out.w * (cong - free);
  return out;
}

SmoothedField smooth(const RawSpeedField& raw, const AsmParams& params, int jobs) {
  const auto free = directional_pass(raw, params.c_free, params, jobs);
  const auto cong = directional_pass(raw, params.c_cong, params, jobs);
  SmoothedField out = blend(free.z, cong.z, free.n, cong.n, raw.grid, params);

  const GridSpec& g = raw.grid;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index i = 0; i < g.nt; ++i)
    for (Eigen::Index j = 0; j < g.nx; ++j)
      if (!raw.empty_at(i, j)) {
        lo = std::min(lo, raw.v(i, j));
        hi = std::max(hi, raw.v(i, j));
      }

  // Cells no kernel reaches: nearest data cell in (row, sheared column) units.
  if (!out.v.isNaN().any()) {
    out.v = out.v.max(lo).min(hi);
    return out;
  }
  const auto nearest = nearest_data_cells([&raw](Eigen::Index i, Eigen::Index j) { return !raw.empty_at(i, j); }, g.nt, g.nx);
  for (Eigen::Index i = 0; i < g.nt; ++i) {
    for (Eigen::Index j = 0; j < g.nx; ++j) {
      if (!std::isnan(out.v(i, j))) continue;
      const Eigen::Index k = nearest[static_cast<std::size_t>(i * g.nx + j)];
      const double value = raw.v(k / g.nx, k % g.nx);
      out.v(i, j) = value;
      out.w(i, j) = 0.5 * (1.0 + std::tanh((params.v_crit - value) / params.dv));
    }
  }
  out.v = out.v.max(lo).min(hi);
  return out;
}

std::string format_asm_params(const AsmParams& p) {
  std::string s = "asm cfree=";
  append_number(s, p.c_free);
  s += " ccong=";
  append_number(s, p.c_cong);
  s += " vc=";
  append_number(s, p.v_crit);
  s += " dv=";
  append_number(s, p.dv);
  s += " sigma=";
  append_number(s, p.sigma);
  s += " tau=";
  append_number(s, p.tau);
  s += " cutoff=";
  append_number(s, p.cutoff);
  return s;
}

bool parse_asm_params(const std::string& note, AsmParams& p) {
  std::istringstream ss(note);
  std::string token;
  if (!(ss >> token) || token != "asm") return false;
  AsmParams out = p;
  while (ss >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) return false;
    const std::string key = token.substr(0, eq);
    double v = 0.0;
    if (!parse_number(token.substr(eq + 1), v)) return false;
    if (key == "cfree") out.c_free = v;
    else if (key == "ccong") out.c_cong = v;
    else if (key == "vc") out.v_crit = v;
    else if (key == "dv") out.dv = v;
    else if (key == "sigma") out.sigma = v;
    else if (key == "tau") out.tau = v;
    else if (key == "cutoff") out.cutoff = v;
    else return false;
  }
  p = out;
  return true;
}

}  // namespace vtraj
