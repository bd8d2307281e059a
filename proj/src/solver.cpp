#include "nsquant/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "nsquant/errors.hpp"
#include "nsquant/flags.hpp"
#include "nsquant/mathutil.hpp"

namespace nsquant {

double check_loss(double alpha, double x) {
  return x >= 0 ? alpha * x : (alpha - 1.0) * x;
}

double psi(double alpha, double x) { return x <= 0 ? alpha - 1.0 : alpha; }

double weighted_quantile_lower(std::span<const double> y,
                               std::span<const double> w, double alpha) {
  if (y.empty() || y.size() != w.size())
    throw ValidationError("weighted quantile: empty or mismatched inputs");
  if (!(alpha > 0 && alpha < 1))
    throw ValidationError("weighted quantile: alpha must be in (0, 1)");
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&y](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  double total = 0;
  for (double wi : w) {
    if (!(wi > 0)) throw ValidationError("weighted quantile: weights must be > 0");
    total += wi;
  }
  const double target = alpha * total;
  double cum = 0;
  for (std::size_t k : order) {
    cum += w[k];
    // Lower convention: first value whose cumulative weight reaches the target.
    if (cum + 1e-12 * total >= target) return y[k];
  }
  return y[order.back()];
}

namespace {

struct LinePoint {
  double s, y, w;
};

double line_loss(const std::vector<LinePoint>& pts, double alpha, double b0,
                 double b1) {
  double loss = 0;
  for (const auto& p : pts) loss += p.w * check_loss(alpha, p.y - b0 - b1 * p.s);
  return loss;
}

// Loss of the line through anchor points a and b; residuals at the anchors are
// pinned to exactly zero so ties at the vertex cost nothing.
double vertex_loss(const std::vector<LinePoint>& pts, double alpha,
                   std::size_t a, std::size_t b, double b1) {
  double loss = 0;
  const double sa = pts[a].s, ya = pts[a].y;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k == a || k == b) continue;
    loss += pts[k].w * check_loss(alpha, pts[k].y - ya - b1 * (pts[k].s - sa));
  }
  return loss;
}

struct Candidate {
  double loss = std::numeric_limits<double>::infinity();
  double b0 = 0, b1 = 0;
  std::size_t a = 0, b = 0;  // anchor indices; a == b marks a flat line
};

void consider(Candidate& best, const Candidate& cand) {
  if (!std::isfinite(best.loss)) {
    best = cand;
    return;
  }
  const double tol = 1e-12 * (1.0 + std::abs(best.loss));
  if (cand.loss < best.loss - tol) {
    best = cand;
    return;
  }
  if (cand.loss <= best.loss + tol) {
    // Tie: keep the lexicographically smaller (b0, b1).
    if (cand.b0 < best.b0 ||
        (cand.b0 == best.b0 && cand.b1 < best.b1))
      best = cand;
  }
}

// Exhaustive search over lines through two window points (plus flat lines
// through one).  The minimum of the piecewise-linear convex loss sits on such
// a vertex whenever the window has two distinct times.
Candidate enumerate_vertices(const std::vector<LinePoint>& pts, double alpha) {
  Candidate best;
  const std::size_t m = pts.size();
  for (std::size_t i = 0; i < m; ++i) {
    Candidate flat;
    flat.b1 = 0;
    flat.b0 = pts[i].y;
    flat.a = flat.b = i;
    flat.loss = line_loss(pts, alpha, flat.b0, 0.0);
    consider(best, flat);
    for (std::size_t j = i + 1; j < m; ++j) {
      const double ds = pts[j].s - pts[i].s;
      if (std::abs(ds) < 1e-13) continue;
      Candidate c;
      c.b1 = (pts[j].y - pts[i].y) / ds;
      c.b0 = pts[i].y - c.b1 * pts[i].s;
      c.a = i;
      c.b = j;
      c.loss = vertex_loss(pts, alpha, i, j, c.b1);
      consider(best, c);
    }
  }
  return best;
}

// Among the k points with the smallest residuals under (b0, b1), find the best
// two-point vertex.
Candidate polish(const std::vector<LinePoint>& pts, double alpha, double b0,
                 double b1, std::size_t k) {
  const std::size_t m = pts.size();
  k = std::min(k, m);
  static thread_local std::vector<std::size_t> idx;
  idx.resize(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&](std::size_t x, std::size_t y) {
                      const double rx = pts[x].y - b0 - b1 * pts[x].s;
                      const double ry = pts[y].y - b0 - b1 * pts[y].s;
                      return std::abs(rx) < std::abs(ry);
                    });
  Candidate out;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const std::size_t a = idx[i], b = idx[j];
      const double ds = pts[b].s - pts[a].s;
      if (std::abs(ds) < 1e-13) continue;
      Candidate c;
      c.b1 = (pts[b].y - pts[a].y) / ds;
      c.b0 = pts[a].y - c.b1 * pts[a].s;
      c.a = a;
      c.b = b;
      c.loss = vertex_loss(pts, alpha, a, b, c.b1);
      consider(out, c);
    }
  }
  return out;
}

// Exact active-set descent on the piecewise linear convex loss.  At the
// current vertex the loss kinks only along directions that keep some
// zero-residual point pinned, so testing the one-sided derivative on every
// ray {+-d_p : p active, d_p = (-s_p, 1)} is a complete optimality check:
// inside each cone between adjacent rays the loss is linear, hence
// nonnegative derivatives on all rays imply a global minimum.  A negative
// ray derivative triggers an exact line minimization along that edge (walk
// the residual sign crossings until the cumulative derivative turns
// nonnegative).  Each pivot strictly decreases the loss, so the walk
// terminates; the guard only trips on pathological float behavior and the
// caller then falls back to enumeration.
bool pivot_descend(const std::vector<LinePoint>& pts, double alpha,
                   Candidate& vert) {
  const std::size_t m = pts.size();
  double res_scale = 1.0;
  for (const auto& p : pts) res_scale = std::max(res_scale, std::abs(p.y));
  const double act_tol = 1e-10 * res_scale;

  static thread_local std::vector<double> res;
  static thread_local std::vector<std::size_t> active;
  struct Crossing {
    double tau, jump;
    std::size_t k;
  };
  static thread_local std::vector<Crossing> cross;

  for (int iter = 0; iter < 200; ++iter) {
    res.resize(m);
    active.clear();
    double loss_now = 0;
    for (std::size_t k = 0; k < m; ++k) {
      res[k] = pts[k].y - vert.b0 - vert.b1 * pts[k].s;
      loss_now += pts[k].w * check_loss(alpha, res[k]);
      if (std::abs(res[k]) <= act_tol) active.push_back(k);
    }
    if (active.empty()) return false;

    // Most negative ray derivative over the fan.
    double best_deriv = 0, best_scale = 1.0;
    std::size_t best_p = 0;
    double best_sigma = 1.0;
    for (std::size_t p : active) {
      for (double sigma : {1.0, -1.0}) {
        double deriv = 0, scale = 0;
        for (std::size_t k = 0; k < m; ++k) {
          const double dr = sigma * (pts[p].s - pts[k].s);
          if (dr == 0.0) continue;
          const double side =
              std::abs(res[k]) <= act_tol ? dr : res[k];
          deriv += pts[k].w * (side < 0 ? alpha - 1.0 : alpha) * dr;
          scale += pts[k].w * std::abs(dr);
        }
        if (scale > 0 && deriv * best_scale < best_deriv * scale) {
          best_deriv = deriv;
          best_scale = scale;
          best_p = p;
          best_sigma = sigma;
        }
      }
    }
    if (best_deriv >= -1e-10 * best_scale) return true;

    // Exact line minimization along the chosen edge.
    cross.clear();
    double deriv = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const double dr = best_sigma * (pts[best_p].s - pts[k].s);
      if (dr == 0.0) continue;
      const bool is_active = std::abs(res[k]) <= act_tol;
      const double side = is_active ? dr : res[k];
      deriv += pts[k].w * (side < 0 ? alpha - 1.0 : alpha) * dr;
      if (is_active) continue;
      const double tau = -res[k] / dr;
      if (tau > 0) cross.push_back({tau, pts[k].w * std::abs(dr), k});
    }
    std::sort(cross.begin(), cross.end(),
              [](const Crossing& a, const Crossing& b) { return a.tau < b.tau; });
    std::size_t stop = cross.size();
    for (std::size_t c = 0; c < cross.size(); ++c) {
      deriv += cross[c].jump;
      if (deriv >= 0) {
        stop = c;
        break;
      }
    }
    if (stop == cross.size()) return false;  // loss unbounded: corrupt inputs

    const std::size_t q = cross[stop].k;
    Candidate next;
    next.a = best_p;
    next.b = q;
    const double ds = pts[q].s - pts[best_p].s;
    next.b1 = (pts[q].y - pts[best_p].y) / ds;
    next.b0 = pts[best_p].y - next.b1 * pts[best_p].s;
    next.loss = vertex_loss(pts, alpha, next.a, next.b, next.b1);
    // Accept the current vertex once float noise stops real progress.
    if (!(next.loss < loss_now - 1e-13 * (1.0 + std::abs(loss_now))))
      return true;
    vert = next;
  }
  return false;
}

// Warm start by majorize-minimize on the smoothed loss
// sum w (sqrt(r^2+eps^2)/2 + (a-1/2)r), snap to a nearby vertex, then run the
// exact pivot descent to the optimum.
QuantileFit smoothed_solve(const std::vector<LinePoint>& pts, double alpha,
                           const SolverOptions& options) {
  const std::size_t m = pts.size();
  double Sw = 0, Sws = 0;
  double A00 = 0, A01 = 0, A11 = 0, c0 = 0, c1 = 0;
  for (const auto& p : pts) {
    Sw += p.w;
    Sws += p.w * p.s;
    A00 += p.w;
    A01 += p.w * p.s;
    A11 += p.w * p.s * p.s;
    c0 += p.w * p.y;
    c1 += p.w * p.s * p.y;
  }
  // Weighted least squares start.
  double b0, b1;
  const double det = A00 * A11 - A01 * A01;
  if (det > 1e-14 * A00 * A11) {
    b0 = (A11 * c0 - A01 * c1) / det;
    b1 = (A00 * c1 - A01 * c0) / det;
  } else {
    static thread_local std::vector<double> ys, ws;
    ys.clear();
    ws.clear();
    for (const auto& p : pts) {
      ys.push_back(p.y);
      ws.push_back(p.w);
    }
    b0 = weighted_quantile_lower(ys, ws, alpha);
    b1 = 0;
  }

  const double half_shift = alpha - 0.5;
  static const double kEps[] = {1e-3};
  for (double eps : kEps) {
    const double eps2 = eps * eps;
    const double tol = std::max(1e-10, 1e-4 * eps);
    for (int it = 0; it < 12; ++it) {
      double B00 = 0, B01 = 0, B11 = 0, r0 = 0, r1 = 0;
      for (const auto& p : pts) {
        const double r = p.y - b0 - b1 * p.s;
        const double q = p.w / (2.0 * std::sqrt(r * r + eps2));
        B00 += q;
        B01 += q * p.s;
        B11 += q * p.s * p.s;
        r0 += q * p.y;
        r1 += q * p.s * p.y;
      }
      r0 += half_shift * Sw;
      r1 += half_shift * Sws;
      const double d = B00 * B11 - B01 * B01;
      if (!(d > 0)) break;
      const double nb0 = (B11 * r0 - B01 * r1) / d;
      const double nb1 = (B00 * r1 - B01 * r0) / d;
      const double step = std::max(std::abs(nb0 - b0), std::abs(nb1 - b1));
      b0 = nb0;
      b1 = nb1;
      if (step <= tol * (1.0 + std::max(std::abs(b0), std::abs(b1)))) break;
    }
  }

  Candidate vert = polish(pts, alpha, b0, b1, 6);
  if (std::isfinite(vert.loss) && pivot_descend(pts, alpha, vert)) {
    QuantileFit fit;
    fit.value = vert.b0;
    fit.slope = vert.b1;
    fit.loss = vert.loss;
    fit.support = m;
    return fit;
  }

  if (m <= options.fallback_max_points) {
    Candidate exact = enumerate_vertices(pts, alpha);
    QuantileFit fit;
    fit.value = exact.b0;
    fit.slope = exact.b1;
    fit.loss = exact.loss;
    fit.support = m;
    return fit;
  }
  QuantileFit fit;
  fit.value = vert.b0;
  fit.slope = vert.b1;
  fit.loss = vert.loss;
  fit.support = m;
  fit.flags = kFlagApproximate;
  return fit;
}

}  // namespace

QuantileFit fit_weighted_line(std::span<const double> s,
                              std::span<const double> y,
                              std::span<const double> w, double alpha,
                              const SolverOptions& options) {
  if (s.size() != y.size() || s.size() != w.size())
    throw ValidationError("weighted line fit: mismatched input lengths");
  if (!(alpha > 0 && alpha < 1))
    throw ValidationError("weighted line fit: alpha must be in (0, 1)");
  if (s.size() < 2)
    throw InsufficientDataError(
        "weighted line fit needs at least 2 observations, got " +
        std::to_string(s.size()));

  static thread_local std::vector<LinePoint> pts;
  pts.clear();
  pts.reserve(s.size());
  double smin = s[0], smax = s[0];
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(w[i] > 0) || !std::isfinite(w[i]) || !std::isfinite(y[i]) ||
        !std::isfinite(s[i]))
      throw ValidationError("weighted line fit: inputs must be finite with "
                            "positive weights");
    pts.push_back({s[i], y[i], w[i]});
    smin = std::min(smin, s[i]);
    smax = std::max(smax, s[i]);
  }

  if (smax - smin < 1e-13) {
    // Single distinct time: the slope is unidentifiable.
    static thread_local std::vector<double> ys, ws;
    ys.clear();
    ws.clear();
    for (const auto& p : pts) {
      ys.push_back(p.y);
      ws.push_back(p.w);
    }
    QuantileFit fit;
    fit.value = weighted_quantile_lower(ys, ws, alpha);
    fit.slope = 0;
    fit.loss = line_loss(pts, alpha, fit.value, 0.0);
    fit.support = pts.size();
    fit.flags = kFlagDegenerateDesign;
    return fit;
  }

  const bool exact =
      options.method == SolveMethod::exact ||
      (options.method == SolveMethod::automatic &&
       pts.size() <= options.exact_max_points);
  if (exact) {
    Candidate best = enumerate_vertices(pts, alpha);
    QuantileFit fit;
    fit.value = best.b0;
    fit.slope = best.b1;
    fit.loss = best.loss;
    fit.support = pts.size();
    return fit;
  }
  return smoothed_solve(pts, alpha, options);
}

namespace {

struct Window {
  std::vector<double> s, y, w;
};

// Gather observations with i/n within the kernel support around t.
void gather_window(const UnitTimeSeries& series, double t, double bandwidth,
                   const KernelSpec& kernel, double weight_floor, Window& win) {
  const auto n = static_cast<long long>(series.size());
  const double nd = static_cast<double>(n);
  const double radius = bandwidth * kernel.support_radius();
  auto lo = static_cast<long long>(std::ceil(nd * (t - radius) - 1e-9));
  auto hi = static_cast<long long>(std::floor(nd * (t + radius) + 1e-9));
  lo = std::max(lo, 1LL);
  hi = std::min(hi, n);
  win.s.clear();
  win.y.clear();
  win.w.clear();
  for (long long i = lo; i <= hi; ++i) {
    const double si = static_cast<double>(i) / nd - t;
    const double wi = kernel(si / bandwidth);
    if (wi <= weight_floor) continue;
    win.s.push_back(si);
    win.y.push_back(series.values[static_cast<std::size_t>(i - 1)]);
    win.w.push_back(wi);
  }
}

void check_fit_args(const UnitTimeSeries& series, double t, double alpha,
                    double bandwidth) {
  if (series.size() == 0) throw ValidationError("fit: empty series");
  if (!(t >= 0.0 && t <= 1.0))
    throw ValidationError("fit: t must lie in [0, 1], got " + std::to_string(t));
  if (!(alpha > 0 && alpha < 1))
    throw ValidationError("fit: alpha must be in (0, 1)");
  if (!(bandwidth > 0 && bandwidth < 1))
    throw ValidationError("fit: bandwidth must be in (0, 1), got " +
                          std::to_string(bandwidth));
}

}  // namespace

QuantileFit fit_local_linear(const UnitTimeSeries& series, double t,
                             double alpha, double bandwidth,
                             const KernelSpec& kernel,
                             const SolverOptions& options) {
  check_fit_args(series, t, alpha, bandwidth);
  static thread_local Window win;
  gather_window(series, t, bandwidth, kernel, options.weight_floor, win);
  if (win.s.size() < 2)
    throw InsufficientDataError(
        "local linear fit at t=" + std::to_string(t) + " has " +
        std::to_string(win.s.size()) + " weighted observations, needs 2");
  return fit_weighted_line(win.s, win.y, win.w, alpha, options);
}

QuantileFit fit_local_linear(const LocalFitProblem& problem,
                             const SolverOptions& options) {
  return fit_local_linear(problem.series, problem.t, problem.alpha,
                          problem.bandwidth, problem.kernel, options);
}

QuantileFit fit_local_constant(const UnitTimeSeries& series, double t,
                               double alpha, double bandwidth,
                               const KernelSpec& kernel,
                               const SolverOptions& options) {
  check_fit_args(series, t, alpha, bandwidth);
  static thread_local Window win;
  gather_window(series, t, bandwidth, kernel, options.weight_floor, win);
  if (win.s.empty())
    throw InsufficientDataError("local constant fit at t=" + std::to_string(t) +
                                " has no weighted observations");
  QuantileFit fit;
  fit.value = weighted_quantile_lower(win.y, win.w, alpha);
  fit.slope = 0;
  fit.support = win.s.size();
  double loss = 0;
  for (std::size_t i = 0; i < win.y.size(); ++i)
    loss += win.w[i] * check_loss(alpha, win.y[i] - fit.value);
  fit.loss = loss;
  return fit;
}

}  // namespace nsquant
