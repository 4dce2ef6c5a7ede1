#include "maxopf/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maxopf/errors.hpp"

namespace maxopf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDegenerateStreak = 50;

enum class Status : unsigned char { basic, lower, upper };

}  // namespace

LpResult solve_lp(const LinearProgram& lp, double tol) {
  const std::size_t n = lp.c.size();
  const std::size_t m = lp.a.size();
  if (lp.b.size() != m || lp.upper.size() != n) throw ValueError("linear program dimensions disagree");

  LpResult out;
  out.x.assign(n, 0.0);
  if (n == 0) return out;

  const std::size_t cols = n + m;
  std::vector<double> t(m * cols, 0.0);
  std::vector<double> beta(m);
  std::vector<double> upper(cols, kInf);
  std::copy(lp.upper.begin(), lp.upper.end(), upper.begin());

  for (std::size_t i = 0; i < m; ++i) {
    if (lp.a[i].size() != n) throw ValueError("constraint row has wrong length");
    double scale = 0.0;
    for (double v : lp.a[i]) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) t[i * cols + j] = lp.a[i][j] / scale;
    t[i * cols + n + i] = 1.0;
    beta[i] = lp.b[i] / scale;
    if (beta[i] < -tol) throw InfeasibleRelaxation("relaxation infeasible at x = 0");
    beta[i] = std::max(beta[i], 0.0);
  }

  double cscale = 0.0;
  for (double v : lp.c) cscale = std::max(cscale, std::abs(v));
  if (cscale == 0.0) return out;

  std::vector<double> d(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) d[j] = lp.c[j] / cscale;
  std::vector<Status> status(cols, Status::lower);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    basis[i] = n + i;
    status[n + i] = Status::basic;
  }

  const long max_pivots = 50L * static_cast<long>(cols + m) + 1000;
  int degenerate = 0;
  for (long iter = 0;; ++iter) {
    if (iter > max_pivots) throw Error("simplex iteration limit reached");
    const bool bland = degenerate >= kDegenerateStreak;

    std::size_t enter = cols;
    double best = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      double gain = 0.0;
      if (status[j] == Status::lower && d[j] > tol) gain = d[j];
      if (status[j] == Status::upper && d[j] < -tol) gain = -d[j];
      if (gain <= 0.0) continue;
      if (bland) {
        enter = j;
        break;
      }
      if (gain > best) {
        best = gain;
        enter = j;
      }
    }
    if (enter == cols) break;

    const double dir = status[enter] == Status::lower ? 1.0 : -1.0;
    double step = upper[enter];
    std::size_t leave = m;
    for (std::size_t i = 0; i < m; ++i) {
      const double alpha = t[i * cols + enter] * dir;
      double limit = kInf;
      if (alpha > tol) {
        limit = beta[i] / alpha;
      } else if (alpha < -tol && upper[basis[i]] < kInf) {
        limit = (upper[basis[i]] - beta[i]) / -alpha;
      }
      if (limit < step || (bland && limit == step && leave < m && basis[i] < basis[leave])) {
        step = limit;
        leave = i;
      }
    }
    if (!(step < kInf)) throw Error("linear program is unbounded");
    step = std::max(step, 0.0);
    degenerate = step <= tol ? degenerate + 1 : 0;

    for (std::size_t i = 0; i < m; ++i) beta[i] -= t[i * cols + enter] * dir * step;

    if (leave == m) {
      status[enter] = status[enter] == Status::lower ? Status::upper : Status::lower;
      continue;
    }

    const std::size_t out_var = basis[leave];
    const double alpha = t[leave * cols + enter] * dir;
    status[out_var] = alpha > 0.0 ? Status::lower : Status::upper;
    const double entered_value = dir > 0.0 ? step : upper[enter] - step;

    double* prow = &t[leave * cols];
    const double piv = prow[enter];
    for (std::size_t j = 0; j < cols; ++j) prow[j] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      double* row = &t[i * cols];
      const double f = row[enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) row[j] -= f * prow[j];
    }
    const double f = d[enter];
    for (std::size_t j = 0; j < cols; ++j) d[j] -= f * prow[j];

    basis[leave] = enter;
    status[enter] = Status::basic;
    beta[leave] = entered_value;
    ++out.pivots;
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (status[j] == Status::upper) out.x[j] = upper[j];
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) out.x[basis[i]] = std::clamp(beta[i], 0.0, upper[basis[i]]);
  }
  for (std::size_t j = 0; j < n; ++j) out.objective += lp.c[j] * out.x[j];
  return out;
}

}  // namespace maxopf
