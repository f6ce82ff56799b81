#pragma once

// Chebyshev spectral toolkit on an interval [a,b]: extrema grids, value <->
// coefficient transforms (DCT-I), Clenshaw and barycentric evaluation,
// series products, indefinite/definite integration, adaptive fitting and
// Clenshaw-Curtis quadrature weights.  Everything is pure and allocation
// based; types are immutable after construction and safe to share.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "uie/errors.hpp"

namespace uie {

struct Interval {
  double a = -1.0;
  double b = 1.0;

  Interval() = default;
  Interval(double a_, double b_) : a(a_), b(b_) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
      throw InvalidArgument("Interval: endpoints must be finite with a < b");
  }

  double width() const { return b - a; }
  double mid() const { return 0.5 * (a + b); }
  /// Map t in [-1,1] to [a,b].
  double from_unit(double t) const { return mid() + 0.5 * width() * t; }
  /// Map x in [a,b] to [-1,1].
  double to_unit(double x) const { return (2.0 * x - a - b) / width(); }
  bool contains(double x) const { return x >= a && x <= b; }

  friend bool operator==(const Interval& l, const Interval& r) {
    return l.a == r.a && l.b == r.b;
  }
};

/// Chebyshev extrema grid mapped to [a,b], stored in increasing order; the
/// first point is exactly a and the last exactly b.
struct ChebGrid {
  Interval interval;
  std::vector<double> points;

  int m() const { return static_cast<int>(points.size()); }
};

/// Function on [a,b] represented by coefficients of T_j in the pulled-back
/// variable t = to_unit(x).  Any length >= 1 is legal, including all-zero.
struct ChebSeries {
  Interval interval;
  std::vector<double> coeffs;

  int size() const { return static_cast<int>(coeffs.size()); }
};

namespace detail {

inline constexpr double kPi = std::numbers::pi_v<double>;

// ---- complex FFT (radix-2 + Bluestein), used only through cosine_sum ----

using cdouble = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Twiddles from exactly reduced angles (cached per size; transforms repeat
// at a handful of sizes during sampling).
inline const std::vector<cdouble>& pow2_twiddles(std::size_t n) {
  thread_local std::map<std::size_t, std::vector<cdouble>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cdouble> w(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double ang =
        -2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    w[j] = {std::cos(ang), std::sin(ang)};
  }
  return cache.emplace(n, std::move(w)).first->second;
}

inline void fft_pow2(std::vector<cdouble>& v) {
  const std::size_t n = v.size();
  if (n <= 1) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }
  const std::vector<cdouble>& w = pow2_twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const cdouble u = v[i + j];
        const cdouble t = v[i + j + half] * w[j * stride];
        v[i + j] = u + t;
        v[i + j + half] = u - t;
      }
    }
  }
}

struct BluesteinPlan {
  std::size_t m = 0;
  std::vector<cdouble> w;   // exp(-i pi j^2 / n), j^2 reduced mod 2n
  std::vector<cdouble> fb;  // FFT of the chirp kernel
};

inline const BluesteinPlan& bluestein_plan(std::size_t n) {
  thread_local std::map<std::size_t, BluesteinPlan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  BluesteinPlan plan;
  plan.m = 1;
  while (plan.m < 2 * n - 1) plan.m <<= 1;
  plan.w.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t q = (j * j) % (2 * n);
    const double ang = -kPi * static_cast<double>(q) / static_cast<double>(n);
    plan.w[j] = {std::cos(ang), std::sin(ang)};
  }
  plan.fb.assign(plan.m, cdouble{0.0, 0.0});
  for (std::size_t j = 0; j < n; ++j) {
    plan.fb[j] = std::conj(plan.w[j]);
    if (j != 0) plan.fb[plan.m - j] = std::conj(plan.w[j]);
  }
  fft_pow2(plan.fb);
  return cache.emplace(n, std::move(plan)).first->second;
}

// Forward DFT of arbitrary length; chirp-z for non-powers of two.
inline void fft_forward(std::vector<cdouble>& v) {
  const std::size_t n = v.size();
  if (n <= 1) return;
  if (is_pow2(n)) {
    fft_pow2(v);
    return;
  }
  const BluesteinPlan& plan = bluestein_plan(n);
  std::vector<cdouble> a(plan.m, cdouble{0.0, 0.0});
  for (std::size_t j = 0; j < n; ++j) a[j] = v[j] * plan.w[j];
  fft_pow2(a);
  for (std::size_t j = 0; j < plan.m; ++j) a[j] *= plan.fb[j];
  // inverse via conjugation keeps a single forward kernel
  for (auto& z : a) z = std::conj(z);
  fft_pow2(a);
  const double s = 1.0 / static_cast<double>(plan.m);
  for (std::size_t k = 0; k < n; ++k) v[k] = std::conj(a[k]) * s * plan.w[k];
}

// cosine_sum(y)_j = sum_{k=0..N} sigma_k y_k cos(pi j k / N) with
// sigma_0 = sigma_N = 1/2; the shared primitive behind DCT-I analysis,
// synthesis and Clenshaw-Curtis weights.

// cos(pi q / N) for q = 0..2N-1, cached per N
inline const std::vector<double>& cosine_table(std::size_t N) {
  thread_local std::map<std::size_t, std::vector<double>> cache;
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;
  std::vector<double> t(2 * N);
  for (std::size_t q = 0; q < 2 * N; ++q)
    t[q] = std::cos(kPi * static_cast<double>(q) / static_cast<double>(N));
  return cache.emplace(N, std::move(t)).first->second;
}

inline std::vector<double> cosine_sum_direct(const std::vector<double>& y) {
  const std::size_t np1 = y.size();
  const std::size_t N = np1 - 1;
  std::vector<double> out(np1, 0.0);
  if (N == 0) {
    out[0] = 0.5 * y[0];
    return out;
  }
  const std::vector<double>& tab = cosine_table(N);
  for (std::size_t j = 0; j <= N; ++j) {
    double s = 0.5 * (y[0] + y[N] * (j % 2 ? -1.0 : 1.0));
    std::size_t q = 0;
    for (std::size_t k = 1; k < N; ++k) {
      q += j;
      if (q >= 2 * N) q -= 2 * N;
      s += y[k] * tab[q];
    }
    out[j] = s;
  }
  return out;
}

inline std::vector<double> cosine_sum_fast(const std::vector<double>& y) {
  const std::size_t np1 = y.size();
  const std::size_t N = np1 - 1;
  if (N < 4) return cosine_sum_direct(y);
  std::vector<cdouble> e(2 * N);
  for (std::size_t k = 0; k <= N; ++k) e[k] = y[k];
  for (std::size_t k = 1; k < N; ++k) e[2 * N - k] = y[k];
  fft_forward(e);
  std::vector<double> out(np1);
  for (std::size_t j = 0; j <= N; ++j) out[j] = 0.5 * e[j].real();
  return out;
}

inline std::vector<double> cosine_sum(const std::vector<double>& y) {
  const std::size_t N = y.size() - 1;
  // radix-2 always wins when it applies; the chirp transform only beats the
  // table-driven direct sum once the padding overhead amortizes
  const bool fast = (N >= 4 && is_pow2(2 * N)) || N >= 1024;
  return fast ? cosine_sum_fast(y) : cosine_sum_direct(y);
}

}  // namespace detail

/// m mapped Chebyshev extrema points on the interval, increasing, endpoints
/// included exactly.
inline ChebGrid cheb_points(Interval interval, int m) {
  if (m < 2) throw InvalidArgument("cheb_points: need m >= 2 points");
  ChebGrid g;
  g.interval = interval;
  g.points.resize(m);
  const int N = m - 1;
  for (int i = 1; i < N; ++i) {
    // sine form is exactly antisymmetric about the midpoint
    const double t =
        std::sin(detail::kPi * (2.0 * i - N) / (2.0 * N));
    g.points[i] = interval.from_unit(t);
  }
  g.points[0] = interval.a;
  g.points[N] = interval.b;
  return g;
}

/// Chebyshev-T coefficients of the degree-(m-1) interpolant through
/// (grid.points, values).  DCT-I based, O(m log m).
inline ChebSeries vals_to_coeffs(const std::vector<double>& values,
                                 const ChebGrid& grid) {
  const int m = grid.m();
  if (static_cast<int>(values.size()) != m)
    throw InvalidArgument("vals_to_coeffs: values length != grid size");
  const int N = m - 1;
  // reorder to g_j = f(cos(pi j / N)); the grid is stored increasing
  std::vector<double> g(m);
  for (int j = 0; j <= N; ++j) g[j] = values[N - j];
  std::vector<double> s = detail::cosine_sum(g);
  ChebSeries out;
  out.interval = grid.interval;
  out.coeffs.resize(m);
  const double scale = 2.0 / N;
  for (int k = 0; k <= N; ++k) {
    const double sigma = (k == 0 || k == N) ? 0.5 : 1.0;
    out.coeffs[k] = scale * sigma * s[k];
  }
  return out;
}

/// Evaluate a series at a single point by Clenshaw recurrence, O(len).
inline double clenshaw_eval(const ChebSeries& s, double x) {
  const double t = s.interval.to_unit(x);
  double b1 = 0.0, b2 = 0.0;
  for (int j = s.size() - 1; j >= 1; --j) {
    const double bj = 2.0 * t * b1 - b2 + s.coeffs[j];
    b2 = b1;
    b1 = bj;
  }
  return t * b1 - b2 + (s.size() > 0 ? s.coeffs[0] : 0.0);
}

/// Values of the series at grid points.  Exact inverse of vals_to_coeffs
/// (to rounding) when grid.m() >= series length.
inline std::vector<double> coeffs_to_vals(const ChebSeries& s,
                                          const ChebGrid& grid) {
  const int m = grid.m();
  const int len = s.size();
  if (m < len) {
    // smaller grid: evaluate the series honestly rather than alias it
    std::vector<double> v(m);
    for (int i = 0; i < m; ++i) v[i] = clenshaw_eval(s, grid.points[i]);
    return v;
  }
  const int N = m - 1;
  std::vector<double> y(m, 0.0);
  for (int k = 0; k < len; ++k) y[k] = s.coeffs[k];
  y[0] *= 2.0;
  if (len == m) y[N] *= 2.0;
  std::vector<double> sums = detail::cosine_sum(y);
  std::vector<double> values(m);
  for (int i = 0; i <= N; ++i) values[i] = sums[N - i];
  return values;
}

/// Barycentric interpolation through (grid, values); returns the stored
/// value exactly when x hits a grid point.
inline double barycentric_eval(const std::vector<double>& values,
                               const ChebGrid& grid, double x) {
  const int m = grid.m();
  if (static_cast<int>(values.size()) != m)
    throw InvalidArgument("barycentric_eval: values length != grid size");
  double num = 0.0, den = 0.0;
  double sign = 1.0;
  for (int i = 0; i < m; ++i) {
    const double d = x - grid.points[i];
    if (d == 0.0) return values[i];
    double w = sign;
    if (i == 0 || i == m - 1) w *= 0.5;
    const double q = w / d;
    num += q * values[i];
    den += q;
    sign = -sign;
  }
  return num / den;
}

/// Pointwise product; computed on a shared grid large enough to resolve the
/// product exactly.
inline ChebSeries multiply(const ChebSeries& s1, const ChebSeries& s2) {
  if (!(s1.interval == s2.interval))
    throw InvalidArgument("multiply: series live on different intervals");
  const int len = s1.size() + s2.size() - 1;
  const ChebGrid grid = cheb_points(s1.interval, std::max(len, 2));
  std::vector<double> v1 = coeffs_to_vals(s1, grid);
  const std::vector<double> v2 = coeffs_to_vals(s2, grid);
  for (int i = 0; i < grid.m(); ++i) v1[i] *= v2[i];
  ChebSeries out = vals_to_coeffs(v1, grid);
  out.coeffs.resize(std::max(len, 1));
  return out;
}

/// Indefinite integral G with G(a) = 0 and G' equal to the input.
inline ChebSeries cumsum(const ChebSeries& s) {
  const int len = s.size();
  const double half_width = 0.5 * s.interval.width();
  ChebSeries out;
  out.interval = s.interval;
  out.coeffs.assign(len + 1, 0.0);
  auto c = [&](int k) { return k < len ? s.coeffs[k] : 0.0; };
  if (len >= 1) out.coeffs[1] = half_width * (c(0) - 0.5 * c(2));
  for (int j = 2; j <= len; ++j)
    out.coeffs[j] = half_width * (c(j - 1) - c(j + 1)) / (2.0 * j);
  // constant term pins G(a) = 0
  double at_a = 0.0;
  double sign = -1.0;
  for (int j = 1; j <= len; ++j) {
    at_a += sign * out.coeffs[j];
    sign = -sign;
  }
  out.coeffs[0] = -at_a;
  return out;
}

/// Integral over the whole interval: (b-a)/2 * sum over even k of
/// 2 c_k / (1 - k^2).
inline double definite_integral(const ChebSeries& s) {
  double sum = 0.0;
  for (int k = 0; k < s.size(); k += 2)
    sum += 2.0 * s.coeffs[k] / (1.0 - static_cast<double>(k) * k);
  return 0.5 * s.interval.width() * sum;
}

/// Quadrature weights w_i with sum w_i f(x_i) equal to the integral of the
/// interpolant of f on the grid (Clenshaw-Curtis).
inline std::vector<double> clenshaw_curtis_weights(const ChebGrid& grid) {
  const int m = grid.m();
  const int N = m - 1;
  std::vector<double> q(m, 0.0);
  for (int k = 0; k <= N; k += 2) q[k] = 2.0 / (1.0 - static_cast<double>(k) * k);
  const std::vector<double> p = detail::cosine_sum(q);
  std::vector<double> w(m);
  const double scale = grid.interval.width() / N;
  for (int j = 0; j <= N; ++j) {
    const double sigma = (j == 0 || j == N) ? 0.5 : 1.0;
    w[N - j] = scale * sigma * p[j];
  }
  return w;
}

struct AdaptiveFitOptions {
  double tol_rel = 1e-14;  // negligibility threshold relative to max |coeff|
  int size_cap = 1 << 20;  // largest grid tried before giving up
  std::string name;        // identifies the function in error messages
};

/// Fit f on the interval by doubling the grid until the trailing eight
/// coefficients are negligible; the result is trimmed of negligible tail.
inline ChebSeries adaptive_fit(const std::function<double(double)>& f,
                               Interval interval,
                               const AdaptiveFitOptions& opt = {}) {
  for (int m = 17; m <= opt.size_cap + 1; m = 2 * (m - 1) + 1) {
    const ChebGrid grid = cheb_points(interval, m);
    std::vector<double> values(m);
    for (int i = 0; i < m; ++i) {
      values[i] = f(grid.points[i]);
      if (!std::isfinite(values[i]))
        throw InvalidArgument("adaptive_fit: function not finite at x=" +
                              std::to_string(grid.points[i]));
    }
    ChebSeries s = vals_to_coeffs(values, grid);
    double maxc = 0.0;
    for (double c : s.coeffs) maxc = std::max(maxc, std::abs(c));
    const double tol = opt.tol_rel * maxc;
    bool converged = true;
    for (int k = m - 8; k < m; ++k)
      if (std::abs(s.coeffs[k]) > tol) converged = false;
    if (!converged) continue;
    int last = 0;
    for (int k = m - 1; k >= 1; --k)
      if (std::abs(s.coeffs[k]) > tol) {
        last = k;
        break;
      }
    s.coeffs.resize(last + 1);
    return s;
  }
  throw NumericalError(
      errc::no_convergence,
      "adaptive_fit: coefficients of " +
          (opt.name.empty() ? std::string("function") : opt.name) +
          " on [" + std::to_string(interval.a) + "," +
          std::to_string(interval.b) + "] never became negligible (cap " +
          std::to_string(opt.size_cap) + ")");
}

}  // namespace uie
