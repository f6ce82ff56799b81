#pragma once

// Sequential sampling of the n-point determinantal process with kernel
// K_n(x,y) = sum phi_k(x) phi_k(y): draw r_k from q_k^T q_k / k by numerical
// inverse-transform sampling, project q onto the orthogonal complement of
// q_k(r_k) with a single Householder reflector, repeat.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "uie/cheb.hpp"
#include "uie/errors.hpp"
#include "uie/orthopoly.hpp"
#include "uie/rng.hpp"
#include "uie/rowmatrix.hpp"

namespace uie {

/// One draw of n eigenvalues, sorted ascending.
struct EigenSample {
  std::vector<double> values;
};

namespace detail {

// rank-1 Householder update: replace M by H M and drop the first row, where
// H = I - 2 v v^T / (v^T v) maps f to a multiple of e_1.  The surviving
// rows are Q^T M for the null-space basis Q of f^T.
inline void apply_deflation(const std::vector<double>& v, double vnorm2,
                            RowMatrix& M) {
  const int k = M.rows, m = M.cols;
  std::vector<double> w(m, 0.0);
  for (int i = 0; i < k; ++i) {
    const double* row = M.row(i);
    const double vi = v[i];
    for (int j = 0; j < m; ++j) w[j] += vi * row[j];
  }
  const double scale = 2.0 / vnorm2;
  for (int j = 0; j < m; ++j) w[j] *= scale;
  for (int i = 0; i < k; ++i) {
    double* row = M.row(i);
    const double vi = v[i];
    for (int j = 0; j < m; ++j) row[j] -= vi * w[j];
  }
  M.drop_first_row();
}

// Householder direction for f -> -sign(f_0) |f| e_1; returns |f|.
inline double householder_vector(const std::vector<double>& f,
                                 std::vector<double>& v, double& vnorm2) {
  double nf = 0.0;
  for (double x : f) nf += x * x;
  nf = std::sqrt(nf);
  v = f;
  v[0] += (f[0] >= 0.0 ? 1.0 : -1.0) * nf;
  vnorm2 = 0.0;
  for (double x : v) vnorm2 += x * x;
  return nf;
}

/// Explicit (k-1) x k matrix Q^T with rows spanning the kernel of f^T;
/// diagnostic counterpart of apply_deflation.
inline RowMatrix null_projector(const std::vector<double>& f) {
  const int k = static_cast<int>(f.size());
  std::vector<double> v;
  double vnorm2 = 0.0;
  householder_vector(f, v, vnorm2);
  RowMatrix H(k, k);
  for (int i = 0; i < k; ++i) H.at(i, i) = 1.0;
  apply_deflation(v, vnorm2, H);
  return H;  // (k-1) x k
}

// determinant by LU with partial pivoting in extended precision
inline double lu_det(std::vector<long double> a, int n) {
  long double det = 1.0L;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::abs(a[i * n + col]) > std::abs(a[piv * n + col])) piv = i;
    if (a[piv * n + col] == 0.0L) return 0.0;
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a[piv * n + j], a[col * n + j]);
      det = -det;
    }
    det *= a[col * n + col];
    for (int i = col + 1; i < n; ++i) {
      const long double fac = a[i * n + col] / a[col * n + col];
      for (int j = col; j < n; ++j) a[i * n + j] -= fac * a[col * n + j];
    }
  }
  return static_cast<double>(det);
}

}  // namespace detail

/// The evolving orthonormal frame q_k of the sequential sampler.  Value and
/// coefficient rows are updated together (the update is linear, so value
/// rows stay the grid values of the transformed functions).
struct DeflationState {
  Interval interval;
  ChebGrid grid;
  RowMatrix values;  // k x m
  RowMatrix coeffs;  // k x m
  std::vector<double> drawn;  // r_n, r_{n-1}, ... in draw order

  int k() const { return values.rows; }

  static DeflationState from_basis(const WeightedOPBasis& basis) {
    DeflationState s;
    s.interval = basis.interval;
    s.grid = basis.grid;
    s.values = basis.values;
    s.coeffs = basis.coeffs;
    return s;
  }

  /// Chebyshev series of q_k(x)^T q_k(x) / k, the PDF for the next draw.
  ChebSeries stage_density() const {
    const int m = grid.m();
    std::vector<double> d(m, 0.0);
    for (int i = 0; i < k(); ++i) {
      const double* row = values.row(i);
      for (int j = 0; j < m; ++j) d[j] += row[j] * row[j];
    }
    const double inv_k = 1.0 / k();
    for (double& x : d) x *= inv_k;
    return vals_to_coeffs(d, grid);
  }

  /// q_k(r), one Clenshaw pass per component row.
  std::vector<double> evaluate(double r) const {
    const double t = interval.to_unit(r);
    std::vector<double> f(k());
    for (int i = 0; i < k(); ++i) {
      const double* c = coeffs.row(i);
      double b1 = 0.0, b2 = 0.0;
      for (int j = coeffs.cols - 1; j >= 1; --j) {
        const double bj = 2.0 * t * b1 - b2 + c[j];
        b2 = b1;
        b1 = bj;
      }
      f[i] = t * b1 - b2 + c[0];
    }
    return f;
  }
};

/// One deflation step: project out the direction q_k(r).  Throws when
/// q_k(r) is numerically zero (the sampled point sits at a density zero).
inline DeflationState deflate(DeflationState state, double r) {
  if (state.k() < 2)
    throw InvalidArgument("deflate: needs at least two remaining components");
  const std::vector<double> f = state.evaluate(r);
  std::vector<double> v;
  double vnorm2 = 0.0;
  const double nf = detail::householder_vector(f, v, vnorm2);
  if (nf < 1e-13)
    throw NumericalError(errc::degenerate,
                         "deflate: q(r) vanishes at r=" + std::to_string(r));
  detail::apply_deflation(v, vnorm2, state.values);
  detail::apply_deflation(v, vnorm2, state.coeffs);
  state.drawn.push_back(r);
  return state;
}

/// Quantile of a (possibly noisy) nonnegative density: clamp negative grid
/// values, integrate, renormalize by the endpoint, and solve F(X) = y by 60
/// bisection steps.
inline double density_quantile(const ChebSeries& density, double y) {
  const ChebGrid grid = cheb_points(density.interval,
                                    std::max(density.size(), 2));
  std::vector<double> vals = coeffs_to_vals(density, grid);
  for (double& v : vals)
    if (v < 0.0) v = 0.0;
  const ChebSeries F = cumsum(vals_to_coeffs(vals, grid));
  const double total = clenshaw_eval(F, density.interval.b);
  if (!(total > 1e-12))
    throw NumericalError(errc::degenerate,
                         "density_quantile: total mass below 1e-12");
  const double target = y * total;
  double lo = density.interval.a, hi = density.interval.b;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (clenshaw_eval(F, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double sample_density_1d(const ChebSeries& density, SeededRng& rng) {
  return density_quantile(density, rng.uniform());
}

namespace detail {

// sampler fast path: the stage density is a sum of squares on the grid, so
// it needs no clamping and a single analysis transform builds the CDF
inline double stage_draw(const DeflationState& state, double y) {
  const int m = state.grid.m();
  std::vector<double> d(m, 0.0);
  for (int i = 0; i < state.k(); ++i) {
    const double* row = state.values.row(i);
    for (int j = 0; j < m; ++j) d[j] += row[j] * row[j];
  }
  const ChebSeries F = cumsum(vals_to_coeffs(d, state.grid));
  const double total = clenshaw_eval(F, state.interval.b);
  if (!(total > 1e-12))
    throw NumericalError(errc::degenerate,
                         "sample_eigenvalues: stage density has no mass");
  const double target = y * total;
  double lo = state.interval.a, hi = state.interval.b;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (clenshaw_eval(F, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Algorithm: k = n..2 draw r_k from q^T q / k and deflate; then draw r_1.
/// Output sorted ascending.
inline EigenSample sample_eigenvalues(const WeightedOPBasis& basis,
                                      SeededRng& rng) {
  DeflationState state = DeflationState::from_basis(basis);
  for (int k = basis.n; k >= 2; --k) {
    const double r = detail::stage_draw(state, rng.uniform());
    state = deflate(std::move(state), r);
  }
  const double r1 = detail::stage_draw(state, rng.uniform());
  EigenSample out;
  out.values = std::move(state.drawn);
  out.values.push_back(r1);
  std::sort(out.values.begin(), out.values.end());
  return out;
}

/// Correctness oracle from the sampler's product representation: returns
/// (prod_j |q_j(x_j)|^2, det[K_n(x_i,x_j)]).  The two agree to rounding for
/// distinct points; coincident points drive both to zero.
inline std::pair<double, double> joint_density_identity_check(
    const WeightedOPBasis& basis, const std::vector<double>& points) {
  const int n = basis.n;
  if (static_cast<int>(points.size()) != n)
    throw InvalidArgument("joint_density_identity_check: need n points");
  for (double p : points)
    if (!basis.interval.contains(p))
      throw InvalidArgument("joint_density_identity_check: point outside "
                            "the basis interval");

  // determinant side: K = Phi^T Phi with Phi_{k,i} = phi_k(x_i)
  RowMatrix phi(n, n);
  for (int k = 0; k < n; ++k) {
    const ChebSeries row = basis.row_series(k);
    for (int i = 0; i < n; ++i) phi.at(k, i) = clenshaw_eval(row, points[i]);
  }
  std::vector<long double> K(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      long double s = 0.0L;
      for (int k = 0; k < n; ++k)
        s += static_cast<long double>(phi.at(k, i)) * phi.at(k, j);
      K[static_cast<std::size_t>(i) * n + j] = s;
    }
  const double det = detail::lu_det(std::move(K), n);

  // product side: deflate at the given points in order
  DeflationState state = DeflationState::from_basis(basis);
  double prod = 1.0;
  for (int idx = 0; idx < n; ++idx) {
    const std::vector<double> f = state.evaluate(points[idx]);
    double nf2 = 0.0;
    for (double x : f) nf2 += x * x;
    prod *= nf2;
    if (idx + 1 == n) break;
    if (std::sqrt(nf2) < 1e-13) {
      prod = 0.0;
      break;
    }
    state = deflate(std::move(state), points[idx]);
  }
  return {prod, det};
}

}  // namespace uie
