#pragma once

// Dense complex helpers behind the ensemble module: Householder QR for
// unitary sampling, Hermitian tridiagonalization, and the implicit-shift QL
// sweep for tridiagonal eigenvalues.  Column-major storage throughout.

#include <cmath>
#include <complex>
#include <vector>

#include "uie/errors.hpp"

namespace uie::detail {

using zdouble = std::complex<double>;

inline zdouble& zat(std::vector<zdouble>& a, int n, int i, int j) {
  return a[static_cast<std::size_t>(j) * n + i];
}
inline const zdouble& zat(const std::vector<zdouble>& a, int n, int i, int j) {
  return a[static_cast<std::size_t>(j) * n + i];
}

/// In-place Householder QR of a column-major n x n matrix; returns Q
/// (accumulated reflectors) and leaves the R diagonal in rdiag.
inline std::vector<zdouble> householder_qr_q(std::vector<zdouble> a, int n,
                                             std::vector<zdouble>& rdiag) {
  std::vector<std::vector<zdouble>> us;  // normalized reflector vectors
  rdiag.assign(n, zdouble{0.0, 0.0});
  for (int k = 0; k < n; ++k) {
    double norm = 0.0;
    for (int i = k; i < n; ++i) norm += std::norm(zat(a, n, i, k));
    norm = std::sqrt(norm);
    const zdouble x0 = zat(a, n, k, k);
    if (norm == 0.0) {
      rdiag[k] = 0.0;
      us.emplace_back();
      continue;
    }
    const zdouble phase =
        std::abs(x0) == 0.0 ? zdouble{1.0, 0.0} : x0 / std::abs(x0);
    const zdouble alpha = -phase * norm;
    std::vector<zdouble> u(n - k);
    for (int i = k; i < n; ++i) u[i - k] = zat(a, n, i, k);
    u[0] -= alpha;
    double un = 0.0;
    for (const zdouble& z : u) un += std::norm(z);
    un = std::sqrt(un);
    if (un > 0.0)
      for (zdouble& z : u) z /= un;
    // apply H = I - 2 u u* to trailing columns
    for (int j = k; j < n; ++j) {
      zdouble dot{0.0, 0.0};
      for (int i = k; i < n; ++i) dot += std::conj(u[i - k]) * zat(a, n, i, j);
      dot *= 2.0;
      for (int i = k; i < n; ++i) zat(a, n, i, j) -= dot * u[i - k];
    }
    rdiag[k] = zat(a, n, k, k);
    us.push_back(std::move(u));
  }
  // Q = H_0 H_1 ... H_{n-1} applied to the identity
  std::vector<zdouble> q(static_cast<std::size_t>(n) * n, zdouble{0.0, 0.0});
  for (int i = 0; i < n; ++i) zat(q, n, i, i) = 1.0;
  for (int k = n - 1; k >= 0; --k) {
    if (us[k].empty()) continue;
    const std::vector<zdouble>& u = us[k];
    for (int j = 0; j < n; ++j) {
      zdouble dot{0.0, 0.0};
      for (int i = k; i < n; ++i) dot += std::conj(u[i - k]) * zat(q, n, i, j);
      dot *= 2.0;
      for (int i = k; i < n; ++i) zat(q, n, i, j) -= dot * u[i - k];
    }
  }
  return q;
}

/// Reduce a Hermitian matrix to real symmetric tridiagonal form; writes the
/// diagonal into d and subdiagonal magnitudes into e (e has n-1 entries).
/// Eigenvalues are preserved (phases are absorbed by a diagonal unitary).
inline void hermitian_tridiagonalize(std::vector<zdouble> a, int n,
                                     std::vector<double>& d,
                                     std::vector<double>& e) {
  d.assign(n, 0.0);
  e.assign(std::max(n - 1, 0), 0.0);
  for (int k = 0; k + 2 < n; ++k) {
    double norm = 0.0;
    for (int i = k + 1; i < n; ++i) norm += std::norm(zat(a, n, i, k));
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      e[k] = 0.0;
      continue;
    }
    const zdouble x0 = zat(a, n, k + 1, k);
    const zdouble phase =
        std::abs(x0) == 0.0 ? zdouble{1.0, 0.0} : x0 / std::abs(x0);
    const zdouble alpha = -phase * norm;
    std::vector<zdouble> u(n - k - 1);
    for (int i = k + 1; i < n; ++i) u[i - k - 1] = zat(a, n, i, k);
    u[0] -= alpha;
    double un = 0.0;
    for (const zdouble& z : u) un += std::norm(z);
    un = std::sqrt(un);
    if (un == 0.0) {
      e[k] = std::abs(alpha);
      continue;
    }
    for (zdouble& z : u) z /= un;
    // Hermitian rank-2 update of the trailing block: A <- A - 2uq* - 2qu*
    const int mlen = n - k - 1;
    std::vector<zdouble> p(mlen, zdouble{0.0, 0.0});
    for (int j = 0; j < mlen; ++j)
      for (int i = 0; i < mlen; ++i)
        p[i] += zat(a, n, k + 1 + i, k + 1 + j) * u[j];
    zdouble beta{0.0, 0.0};
    for (int i = 0; i < mlen; ++i) beta += std::conj(u[i]) * p[i];
    std::vector<zdouble> q(mlen);
    for (int i = 0; i < mlen; ++i) q[i] = p[i] - beta * u[i];
    for (int j = 0; j < mlen; ++j)
      for (int i = 0; i < mlen; ++i)
        zat(a, n, k + 1 + i, k + 1 + j) -=
            2.0 * (u[i] * std::conj(q[j]) + q[i] * std::conj(u[j]));
    zat(a, n, k + 1, k) = alpha;
    zat(a, n, k, k + 1) = std::conj(alpha);
    e[k] = std::abs(alpha);
  }
  if (n >= 2) e[n - 2] = std::abs(zat(a, n, n - 1, n - 2));
  for (int i = 0; i < n; ++i) d[i] = zat(a, n, i, i).real();
}

/// Implicit-shift QL eigenvalues of a symmetric tridiagonal matrix.
inline void tridiagonal_eigenvalues(std::vector<double>& d,
                                    std::vector<double> e) {
  const int n = static_cast<int>(d.size());
  if (n <= 1) return;
  e.push_back(0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw NumericalError(errc::no_convergence,
                               "tridiagonal QL: too many iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace uie::detail
