#pragma once

// Full-matrix sampling: conjugate a drawn spectrum by a Haar unitary,
// independent-entry GUE as the oracle ensemble, a self-contained Hermitian
// eigensolver, and sums of independent draws.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "uie/dpp.hpp"
#include "uie/errors.hpp"
#include "uie/linalg.hpp"
#include "uie/orthopoly.hpp"
#include "uie/rng.hpp"

namespace uie {

struct HermitianMatrix {
  int n = 0;
  std::vector<std::complex<double>> a;  // column-major

  HermitianMatrix() = default;
  explicit HermitianMatrix(int n_)
      : n(n_), a(static_cast<std::size_t>(n_) * n_, {0.0, 0.0}) {}

  std::complex<double>& at(int i, int j) {
    return a[static_cast<std::size_t>(j) * n + i];
  }
  const std::complex<double>& at(int i, int j) const {
    return a[static_cast<std::size_t>(j) * n + i];
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : a) m = std::max(m, std::abs(z));
    return m;
  }

  /// max |A - A*| entry; 0 for an exactly Hermitian matrix.
  double hermiticity_residual() const {
    double r = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i <= j; ++i)
        r = std::max(r, std::abs(at(i, j) - std::conj(at(j, i))));
    return r;
  }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += at(i, i).real();
    return t;
  }
};

struct UnitaryMatrix {
  int n = 0;
  std::vector<std::complex<double>> a;  // column-major

  std::complex<double>& at(int i, int j) {
    return a[static_cast<std::size_t>(j) * n + i];
  }
  const std::complex<double>& at(int i, int j) const {
    return a[static_cast<std::size_t>(j) * n + i];
  }

  /// max |(U U* - I)_{ij}|.
  double unitarity_residual() const {
    double r = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::complex<double> s{0.0, 0.0};
        for (int k = 0; k < n; ++k) s += at(i, k) * std::conj(at(j, k));
        if (i == j) s -= 1.0;
        r = std::max(r, std::abs(s));
      }
    return r;
  }
};

/// Haar unitary: QR of an iid complex Gaussian matrix with the R-diagonal
/// phase correction (plain QR alone is not Haar distributed).
inline UnitaryMatrix haar_unitary(int n, SeededRng& rng) {
  if (n < 1) throw InvalidArgument("haar_unitary: n >= 1");
  for (int attempt = 0; attempt < 4; ++attempt) {
    std::vector<std::complex<double>> g(static_cast<std::size_t>(n) * n);
    for (auto& z : g) z = rng.complex_gaussian();
    std::vector<std::complex<double>> rdiag;
    std::vector<std::complex<double>> q =
        detail::householder_qr_q(std::move(g), n, rdiag);
    bool full_rank = true;
    for (const auto& r : rdiag)
      if (std::abs(r) < 1e-290) full_rank = false;
    if (!full_rank) continue;  // probability-zero event; redraw
    UnitaryMatrix u;
    u.n = n;
    u.a = std::move(q);
    for (int j = 0; j < n; ++j) {
      const std::complex<double> phase = std::conj(rdiag[j]) / std::abs(rdiag[j]);
      for (int i = 0; i < n; ++i) u.at(i, j) *= phase;
    }
    return u;
  }
  throw NumericalError(errc::degenerate,
                       "haar_unitary: repeated rank-deficient draws");
}

/// V diag(r) V* for a spectrum drawn from the basis and a Haar unitary V.
inline HermitianMatrix sample_uie_matrix(const WeightedOPBasis& basis,
                                         SeededRng& rng) {
  const int n = basis.n;
  const EigenSample sample = sample_eigenvalues(basis, rng);
  const UnitaryMatrix v = haar_unitary(n, rng);
  HermitianMatrix m(n);
  // P = V diag(r), M = P V*
  std::vector<std::complex<double>> p(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      p[static_cast<std::size_t>(j) * n + i] = v.at(i, j) * sample.values[j];
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      std::complex<double> s{0.0, 0.0};
      for (int k = 0; k < n; ++k)
        s += p[static_cast<std::size_t>(k) * n + i] * std::conj(v.at(j, k));
      m.at(i, j) = s;
    }
  // symmetrize away the rounding skew
  for (int j = 0; j < n; ++j) {
    m.at(j, j) = m.at(j, j).real();
    for (int i = 0; i < j; ++i) {
      const std::complex<double> avg =
          0.5 * (m.at(i, j) + std::conj(m.at(j, i)));
      m.at(i, j) = avg;
      m.at(j, i) = std::conj(avg);
    }
  }
  return m;
}

/// GUE normalized so the eigenvalue weight is exp(-x^2): off-diagonal
/// real/imaginary parts have variance 1/4, the (real) diagonal variance 1/2.
inline HermitianMatrix direct_gue(int n, SeededRng& rng) {
  if (n < 1) throw InvalidArgument("direct_gue: n >= 1");
  HermitianMatrix m(n);
  const double diag_sd = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    m.at(j, j) = diag_sd * rng.gaussian();
    for (int i = 0; i < j; ++i) {
      const std::complex<double> z{0.5 * rng.gaussian(), 0.5 * rng.gaussian()};
      m.at(i, j) = z;
      m.at(j, i) = std::conj(z);
    }
  }
  return m;
}

/// Ascending eigenvalues by Householder tridiagonalization + implicit-shift
/// QL; self-contained, adequate for desk-scale n.
inline std::vector<double> hermitian_eigenvalues(const HermitianMatrix& m) {
  const double scale = m.max_abs();
  if (m.hermiticity_residual() > 1e-12 * std::max(scale, 1.0))
    throw InvalidArgument("hermitian_eigenvalues: matrix is not Hermitian");
  std::vector<double> d, e;
  detail::hermitian_tridiagonalize(m.a, m.n, d, e);
  detail::tridiagonal_eigenvalues(d, std::move(e));
  std::sort(d.begin(), d.end());
  return d;
}

using MatrixSampler = std::function<HermitianMatrix(SeededRng&)>;

inline MatrixSampler uie_matrix_sampler(const WeightedOPBasis& basis) {
  return [&basis](SeededRng& rng) { return sample_uie_matrix(basis, rng); };
}

inline MatrixSampler gue_matrix_sampler(int n) {
  return [n](SeededRng& rng) { return direct_gue(n, rng); };
}

/// Eigenvalues of H_1 + ... + H_k for independent draws from the given
/// samplers (each with its own Haar frame), ascending.
inline std::vector<double> sample_sum(const std::vector<MatrixSampler>& samplers,
                                      SeededRng& rng) {
  if (samplers.empty()) throw InvalidArgument("sample_sum: empty sampler list");
  HermitianMatrix total = samplers[0](rng);
  for (std::size_t i = 1; i < samplers.size(); ++i) {
    const HermitianMatrix h = samplers[i](rng);
    if (h.n != total.n)
      throw InvalidArgument("sample_sum: dimension mismatch between draws");
    for (std::size_t j = 0; j < total.a.size(); ++j) total.a[j] += h.a[j];
  }
  return hermitian_eigenvalues(total);
}

}  // namespace uie
