#pragma once

// Weighted orthonormal functions phi_k = p_k sqrt(w) as Chebyshev
// interpolants, with recurrence coefficients from closed forms (Hermite,
// Laguerre, Jacobi) or the Stieltjes procedure on a Clenshaw-Curtis
// discretization.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "uie/cheb.hpp"
#include "uie/errors.hpp"
#include "uie/rowmatrix.hpp"

namespace uie {

/// Weight w on its natural support.  Polynomial potentials mean
/// w = exp(-Q); the scaled form substitutes Q = n V so the spectrum stays
/// put as n grows.
struct WeightSpec {
  enum class Kind { Poly, ScaledPoly, Cosh, Hermite, Laguerre, Jacobi };

  Kind kind = Kind::Hermite;
  std::vector<double> coeffs;  // ascending powers; Q for Poly, V for ScaledPoly
  double alpha = 0.0;          // Laguerre / Jacobi exponents
  double beta = 0.0;

  static WeightSpec poly(std::vector<double> q) {
    WeightSpec w;
    w.kind = Kind::Poly;
    w.coeffs = std::move(q);
    return w;
  }
  static WeightSpec scaled_poly(std::vector<double> v) {
    WeightSpec w;
    w.kind = Kind::ScaledPoly;
    w.coeffs = std::move(v);
    return w;
  }
  static WeightSpec cosh_potential() {
    WeightSpec w;
    w.kind = Kind::Cosh;
    return w;
  }
  static WeightSpec hermite() { return WeightSpec{}; }
  static WeightSpec laguerre(double alpha) {
    WeightSpec w;
    w.kind = Kind::Laguerre;
    w.alpha = alpha;
    return w;
  }
  static WeightSpec jacobi(double alpha, double beta) {
    WeightSpec w;
    w.kind = Kind::Jacobi;
    w.alpha = alpha;
    w.beta = beta;
    return w;
  }

  void validate() const {
    switch (kind) {
      case Kind::Poly:
      case Kind::ScaledPoly: {
        int deg = static_cast<int>(coeffs.size()) - 1;
        while (deg >= 0 && coeffs[deg] == 0.0) --deg;
        if (deg < 2 || deg % 2 != 0)
          throw InvalidArgument(
              "weight.coeffs: potential must have even degree >= 2");
        if (coeffs[deg] <= 0.0)
          throw InvalidArgument(
              "weight.coeffs: potential needs a positive leading coefficient");
        break;
      }
      case Kind::Laguerre:
        if (!(alpha > -1.0))
          throw InvalidArgument("weight.alpha: Laguerre requires alpha > -1");
        break;
      case Kind::Jacobi:
        if (!(alpha > -1.0))
          throw InvalidArgument("weight.alpha: Jacobi requires alpha > -1");
        if (!(beta > -1.0))
          throw InvalidArgument("weight.beta: Jacobi requires beta > -1");
        break;
      default:
        break;
    }
  }

  bool is_classical() const {
    return kind == Kind::Hermite || kind == Kind::Laguerre ||
           kind == Kind::Jacobi;
  }

  /// Even in x, so that all recurrence alphas vanish.
  bool is_even() const {
    switch (kind) {
      case Kind::Hermite:
      case Kind::Cosh:
        return true;
      case Kind::Poly:
      case Kind::ScaledPoly:
        for (std::size_t j = 1; j < coeffs.size(); j += 2)
          if (coeffs[j] != 0.0) return false;
        return true;
      case Kind::Jacobi:
        return alpha == beta;
      case Kind::Laguerre:
        return false;
    }
    return false;
  }

  /// Potential Q(x); n only enters the scaled form Q = n V.
  double potential(double x, int n) const {
    switch (kind) {
      case Kind::Hermite:
        return x * x;
      case Kind::Cosh:
        return std::cosh(x);
      case Kind::Poly:
      case Kind::ScaledPoly: {
        double q = 0.0;
        for (int j = static_cast<int>(coeffs.size()) - 1; j >= 0; --j)
          q = q * x + coeffs[j];
        return kind == Kind::ScaledPoly ? n * q : q;
      }
      case Kind::Laguerre:
        return x;  // algebraic x^alpha factor handled in weight()
      case Kind::Jacobi:
        return 0.0;
    }
    return 0.0;
  }

  double weight(double x, int n) const {
    switch (kind) {
      case Kind::Laguerre:
        if (x < 0.0) return 0.0;
        return (alpha == 0.0 ? 1.0 : std::pow(x, alpha)) * std::exp(-x);
      case Kind::Jacobi:
        if (x < -1.0 || x > 1.0) return 0.0;
        return std::pow(1.0 - x, alpha) * std::pow(1.0 + x, beta);
      default:
        return std::exp(-potential(x, n));
    }
  }

  double sqrt_weight(double x, int n) const {
    switch (kind) {
      case Kind::Laguerre:
      case Kind::Jacobi:
        return std::sqrt(weight(x, n));
      default:
        return std::exp(-0.5 * potential(x, n));
    }
  }

  /// Exact mass of the full (untruncated) weight, when known in closed form.
  std::optional<double> closed_form_mass() const {
    switch (kind) {
      case Kind::Hermite:
        return std::sqrt(detail::kPi);
      case Kind::Laguerre:
        return std::tgamma(alpha + 1.0);
      case Kind::Jacobi:
        return std::exp((alpha + beta + 1.0) * std::log(2.0) +
                        std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                        std::lgamma(alpha + beta + 2.0));
      default:
        return std::nullopt;
    }
  }

  bool truncates_left() const { return kind != Kind::Jacobi && kind != Kind::Laguerre; }
  bool truncates_right() const { return kind != Kind::Jacobi; }
};

/// Symmetric three-term recurrence data for the orthonormal polynomials:
/// x p_k = beta_{k-1} p_{k-1} + alpha_k p_k + beta_k p_{k+1}.
struct RecurrenceCoefficients {
  std::vector<double> alphas;
  std::vector<double> betas;
  double weight_mass = 0.0;
};

namespace detail {

inline double weighted_dot(const std::vector<double>& w,
                           const std::vector<double>& u,
                           const std::vector<double>& v) {
  // Neumaier compensated summation; Stieltjes is sensitive to drift here.
  double s = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double term = w[i] * u[i] * v[i];
    const double t = s + term;
    comp += std::abs(s) >= std::abs(term) ? (s - t) + term : (term - t) + s;
    s = t;
  }
  return s + comp;
}

/// Stieltjes / modified Gram-Schmidt on an explicit discrete inner product
/// sum_j weights[j] f(nodes[j]) g(nodes[j]).  weights must already contain
/// the weight function values.
inline RecurrenceCoefficients stieltjes_from_quadrature(
    const std::vector<double>& nodes, const std::vector<double>& weights,
    int n, bool force_even = false) {
  const std::size_t nq = nodes.size();
  RecurrenceCoefficients rc;
  rc.alphas.resize(n);
  rc.betas.resize(n);
  std::vector<double> ones(nq, 1.0);
  const double mass = weighted_dot(weights, ones, ones);
  if (!(mass > 0.0))
    throw NumericalError(errc::degenerate,
                         "stieltjes: weight has nonpositive mass");
  rc.weight_mass = mass;

  std::vector<std::vector<double>> p;  // orthonormal values, p[k][j]
  p.emplace_back(nq, 1.0 / std::sqrt(mass));
  std::vector<double> xp(nq), v(nq);
  for (int k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < nq; ++j) xp[j] = nodes[j] * p[k][j];
    const double alpha = force_even ? 0.0 : weighted_dot(weights, xp, p[k]);
    rc.alphas[k] = alpha;
    for (std::size_t j = 0; j < nq; ++j) {
      v[j] = xp[j] - alpha * p[k][j];
      if (k > 0) v[j] -= rc.betas[k - 1] * p[k - 1][j];
    }
    // one cleanup pass against the whole computed family
    for (int i = 0; i <= k; ++i) {
      const double c = weighted_dot(weights, v, p[i]);
      for (std::size_t j = 0; j < nq; ++j) v[j] -= c * p[i][j];
    }
    const double beta = std::sqrt(weighted_dot(weights, v, v));
    if (!(beta > 1e-13))
      throw NumericalError(errc::degenerate,
                           "stieltjes: recurrence breakdown (beta_" +
                               std::to_string(k) + " below 1e-13)");
    rc.betas[k] = beta;
    if (k + 1 < n) {
      std::vector<double> next(nq);
      for (std::size_t j = 0; j < nq; ++j) next[j] = v[j] / beta;
      p.push_back(std::move(next));
    }
  }
  return rc;
}

}  // namespace detail

/// Closed-form orthonormal recurrence coefficients for the classical
/// weights; weight_mass is the exact full-line mass.
inline RecurrenceCoefficients classical_recurrence(const WeightSpec& w, int n) {
  if (n < 1) throw InvalidArgument("classical_recurrence: n >= 1");
  if (!w.is_classical())
    throw InvalidArgument(
        "classical_recurrence: weight kind has no closed-form recurrence");
  w.validate();
  RecurrenceCoefficients rc;
  rc.alphas.resize(n);
  rc.betas.resize(n);
  rc.weight_mass = *w.closed_form_mass();
  switch (w.kind) {
    case WeightSpec::Kind::Hermite:
      for (int k = 0; k < n; ++k) {
        rc.alphas[k] = 0.0;
        rc.betas[k] = std::sqrt(0.5 * (k + 1));
      }
      break;
    case WeightSpec::Kind::Laguerre:
      for (int k = 0; k < n; ++k) {
        rc.alphas[k] = 2.0 * k + w.alpha + 1.0;
        rc.betas[k] = std::sqrt((k + 1.0) * (k + 1.0 + w.alpha));
      }
      break;
    case WeightSpec::Kind::Jacobi: {
      const double a = w.alpha, b = w.beta;
      auto monic_a = [&](int k) {
        if (k == 0) return (b - a) / (a + b + 2.0);
        const double s = 2.0 * k + a + b;
        return (b * b - a * a) / (s * (s + 2.0));
      };
      auto monic_b = [&](int k) {  // k >= 1
        if (k == 1)
          return 4.0 * (1.0 + a) * (1.0 + b) /
                 ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
        const double s = 2.0 * k + a + b;
        return 4.0 * k * (k + a) * (k + b) * (k + a + b) /
               (s * s * (s + 1.0) * (s - 1.0));
      };
      for (int k = 0; k < n; ++k) {
        rc.alphas[k] = monic_a(k);
        rc.betas[k] = std::sqrt(monic_b(k + 1));
      }
      break;
    }
    default:
      break;
  }
  return rc;
}

/// Recurrence coefficients by the Stieltjes procedure against a
/// Clenshaw-Curtis discretization of w(x) dx on the interval.
inline RecurrenceCoefficients stieltjes_recurrence(const WeightSpec& w,
                                                   Interval interval, int n) {
  if (n < 1) throw InvalidArgument("stieltjes_recurrence: n >= 1");
  w.validate();
  AdaptiveFitOptions opt;
  opt.name = "sqrt-weight";
  const ChebSeries sq = adaptive_fit(
      [&](double x) { return w.sqrt_weight(x, n); }, interval, opt);
  const int m_tilde = sq.size();
  const int nq = 8 * (n + m_tilde);
  const ChebGrid qgrid = cheb_points(interval, nq);
  std::vector<double> qw = clenshaw_curtis_weights(qgrid);
  for (int j = 0; j < nq; ++j) qw[j] *= w.weight(qgrid.points[j], n);
  const bool even = w.is_even() && interval.a == -interval.b;
  return detail::stieltjes_from_quadrature(qgrid.points, qw, n, even);
}

/// The n weighted orthonormal functions phi_0..phi_{n-1} tabulated on a
/// shared grid of size m = 2 (m_tilde + n), plus their Chebyshev rows.
struct WeightedOPBasis {
  int n = 0;
  Interval interval;
  ChebGrid grid;
  int m_tilde = 0;
  RowMatrix values;  // n x m, phi_k at grid points
  RowMatrix coeffs;  // n x m, Chebyshev rows c_kj
  RecurrenceCoefficients rec;

  int m() const { return grid.m(); }
  ChebSeries row_series(int k) const {
    return ChebSeries{interval,
                      {coeffs.row(k), coeffs.row(k) + coeffs.cols}};
  }
};

namespace detail {

inline double solve_potential_level(const WeightSpec& w, int n, double level,
                                    double direction) {
  // smallest |x| along the given direction with Q(x) >= level
  double lo = 0.0, hi = direction;
  for (int it = 0; it < 200 && w.potential(hi, n) < level; ++it) hi *= 2.0;
  if (w.potential(hi, n) < level)
    throw NumericalError(errc::unbounded_weight,
                         "weight: potential never reaches truncation level");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (w.potential(mid, n) < level ? lo : hi) = mid;
  }
  return hi;
}

inline Interval initial_interval(const WeightSpec& w, int n) {
  // level relative to the potential's rough minimum; e^{-40} ~ 4e-18
  double qmin = w.potential(0.0, n);
  for (double x : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0})
    qmin = std::min(qmin, w.potential(x, n));
  const double level = qmin + 40.0;
  const double right = solve_potential_level(w, n, level, 1.0);
  if (w.kind == WeightSpec::Kind::Laguerre) return Interval(0.0, right);
  const double left = solve_potential_level(w, n, level, -1.0);
  return Interval(left, right);
}

}  // namespace detail

/// Build the basis: pick (or verify) a truncation interval, fit phi_0
/// adaptively, generate the remaining rows by the three-term recurrence on
/// grid values, and transform each row.  Throws unbounded_weight when the
/// interval never stabilizes and ill_conditioned when the rows lose
/// orthonormality beyond 1e-6.
inline WeightedOPBasis build_basis(const WeightSpec& w, int n,
                                   std::optional<Interval> interval_hint = {}) {
  if (n < 1) throw InvalidArgument("build_basis: n >= 1");
  w.validate();

  Interval interval =
      w.kind == WeightSpec::Kind::Jacobi
          ? Interval(-1.0, 1.0)
          : (interval_hint ? *interval_hint : detail::initial_interval(w, n));
  const double center = interval.mid();

  for (int attempt = 0; attempt < 80; ++attempt) {
    // 1. sqrt(w) must itself be negligible at truncated endpoints
    double max_sw = 0.0;
    for (int i = 0; i <= 64; ++i) {
      const double x = interval.a + interval.width() * i / 64.0;
      max_sw = std::max(max_sw, w.sqrt_weight(x, n));
    }
    const bool sw_ok =
        (!w.truncates_left() ||
         w.sqrt_weight(interval.a, n) < 1e-16 * max_sw) &&
        (!w.truncates_right() ||
         w.sqrt_weight(interval.b, n) < 1e-16 * max_sw);
    if (sw_ok) {
      AdaptiveFitOptions opt;
      opt.name = "phi_0";
      const ChebSeries sq = adaptive_fit(
          [&](double x) { return w.sqrt_weight(x, n); }, interval, opt);
      const int m_tilde = sq.size();
      const double mass =
          w.closed_form_mass().value_or(definite_integral(multiply(sq, sq)));

      RecurrenceCoefficients rec;
      if (w.is_classical()) {
        rec = classical_recurrence(w, n);
      } else {
        const int nq = 8 * (n + m_tilde);
        const ChebGrid qgrid = cheb_points(interval, nq);
        std::vector<double> qw = clenshaw_curtis_weights(qgrid);
        for (int j = 0; j < nq; ++j) qw[j] *= w.weight(qgrid.points[j], n);
        const bool even = w.is_even() && interval.a == -interval.b;
        rec = detail::stieltjes_from_quadrature(qgrid.points, qw, n, even);
      }

      const int m = 2 * (m_tilde + n);
      WeightedOPBasis basis;
      basis.n = n;
      basis.interval = interval;
      basis.grid = cheb_points(interval, m);
      basis.m_tilde = m_tilde;
      basis.values = RowMatrix(n, m);
      basis.coeffs = RowMatrix(n, m);
      basis.rec = rec;

      const double inv_sqrt_mass = 1.0 / std::sqrt(mass);
      for (int j = 0; j < m; ++j)
        basis.values.at(0, j) =
            w.sqrt_weight(basis.grid.points[j], n) * inv_sqrt_mass;
      for (int k = 0; k + 1 < n; ++k) {
        const double a = rec.alphas[k];
        const double b = rec.betas[k];
        const double bm = k > 0 ? rec.betas[k - 1] : 0.0;
        for (int j = 0; j < m; ++j) {
          double v = (basis.grid.points[j] - a) * basis.values.at(k, j);
          if (k > 0) v -= bm * basis.values.at(k - 1, j);
          basis.values.at(k + 1, j) = v / b;
        }
      }

      // endpoint negligibility on truncated sides, per row
      bool endpoints_ok = true;
      for (int k = 0; k < n && endpoints_ok; ++k) {
        double mx = 0.0;
        for (int j = 0; j < m; ++j)
          mx = std::max(mx, std::abs(basis.values.at(k, j)));
        if (w.truncates_left() &&
            std::abs(basis.values.at(k, 0)) > 1e-10 * mx)
          endpoints_ok = false;
        if (w.truncates_right() &&
            std::abs(basis.values.at(k, m - 1)) > 1e-10 * mx)
          endpoints_ok = false;
      }
      if (endpoints_ok) {
        std::vector<double> rowvals(m);
        for (int k = 0; k < n; ++k) {
          std::copy(basis.values.row(k), basis.values.row(k) + m,
                    rowvals.begin());
          const ChebSeries rs = vals_to_coeffs(rowvals, basis.grid);
          std::copy(rs.coeffs.begin(), rs.coeffs.end(), basis.coeffs.row(k));
        }

        // orthonormality audit on the construction grid
        const std::vector<double> qw = clenshaw_curtis_weights(basis.grid);
        double dev = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            double s = 0.0, comp = 0.0;
            for (int l = 0; l < m; ++l) {
              const double term =
                  qw[l] * basis.values.at(i, l) * basis.values.at(j, l);
              const double t = s + term;
              comp += std::abs(s) >= std::abs(term) ? (s - t) + term
                                                    : (term - t) + s;
              s = t;
            }
            s += comp;
            dev = std::max(dev, std::abs(s - (i == j ? 1.0 : 0.0)));
          }
        if (dev > 1e-6)
          throw NumericalError(
              errc::ill_conditioned,
              "build_basis: Gram deviation " + std::to_string(dev) +
                  " exceeds 1e-6; a larger quadrature or interval is needed");
        return basis;
      }
    }
    if (w.kind == WeightSpec::Kind::Jacobi)
      throw NumericalError(errc::ill_conditioned,
                           "build_basis: Jacobi basis failed its checks");
    // widen truncated sides by 20% about the starting center
    const double a = w.truncates_left()
                         ? center - 1.2 * (center - interval.a)
                         : interval.a;
    const double b = w.truncates_right()
                         ? center + 1.2 * (interval.b - center)
                         : interval.b;
    interval = Interval(a, b);
  }
  throw NumericalError(errc::unbounded_weight,
                       "build_basis: truncation interval never stabilized");
}

/// Chebyshev series of K_n(x,x) = sum_k phi_k(x)^2 on the basis interval,
/// assembled on a grid large enough for the squares.
inline ChebSeries kernel_diagonal(const WeightedOPBasis& basis) {
  const int big_m = 2 * basis.m() - 1;
  const ChebGrid big = cheb_points(basis.interval, big_m);
  std::vector<double> acc(big_m, 0.0);
  for (int k = 0; k < basis.n; ++k) {
    const std::vector<double> vals = coeffs_to_vals(basis.row_series(k), big);
    for (int j = 0; j < big_m; ++j) acc[j] += vals[j] * vals[j];
  }
  return vals_to_coeffs(acc, big);
}

}  // namespace uie
