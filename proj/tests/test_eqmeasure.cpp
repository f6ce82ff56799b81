#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "uie/eqmeasure.hpp"

using namespace uie;

namespace {

// Quadrature oracle for int_a^b log|x-y| psi(y) dy: substitute y = c+r cos t,
// split a small core around the singularity (handled analytically) and cover
// the rest with dyadically graded panels, each resolved adaptively.
double log_potential_oracle(const EquilibriumMeasure& mu, double x) {
  const double c = mu.support.mid(), r = 0.5 * mu.support.width();
  const double tx = std::acos(std::clamp(mu.support.to_unit(x), -1.0, 1.0));
  auto g = [&](double t) { return mu.density(c + r * std::cos(t)) * r * std::sin(t); };
  // Work in the offset u = t - tx so panels near the singularity keep full
  // precision; x - m(t) = 2 r sin((u + 2 tx)/2) sin(u/2) avoids cancellation.
  auto f = [&](double u) {
    return std::log(2.0 * r * std::abs(std::sin(0.5 * u + tx)) *
                    std::abs(std::sin(0.5 * u))) *
           g(tx + u);
  };
  const double delta = 1e-6;
  double acc = 0.0;
  // core: log|x - m(t)| ~ log|m'(tx)| + log|t - tx|
  acc += g(tx) * 2.0 * delta *
         (std::log(delta) - 1.0 + std::log(r * std::sin(tx)));
  // graded panels marching away from the singularity on both sides; panels
  // whose integrand is absolutely negligible get a fixed grid instead of the
  // relative-tolerance fit (their values sit at the evaluation noise floor)
  auto panel = [&](Interval iv) {
    try {
      return definite_integral(adaptive_fit(f, iv));
    } catch (const NumericalError&) {
      auto grid = cheb_points(iv, 129);
      std::vector<double> v(129);
      for (int i = 0; i < 129; ++i) v[i] = f(grid.points[i]);
      return definite_integral(vals_to_coeffs(v, grid));
    }
  };
  for (int side = -1; side <= 1; side += 2) {
    double lo = delta;
    const double limit = side < 0 ? tx : detail::kPi - tx;
    while (lo < limit) {
      const double hi = std::min(2.0 * lo, limit);
      acc += panel(Interval(side < 0 ? -hi : lo, side < 0 ? -lo : hi));
      lo = hi;
    }
  }
  return acc;
}

}  // namespace

TEST_CASE("equilibrium measure of x^2 is the semicircle") {
  auto mu = equilibrium_measure(Polynomial{{0, 0, 1}});
  const double s2 = std::sqrt(2.0);
  REQUIRE(mu.support.a == Catch::Approx(-s2).margin(1e-10));
  REQUIRE(mu.support.b == Catch::Approx(s2).margin(1e-10));
  REQUIRE(mu.total_mass == Catch::Approx(1.0).margin(1e-10));
  REQUIRE(std::abs(mu.t_coeffs[0]) < 1e-10);

  for (int i = 1; i < 200; ++i) {
    const double x = -s2 + 2 * s2 * i / 200.0;
    REQUIRE(mu.density(x) ==
            Catch::Approx(std::sqrt(2.0 - x * x) / detail::kPi).margin(1e-8));
  }
  REQUIRE(mu.density(0.0) == Catch::Approx(s2 / detail::kPi).epsilon(1e-10));
  REQUIRE(mu.density(2.0) == 0.0);
  REQUIRE(mu.density(-5.0) == 0.0);

  REQUIRE(mu.cdf(mu.support.b) == 1.0);
  REQUIRE(mu.cdf(mu.support.a) == 0.0);
  REQUIRE(mu.cdf(0.0) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("higher-order decay potential") {
  // V = x^4/20 - 4x^3/15 + x^2/5 + 8x/5
  const Polynomial V{{0, 8.0 / 5, 1.0 / 5, -4.0 / 15, 1.0 / 20}};
  auto mu = equilibrium_measure(V);

  SECTION("support is [-2,2]") {
    REQUIRE(mu.support.a == Catch::Approx(-2.0).margin(1e-8));
    REQUIRE(mu.support.b == Catch::Approx(2.0).margin(1e-8));
    REQUIRE(mu.total_mass == Catch::Approx(1.0).margin(1e-10));
  }

  SECTION("U coefficients match the hand expansion of V'") {
    REQUIRE(mu.u_coeffs.size() == 3);
    REQUIRE(mu.u_coeffs[0] == Catch::Approx(2.0).margin(1e-9));
    REQUIRE(mu.u_coeffs[1] == Catch::Approx(-8.0 / 5).margin(1e-9));
    REQUIRE(mu.u_coeffs[2] == Catch::Approx(2.0 / 5).margin(1e-9));
  }

  SECTION("density matches (x+2)^(1/2) (2-x)^(5/2) / 10 pi") {
    for (int i = 1; i < 200; ++i) {
      const double x = -2.0 + 4.0 * i / 200.0;
      const double want =
          std::sqrt(x + 2.0) * std::pow(2.0 - x, 2.5) / (10.0 * detail::kPi);
      REQUIRE(mu.density(x) == Catch::Approx(want).margin(1e-8));
    }
    const double want0 = std::sqrt(2.0) * std::pow(2.0, 2.5) / (10.0 * detail::kPi);
    REQUIRE(mu.density(0.0) == Catch::Approx(want0).epsilon(1e-9));
  }

  SECTION("cdf at 0 agrees with direct quadrature of the closed form") {
    // substitute x = -2 + u^2 to remove the square-root endpoint factor
    auto integrand = [](double u) {
      const double x = -2.0 + u * u;
      return 2.0 * u * u * std::pow(2.0 - x, 2.5) / (10.0 * detail::kPi);
    };
    const double want =
        definite_integral(adaptive_fit(integrand, Interval(0.0, std::sqrt(2.0))));
    REQUIRE(mu.cdf(0.0) == Catch::Approx(want).margin(1e-10));
  }
}

TEST_CASE("density integrates to one (quadrature oracle)") {
  for (auto V : {Polynomial{{0, 0, 1}}, Polynomial{{0, 0, 0, 0, 1}},
                 Polynomial{{0, 8.0 / 5, 1.0 / 5, -4.0 / 15, 1.0 / 20}}}) {
    auto mu = equilibrium_measure(V);
    const double c = mu.support.mid(), r = 0.5 * mu.support.width();
    auto g = [&](double t) {
      return mu.density(c + r * std::cos(t)) * r * std::sin(t);
    };
    const double mass =
        definite_integral(adaptive_fit(g, Interval(0.0, detail::kPi)));
    REQUIRE(mass == Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("cdf is monotone") {
  auto mu = equilibrium_measure(Polynomial{{0, 8.0 / 5, 1.0 / 5, -4.0 / 15, 1.0 / 20}});
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = -2.2 + 4.4 * i / 1000.0;
    const double F = mu.cdf(x);
    REQUIRE(F >= prev - 1e-15);
    prev = F;
  }
}

TEST_CASE("variational characterization: effective potential constant") {
  const Polynomial V{{0, 0, 1}};
  auto mu = equilibrium_measure(V);
  double lo = 1e300, hi = -1e300;
  for (double x : {-0.9, -0.4, 0.1, 0.55, 1.0}) {
    const double E = V(x) - 2.0 * log_potential_oracle(mu, x);
    lo = std::min(lo, E);
    hi = std::max(hi, E);
  }
  REQUIRE(hi - lo < 1e-6);

  const Polynomial W{{0, 8.0 / 5, 1.0 / 5, -4.0 / 15, 1.0 / 20}};
  auto nu = equilibrium_measure(W);
  lo = 1e300;
  hi = -1e300;
  for (double x : {-1.4, -0.6, 0.2, 0.9, 1.5}) {
    const double E = W(x) - 2.0 * log_potential_oracle(nu, x);
    lo = std::min(lo, E);
    hi = std::max(hi, E);
  }
  REQUIRE(hi - lo < 1e-6);
}

TEST_CASE("support scales inversely under V(sx)") {
  const Polynomial V{{0, 8.0 / 5, 1.0 / 5, -4.0 / 15, 1.0 / 20}};
  auto mu = equilibrium_measure(V);
  const double s = 2.0;
  Polynomial Vs = V;
  double p = 1.0;
  for (std::size_t j = 0; j < Vs.c.size(); ++j) {
    Vs.c[j] *= p;
    p *= s;
  }
  auto mus = equilibrium_measure(Vs);
  REQUIRE(mus.support.a == Catch::Approx(mu.support.a / s).margin(1e-10));
  REQUIRE(mus.support.b == Catch::Approx(mu.support.b / s).margin(1e-10));
}

TEST_CASE("edge constants") {
  SECTION("x^2: both conventions reported, airy form equals sqrt(2)") {
    auto mu = equilibrium_measure(Polynomial{{0, 0, 1}});
    auto sc = edge_constant(mu);
    const double w = mu.support.width();
    const double printed =
        std::pow(w, -1.0 / 3.0) * std::pow(2.0 * detail::kPi * 2.0 * std::sqrt(2.0), 2.0 / 3.0);
    REQUIRE(sc.c_V == Catch::Approx(printed).epsilon(1e-10));
    REQUIRE(sc.c_V_airy.has_value());
    REQUIRE(*sc.c_V_airy == Catch::Approx(std::sqrt(2.0)).margin(1e-9));
    REQUIRE(!sc.c_V_ho.has_value());
    REQUIRE(sc.psi_at.at(0.0) ==
            Catch::Approx(std::sqrt(2.0) / detail::kPi).margin(1e-12));
  }

  SECTION("quartic: positive constants") {
    auto mu = equilibrium_measure(Polynomial{{0, 0, 0, 0, 1}});
    auto sc = edge_constant(mu);
    REQUIRE(sc.c_V > 0.0);
    const double b = std::pow(4.0 / 3.0, 0.25);
    REQUIRE(mu.support.b == Catch::Approx(b).margin(1e-10));
    REQUIRE(*sc.c_V_airy ==
            Catch::Approx(std::pow(2 * b, -1.0 / 3.0) *
                          std::pow(6.0 * b * b * b, 2.0 / 3.0))
                .margin(1e-9));
  }

  SECTION("higher-order edge is degenerate") {
    auto mu = equilibrium_measure(
        Polynomial{{0, 8.0 / 5, 1.0 / 5, -4.0 / 15, 1.0 / 20}});
    REQUIRE_THROWS_AS(edge_constant(mu), NumericalError);
    auto sc = edge_constant(mu, /*higher_order=*/true);
    REQUIRE(sc.c_V_ho.has_value());
    REQUIRE(*sc.c_V_ho == Catch::Approx(std::pow(5.0, -2.0 / 7.0)).epsilon(1e-14));
    REQUIRE(!sc.c_V_airy.has_value());
  }
}

TEST_CASE("multi-cut potentials are rejected") {
  // double well (x^2-2)^2: the single-interval density would go negative
  try {
    equilibrium_measure(Polynomial{{4, 0, -4, 0, 1}});
    FAIL("expected multi-cut error");
  } catch (const NumericalError& e) {
    REQUIRE(e.code() == errc::multi_cut_support);
  }
}

TEST_CASE("callable-potential solve matches the polynomial path") {
  const Polynomial V{{0, 0, 0, 0, 1}};
  auto mu_poly = equilibrium_measure(V);
  auto mu_fn = equilibrium_measure(
      [](double x) { return 4.0 * x * x * x; }, Interval(-2.0, 2.0));
  REQUIRE(mu_fn.support.a == Catch::Approx(mu_poly.support.a).margin(1e-9));
  REQUIRE(mu_fn.support.b == Catch::Approx(mu_poly.support.b).margin(1e-9));
  for (double x : {-0.8, 0.0, 0.7})
    REQUIRE(mu_fn.density(x) == Catch::Approx(mu_poly.density(x)).margin(1e-9));
}

TEST_CASE("invalid potentials rejected") {
  REQUIRE_THROWS_AS(equilibrium_measure(Polynomial{{0, 1}}), InvalidArgument);
  REQUIRE_THROWS_AS(equilibrium_measure(Polynomial{{0, 0, -1}}), InvalidArgument);
}
