#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <vector>

#include "uie/orthopoly.hpp"

using namespace uie;

namespace {

// Independent oracle: classical Gram-Schmidt on monomials against a weight,
// inner products by composite Simpson (no cheb machinery involved).
struct GramSchmidtOracle {
  std::function<double(double)> w;
  double lo, hi;
  int pts;  // odd

  double integrate(const std::function<double(double)>& f) const {
    const double h = (hi - lo) / (pts - 1);
    double s = f(lo) * w(lo) + f(hi) * w(hi);
    for (int i = 1; i + 1 < pts; ++i) {
      const double x = lo + h * i;
      s += f(x) * w(x) * (i % 2 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
  }

  // returns orthonormal alphas/betas for k = 0..n-1
  void run(int n, std::vector<double>& alphas, std::vector<double>& betas) const {
    std::vector<std::vector<double>> p;  // monomial coeffs of orthonormal p_k
    const double mass = integrate([](double) { return 1.0; });
    p.push_back({1.0 / std::sqrt(mass)});
    auto eval = [](const std::vector<double>& c, double x) {
      double a = 0.0;
      for (int j = static_cast<int>(c.size()) - 1; j >= 0; --j) a = a * x + c[j];
      return a;
    };
    alphas.assign(n, 0.0);
    betas.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
      std::vector<double> xp(p[k].size() + 1, 0.0);
      for (std::size_t j = 0; j < p[k].size(); ++j) xp[j + 1] = p[k][j];
      std::vector<double> v = xp;
      for (int i = 0; i <= k; ++i) {
        const double c = integrate(
            [&](double x) { return eval(xp, x) * eval(p[i], x); });
        if (i == k) alphas[k] = c;
        for (std::size_t j = 0; j < p[i].size(); ++j) v[j] -= c * p[i][j];
      }
      const double nrm = std::sqrt(
          integrate([&](double x) { const double t = eval(v, x); return t * t; }));
      betas[k] = nrm;
      for (auto& c : v) c /= nrm;
      p.push_back(std::move(v));
    }
  }
};

double row_inner(const WeightedOPBasis& b, const std::vector<double>& qw,
                 int i, int j) {
  double s = 0.0;
  for (int l = 0; l < b.m(); ++l) s += qw[l] * b.values.at(i, l) * b.values.at(j, l);
  return s;
}

}  // namespace

TEST_CASE("classical_recurrence closed forms match Gram-Schmidt oracles") {
  SECTION("hermite") {
    auto rc = classical_recurrence(WeightSpec::hermite(), 3);
    GramSchmidtOracle oracle{[](double x) { return std::exp(-x * x); },
                             -12.0, 12.0, 40001};
    std::vector<double> a, b;
    oracle.run(3, a, b);
    for (int k = 0; k < 3; ++k) {
      REQUIRE(rc.alphas[k] == 0.0);
      REQUIRE(rc.betas[k] == Catch::Approx(std::sqrt(0.5 * (k + 1))).epsilon(1e-12));
      REQUIRE(rc.alphas[k] == Catch::Approx(a[k]).margin(1e-9));
      REQUIRE(rc.betas[k] == Catch::Approx(b[k]).margin(1e-9));
    }
    REQUIRE(rc.weight_mass == Catch::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  }

  SECTION("laguerre alpha=0") {
    auto rc = classical_recurrence(WeightSpec::laguerre(0.0), 1);
    REQUIRE(rc.alphas[0] == Catch::Approx(1.0));
    REQUIRE(rc.betas[0] == Catch::Approx(1.0));
    GramSchmidtOracle oracle{[](double x) { return std::exp(-x); }, 0.0, 70.0,
                             70001};
    std::vector<double> a, b;
    oracle.run(1, a, b);
    REQUIRE(a[0] == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(b[0] == Catch::Approx(1.0).margin(1e-9));
  }

  SECTION("legendre (jacobi 0,0)") {
    auto rc = classical_recurrence(WeightSpec::jacobi(0.0, 0.0), 3);
    REQUIRE(rc.alphas[1] == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(rc.betas[1] == Catch::Approx(2.0 / std::sqrt(15.0)).epsilon(1e-13));
    REQUIRE(rc.betas[2] == Catch::Approx(3.0 / std::sqrt(35.0)).epsilon(1e-13));
    GramSchmidtOracle oracle{[](double) { return 1.0; }, -1.0, 1.0, 20001};
    std::vector<double> a, b;
    oracle.run(3, a, b);
    for (int k = 0; k < 3; ++k) {
      REQUIRE(rc.alphas[k] == Catch::Approx(a[k]).margin(1e-10));
      REQUIRE(rc.betas[k] == Catch::Approx(b[k]).margin(1e-10));
    }
    REQUIRE(rc.weight_mass == Catch::Approx(2.0).epsilon(1e-12));
  }

  SECTION("unknown kind rejected") {
    REQUIRE_THROWS_AS(classical_recurrence(WeightSpec::poly({0, 0, 1}), 2),
                      InvalidArgument);
  }
}

TEST_CASE("stieltjes_recurrence") {
  SECTION("hermite weight on [-9,9] reproduces the closed form, n=20") {
    auto got = stieltjes_recurrence(WeightSpec::hermite(), Interval(-9, 9), 20);
    auto want = classical_recurrence(WeightSpec::hermite(), 20);
    for (int k = 0; k < 20; ++k) {
      REQUIRE(got.alphas[k] == Catch::Approx(want.alphas[k]).margin(1e-10));
      REQUIRE(got.betas[k] == Catch::Approx(want.betas[k]).margin(1e-10));
    }
  }

  SECTION("n=30 on a wider interval stays at 1e-10") {
    auto got = stieltjes_recurrence(WeightSpec::hermite(), Interval(-12, 12), 30);
    auto want = classical_recurrence(WeightSpec::hermite(), 30);
    for (int k = 0; k < 30; ++k) {
      REQUIRE(got.alphas[k] == Catch::Approx(want.alphas[k]).margin(1e-10));
      REQUIRE(got.betas[k] == Catch::Approx(want.betas[k]).margin(1e-10));
    }
  }

  SECTION("even quartic weight forces alpha = 0 exactly") {
    auto rc = stieltjes_recurrence(WeightSpec::poly({0, 0, 0, 0, 1}),
                                   Interval(-4, 4), 12);
    for (double a : rc.alphas) REQUIRE(a == 0.0);
  }

  SECTION("flat weight on [-1,1] gives Legendre") {
    auto got = stieltjes_recurrence(WeightSpec::jacobi(0.0, 0.0),
                                    Interval(-1, 1), 15);
    auto want = classical_recurrence(WeightSpec::jacobi(0.0, 0.0), 15);
    for (int k = 0; k < 15; ++k) {
      REQUIRE(got.alphas[k] == Catch::Approx(want.alphas[k]).margin(1e-10));
      REQUIRE(got.betas[k] == Catch::Approx(want.betas[k]).margin(1e-10));
    }
  }

  SECTION("breakdown reports the failing index") {
    // three quadrature points can only support three orthogonal polynomials
    std::vector<double> nodes{-1.0, 0.0, 1.0};
    std::vector<double> weights{0.5, 1.0, 0.5};
    try {
      detail::stieltjes_from_quadrature(nodes, weights, 5);
      FAIL("expected degeneracy");
    } catch (const NumericalError& e) {
      REQUIRE(e.code() == errc::degenerate);
      REQUIRE(std::string(e.what()).find("beta_2") != std::string::npos);
    }
  }
}

TEST_CASE("build_basis") {
  SECTION("hermite n=1 is the normalized Gaussian bump") {
    auto basis = build_basis(WeightSpec::hermite(), 1);
    const double c = std::pow(M_PI, -0.25);
    for (int j = 0; j < basis.m(); ++j) {
      const double x = basis.grid.points[j];
      REQUIRE(basis.values.at(0, j) ==
              Catch::Approx(c * std::exp(-0.5 * x * x)).margin(1e-12));
    }
  }

  SECTION("scaled quartic n=10: rows vanish at the interval ends") {
    auto basis = build_basis(WeightSpec::scaled_poly({0, 0, 0, 0, 1}), 10);
    for (int k = 0; k < basis.n; ++k) {
      double mx = 0.0;
      for (int j = 0; j < basis.m(); ++j)
        mx = std::max(mx, std::abs(basis.values.at(k, j)));
      REQUIRE(std::abs(basis.values.at(k, 0)) <= 1e-10 * mx);
      REQUIRE(std::abs(basis.values.at(k, basis.m() - 1)) <= 1e-10 * mx);
    }
    REQUIRE(basis.m() == 2 * (basis.m_tilde + basis.n));
  }

  SECTION("quartic weight n=30: Gram matrix is the identity to 1e-8") {
    auto basis = build_basis(WeightSpec::poly({0, 0, 0, 0, 1}), 30);
    auto qw = clenshaw_curtis_weights(basis.grid);
    double dev = 0.0;
    for (int i = 0; i < basis.n; ++i)
      for (int j = i; j < basis.n; ++j)
        dev = std::max(dev, std::abs(row_inner(basis, qw, i, j) -
                                     (i == j ? 1.0 : 0.0)));
    REQUIRE(dev < 1e-8);

    // recurrence residual at every grid point
    double maxphi = 0.0;
    for (double v : basis.values.data) maxphi = std::max(maxphi, std::abs(v));
    double worst = 0.0;
    for (int k = 0; k + 1 < basis.n; ++k)
      for (int j = 0; j < basis.m(); ++j) {
        double r = basis.rec.alphas[k] * basis.values.at(k, j) +
                   basis.rec.betas[k] * basis.values.at(k + 1, j) -
                   basis.grid.points[j] * basis.values.at(k, j);
        if (k > 0) r += basis.rec.betas[k - 1] * basis.values.at(k - 1, j);
        worst = std::max(worst, std::abs(r));
      }
    REQUIRE(worst < 1e-9 * maxphi);
  }

  SECTION("even weight produces rows of alternating parity") {
    auto basis = build_basis(WeightSpec::hermite(), 6);
    for (int k = 0; k < 6; ++k) {
      const double sign = k % 2 ? -1.0 : 1.0;
      for (int j = 0; j < basis.m(); ++j)
        REQUIRE(basis.values.at(k, j) ==
                Catch::Approx(sign * basis.values.at(k, basis.m() - 1 - j))
                    .margin(1e-13));
    }
  }

  SECTION("coefficient rows round trip through the grid") {
    auto basis = build_basis(WeightSpec::hermite(), 4);
    for (int k = 0; k < 4; ++k) {
      auto s = basis.row_series(k);
      for (int j = 0; j < basis.m(); j += 17)
        REQUIRE(clenshaw_eval(s, basis.grid.points[j]) ==
                Catch::Approx(basis.values.at(k, j)).margin(1e-11));
    }
  }

  SECTION("n < 1 rejected") {
    REQUIRE_THROWS_AS(build_basis(WeightSpec::hermite(), 0), InvalidArgument);
  }
}

TEST_CASE("kernel_diagonal") {
  SECTION("integrates to n") {
    for (int n : {1, 5, 12}) {
      auto basis = build_basis(WeightSpec::hermite(), n);
      auto kd = kernel_diagonal(basis);
      REQUIRE(definite_integral(kd) / n == Catch::Approx(1.0).margin(1e-10));
    }
  }

  SECTION("n=1 hermite equals the squared bump") {
    auto basis = build_basis(WeightSpec::hermite(), 1);
    auto kd = kernel_diagonal(basis);
    const double c = 1.0 / std::sqrt(M_PI);
    for (double x : {-2.0, -0.5, 0.0, 1.0, 3.0})
      REQUIRE(clenshaw_eval(kd, x) ==
              Catch::Approx(c * std::exp(-x * x)).margin(1e-12));
  }

  SECTION("nonnegative on its grid") {
    auto basis = build_basis(WeightSpec::scaled_poly({0, 0, 0, 0, 1}), 8);
    auto kd = kernel_diagonal(basis);
    auto grid = cheb_points(basis.interval, kd.size());
    for (double v : coeffs_to_vals(kd, grid)) REQUIRE(v >= -1e-12);
  }
}

TEST_CASE("weight spec validation") {
  REQUIRE_THROWS_AS(WeightSpec::poly({0, 1}).validate(), InvalidArgument);
  REQUIRE_THROWS_AS(WeightSpec::poly({0, 0, 0, 1}).validate(), InvalidArgument);
  REQUIRE_THROWS_AS(WeightSpec::poly({0, 0, -1}).validate(), InvalidArgument);
  REQUIRE_THROWS_AS(WeightSpec::laguerre(-1.5).validate(), InvalidArgument);
  REQUIRE_THROWS_AS(WeightSpec::jacobi(0.0, -2.0).validate(), InvalidArgument);
  REQUIRE_NOTHROW(WeightSpec::poly({1.0, 0, 2.0}).validate());
  REQUIRE(WeightSpec::poly({0, 0, 1, 0, 5}).is_even());
  REQUIRE(!WeightSpec::poly({0, 1, 1, 0.5, 5}).is_even());
}
