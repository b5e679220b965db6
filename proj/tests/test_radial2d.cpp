#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ldg/closed_forms.hpp"
#include "ldg/radial2d.hpp"

using namespace ldg;

namespace {
constexpr double pi = std::numbers::pi;
const double s6 = std::sqrt(6.0);
const double kUsPotential = -(s6 / 4.0) * pi + (std::sqrt(2.0) / 6.0) * pi * pi;

// Independent oracle: adaptive Simpson of 2 pi r W(u_S(r)) on [0, 1].
double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 0) {
    const double m = 0.5 * (a + b);
    const double whole = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double left = (m - a) / 6.0 * (f(a) + 4.0 * f(lm) + f(m));
    const double right = (b - m) / 6.0 * (f(m) + 4.0 * f(rm) + f(b));
    if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, tol / 2.0, depth + 1) + simpson(f, m, b, tol / 2.0, depth + 1);
}
}  // namespace

TEST_CASE("potential integral of the small solution") {
    CHECK(std::abs(kUsPotential - 0.4024633) < 1e-7);
    const double oracle =
        simpson([](double r) { return 2.0 * pi * r * potential_w(small_solution_uS(cplx(r, 0.0))); }, 0.0, 1.0, 1e-12);
    CHECK(std::abs(oracle - kUsPotential) < 1e-9);
}

TEST_CASE("discrete energies of closed forms") {
    const auto grid = uniform_grid(2048);
    const RadialProfile us = preset_profile(Preset::SmallSolution, grid);
    const EnergyParts e0 = radial_energy(us, 0.0);
    CHECK(std::abs(e0.total - 2.0 * pi) < 1e-3);
    const EnergyParts e1 = radial_energy(us, 1.0);
    CHECK(std::abs(e1.total - (2.0 * pi + kUsPotential)) < 2e-3);
    CHECK(std::abs(e1.potential - kUsPotential) < 1e-4);
    CHECK(std::abs(e1.total - (e1.dirichlet + e1.potential)) < 1e-10);
    const RadialProfile gh = preset_profile(Preset::GHbar, grid);
    for (double lam : {0.0, 3.0, 100.0}) {
        const EnergyParts e = radial_energy(gh, lam);
        CHECK(std::abs(e.total - 6.0 * pi) < 1e-3);
        CHECK(std::abs(e.potential) < 1e-6);
    }
    CHECK_THROWS_AS(radial_energy(us, -1.0), DomainError);
}

TEST_CASE("discrete energy gradient matches finite differences") {
    const auto grid = uniform_grid(32);
    const RadialProfile p = preset_profile(Preset::SmallSolution, grid, 0.05, 3);
    RadialDiscretization disc(grid);
    std::vector<double> x = to_flat(p), g;
    const double lam = 7.0;
    disc.energy(x, lam, &g, nullptr);
    for (std::size_t j = 5; j < x.size() - 5; j += 7) {
        auto xp = x, xm = x;
        xp[j] += 1e-6;
        xm[j] -= 1e-6;
        const double fd = (disc.energy(xp, lam, nullptr, nullptr) - disc.energy(xm, lam, nullptr, nullptr)) / 2e-6;
        CHECK(std::abs(fd - g[j]) < 1e-6 * (1.0 + std::abs(g[j])));
    }
}

TEST_CASE("Euler-Lagrange residual") {
    const auto grid = uniform_grid(2048);
    const ResidualReport us = el_residual_2d(preset_profile(Preset::SmallSolution, grid), 0.0);
    CHECK(us.residual < 1e-3);
    CHECK_FALSE(us.boundary_mismatch);
    CHECK_FALSE(us.center_mismatch);
    RadialProfile constant;
    constant.r = uniform_grid(64);
    constant.f.assign(65, e0_vec());
    const ResidualReport c = el_residual_2d(constant, 0.0);
    CHECK(c.residual == 0.0);
    CHECK(c.boundary_mismatch);
}

TEST_CASE("class S minimization at zero coupling recovers the small solution") {
    const auto grid = uniform_grid(512);
    const RadialProfile init = preset_profile(Preset::SmallSolution, grid, 0.01, 42);
    std::vector<double> history;
    const MinResult2D m = minimize_2d(0.0, DiscClass::S, init, default_options_2d(),
                                      [&](int, double e, const std::vector<double>& x) {
                                          history.push_back(e);
                                          for (std::size_t k = 0; k < x.size(); k += 5) {
                                              double n = 0.0;
                                              for (int i = 0; i < 5; ++i) n += x[k + i] * x[k + i];
                                              REQUIRE(std::abs(n - 1.0) < 1e-14);
                                          }
                                      });
    for (std::size_t i = 1; i < history.size(); ++i) REQUIRE(history[i] <= history[i - 1]);
    CHECK(std::abs(m.energy - 2.0 * pi) < 5e-3);
    CHECK(m.class_preserved);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        worst = std::max(worst, (m.profile.f[k] - small_solution_uS(grid[k])).norm());
    CHECK(worst < 1e-2);
    CHECK(m.residual < 1e-2);
    MESSAGE("iterations " << m.iterations << " stationarity " << m.stationarity << " residual " << m.residual);
}

TEST_CASE("class N minimization at zero coupling stays at 6 pi") {
    const auto grid = uniform_grid(512);
    const MinResult2D m =
        minimize_2d(0.0, DiscClass::N, preset_profile(Preset::GHbar, grid, 0.01, 5), default_options_2d());
    CHECK(std::abs(m.energy - 6.0 * pi) < 5e-3);
    CHECK(m.class_preserved);
}

TEST_CASE("minimization rejects inconsistent initial data") {
    const auto grid = uniform_grid(64);
    CHECK_THROWS_AS(minimize_2d(0.0, DiscClass::N, preset_profile(Preset::SmallSolution, grid), default_options_2d()),
                    DomainError);
    CHECK_THROWS_AS(minimize_2d(-1.0, DiscClass::S, preset_profile(Preset::SmallSolution, grid), default_options_2d()),
                    DomainError);
}

TEST_CASE("second variation at the small solution") {
    const auto grid = uniform_grid(256);
    const MinResult2D m0 =
        minimize_2d(0.0, DiscClass::S, preset_profile(Preset::SmallSolution, grid), default_options_2d());
    const SpectrumResult s0 = second_variation_spectrum(m0.profile, 0.0, 3);
    CHECK(s0.eigenvalues.front() > 0.0);
    const MinResult2D m1 = minimize_2d(0.1, DiscClass::S, m0.profile, default_options_2d());
    const SpectrumResult s1 = second_variation_spectrum(m1.profile, 0.1, 3);
    CHECK(s1.eigenvalues.front() >= -1e-6);
    const std::vector<double> zero(5 * grid.size(), 0.0);
    CHECK(second_variation_form(m0.profile, 0.0, zero) == 0.0);
    MESSAGE("smallest eigenvalues " << s0.eigenvalues[0] << " " << s1.eigenvalues[0]);
    // A clearly non-stationary profile is rejected.
    CHECK_THROWS_AS(second_variation_spectrum(preset_profile(Preset::SmallSolution, grid, 0.05, 9), 0.0, 1),
                    DomainError);
}
