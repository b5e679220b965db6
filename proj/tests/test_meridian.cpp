#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ldg/closed_forms.hpp"
#include "ldg/meridian.hpp"
#include "ldg/radial2d.hpp"

using namespace ldg;

namespace {
constexpr double pi = std::numbers::pi;

MeridianField fill(const MeridianGrid& g, const std::function<UVector(double, double)>& u) {
    MeridianField F{g, std::vector<UVector>(g.kind.size(), e0_vec())};
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i)
            if (g.inside(i, j)) F.at(i, j) = u(g.r(i), g.z(j));
    return F;
}

// Smooth field whose gradient vanishes for |x3| >= h - rho, so corner rounding does not
// change its energy: angle theta = c r^2 cos^4(pi x3 / (2 (h - rho))) in the (e0, Re f2) plane.
struct BumpField {
    double h, rho, c;
    double bump(double z) const {
        const double w = h - rho;
        if (std::abs(z) >= w) return 0.0;
        return std::pow(std::cos(pi * z / (2.0 * w)), 4);
    }
    double dbump(double z) const {
        const double w = h - rho;
        if (std::abs(z) >= w) return 0.0;
        const double t = pi * z / (2.0 * w);
        return -4.0 * std::pow(std::cos(t), 3) * std::sin(t) * pi / (2.0 * w);
    }
    UVector operator()(double r, double z) const {
        const double t = c * r * r * bump(z);
        return UVector{std::cos(t), {0.0, 0.0}, {std::sin(t), 0.0}};
    }
    // pi int (theta_r^2 + theta_3^2 + 4 sin^2 theta / r^2) r dr dx3 over [0, ell] x [-h, h], midpoint rule.
    double energy(double ell, int n) const {
        long double s = 0.0L;
        const double dr = ell / n, dz = 2.0 * h / n;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const double r = (a + 0.5) * dr, z = -h + (b + 0.5) * dz;
                const double t = c * r * r * bump(z), tr = 2.0 * c * r * bump(z), tz = c * r * r * dbump(z);
                s += (tr * tr + tz * tz + 4.0 * std::sin(t) * std::sin(t) / (r * r)) * r;
            }
        return static_cast<double>(pi * s * dr * dz);
    }
};

double discrete_energy_with_trace(const MeridianGrid& g, const BumpField& u) {
    const MeridianField F = fill(g, u);
    MeridianDiscretization d(g);
    for (auto& c : d.crossings()) c.datum = u(c.a, c.b);
    EnergyParts3D parts;
    d.energy(d.pack(F), 0.0, nullptr, &parts);
    return parts.total;
}

MeridianField tangent_field(const MeridianGrid& g, double center) {
    return fill(g, [&](double r, double z) { return tangent_map_u(0.0, 1, Eigen::Vector3d(r, 0.0, z - center)); });
}
}  // namespace

TEST_CASE("smoothed cylinder geometry") {
    const auto G = build_geometry(2.0, 1.0, 0.2);
    CHECK(G.contains(0.5, 0.0));
    CHECK(G.contains(1.0, 0.0));
    CHECK_FALSE(G.contains(1.0, 2.0));
    CHECK_FALSE(G.contains(1.01, 0.0));
    CHECK(G.wall_r(0.0) == doctest::Approx(1.0));
    CHECK(G.cap_z(0.3) == doctest::Approx(2.0));
    // Corner point along the diagonal of the rounding disc.
    const double q = 0.2 * std::pow(2.0, -0.25);
    CHECK(G.wall_r(1.8 + q) == doctest::Approx(0.8 + q).epsilon(1e-12));
    const auto nc = G.normal(0.8 + q, 1.8 + q);
    CHECK(nc[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(nc[1] == doctest::Approx(std::sqrt(0.5)));
    const auto nb = G.normal(0.8 + q, -1.8 - q);
    CHECK(nb[1] == doctest::Approx(-std::sqrt(0.5)));
    CHECK(G.normal(1.0, 0.5)[0] == 1.0);
    CHECK(G.normal(0.3, -2.0)[1] == -1.0);
    CHECK_THROWS_AS(G.normal(0.5, 0.5), DomainError);
    CHECK_THROWS_AS(build_geometry(1.0, 0.3, 0.2), DomainError);
}

TEST_CASE("Hausdorff gap to the rectangle") {
    for (double rho : {0.05, 0.1, 0.2, 0.4}) {
        const auto G = build_geometry(2.0, 1.0, rho);
        // The farthest rectangle point is the corner; its distance to the rounded arc, sampled.
        double worst = 1e9;
        for (int k = 0; k <= 200000; ++k) {
            const double t = 0.5 * pi * k / 200000.0;
            const double a = 1.0 - rho + rho * std::sqrt(std::cos(t)), b = 2.0 - rho + rho * std::sqrt(std::sin(t));
            worst = std::min(worst, std::hypot(1.0 - a, 2.0 - b));
        }
        CHECK(std::abs(G.rectangle_gap() - worst) < 1e-9);
    }
    double last = 1.0;
    for (double rho : {0.4, 0.2, 0.1, 0.05}) {
        const double gap = build_geometry(2.0, 1.0, rho).rectangle_gap();
        CHECK(gap < last);
        last = gap;
    }
}

TEST_CASE("grid layout and inclusions") {
    for (double sp : {0.1, 0.05, 0.025}) {
        const auto g = build_grid(build_geometry(1.0, 0.6, 0.2), sp);
        CHECK(g.nz % 2 == 1);
        CHECK(std::abs(g.z(g.mid_row())) < 1e-12);
        CHECK(g.r(0) == doctest::Approx(0.5 * g.hr));
        const auto rep = check_inclusions(g);
        CHECK(rep.inner_lateral);
        CHECK(rep.inner_caps);
        CHECK(rep.outer);
    }
    CHECK_THROWS_AS(build_grid(build_geometry(1.0, 0.6, 0.2), 0.0), DomainError);
}

TEST_CASE("homeotropic data") {
    const auto G = build_geometry(2.0, 1.0, 0.2);
    CHECK((homeotropic_datum(G, 0.3, 2.0) - e0_vec()).norm() < 1e-14);
    CHECK((homeotropic_datum(G, 0.3, -2.0) - e0_vec()).norm() < 1e-14);
    CHECK((homeotropic_datum(G, 1.0, 0.4) - lateral_datum()).norm() < 1e-14);
    const double q = 0.2 * std::pow(2.0, -0.25);
    const UVector c = homeotropic_datum(G, 0.8 + q, 1.8 + q);
    CHECK(std::abs(c.norm() - 1.0) < 1e-14);
    CHECK(beta_tilde(c) == doctest::Approx(1.0));
}

TEST_CASE("constant field energy splits into interior and boundary parts") {
    const auto g = build_grid(build_geometry(1.0, 0.6, 0.2), 0.05);
    const MeridianField F = fill(g, [](double, double) { return e0_vec(); });
    const auto parts = meridian_energy(F, 1.0);
    CHECK(parts.dirichlet == 0.0);  // e0 carries no angular term and all interior edges are flat
    CHECK(std::abs(parts.potential) < 1e-14);
    CHECK(parts.boundary > 1.0);  // lateral datum differs from e0
    CHECK(parts.total == doctest::Approx(parts.dirichlet + parts.boundary + parts.potential));

    MeridianField bad = F;
    bad.at(2, 2) = bad.at(2, 2) * 1.1;
    CHECK_THROWS_AS(meridian_energy(bad, 1.0), DomainError);
}

TEST_CASE("discrete energy converges at second order with imposed traces") {
    const BumpField u{1.0, 0.2, 0.8};
    const double exact = u.energy(1.0, 3000);
    std::vector<double> err;
    for (double sp : {0.05, 0.025, 0.0125}) err.push_back(std::abs(discrete_energy_with_trace(build_grid(build_geometry(1.0, 1.0, 0.2), sp), u) - exact));
    CHECK(err[2] < 1e-3);
    for (int k = 0; k < 2; ++k) {
        const double rate = std::log2(err[k] / err[k + 1]);
        CHECK(rate > 1.8);
        CHECK(rate < 2.2);
    }
}

TEST_CASE("energy gradient matches finite differences and node energies sum up") {
    const auto g = build_grid(build_geometry(0.6, 0.5, 0.2), 0.1);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    MeridianField F = fill(g, [&](double, double) {
        UVector v{nd(rng), {nd(rng), nd(rng)}, {nd(rng), nd(rng)}};
        return v * (1.0 / v.norm());
    });
    MeridianDiscretization d(g);
    auto x = d.pack(F);
    std::vector<double> grad;
    const double lambda = 3.0;
    const double e = d.energy(x, lambda, &grad, nullptr);
    double worst = 0.0;
    for (std::size_t k = 0; k < x.size(); k += 7) {
        const double step = 1e-6;
        auto xp = x, xm = x;
        xp[k] += step;
        xm[k] -= step;
        const double fd = (d.energy(xp, lambda, nullptr, nullptr) - d.energy(xm, lambda, nullptr, nullptr)) / (2.0 * step);
        worst = std::max(worst, std::abs(fd - grad[k]) / std::max(1.0, std::abs(fd)));
    }
    CHECK(worst < 1e-6);
    const auto per_node = d.node_energies(x, lambda);
    double sum = 0.0;
    for (double v : per_node) sum += v;
    CHECK(sum == doctest::Approx(e).epsilon(1e-12));
}

TEST_CASE("vertical identity holds exactly for an x3-independent field") {
    const auto g = build_grid(build_geometry(2.0, 0.6, 0.2), 0.05);
    const auto F = extend_profile(g, sample_profile(small_solution_uS, uniform_grid(256)));
    const auto res = energy_identity_residuals(F, 1.0, IdentityParams{0.0, 1.0, 0.5, 0.0, 0.0});
    CHECK(res.vertical < 1e-12);
    CHECK(std::isnan(res.radial));
    CHECK_THROWS_AS(energy_identity_residuals(F, 1.0, IdentityParams{0.0, 1.0, 0.5, 0.5, 1.0}), DomainError);
}

TEST_CASE("tangent map: one axis singularity, 4 pi scaled energy, negative instability form") {
    const auto g = build_grid(build_geometry(1.0, 1.0, 0.2), 0.025);
    const auto T = tangent_field(g, 0.0);
    const auto sing = detect_singularities(T, false);
    REQUIRE(sing.size() == 1);
    CHECK(std::abs(sing[0].position) < g.hz);
    CHECK(sing[0].from == -1);
    CHECK(sing[0].to == 1);
    // With the caps included the bottom cap adds a second change.
    CHECK(detect_singularities(T, true).size() == 2);
    for (double R : {0.2, 0.4, 0.6}) CHECK(std::abs(ball_energy(T, 0.0, R) / R - 4.0 * pi) / (4.0 * pi) < 4e-2);
    const double deficit = hardy_deficit(TestProfile{});
    const double form = instability_form(T, 0.0, 0.0, 0.4, TestProfile{});
    CHECK(form < 0.0);
    CHECK(std::abs(form - deficit) / std::abs(deficit) < 0.15);
}

TEST_CASE("Hardy deficit") {
    // Independent oracle for exponent 0: eta = (1 - s)^2 outside, linear inside.
    const double s0 = 0.1, c = (1.0 - s0) * (1.0 - s0) / s0;
    const double inner = -c * c * std::pow(s0, 3) / 3.0;  // int_0^s0 (c^2 - 2c^2) s^2 ds
    // int_s0^1 (4 (1-s)^2 s^2 - 2 (1-s)^4) ds in closed form.
    auto antideriv = [](double s) {
        return 4.0 * (s * s * s / 3.0 - s * s * s * s / 2.0 + std::pow(s, 5) / 5.0) + 2.0 * std::pow(1.0 - s, 5) / 5.0;
    };
    const double outer = antideriv(1.0) - antideriv(s0);
    CHECK(hardy_deficit(TestProfile{0.0, s0}) == doctest::Approx(4.0 * pi * (inner + outer)).epsilon(1e-9));
    CHECK(hardy_deficit(TestProfile{0.49, 0.1}) < 0.0);
    CHECK(hardy_deficit(TestProfile{0.49, 0.1}) < hardy_deficit(TestProfile{0.0, 0.1}));
    CHECK_THROWS_AS(hardy_deficit(TestProfile{0.6, 0.1}), DomainError);
    TestProfile eta;
    CHECK(eta.value(0.0) == 0.0);
    CHECK(eta.value(1.0) == 0.0);
    CHECK(eta.value(0.5) == doctest::Approx(0.25));
    CHECK(eta.slope(0.5) == doctest::Approx(-1.0));
}

TEST_CASE("instability form rejects balls leaving the domain") {
    const auto g = build_grid(build_geometry(1.0, 1.0, 0.2), 0.05);
    const auto T = tangent_field(g, 0.0);
    CHECK_THROWS_AS(instability_form(T, 0.0, 0.0, 1.5, TestProfile{}), DomainError);
    CHECK_THROWS_AS(instability_form(T, 0.0, 0.0, 0.3, TestProfile{}, 15), DomainError);
}

TEST_CASE("short cigar minimizes to a split state") {
    const auto g = build_grid(build_geometry(2.0, 0.6, 0.2), 0.05);
    const auto disc = class_s_minimum(0.36, 128, default_options_2d());
    const auto res = minimize_3d(1.0, seed_field(g, Seed::Split, &disc.profile), default_options_3d());
    CHECK(res.monotone);
    REQUIRE(res.classification.has_value());
    CHECK(res.classification->shape == Shape::Split);
    CHECK(res.classification->singularities.size() % 2 == 0);
    CHECK(res.classification->beta_min < -0.98);
    CHECK(res.classification->beta_max > 0.98);
    const auto mono = monotonicity_profile(res.field, 1.0, {0.1, 0.2, 0.3, 0.4});
    CHECK(mono.worst_drop < 1e-3);
    CHECK_THROWS_AS(monotonicity_profile(res.field, 1.0, {0.3, 0.2}), DomainError);
}

TEST_CASE("wide pancake minimizes to a torus state") {
    const auto g = build_grid(build_geometry(0.8, 6.0, 0.2), 0.1);
    const auto res = minimize_3d(1.0, seed_field(g, Seed::Torus), default_options_3d());
    REQUIRE(res.classification.has_value());
    CHECK(res.classification->shape == Shape::Torus);
    CHECK(res.classification->singularities.empty());
    CHECK(res.classification->ring.present);
    CHECK(res.classification->ring.r > 0.5 * 6.0);
    CHECK(res.classification->ring.beta_min < -0.99);
}

TEST_CASE("CSV output") {
    const auto g = build_grid(build_geometry(0.6, 0.5, 0.2), 0.1);
    const auto F = seed_field(g, Seed::Torus);
    const auto dir = std::filesystem::temp_directory_path();
    const auto field = (dir / "ldg_field_test.csv").string(), mask = (dir / "ldg_mask_test.csv").string();
    write_field_csv(F, field);
    write_mask_csv(g, mask);
    std::ifstream a(field), b(mask);
    std::string header;
    std::getline(a, header);
    CHECK(header == "r,x3,f0,re_f1,im_f1,re_f2,im_f2,beta");
    std::getline(b, header);
    CHECK(header == "i,j,r,x3,kind");
    std::size_t rows = 0;
    for (std::string line; std::getline(b, line);) ++rows;
    CHECK(rows == g.kind.size());
    std::filesystem::remove(field);
    std::filesystem::remove(mask);
}
