// Acceptance gates 1-12. Prints one line per criterion; exit status is nonzero if any fails.
// Usage: acceptance [criterion ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <future>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ldg/closed_forms.hpp"
#include "ldg/meridian.hpp"
#include "ldg/radial2d.hpp"

using namespace ldg;

namespace {
constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

struct Criterion {
    int id;
    const char* title;
    double limit_seconds;
    std::function<void(Outcome&)> run;
};

// ---- shared solves ------------------------------------------------------------------------

constexpr double kCigarSpacing = 0.025;
constexpr double kPancakeSpacing = 0.05;
constexpr double kSweepSpacing = 0.05;
constexpr int kDiscIntervals = 256;

struct Solve3D {
    MinResult3D result;
    MinResult2D disc;  // class S disc minimizer at lambda ell^2 (split seeds only)
};

Solve3D solve(double h, double ell, double rho, double lambda, double spacing, Seed seed) {
    const auto grid = build_grid(build_geometry(h, ell, rho), spacing);
    Solve3D s;
    if (seed == Seed::Split) {
        s.disc = class_s_minimum(lambda * ell * ell, kDiscIntervals, default_options_2d());
        s.result = minimize_3d(lambda, seed_field(grid, seed, &s.disc.profile), default_options_3d());
    } else {
        s.result = minimize_3d(lambda, seed_field(grid, seed), default_options_3d());
    }
    return s;
}

const Classification* classification(const Solve3D& s) {
    return s.result.classification ? &*s.result.classification : nullptr;
}

// ---- criteria -----------------------------------------------------------------------------

void closed_form_energies(Outcome& o) {
    struct Named {
        const char* name;
        std::function<UVector(cplx)> u;
        double reference;
    };
    const std::vector<Named> fields = {
        {"small", small_solution_uS, 2.0 * pi},
        {"mu1=0", [](cplx z) { return large_solution(0.0, z); }, 6.0 * pi},
        {"mu1=1", [](cplx z) { return large_solution(1.0, z); }, 6.0 * pi},
        {"mu1=sqrt3", [](cplx z) { return large_solution(std::sqrt(3.0), z); }, 6.0 * pi},
        {"mu1=5", [](cplx z) { return large_solution(5.0, z); }, 6.0 * pi},
        {"mu1=10+10i", [](cplx z) { return large_solution(cplx(10.0, 10.0), z); }, 6.0 * pi},
    };
    double worst = 0.0, worst_order = 0.0;
    for (const auto& f : fields) {
        double e[3];
        int k = 0;
        for (int n : {512, 1024, 2048}) e[k++] = radial_energy(sample_profile(f.u, uniform_grid(n)), 0.0).dirichlet;
        const double err = std::abs(e[2] - f.reference);
        const double order = std::log2((e[0] - e[1]) / (e[1] - e[2]));
        worst = std::max(worst, err);
        worst_order = std::max(worst_order, std::abs(order - 2.0));
        o.require(err < 1e-3, std::string(f.name) + " energy");
        o.require(std::abs(order - 2.0) < 0.2, std::string(f.name) + " order");
    }
    o.detail << "max |E - E_ref| = " << worst << ", max |order - 2| = " << worst_order;
}

void potential_integral(Outcome& o) {
    const double exact = -(std::sqrt(6.0) / 4.0) * pi + (std::sqrt(2.0) / 6.0) * pi * pi;
    const double value = radial_energy(sample_profile(small_solution_uS, uniform_grid(2048)), 1.0).potential;
    o.require(std::abs(value - exact) < 1e-4, "potential integral");
    o.detail << "integral = " << value << ", closed form = " << exact;
}

void conformality(Outcome& o) {
    const SquareGrid grid{257, 1.0};
    double worst = 0.0;
    for (cplx mu : {cplx(0.0), cplx(1.0), cplx(std::sqrt(3.0)), cplx(1.7, 0.3)}) {
        const PlanarField u = [mu](cplx z) { return large_solution(mu, z); };
        worst = std::max({worst, conformality_residual(u, grid), isotropy_residual(u, grid)});
    }
    const PlanarField control = [](cplx z) { return UVector{std::cos(z.real()), {std::sin(z.real()), 0.0}, {0.0, 0.0}}; };
    const double c = conformality_residual(control, grid);
    o.require(worst < 1e-4, "family residual");
    o.require(c > 1e-1, "control residual");
    o.detail << "family max residual = " << worst << ", control = " << c;
}

void gap_2d(Outcome& o) {
    const auto grid = uniform_grid(2048);
    const auto s = minimize_2d(0.0, DiscClass::S, preset_profile(Preset::SmallSolution, grid, 0.01, 11),
                               default_options_2d());
    const auto n = minimize_2d(0.0, DiscClass::N, preset_profile(Preset::GHbar, grid, 0.01, 12), default_options_2d());
    double d_plus = 0.0, d_minus = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        d_plus = std::max(d_plus, (n.profile.f[k] - g_hbar(grid[k])).norm());
        d_minus = std::max(d_minus, (n.profile.f[k] - g_hbar(-grid[k])).norm());
    }
    const double d = std::min(d_plus, d_minus);
    o.require(std::abs(s.energy - 2.0 * pi) < 5e-3 && s.class_preserved, "class S minimum");
    o.require(std::abs(n.energy - 6.0 * pi) < 5e-3 && n.class_preserved, "class N minimum");
    o.require(d < 2e-2, "class N profile");
    o.detail << "E_S - 2pi = " << s.energy - 2.0 * pi << ", E_N - 6pi = " << n.energy - 6.0 * pi
             << ", profile distance = " << d;
}

void energy_curve_check(Outcome& o) {
    std::vector<double> lambdas;
    for (int k = 0; k < 20; ++k) lambdas.push_back(50.0 * k);
    const auto rows = energy_curve(lambdas, kDiscIntervals, default_options_2d());
    double min_step = 1e300, max_second = -1e300, worst_e = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        o.require(rows[k].valid, "row valid");
        o.require(rows[k].e_star >= 2.0 * pi - 5e-3 && rows[k].e_star <= 10.0 * pi + 5e-3, "range");
        worst_e = std::max(worst_e, std::abs(rows[k].e - std::min(6.0 * pi, rows[k].e_star)));
        if (k > 0) min_step = std::min(min_step, rows[k].e_star - rows[k - 1].e_star);
        if (k > 0 && k + 1 < rows.size())
            max_second = std::max(max_second, rows[k + 1].e_star - 2.0 * rows[k].e_star + rows[k - 1].e_star);
    }
    o.require(min_step >= 0.0, "nondecreasing");
    o.require(max_second <= 1e-3, "second differences");
    o.require(worst_e <= 5e-3, "e = min(6 pi, e*)");
    o.detail << "e*/pi from " << rows.front().e_star / pi << " to " << rows.back().e_star / pi
             << ", min increment = " << min_step << ", max second difference = " << max_second;
}

void lambda_star_check(Outcome& o) {
    const auto r = estimate_lambda_star(0.5, kDiscIntervals, default_options_2d());
    o.require(r.hi - r.lo <= 0.5, "width");
    o.require(r.lo >= lambda_star_lower_bound() && r.hi <= lambda_star_upper_bound(), "containment");
    auto global = [](double lambda) {
        const auto s = class_s_minimum(lambda, kDiscIntervals, default_options_2d());
        const auto n = minimize_2d(lambda, DiscClass::N, preset_profile(Preset::GHbar, uniform_grid(kDiscIntervals)),
                                   default_options_2d());
        return s.energy < n.energy ? s : n;
    };
    const auto below = global(0.5 * r.lo), above = global(2.0 * r.hi);
    o.require(below.beta_min <= -1.0 + 2e-2 && below.beta_max >= 1.0 - 2e-2, "biaxial escape below");
    o.require(above.beta_min >= 1.0 - 1e-6 && above.potential <= 1e-6, "uniaxial above");
    o.detail << "interval [" << r.lo << ", " << r.hi << "]; below: beta in [" << below.beta_min << ", "
             << below.beta_max << "]; above: beta min " << above.beta_min << ", potential " << above.potential;
}

void tangent_cost(Outcome& o) {
    double worst = 0.0;
    for (double r : {0.25, 0.5, 1.0}) worst = std::max(worst, std::abs(tangent_map_scaled_energy(r) - 4.0 * pi));
    o.require(worst < 1e-2, "scaled energy");
    o.detail << "max |E/r - 4pi| = " << worst;
}

void cigar_split(Outcome& o) {
    const auto s = solve(8.0, 0.6, 0.2, 1.0, kCigarSpacing, Seed::Split);
    const auto* c = classification(s);
    o.require(c != nullptr, "axis resolved");
    if (!c) return;
    int below = 0, above = 0;
    for (const auto& x : c->singularities) (x.position < 0.0 ? below : above)++;
    const auto& grid = s.result.field.grid;
    const int j = grid.mid_row();
    double mid = 0.0;
    for (int i = 0; i < grid.nr; ++i)
        if (grid.inside(i, j)) mid = std::max(mid, (s.result.field.at(i, j) - s.disc.profile.at(grid.r(i) / 0.6)).norm());
    o.require(c->shape == Shape::Split, "shape");
    o.require(c->singularities.size() % 2 == 0 && below % 2 == 1 && above % 2 == 1, "parity");
    o.require(c->beta_min <= -1.0 + 2e-2 && c->beta_max >= 1.0 - 2e-2, "beta range");
    o.require(mid <= 3e-2, "midplane");
    o.detail << "shape " << to_string(c->shape) << ", sign changes " << below << "+" << above << ", beta in ["
             << c->beta_min << ", " << c->beta_max << "], midplane distance " << mid;
}

void pancake_torus(Outcome& o) {
    auto wide = std::async(std::launch::async, [] { return solve(0.8, 12.0, 0.2, 1.0, kPancakeSpacing, Seed::Torus); });
    const auto half = solve(0.8, 6.0, 0.2, 1.0, kPancakeSpacing, Seed::Torus);
    const auto s = wide.get();
    const auto* c = classification(s);
    o.require(c != nullptr, "axis resolved");
    if (!c) return;
    const double ratio12 = cylinder_energy(s.result.field, 1.0, 6.0) / 12.0;
    const double ratio6 = cylinder_energy(half.result.field, 1.0, 3.0) / 6.0;
    o.require(c->shape == Shape::Torus, "shape");
    o.require(c->singularities.empty(), "no singularities");
    o.require(c->ring.present && c->ring.beta_min <= -0.99 && c->ring.r > 0.0, "ring");
    o.require(ratio12 < 0.5 * ratio6, "interior ratio");
    o.detail << "shape " << to_string(c->shape) << ", ring beta " << c->ring.beta_min << " at r = " << c->ring.r
             << ", interior ratio " << ratio12 << " vs " << ratio6;
}

void growth_laws(Outcome& o) {
    std::vector<std::future<Solve3D>> cig, pan;
    for (double h : {4.0, 8.0, 12.0})
        cig.push_back(std::async(std::launch::async, [h] { return solve(h, 0.6, 0.2, 1.0, kCigarSpacing, Seed::Split); }));
    for (double ell : {6.0, 9.0, 12.0})
        pan.push_back(
            std::async(std::launch::async, [ell] { return solve(0.8, ell, 0.2, 1.0, kPancakeSpacing, Seed::Torus); }));
    const std::vector<double> hs = {4.0, 8.0, 12.0}, ells = {6.0, 9.0, 12.0};
    std::vector<double> e;
    double disc = 0.0;
    for (auto& f : cig) {
        const auto s = f.get();
        e.push_back(s.result.parts.total);
        disc = std::min(6.0 * pi, s.disc.energy);
    }
    const double mx = 8.0, my = (e[0] + e[1] + e[2]) / 3.0;
    double sxy = 0.0, sxx = 0.0;
    for (int k = 0; k < 3; ++k) {
        sxy += (hs[k] - mx) * (e[k] - my);
        sxx += (hs[k] - mx) * (hs[k] - mx);
    }
    const double slope = sxy / sxx;
    std::vector<double> K;
    for (std::size_t k = 0; k < pan.size(); ++k) K.push_back(pan[k].get().result.parts.total / ells[k]);
    const double kmax = *std::max_element(K.begin(), K.end()), kmin = *std::min_element(K.begin(), K.end());
    o.require(std::abs(slope - 2.0 * disc) <= 0.05 * 2.0 * disc, "cigar slope");
    o.require((kmax - kmin) / kmax <= 0.2, "pancake K");
    o.detail << "cigar slope " << slope << " vs " << 2.0 * disc << "; pancake E/ell in [" << kmin << ", " << kmax << "]";
}

void shape_sweep(Outcome& o) {
    const std::vector<double> ells = {0.6, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 9.0, 12.0};
    std::vector<std::future<Solve3D>> split, torus;
    for (double ell : ells) {
        split.push_back(std::async(std::launch::async, [ell] { return solve(2.0, ell, 0.2, 1.0, kSweepSpacing, Seed::Split); }));
        torus.push_back(std::async(std::launch::async, [ell] { return solve(2.0, ell, 0.2, 1.0, kSweepSpacing, Seed::Torus); }));
    }
    std::vector<Shape> global;
    double best = 1e300, best_ell = 0.0;
    for (std::size_t k = 0; k < ells.size(); ++k) {
        const auto a = split[k].get(), b = torus[k].get();
        const auto *ca = classification(a), *cb = classification(b);
        o.require(ca && cb, "axis resolved");
        if (!ca || !cb) return;
        const double ea = a.result.parts.total, eb = b.result.parts.total;
        global.push_back(ea <= eb ? ca->shape : cb->shape);
        const bool stationary = a.result.stationarity <= 1e-2 && b.result.stationarity <= 1e-2;
        if (ca->shape == Shape::Split && cb->shape == Shape::Torus && stationary) {
            const double gap = std::abs(ea - eb) / std::min(ea, eb);
            if (gap < best) {
                best = gap;
                best_ell = ells[k];
            }
        }
    }
    o.require(global.front() == Shape::Split, "split at small ell");
    o.require(global.back() == Shape::Torus, "torus at large ell");
    o.require(best < 2e-2, "coexistence witness");
    o.detail << "global shapes:";
    for (std::size_t k = 0; k < ells.size(); ++k) o.detail << ' ' << ells[k] << ':' << to_string(global[k]);
    o.detail << "; coexistence at ell = " << best_ell << " with relative gap " << best;
}

void second_variation(Outcome& o) {
    const auto grid = uniform_grid(kDiscIntervals);
    double smallest[2];
    int k = 0;
    RadialProfile warm = preset_profile(Preset::SmallSolution, grid);
    for (double lambda : {0.0, 0.1}) {
        const auto m = minimize_2d(lambda, DiscClass::S, warm, default_options_2d());
        warm = m.profile;
        smallest[k++] = second_variation_spectrum(m.profile, lambda, 1).eigenvalues.front();
    }
    o.require(smallest[0] >= -1e-6 && smallest[1] >= -1e-6, "disc Hessian");
    const auto s = solve(8.0, 0.6, 0.2, 1.0, kCigarSpacing, Seed::Split);
    const auto* c = classification(s);
    o.require(c && !c->singularities.empty(), "split minimizer with a singularity");
    if (!c || c->singularities.empty()) return;
    const TestProfile eta{0.0, 0.1};
    const double deficit = hardy_deficit(eta);
    const double form = instability_form(s.result.field, 1.0, c->singularities.back().position, 0.15, eta);
    o.require(deficit < 0.0, "admissible test function");
    o.require(form < 0.0, "instability form");
    o.detail << "smallest eigenvalues " << smallest[0] << ", " << smallest[1] << "; Hardy deficit " << deficit
             << ", instability form " << form;
}

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {1, "closed-form energies", 1.0, closed_form_energies},
        {2, "potential integral", 1.0, potential_integral},
        {3, "conformality and isotropy", 5.0, conformality},
        {4, "2D gap by optimization", 120.0, gap_2d},
        {5, "energy curve", 900.0, energy_curve_check},
        {6, "escape threshold", 1800.0, lambda_star_check},
        {7, "tangent map cost", 5.0, tangent_cost},
        {8, "cigar split", 1200.0, cigar_split},
        {9, "pancake torus", 1800.0, pancake_torus},
        {10, "energy growth laws", 3600.0, growth_laws},
        {11, "shape sweep", 7200.0, shape_sweep},
        {12, "second variation and instability", 600.0, second_variation},
    };
    return list;
}
}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        char* end = nullptr;
        const long v = std::strtol(argv[i], &end, 10);
        if (*end || v < 1 || v > 12) {
            std::fprintf(stderr, "usage: %s [criterion 1-12 ...]\n", argv[0]);
            return 2;
        }
        selected.push_back(static_cast<int>(v));
    }
    bool all = true;
    for (const auto& c : criteria()) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "[exception: " << e.what() << "]";
        }
        const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (t > c.limit_seconds) o.require(false, "runtime");
        std::printf("criterion %2d %s  %s: %s (%.1f s, limit %.0f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title,
                    o.detail.str().c_str(), t, c.limit_seconds);
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
