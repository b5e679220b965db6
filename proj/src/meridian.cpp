#include "ldg/meridian.hpp"

#include "ldg/closed_forms.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

namespace ldg {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kAngular[5] = {0.0, 1.0, 1.0, 4.0, 4.0};
// Boundary edges shorter than this fraction of the spacing are lengthened to it.
constexpr double kMinCrossing = 0.25;

double quarter_arc(double rho, double t) {
    const double v = std::pow(rho, 4) - std::pow(t, 4);
    return v > 0.0 ? std::pow(v, 0.25) : 0.0;
}
}  // namespace

bool CylinderGeometry::contains(double a, double b) const {
    const double ab = std::abs(b);
    if (a < 0.0 || a > ell || ab > h) return false;
    const double da = a - (ell - rho), db = ab - (h - rho);
    if (da > 0.0 && db > 0.0) return da * da * da * da + db * db * db * db <= std::pow(rho, 4);
    return true;
}

double CylinderGeometry::wall_r(double b) const {
    const double ab = std::abs(b);
    if (ab > h) throw DomainError("wall_r: height outside the cylinder");
    if (ab <= h - rho) return ell;
    return ell - rho + quarter_arc(rho, ab - (h - rho));
}

double CylinderGeometry::cap_z(double a) const {
    if (a < 0.0 || a > ell) throw DomainError("cap_z: radius outside the cylinder");
    if (a <= ell - rho) return h;
    return h - rho + quarter_arc(rho, a - (ell - rho));
}

std::array<double, 2> CylinderGeometry::normal(double a, double b, double tol) const {
    const double ab = std::abs(b);
    const double sgn = b >= 0.0 ? 1.0 : -1.0;
    const double da = a - (ell - rho), db = ab - (h - rho);
    if (ab <= h - rho + tol && std::abs(a - ell) <= tol) return {1.0, 0.0};
    if (a <= ell - rho + tol && std::abs(ab - h) <= tol) return {0.0, sgn};
    if (da >= -tol && db >= -tol) {
        const double p = std::pow(std::max(da, 0.0), 4) + std::pow(std::max(db, 0.0), 4);
        if (std::abs(std::pow(p, 0.25) - rho) <= tol) {
            const double nr = std::pow(std::max(da, 0.0), 3), nz = std::pow(std::max(db, 0.0), 3);
            const double n = std::hypot(nr, nz);
            return {nr / n, sgn * nz / n};
        }
    }
    throw DomainError("normal: point is not on the boundary");
}

double CylinderGeometry::rectangle_gap() const { return std::sqrt(2.0) * rho * (1.0 - std::pow(2.0, -0.25)); }

CylinderGeometry build_geometry(double h, double ell, double rho) {
    if (!(h > 0.0 && ell > 0.0 && rho > 0.0 && 2.0 * rho < std::min(h, ell)))
        throw DomainError("build_geometry: need 0 < 2 rho < min(h, ell)");
    return {h, ell, rho};
}

UVector homeotropic_datum(const CylinderGeometry& g, double a, double b) {
    const auto n = g.normal(a, b, 1e-9 * std::max(g.h, g.ell));
    return q_to_u(uniaxial_normalized(Eigen::Vector3d(n[0], 0.0, n[1])));
}

MeridianGrid build_grid(const CylinderGeometry& geom, double spacing) {
    if (!(spacing > 0.0)) throw DomainError("build_grid: spacing must be positive");
    MeridianGrid g;
    g.geom = geom;
    g.nr = std::max(4, static_cast<int>(std::lround(geom.ell / spacing)));
    g.nz = 2 * std::max(2, static_cast<int>(std::lround(geom.h / spacing))) + 1;
    g.hr = geom.ell / g.nr;
    g.hz = 2.0 * geom.h / g.nz;
    g.kind.assign(static_cast<std::size_t>(g.nr) * g.nz, NodeKind::Exterior);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i)
            if (g.r(i) < g.geom.wall_r(g.z(j)) && std::abs(g.z(j)) < g.geom.cap_z(g.r(i)))
                g.kind[g.index(i, j)] = NodeKind::Interior;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            if (!g.inside(i, j)) continue;
            if (!g.inside(i + 1, j) || !g.inside(i, j + 1) || !g.inside(i, j - 1))
                g.kind[g.index(i, j)] = NodeKind::NearBoundary;
        }
    const InclusionReport inc = check_inclusions(g);
    if (!(inc.inner_lateral && inc.inner_caps && inc.outer))
        throw std::logic_error("build_grid: mask violates the rectangle inclusions");
    return g;
}

InclusionReport check_inclusions(const MeridianGrid& g) {
    InclusionReport rep;
    const auto& G = g.geom;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const double a = g.r(i), b = std::abs(g.z(j));
            const bool in = g.inside(i, j);
            if (a <= G.ell - G.rho && b <= G.h && !in) rep.inner_lateral = false;
            if (a <= G.ell && b <= G.h - G.rho && !in) rep.inner_caps = false;
            if (in && (a > G.ell || b > G.h)) rep.outer = false;
        }
    return rep;
}

MeridianDiscretization::MeridianDiscretization(const MeridianGrid& grid) : grid_(grid) {
    const int nr = grid.nr, nz = grid.nz;
    const double hr = grid.hr, hz = grid.hz;
    const auto& G = grid.geom;
    unknown_of_.assign(static_cast<std::size_t>(nr) * nz, -1);
    for (int j = 0; j < nz; ++j)
        for (int i = 0; i < nr; ++i)
            if (grid.inside(i, j)) {
                unknown_of_[grid.index(i, j)] = static_cast<int>(node_of_.size());
                node_of_.push_back(grid.index(i, j));
            }
    cells_.assign(unknown_of_.size(), {0.0, 0.0, 0.0, 0.0});
    mass_.resize(node_of_.size());
    inv_r_area_.resize(node_of_.size());
    r_area_.resize(node_of_.size());

    for (std::size_t k = 0; k < node_of_.size(); ++k) {
        const int i = node_of_[k] % nr, j = node_of_[k] / nr;
        const double r = grid.r(i), z = grid.z(j);
        const int u = static_cast<int>(k);
        double r_hi = r + 0.5 * hr, z_hi = z + 0.5 * hz, z_lo = z - 0.5 * hz;
        const double r_lo = i == 0 ? 0.0 : r - 0.5 * hr;
        const std::size_t first_cross = cross_.size();
        bool lateral = false;

        if (grid.inside(i + 1, j)) {
            edges_.push_back({u, unknown_of_[grid.index(i + 1, j)], (r + 0.5 * hr) * hz / hr});
        } else {
            const double a = G.wall_r(z);
            const double d = a - r;
            r_hi = r + std::min(0.5 * hr, d);
            cross_.push_back({u, 0.0, a, z, homeotropic_datum(G, a, z)});
            lateral = true;
        }
        if (grid.inside(i, j + 1)) {
            edges_.push_back({u, unknown_of_[grid.index(i, j + 1)], r * hr / hz});
        } else {
            const double b = G.cap_z(r);
            z_hi = z + std::min(0.5 * hz, b - z);
            cross_.push_back({u, 0.0, r, b, homeotropic_datum(G, r, b)});
        }
        if (!grid.inside(i, j - 1)) {
            const double b = -G.cap_z(r);
            z_lo = z - std::min(0.5 * hz, z - b);
            cross_.push_back({u, 0.0, r, b, homeotropic_datum(G, r, b)});
        }
        const double er = r_hi - r_lo, ez = z_hi - z_lo;
        // Boundary edge weights: (midpoint radius) * (face length) / (edge length).
        for (std::size_t c = first_cross; c < cross_.size(); ++c) {
            auto& x = cross_[c];
            if (lateral && c == first_cross) {
                const double d = std::max(x.a - r, kMinCrossing * hr);
                x.weight = (r + 0.5 * (x.a - r)) * ez / d;
            } else {
                const double d = std::max(std::abs(x.b - z), kMinCrossing * hz);
                x.weight = r * er / d;
            }
        }
        const double area = er * ez;
        cells_[node_of_[k]] = {r_lo, r_hi, z_lo, z_hi};
        r_area_[k] = r * area;
        inv_r_area_[k] = area / r;
        mass_[k] = 2.0 * kPi * r * area;
    }
}

double MeridianDiscretization::energy(const std::vector<double>& x, double lambda, std::vector<double>* grad,
                                      EnergyParts3D* parts) const {
    if (grad) grad->assign(x.size(), 0.0);
    long double dir = 0.0L, bnd = 0.0L, pot = 0.0L;
    for (const Edge& e : edges_) {
        const double* a = &x[5 * e.a];
        const double* b = &x[5 * e.b];
        double d2 = 0.0;
        for (int i = 0; i < 5; ++i) d2 += (b[i] - a[i]) * (b[i] - a[i]);
        double slope = 0.0;
        dir += kPi * e.weight * geodesic_sq(d2, &slope);
        if (grad) {
            const double c = 2.0 * kPi * e.weight * slope;
            for (int i = 0; i < 5; ++i) {
                (*grad)[5 * e.a + i] -= c * (b[i] - a[i]);
                (*grad)[5 * e.b + i] += c * (b[i] - a[i]);
            }
        }
    }
    for (const Crossing& c : cross_) {
        const double* a = &x[5 * c.unknown];
        const auto g = c.datum.arr();
        double d2 = 0.0;
        for (int i = 0; i < 5; ++i) d2 += (a[i] - g[i]) * (a[i] - g[i]);
        double slope = 0.0;
        bnd += kPi * c.weight * geodesic_sq(d2, &slope);
        if (grad)
            for (int i = 0; i < 5; ++i) (*grad)[5 * c.unknown + i] += 2.0 * kPi * c.weight * slope * (a[i] - g[i]);
    }
    for (std::size_t k = 0; k < node_of_.size(); ++k) {
        const double* a = &x[5 * k];
        double ang = 0.0;
        for (int i = 1; i < 5; ++i) ang += kAngular[i] * a[i] * a[i];
        dir += kPi * inv_r_area_[k] * ang;
        const UVector u = UVector::from_array(a);
        pot += 2.0 * kPi * r_area_[k] * potential_w_ext(u);
        if (grad) {
            for (int i = 1; i < 5; ++i) (*grad)[5 * k + i] += 2.0 * kPi * inv_r_area_[k] * kAngular[i] * a[i];
            if (lambda != 0.0) {
                const auto g = det_q_gradient(u).arr();
                for (int i = 0; i < 5; ++i) (*grad)[5 * k + i] -= 2.0 * kPi * lambda * r_area_[k] * g[i];
            }
        }
    }
    const double total = static_cast<double>(dir + bnd + lambda * pot);
    if (parts) *parts = {total, static_cast<double>(dir), static_cast<double>(bnd), static_cast<double>(pot)};
    return total;
}

std::vector<double> MeridianDiscretization::node_energies(const std::vector<double>& x, double lambda) const {
    std::vector<double> out(unknown_of_.size(), 0.0);
    for (const Edge& e : edges_) {
        double d2 = 0.0;
        for (int i = 0; i < 5; ++i) d2 += std::pow(x[5 * e.b + i] - x[5 * e.a + i], 2);
        const double v = 0.5 * kPi * e.weight * geodesic_sq(d2);
        out[node_of_[e.a]] += v;
        out[node_of_[e.b]] += v;
    }
    for (const Crossing& c : cross_) {
        const auto g = c.datum.arr();
        double d2 = 0.0;
        for (int i = 0; i < 5; ++i) d2 += std::pow(x[5 * c.unknown + i] - g[i], 2);
        out[node_of_[c.unknown]] += kPi * c.weight * geodesic_sq(d2);
    }
    for (std::size_t k = 0; k < node_of_.size(); ++k) {
        const double* a = &x[5 * k];
        double ang = 0.0;
        for (int i = 1; i < 5; ++i) ang += kAngular[i] * a[i] * a[i];
        out[node_of_[k]] += kPi * inv_r_area_[k] * ang +
                            2.0 * kPi * lambda * r_area_[k] * potential_w_ext(UVector::from_array(a));
    }
    return out;
}

std::vector<double> MeridianDiscretization::pack(const MeridianField& F) const {
    std::vector<double> x(5 * node_of_.size());
    for (std::size_t k = 0; k < node_of_.size(); ++k) F.f[node_of_[k]].to_array(&x[5 * k]);
    return x;
}

void MeridianDiscretization::unpack(const std::vector<double>& x, MeridianField& F) const {
    for (std::size_t k = 0; k < node_of_.size(); ++k) F.f[node_of_[k]] = UVector::from_array(&x[5 * k]);
}

namespace {
void require_unit_field(const MeridianField& F, const char* where) {
    if (F.f.size() != F.grid.kind.size()) throw DomainError(std::string(where) + ": field size mismatch");
    for (std::size_t k = 0; k < F.f.size(); ++k)
        if (F.grid.kind[k] != NodeKind::Exterior && std::abs(F.f[k].norm() - 1.0) > 1e-9)
            throw DomainError(std::string(where) + ": node off the unit sphere");
}
}  // namespace

EnergyParts3D meridian_energy(const MeridianField& F, double lambda) {
    if (lambda < 0.0) throw DomainError("meridian_energy: lambda must be nonnegative");
    require_unit_field(F, "meridian_energy");
    MeridianDiscretization disc(F.grid);
    EnergyParts3D parts;
    disc.energy(disc.pack(F), lambda, nullptr, &parts);
    return parts;
}

const char* to_string(Seed s) { return s == Seed::Split ? "split" : "torus"; }

MeridianField extend_profile(const MeridianGrid& grid, const RadialProfile& p) {
    MeridianField F{grid, std::vector<UVector>(grid.kind.size(), e0_vec())};
    for (int j = 0; j < grid.nz; ++j)
        for (int i = 0; i < grid.nr; ++i)
            if (grid.inside(i, j)) F.at(i, j) = renormalize(p.at(grid.r(i) / grid.geom.ell));
    return F;
}

MeridianField seed_field(const MeridianGrid& grid, Seed seed, const RadialProfile* disc_profile) {
    if (seed == Seed::Torus) return MeridianField{grid, std::vector<UVector>(grid.kind.size(), e0_vec())};
    if (disc_profile) return extend_profile(grid, *disc_profile);
    return extend_profile(grid, sample_profile(small_solution_uS, uniform_grid(512)));
}

SolveOptions default_options_3d() {
    SolveOptions o;
    o.grad_tol = 1e-5;
    o.energy_tol = 1e-13;
    o.patience = 300;
    o.max_iters = 200000;
    o.memory = 12;
    return o;
}

MinResult3D minimize_3d(double lambda, const MeridianField& init, const SolveOptions& opts,
                        const IterationObserver& observer) {
    if (lambda < 0.0) throw DomainError("minimize_3d: lambda must be nonnegative");
    require_unit_field(init, "minimize_3d");
    MeridianDiscretization disc(init.grid);
    SphereProblem prob;
    prob.nodes = disc.unknowns();
    prob.fixed.assign(prob.nodes, 0);
    prob.mass = disc.mass();
    prob.energy = [&](const std::vector<double>& x, std::vector<double>* g) { return disc.energy(x, lambda, g, nullptr); };
    const OptResult opt = minimize_on_spheres(prob, disc.pack(init), opts, observer);
    if (!std::isfinite(opt.energy)) throw DomainError("minimize_3d: energy diverged");

    MinResult3D res;
    res.field = init;
    disc.unpack(opt.x, res.field);
    disc.energy(opt.x, lambda, nullptr, &res.parts);
    res.stationarity = opt.stationarity;
    res.iterations = opt.iterations;
    res.stop_reason = to_string(opt.reason);
    res.monotone = opt.monotone;
    res.converged = opt.reason == StopReason::GradTol || opt.reason == StopReason::EnergyTol;
    try {
        res.classification = classify(res.field);
    } catch (const DomainError& e) {
        res.axis_error = e.what();
    }
    return res;
}

void write_field_csv(const MeridianField& F, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    write_field_csv(F, out);
}

void write_field_csv(const MeridianField& F, std::ostream& out) {
    out << "r,x3,f0,re_f1,im_f1,re_f2,im_f2,beta\n" << std::setprecision(17);
    const auto& g = F.grid;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            if (!g.inside(i, j)) continue;
            const UVector& u = F.at(i, j);
            out << g.r(i) << ',' << g.z(j) << ',' << u.u0 << ',' << u.u1.real() << ',' << u.u1.imag() << ','
                << u.u2.real() << ',' << u.u2.imag() << ',' << beta_tilde(u) << '\n';
        }
}

void write_mask_csv(const MeridianGrid& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "i,j,r,x3,kind\n" << std::setprecision(17);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i)
            out << i << ',' << j << ',' << g.r(i) << ',' << g.z(j) << ','
                << static_cast<int>(g.kind[g.index(i, j)]) << '\n';
}

}  // namespace ldg
