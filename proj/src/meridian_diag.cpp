// Axis trace, classification, energy identities and the instability form for meridian fields.

#include <cmath>
#include <functional>
#include <numbers>
#include <queue>

#include "ldg/meridian.hpp"

namespace ldg {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kAngular[5] = {0.0, 1.0, 1.0, 4.0, 4.0};
constexpr int kSub = 6;  // subsamples per cell side for partial-cell integrals

using Vec5 = std::array<double, 5>;

double dot5(const Vec5& a, const Vec5& b) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += a[i] * b[i];
    return s;
}

// Value of the field continued across the axis: f_k(-r) = (-1)^k f_k(r).
Vec5 mirrored(const UVector& u) { return UVector{u.u0, -u.u1, u.u2}.arr(); }

// Three-point derivative at the middle node from values at offsets -hl, 0, +hr.
Vec5 d1_nonuniform(const Vec5& a, const Vec5& b, const Vec5& c, double hl, double hr) {
    Vec5 d{};
    for (int i = 0; i < 5; ++i)
        d[i] = (hl * hl * (c[i] - b[i]) + hr * hr * (b[i] - a[i])) / (hl * hr * (hl + hr));
    return d;
}

struct NodeGrad {
    Vec5 dr{}, dz{};
};

NodeGrad node_gradient(const MeridianField& F, int i, int j) {
    const auto& g = F.grid;
    const auto& G = g.geom;
    const double r = g.r(i), z = g.z(j);
    const Vec5 mid = F.at(i, j).arr();
    Vec5 left, right, down, up;
    double hl = g.hr, hr = g.hr, hd = g.hz, hu = g.hz;
    left = i == 0 ? mirrored(F.at(0, j)) : F.at(i - 1, j).arr();
    if (g.inside(i + 1, j)) {
        right = F.at(i + 1, j).arr();
    } else {
        const double a = G.wall_r(z);
        hr = std::max(a - r, 1e-3 * g.hr);
        right = homeotropic_datum(G, a, z).arr();
    }
    if (g.inside(i, j + 1)) {
        up = F.at(i, j + 1).arr();
    } else {
        const double b = G.cap_z(r);
        hu = std::max(b - z, 1e-3 * g.hz);
        up = homeotropic_datum(G, r, b).arr();
    }
    if (g.inside(i, j - 1)) {
        down = F.at(i, j - 1).arr();
    } else {
        const double b = -G.cap_z(r);
        hd = std::max(z - b, 1e-3 * g.hz);
        down = homeotropic_datum(G, r, b).arr();
    }
    return {d1_nonuniform(left, mid, right, hl, hr), d1_nonuniform(down, mid, up, hd, hu)};
}

double angular_density(const UVector& u, double r) {
    const auto a = u.arr();
    double s = 0.0;
    for (int i = 1; i < 5; ++i) s += kAngular[i] * a[i] * a[i];
    return s / (r * r);
}

// Energy density per unit meridian area divided by the measure weight r:
// pi (|grad f|^2 + angular + 2 lambda W).
double density(const MeridianField& F, int i, int j, double lambda, NodeGrad* out = nullptr) {
    const NodeGrad g = node_gradient(F, i, j);
    if (out) *out = g;
    const UVector& u = F.at(i, j);
    return kPi * (dot5(g.dr, g.dr) + dot5(g.dz, g.dz) + angular_density(u, F.grid.r(i)) +
                  2.0 * lambda * potential_w_ext(u));
}

template <class Fn>
void for_each_inside(const MeridianGrid& g, Fn&& fn) {
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i)
            if (g.inside(i, j)) fn(i, j);
}

// Sum of fn(a, b) * (sub-cell area) over kSub x kSub midpoints of a cell.
template <class Fn>
double cell_integral(const std::array<double, 4>& c, Fn&& fn) {
    const double da = (c[1] - c[0]) / kSub, db = (c[3] - c[2]) / kSub;
    double s = 0.0;
    for (int p = 0; p < kSub; ++p)
        for (int q = 0; q < kSub; ++q) s += fn(c[0] + (p + 0.5) * da, c[2] + (q + 0.5) * db);
    return s * da * db;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 0) {
    const double m = 0.5 * (a + b);
    const double whole = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
    const double left = (m - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + m)) + f(m));
    const double right = (b - m) / 6.0 * (f(m) + 4.0 * f(0.5 * (m + b)) + f(b));
    if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, 0.5 * tol, depth + 1) + adaptive_simpson(f, m, b, 0.5 * tol, depth + 1);
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

void require_straight_row(const MeridianGrid& g, int j, const char* where) {
    if (j < 1 || j + 1 >= g.nz || std::abs(g.z(j)) + g.hz > g.geom.h - g.geom.rho)
        throw DomainError(std::string(where) + ": slice outside the straight part of the cylinder");
}

int row_of(const MeridianGrid& g, double t) {
    return static_cast<int>(std::lround((t + g.geom.h) / g.hz - 0.5));
}

// One-sided second-order derivative at the lateral wall of a straight row.
Vec5 wall_derivative(const MeridianField& F, int j) {
    const auto& g = F.grid;
    const Vec5 w = lateral_datum().arr();
    const Vec5 f1 = F.at(g.nr - 1, j).arr(), f3 = F.at(g.nr - 2, j).arr();
    const double a = 0.5 * g.hr;
    Vec5 d{};
    for (int i = 0; i < 5; ++i) d[i] = (8.0 * w[i] - 9.0 * f1[i] + f3[i]) / (6.0 * a);
    return d;
}
}  // namespace

AxisTrace axis_trace(const MeridianField& F, double threshold) {
    const auto& g = F.grid;
    AxisTrace t;
    for (int j = 0; j < g.nz; ++j) {
        if (!g.inside(0, j)) continue;
        const double v = F.at(0, j).u0;
        t.z.push_back(g.z(j));
        t.f0.push_back(v);
        t.tag.push_back(v > threshold ? 1 : (v < -threshold ? -1 : 0));
    }
    return t;
}

std::vector<SingularityRecord> detect_singularities(const MeridianField& F, bool include_caps, double threshold,
                                                    int max_span) {
    const AxisTrace t = axis_trace(F, threshold);
    std::vector<double> z = t.z, v = t.f0;
    if (include_caps) {
        z.insert(z.begin(), -F.grid.geom.h);
        v.insert(v.begin(), 1.0);
        z.push_back(F.grid.geom.h);
        v.push_back(1.0);
    }
    // Transition spans without a sign change must stay short.
    int run = 0;
    bool crossed = false;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (std::abs(v[k]) < threshold) {
            ++run;
            if (k > 0 && sign_of(v[k]) != sign_of(v[k - 1])) crossed = true;
        } else {
            if (run > max_span && !crossed)
                throw DomainError("unresolved axis region near x3 = " + std::to_string(z[k]) + "; refine the grid");
            run = 0;
            crossed = false;
        }
    }
    if (run > max_span && !crossed) throw DomainError("unresolved axis region at the end of the axis; refine the grid");

    std::vector<SingularityRecord> out;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        const int s0 = sign_of(v[k]), s1 = sign_of(v[k + 1]);
        if (s0 == 0 || s1 == 0 || s0 == s1) {
            if (s0 == 0 && k > 0 && sign_of(v[k - 1]) != 0 && s1 != 0 && sign_of(v[k - 1]) != s1)
                out.push_back({z[k], sign_of(v[k - 1]), s1});
            continue;
        }
        const double w = v[k] / (v[k] - v[k + 1]);
        out.push_back({z[k] + w * (z[k + 1] - z[k]), s0, s1});
    }
    return out;
}

const char* to_string(Shape s) { return s == Shape::Split ? "split" : "torus"; }

RingReport find_ring(const MeridianField& F, double eps) {
    const auto& g = F.grid;
    std::vector<int> comp(g.kind.size(), -1);
    RingReport best;
    int label = 0;
    for_each_inside(g, [&](int i0, int j0) {
        const int k0 = g.index(i0, j0);
        if (comp[k0] >= 0 || beta_tilde(F.f[k0]) > -1.0 + eps) return;
        RingReport cur;
        bool touches_axis = false;
        std::queue<std::pair<int, int>> q;
        q.push({i0, j0});
        comp[k0] = label;
        while (!q.empty()) {
            const auto [i, j] = q.front();
            q.pop();
            const double b = beta_tilde(F.at(i, j));
            ++cur.nodes;
            if (i == 0) touches_axis = true;
            if (b < cur.beta_min) {
                cur.beta_min = b;
                cur.r = g.r(i);
                cur.z = g.z(j);
            }
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int n = 0; n < 4; ++n) {
                const int a = i + di[n], c = j + dj[n];
                if (!g.inside(a, c)) continue;
                const int kk = g.index(a, c);
                if (comp[kk] >= 0 || beta_tilde(F.f[kk]) > -1.0 + eps) continue;
                comp[kk] = label;
                q.push({a, c});
            }
        }
        ++label;
        if (!touches_axis && cur.nodes > best.nodes) {
            best = cur;
            best.present = true;
        }
    });
    if (!best.present) {
        best.beta_min = 1.0;
        for_each_inside(g, [&](int i, int j) { best.beta_min = std::min(best.beta_min, beta_tilde(F.at(i, j))); });
    }
    return best;
}

Classification classify(const MeridianField& F, double ring_eps) {
    Classification c;
    c.singularities = detect_singularities(F, true);
    c.shape = c.singularities.empty() ? Shape::Torus : Shape::Split;
    c.ring = find_ring(F, ring_eps);
    for_each_inside(F.grid, [&](int i, int j) {
        const double b = beta_tilde(F.at(i, j));
        c.beta_min = std::min(c.beta_min, b);
        c.beta_max = std::max(c.beta_max, b);
    });
    return c;
}

double ball_energy(const MeridianField& F, double lambda, double radius, double center) {
    MeridianDiscretization disc(F.grid);
    long double total = 0.0L;
    for_each_inside(F.grid, [&](int i, int j) {
        const auto c = disc.cell(F.grid.index(i, j));
        const double zl = c[2] - center, zh = c[3] - center;
        const double near_z = zl * zh <= 0.0 ? 0.0 : std::min(std::abs(zl), std::abs(zh));
        if (std::hypot(c[0], near_z) >= radius) return;
        const double e = density(F, i, j, lambda);
        if (std::hypot(c[1], std::max(std::abs(zl), std::abs(zh))) <= radius) {
            total += e * 0.5 * (c[1] * c[1] - c[0] * c[0]) * (c[3] - c[2]);
            return;
        }
        total += e * cell_integral(c, [&](double a, double b) { return std::hypot(a, b - center) < radius ? a : 0.0; });
    });
    return static_cast<double>(total);
}

double cylinder_energy(const MeridianField& F, double lambda, double radius) {
    MeridianDiscretization disc(F.grid);
    long double total = 0.0L;
    for_each_inside(F.grid, [&](int i, int j) {
        const auto c = disc.cell(F.grid.index(i, j));
        const double hi = std::min(c[1], radius);
        if (hi <= c[0]) return;
        total += density(F, i, j, lambda) * 0.5 * (hi * hi - c[0] * c[0]) * (c[3] - c[2]);
    });
    return static_cast<double>(total);
}

double vertical_flux(const MeridianField& F, double lambda, int j) {
    const auto& g = F.grid;
    require_straight_row(g, j, "vertical_flux");
    long double p = 0.0L;
    for (int i = 0; i < g.nr; ++i) {
        const NodeGrad d = node_gradient(F, i, j);
        const UVector& u = F.at(i, j);
        p += kPi * (dot5(d.dr, d.dr) - dot5(d.dz, d.dz) + angular_density(u, g.r(i)) + 2.0 * lambda * potential_w_ext(u)) *
             g.r(i) * g.hr;
    }
    return static_cast<double>(p);
}

IdentityResiduals energy_identity_residuals(const MeridianField& F, double lambda, const IdentityParams& p) {
    const auto& g = F.grid;
    const auto& G = g.geom;
    IdentityResiduals out;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); };
    // Sides with cancelling terms are compared against the sum of term magnitudes.
    auto scaled = [](double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); };

    // Vertical identity between two slices.
    const int j1 = row_of(g, p.t1), j2 = row_of(g, p.t2);
    out.vertical_lhs = vertical_flux(F, lambda, j1);
    out.vertical_rhs = vertical_flux(F, lambda, j2);
    out.vertical = rel(out.vertical_lhs, out.vertical_rhs);

    // Horizontal identity over whole rows |x3| < s.
    const int jm = g.mid_row();
    const int half = static_cast<int>(std::floor(p.s / g.hz - 0.5));
    if (half < 0) throw DomainError("energy_identity_residuals: s below one cell");
    require_straight_row(g, jm + half + 1, "horizontal identity");
    long double lhs = 0.0L, lhs_abs = 0.0L, bulk = 0.0L;
    for (int j = jm - half; j <= jm + half; ++j) {
        const Vec5 d = wall_derivative(F, j);
        lhs += (1.5 / (G.ell * G.ell) - 0.5 * dot5(d, d)) * g.hz;
        lhs_abs += (1.5 / (G.ell * G.ell) + 0.5 * dot5(d, d)) * g.hz;
        for (int i = 0; i < g.nr; ++i) {
            const NodeGrad ng = node_gradient(F, i, j);
            bulk += (dot5(ng.dz, ng.dz) + 2.0 * lambda * potential_w_ext(F.at(i, j))) * g.r(i) * g.hr * g.hz;
        }
    }
    auto edge_term = [&](int jlo) {
        long double s = 0.0L;
        for (int i = 0; i < g.nr; ++i) {
            const NodeGrad a = node_gradient(F, i, jlo), b = node_gradient(F, i, jlo + 1);
            const Vec5 lo = F.at(i, jlo).arr(), hi = F.at(i, jlo + 1).arr();
            double v = 0.0;
            for (int k = 0; k < 5; ++k) v += 0.5 * (a.dr[k] + b.dr[k]) * (hi[k] - lo[k]) / g.hz;
            s += g.r(i) * g.r(i) * v * g.hr;
        }
        return s;
    };
    const long double top = edge_term(jm + half), bottom = edge_term(jm - half - 1);
    out.horizontal_lhs = static_cast<double>(2.0 * kPi * G.ell * G.ell * lhs);
    out.horizontal_rhs = static_cast<double>(2.0 * kPi * (bulk + top - bottom));
    out.horizontal = scaled(out.horizontal_lhs, out.horizontal_rhs,
                            static_cast<double>(2.0 * kPi * (G.ell * G.ell * lhs_abs + bulk + std::abs(top) +
                                                             std::abs(bottom))));

    // Radial identity on balls about the origin; the r-integrals are exchanged with the
    // space integrals, giving the weights 1/max(r1, |x|) - 1/r2.
    out.radial = std::nan("");
    if (p.r2 > 0.0) {
        if (!(G.ell <= p.r1 && p.r1 < p.r2 && p.r2 <= G.h - G.rho))
            throw DomainError("energy_identity_residuals: need ell <= r1 < r2 <= h - rho");
        MeridianDiscretization disc(g);
        long double e1 = 0.0L, e2 = 0.0L, radial = 0.0L, wterm = 0.0L;
        for_each_inside(g, [&](int i, int j) {
            const auto c = disc.cell(g.index(i, j));
            const double near_z = c[2] * c[3] <= 0.0 ? 0.0 : std::min(std::abs(c[2]), std::abs(c[3]));
            if (std::hypot(c[0], near_z) >= p.r2) return;
            NodeGrad d;
            const double e = density(F, i, j, lambda, &d);
            const double w = 2.0 * lambda * potential_w_ext(F.at(i, j));
            e1 += e * cell_integral(c, [&](double a, double b) { return std::hypot(a, b) < p.r1 ? a : 0.0; });
            e2 += e * cell_integral(c, [&](double a, double b) { return std::hypot(a, b) < p.r2 ? a : 0.0; });
            radial += 2.0 * kPi * cell_integral(c, [&](double a, double b) {
                          const double s = std::hypot(a, b);
                          if (s < p.r1 || s >= p.r2) return 0.0;
                          double v = 0.0;
                          for (int k = 0; k < 5; ++k) {
                              const double t = (a / s) * d.dr[k] + (b / s) * d.dz[k];
                              v += t * t;
                          }
                          return a * v / s;
                      });
            wterm += 2.0 * kPi * w * cell_integral(c, [&](double a, double b) {
                         const double s = std::hypot(a, b);
                         return s < p.r2 ? a * (1.0 / std::max(p.r1, s) - 1.0 / p.r2) : 0.0;
                     });
        });
        long double bterm = 0.0L, bterm_abs = 0.0L;
        const double reach = std::sqrt(p.r2 * p.r2 - G.ell * G.ell);
        const int nsub = 4 * kSub;
        for (int j = 0; j < g.nz; ++j) {
            const double z = g.z(j);
            if (std::abs(z) - 0.5 * g.hz >= reach) continue;
            const Vec5 dw = wall_derivative(F, j);
            double wsum = 0.0;
            for (int q = 0; q < nsub; ++q) {
                const double b = z - 0.5 * g.hz + (q + 0.5) * g.hz / nsub;
                const double s = std::hypot(G.ell, b);
                if (s < p.r2) wsum += (1.0 / std::max(p.r1, s) - 1.0 / p.r2) * g.hz / nsub;
            }
            bterm += (1.5 / (G.ell * G.ell) - 0.5 * dot5(dw, dw)) * wsum;
            bterm_abs += (1.5 / (G.ell * G.ell) + 0.5 * dot5(dw, dw)) * wsum;
        }
        out.radial_lhs = static_cast<double>(e1 / p.r1 + radial + wterm);
        out.radial_rhs = static_cast<double>(e2 / p.r2 + 2.0 * kPi * G.ell * G.ell * bterm);
        out.radial = scaled(out.radial_lhs, out.radial_rhs,
                            static_cast<double>(e1 / p.r1 + std::abs(radial) + std::abs(wterm) + e2 / p.r2 +
                                                2.0 * kPi * G.ell * G.ell * bterm_abs));
    }
    return out;
}

MonotonicityReport monotonicity_profile(const MeridianField& F, double lambda, const std::vector<double>& radii) {
    if (!std::is_sorted(radii.begin(), radii.end()) || radii.empty() || radii.front() <= 0.0)
        throw DomainError("monotonicity_profile: radii must be positive and increasing");
    MonotonicityReport rep;
    rep.radii = radii;
    for (double r : radii) rep.ratios.push_back(ball_energy(F, lambda, r) / r);
    // Largest relative decrease between consecutive radii.
    for (std::size_t k = 0; k + 1 < rep.ratios.size(); ++k)
        rep.worst_drop = std::max(rep.worst_drop, (rep.ratios[k] - rep.ratios[k + 1]) / std::abs(rep.ratios[k]));
    return rep;
}

double TestProfile::value(double s) const {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double outer = [&](double t) { return std::pow(t, -exponent) * (1.0 - t) * (1.0 - t); }(std::max(s, inner));
    return s < inner ? outer * s / inner : outer;
}

double TestProfile::slope(double s) const {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    if (s < inner) return value(inner) / inner;
    const double p = std::pow(s, -exponent);
    return -exponent * p / s * (1.0 - s) * (1.0 - s) - 2.0 * p * (1.0 - s);
}

double hardy_deficit(const TestProfile& eta) {
    if (!(eta.exponent >= 0.0 && eta.exponent < 0.5 && eta.inner > 0.0 && eta.inner < 1.0))
        throw DomainError("hardy_deficit: need 0 <= exponent < 1/2 and 0 < inner < 1");
    const double c = eta.value(eta.inner) / eta.inner;
    // On [0, inner] eta = c s, so the integrand (c^2 - 2 c^2) s^2 integrates in closed form.
    const double core = -c * c * std::pow(eta.inner, 3) / 3.0;
    const double outer = adaptive_simpson(
        [&](double s) {
            const double d = eta.slope(s), v = eta.value(s);
            return d * d * s * s - 2.0 * v * v;
        },
        eta.inner, 1.0, 1e-12);
    return 4.0 * kPi * (core + outer);
}

double instability_form(const MeridianField& F, double lambda, double center, double radius, const TestProfile& eta,
                        int azimuths) {
    if (!(radius > 0.0)) throw DomainError("instability_form: radius must be positive");
    if (azimuths < 16 || azimuths % 2) throw DomainError("instability_form: need an even number >= 16 of azimuths");
    if (!(hardy_deficit(eta) < 0.0)) throw DomainError("instability_form: test function not admissible");
    const auto& g = F.grid;
    MeridianDiscretization disc(g);
    const double amp = 1.0 / std::sqrt(radius);
    auto eta_at = [&](int i, int j) { return amp * eta.value(std::hypot(g.r(i), g.z(j) - center) / radius); };
    const UVector vbar{0.0, {0.0, 0.0}, {1.0, 0.0}};
    // Tangential part of the variation at a lattice node and azimuth; i = -1 is the
    // mirror image of column 0, i.e. the same node at azimuth phi + pi.
    auto phi_t = [&](int i, int j, double phi) {
        if (i < 0) {
            i = 0;
            phi += kPi;
        }
        const UVector u = rotate(F.at(i, j), phi);
        return (vbar - u * u.u2.real()) * eta_at(i, j);
    };
    const double dphi = 2.0 * kPi / azimuths;
    long double total = 0.0L;
    for_each_inside(g, [&](int i, int j) {
        if (std::hypot(g.r(i), g.z(j) - center) >= radius + 2.0 * std::max(g.hr, g.hz)) return;
        if (!g.inside(i + 1, j) || !g.inside(i, j + 1) || !g.inside(i, j - 1))
            throw DomainError("instability_form: ball leaves the domain");
        const NodeGrad ng = node_gradient(F, i, j);
        const double r = g.r(i);
        const double grad_q2 = dot5(ng.dr, ng.dr) + dot5(ng.dz, ng.dz) + angular_density(F.at(i, j), r);
        const double e = eta_at(i, j);
        const auto c = disc.cell(g.index(i, j));
        const double weight = r * (c[1] - c[0]) * (c[3] - c[2]) * dphi;
        for (int k = 0; k < azimuths; ++k) {
            const double phi = k * dphi;
            const UVector dr = (phi_t(i + 1, j, phi) - phi_t(i - 1, j, phi)) * (0.5 / g.hr);
            const UVector dz = (phi_t(i, j + 1, phi) - phi_t(i, j - 1, phi)) * (0.5 / g.hz);
            const UVector u = rotate(F.at(i, j), phi);
            const double s = u.u2.real();
            const UVector du{0.0, u.u1 * cplx(0.0, 1.0), u.u2 * cplx(0.0, 2.0)};
            const double ds = -2.0 * u.u2.imag();
            const UVector dphi_t = (u * ds + du * s) * (-e);
            const UVector pt = (vbar - u * s) * e;
            double val = dr.norm2() + dz.norm2() + dphi_t.norm2() / (r * r) - grad_q2 * pt.norm2();
            if (lambda != 0.0) {
                const auto h = det_q_hessian(u);
                const auto a = pt.arr();
                double quad = 0.0;
                for (int m = 0; m < 5; ++m)
                    for (int n = 0; n < 5; ++n) quad += h[5 * m + n] * a[m] * a[n];
                val += lambda * (-quad + 3.0 * det_q(u) * pt.norm2());
            }
            total += val * weight;
        }
    });
    return static_cast<double>(total);
}

}  // namespace ldg
