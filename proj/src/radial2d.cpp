#include "ldg/radial2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ldg/closed_forms.hpp"

namespace ldg {

namespace {
constexpr double kPi = std::numbers::pi;
const double kSixPi = 6.0 * kPi;
constexpr double kAngular[5] = {0.0, 1.0, 1.0, 4.0, 4.0};
}  // namespace

std::vector<double> to_flat(const RadialProfile& f) {
    std::vector<double> x(5 * f.size());
    for (std::size_t k = 0; k < f.size(); ++k) f.f[k].to_array(&x[5 * k]);
    return x;
}

RadialProfile from_flat(const std::vector<double>& grid, const std::vector<double>& x) {
    RadialProfile p;
    p.r = grid;
    p.f.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) p.f[k] = UVector::from_array(&x[5 * k]);
    return p;
}

RadialDiscretization::RadialDiscretization(const std::vector<double>& grid) : r(grid) {
    const std::size_t n = r.size();
    if (n < 3) throw DomainError("radial grid needs at least 3 nodes");
    if (r.front() != 0.0) throw DomainError("radial grid must start at 0");
    for (std::size_t k = 0; k + 1 < n; ++k)
        if (!(r[k + 1] > r[k])) throw DomainError("radial grid must be strictly increasing");
    edge_coef.resize(n - 1);
    inv_r_weight.assign(n, 0.0);
    node_area.assign(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) edge_coef[k] = 0.5 * (r[k] + r[k + 1]) / (r[k + 1] - r[k]);
    for (std::size_t k = 0; k < n; ++k) {
        const double left = k > 0 ? r[k] - r[k - 1] : 0.0;
        const double right = k + 1 < n ? r[k + 1] - r[k] : 0.0;
        const double tau = 0.5 * (left + right);
        if (k > 0) inv_r_weight[k] = tau / r[k];
        node_area[k] = 2.0 * kPi * tau * r[k];
    }
}

double RadialDiscretization::energy(const std::vector<double>& x, double lambda, std::vector<double>* grad,
                                    EnergyParts* parts) const {
    const std::size_t n = r.size();
    if (grad) grad->assign(5 * n, 0.0);
    long double dir = 0.0L, pot = 0.0L;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double* a = &x[5 * k];
        const double* b = &x[5 * k + 5];
        double d2 = 0.0;
        for (int i = 0; i < 5; ++i) d2 += (b[i] - a[i]) * (b[i] - a[i]);
        double slope = 0.0;
        dir += kPi * edge_coef[k] * geodesic_sq(d2, &slope);
        if (grad) {
            const double c = 2.0 * kPi * edge_coef[k] * slope;
            for (int i = 0; i < 5; ++i) {
                (*grad)[5 * k + i] -= c * (b[i] - a[i]);
                (*grad)[5 * k + 5 + i] += c * (b[i] - a[i]);
            }
        }
    }
    for (std::size_t k = 1; k < n; ++k) {
        const double* a = &x[5 * k];
        double ang = 0.0;
        for (int i = 1; i < 5; ++i) ang += kAngular[i] * a[i] * a[i];
        dir += kPi * inv_r_weight[k] * ang;
        const UVector u = UVector::from_array(a);
        pot += node_area[k] * potential_w_ext(u);
        if (grad) {
            for (int i = 1; i < 5; ++i) (*grad)[5 * k + i] += 2.0 * kPi * inv_r_weight[k] * kAngular[i] * a[i];
            if (lambda != 0.0) {
                const auto g = det_q_gradient(u).arr();
                for (int i = 0; i < 5; ++i) (*grad)[5 * k + i] -= lambda * node_area[k] * g[i];
            }
        }
    }
    const double total = static_cast<double>(dir + lambda * pot);
    if (parts) *parts = {total, static_cast<double>(dir), static_cast<double>(pot)};
    return total;
}

EnergyParts radial_energy(const RadialProfile& f, double lambda) {
    if (lambda < 0.0) throw DomainError("radial_energy: lambda must be nonnegative");
    require_unit_profile(f, 1e-9, "radial_energy");
    RadialDiscretization disc(f.r);
    EnergyParts parts;
    disc.energy(to_flat(f), lambda, nullptr, &parts);
    return parts;
}

ResidualReport el_residual_2d(const RadialProfile& p, double lambda) {
    require_unit_profile(p, 1e-9, "el_residual_2d");
    ResidualReport rep;
    const UVector datum = lateral_datum();
    rep.boundary_mismatch = (p.f.back() - datum).norm() > 1e-9;
    const UVector c = p.f.front();
    rep.center_mismatch = std::abs(std::abs(c.u0) - 1.0) > 1e-9 || std::abs(c.u1) > 1e-9 || std::abs(c.u2) > 1e-9;
    const std::size_t n = p.size();
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double hl = p.r[k] - p.r[k - 1], hr = p.r[k + 1] - p.r[k], r = p.r[k];
        const auto a = p.f[k - 1].arr(), b = p.f[k].arr(), cc = p.f[k + 1].arr();
        std::array<double, 5> d1{}, d2{};
        double grad2 = 0.0;
        for (int i = 0; i < 5; ++i) {
            d1[i] = (hl * hl * (cc[i] - b[i]) + hr * hr * (b[i] - a[i])) / (hl * hr * (hl + hr));
            d2[i] = 2.0 * (hl * (cc[i] - b[i]) - hr * (b[i] - a[i])) / (hl * hr * (hl + hr));
            grad2 += d1[i] * d1[i];
        }
        double ang = 0.0;
        for (int i = 1; i < 5; ++i) ang += kAngular[i] * b[i] * b[i];
        grad2 += ang / (r * r);
        const auto gw = grad_w_tangential(p.f[k]).arr();
        double res2 = 0.0;
        for (int i = 0; i < 5; ++i) {
            const double e = d2[i] + d1[i] / r - kAngular[i] * b[i] / (r * r) + grad2 * b[i] - lambda * gw[i];
            res2 += e * e;
        }
        rep.residual = std::max(rep.residual, std::sqrt(res2));
    }
    return rep;
}

RadialProfile preset_profile(Preset which, const std::vector<double>& grid, double noise, std::uint64_t seed) {
    RadialProfile p;
    switch (which) {
        case Preset::SmallSolution: p = sample_profile(small_solution_uS, grid); break;
        case Preset::GHbar: p = sample_profile(g_hbar, grid); break;
        case Preset::GHbarReflected: p = sample_profile([](cplx z) { return g_hbar(-z); }, grid); break;
        case Preset::Bubbled: {
            // Bubble of scale comparable to a few cells placed inside g_hbar.
            const double h = grid[1] - grid[0];
            const double rho = std::min(0.3, std::cbrt(6.0 * h));
            const RadialProfile base = sample_profile(g_hbar, uniform_grid(4096));
            p = resample(bubble_insert(base, rho), grid);
            break;
        }
    }
    if (noise > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd(0.0, noise);
        for (std::size_t k = 1; k + 1 < p.size(); ++k) {
            auto a = p.f[k].arr();
            for (double& v : a) v += nd(rng);
            p.f[k] = renormalize(UVector::from_array(a.data()));
        }
    }
    return p;
}

RadialProfile resample(const RadialProfile& f, const std::vector<double>& grid) {
    RadialProfile p;
    p.r = grid;
    p.f.reserve(grid.size());
    for (double s : grid) p.f.push_back(renormalize(f.at(s)));
    return p;
}

SolveOptions default_options_2d() {
    SolveOptions o;
    o.grad_tol = 1e-6;
    o.max_iters = 200000;
    o.energy_tol = 1e-15;
    o.patience = 500;
    o.memory = 16;
    return o;
}

MinResult2D minimize_2d(double lambda, DiscClass cls, const RadialProfile& init, const SolveOptions& opts,
                        const IterationObserver& observer) {
    if (lambda < 0.0) throw DomainError("minimize_2d: lambda must be nonnegative");
    require_unit_profile(init, 1e-9, "minimize_2d");
    const double pin = cls == DiscClass::N ? 1.0 : -1.0;
    const UVector c = init.f.front();
    if (std::abs(c.u0 - pin) > 1e-9 || std::abs(c.u1) > 1e-9 || std::abs(c.u2) > 1e-9)
        throw DomainError("minimize_2d: initial profile does not carry the class pin");
    if ((init.f.back() - lateral_datum()).norm() > 1e-9)
        throw DomainError("minimize_2d: initial profile does not carry the boundary datum");

    RadialDiscretization disc(init.r);
    const std::size_t n = init.size();
    SphereProblem prob;
    prob.nodes = n;
    prob.fixed.assign(n, 0);
    prob.fixed.front() = prob.fixed.back() = 1;
    prob.mass = disc.node_area;
    prob.energy = [&](const std::vector<double>& x, std::vector<double>* g) {
        return disc.energy(x, lambda, g, nullptr);
    };
    std::vector<double> x0 = to_flat(init);
    x0[0] = pin;
    for (int i = 1; i < 5; ++i) x0[i] = 0.0;
    lateral_datum().to_array(&x0[5 * (n - 1)]);

    const double sign0 = x0[5] >= 0.0 ? 1.0 : -1.0;
    bool preserved = true;
    auto watch = [&](int it, double e, const std::vector<double>& x) {
        if ((x[5] >= 0.0 ? 1.0 : -1.0) != sign0) preserved = false;
        if (observer) observer(it, e, x);
    };
    const OptResult opt = minimize_on_spheres(prob, x0, opts, watch);

    MinResult2D res;
    res.profile = from_flat(init.r, opt.x);
    const EnergyParts parts = radial_energy(res.profile, lambda);
    res.energy = parts.total;
    res.dirichlet = parts.dirichlet;
    res.potential = parts.potential;
    res.residual = el_residual_2d(res.profile, lambda).residual;
    res.stationarity = opt.stationarity;
    res.iterations = opt.iterations;
    res.class_tag = cls;
    res.class_preserved = preserved;
    res.stop_reason = to_string(opt.reason);
    res.beta_min = 1.0;
    res.beta_max = -1.0;
    for (const auto& u : res.profile.f) {
        const double b = beta_tilde(u);
        res.beta_min = std::min(res.beta_min, b);
        res.beta_max = std::max(res.beta_max, b);
    }
    return res;
}

MinResult2D class_s_minimum(double lambda, std::size_t intervals, const SolveOptions& opts, const RadialProfile* warm,
                            std::string* source) {
    const std::vector<double> grid = uniform_grid(intervals);
    std::vector<std::pair<std::string, RadialProfile>> starts;
    if (warm) starts.emplace_back("warm", resample(*warm, grid));
    starts.emplace_back("small_solution", preset_profile(Preset::SmallSolution, grid));
    starts.emplace_back("bubbled_ghbar", preset_profile(Preset::Bubbled, grid));
    MinResult2D best;
    bool have = false;
    for (auto& [name, init] : starts) {
        init.f.front() = -e0_vec();
        init.f.back() = lateral_datum();
        MinResult2D r = minimize_2d(lambda, DiscClass::S, init, opts);
        if (!have || r.energy < best.energy) {
            best = std::move(r);
            have = true;
            if (source) *source = name;
        }
    }
    return best;
}

std::vector<CurveRow> energy_curve(const std::vector<double>& lambdas, std::size_t intervals,
                                   const SolveOptions& opts) {
    if (!std::is_sorted(lambdas.begin(), lambdas.end())) throw DomainError("energy_curve: lambdas must be sorted");
    std::vector<CurveRow> rows;
    std::optional<RadialProfile> warm;
    for (double lam : lambdas) {
        if (lam < 0.0) throw DomainError("energy_curve: lambda must be nonnegative");
        CurveRow row;
        row.lambda = lam;
        try {
            const MinResult2D m = class_s_minimum(lam, intervals, opts, warm ? &*warm : nullptr, &row.source);
            row.e_star = m.energy;
            row.e = std::min(kSixPi, m.energy);
            row.beta_min = m.beta_min;
            row.beta_max = m.beta_max;
            row.valid = std::isfinite(m.energy);
            warm = m.profile;
        } catch (const std::exception&) {
            row.valid = false;
        }
        rows.push_back(row);
    }
    return rows;
}

double lambda_star_lower_bound() { return 24.0 * std::sqrt(2.0) / (2.0 * kPi - 3.0 * std::sqrt(3.0)); }
double lambda_star_upper_bound() { return std::pow(3.0, 8) * std::sqrt(6.0) / 4.0 * kPi * kPi; }

LambdaStarResult estimate_lambda_star(double tol, std::size_t intervals, const SolveOptions& opts) {
    if (!(tol > 0.0)) throw DomainError("estimate_lambda_star: tol must be positive");
    LambdaStarResult res;
    res.seed_lo = lambda_star_lower_bound();
    res.seed_hi = lambda_star_upper_bound();
    MinResult2D at_lo = class_s_minimum(res.seed_lo, intervals, opts);
    MinResult2D at_hi = class_s_minimum(res.seed_hi, intervals, opts);
    res.solves = 2;
    res.g_lo = at_lo.energy - kSixPi;
    res.g_hi = at_hi.energy - kSixPi;
    if (!(res.g_lo < 0.0 && res.g_hi > 0.0))
        throw DomainError("estimate_lambda_star: no sign change on the seed bracket (g_lo = " +
                          std::to_string(res.g_lo) + ", g_hi = " + std::to_string(res.g_hi) + ")");
    double lo = res.seed_lo, hi = res.seed_hi;
    RadialProfile warm = at_lo.profile;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const MinResult2D m = class_s_minimum(mid, intervals, opts, &warm);
        ++res.solves;
        if (m.energy - kSixPi < 0.0) {
            lo = mid;
            warm = m.profile;
        } else {
            hi = mid;
        }
    }
    res.lo = lo;
    res.hi = hi;
    return res;
}

namespace {

// Orthonormal basis of the tangent space at a unit vector (4 columns).
Eigen::Matrix<double, 5, 4> tangent_basis(const double* x) {
    Eigen::Matrix<double, 5, 1> v;
    for (int i = 0; i < 5; ++i) v(i) = x[i];
    Eigen::Matrix<double, 5, 5> m = Eigen::Matrix<double, 5, 5>::Identity() - v * v.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> es(m);
    // Eigenvalues are {0, 1, 1, 1, 1}; the last four eigenvectors span the tangent space.
    return es.eigenvectors().rightCols<4>();
}

struct Hessian2D {
    Eigen::MatrixXd h;                           // Riemannian Hessian in tangent coordinates
    std::vector<Eigen::Matrix<double, 5, 4>> basis;
    std::vector<double> mass;
    double stationarity = 0.0;
};

Hessian2D assemble_hessian(const RadialProfile& f, double lambda) {
    require_unit_profile(f, 1e-9, "second_variation");
    RadialDiscretization disc(f.r);
    const std::size_t n = f.size();
    const std::size_t m = n - 2;  // interior nodes
    const std::vector<double> x = to_flat(f);
    std::vector<double> grad;
    disc.energy(x, lambda, &grad, nullptr);

    Hessian2D out;
    out.h = Eigen::MatrixXd::Zero(4 * m, 4 * m);
    out.basis.resize(m);
    out.mass.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        out.basis[j] = tangent_basis(&x[5 * (j + 1)]);
        out.mass[j] = disc.node_area[j + 1];
    }
    // Euclidean Hessian of one edge term with respect to its right endpoint.
    std::vector<Eigen::Matrix<double, 5, 5>> edge(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        Eigen::Matrix<double, 5, 1> d;
        for (int i = 0; i < 5; ++i) d(i) = x[5 * k + 5 + i] - x[5 * k + i];
        double d1 = 0.0, d2 = 0.0;
        geodesic_sq(d.squaredNorm(), &d1, &d2);
        edge[k] = kPi * disc.edge_coef[k] *
                  (2.0 * d1 * Eigen::Matrix<double, 5, 5>::Identity() + 4.0 * d2 * d * d.transpose());
    }
    auto euclid_block = [&](std::size_t k) {
        Eigen::Matrix<double, 5, 5> b = Eigen::Matrix<double, 5, 5>::Zero();
        if (k > 0) b += edge[k - 1];
        if (k + 1 < n) b += edge[k];
        for (int i = 0; i < 5; ++i) b(i, i) += 2.0 * kPi * disc.inv_r_weight[k] * kAngular[i];
        if (lambda != 0.0) {
            const auto hd = det_q_hessian(UVector::from_array(&x[5 * k]));
            for (int i = 0; i < 5; ++i)
                for (int l = 0; l < 5; ++l) b(i, l) -= lambda * disc.node_area[k] * hd[5 * i + l];
        }
        return b;
    };
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t k = j + 1;
        Eigen::Matrix<double, 5, 1> xk, gk;
        for (int i = 0; i < 5; ++i) {
            xk(i) = x[5 * k + i];
            gk(i) = grad[5 * k + i];
        }
        Eigen::Matrix4d blk = out.basis[j].transpose() * euclid_block(k) * out.basis[j];
        blk -= xk.dot(gk) * Eigen::Matrix4d::Identity();
        out.h.block<4, 4>(4 * j, 4 * j) = blk;
        if (j + 1 < m) {
            const Eigen::Matrix4d off = -out.basis[j].transpose() * edge[k] * out.basis[j + 1];
            out.h.block<4, 4>(4 * j, 4 * j + 4) = off;
            out.h.block<4, 4>(4 * j + 4, 4 * j) = off.transpose();
        }
        const Eigen::Matrix<double, 5, 1> tg = gk - xk.dot(gk) * xk;
        out.stationarity = std::max(out.stationarity, tg.norm() / out.mass[j]);
    }
    return out;
}

}  // namespace

SpectrumResult second_variation_spectrum(const RadialProfile& f, double lambda, int modes, double stationarity_limit) {
    if (modes < 1) throw DomainError("second_variation_spectrum: modes must be positive");
    const Hessian2D hs = assemble_hessian(f, lambda);
    if (hs.stationarity > stationarity_limit)
        throw DomainError("second_variation_spectrum: profile is not stationary (gradient " +
                          std::to_string(hs.stationarity) + ")");
    const Eigen::Index dim = hs.h.rows();
    Eigen::VectorXd s(dim);
    for (Eigen::Index i = 0; i < dim; ++i) s(i) = 1.0 / std::sqrt(hs.mass[static_cast<std::size_t>(i / 4)]);
    const Eigen::MatrixXd a = s.asDiagonal() * hs.h * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    SpectrumResult out;
    out.residual = hs.stationarity;
    for (int i = 0; i < std::min<int>(modes, static_cast<int>(dim)); ++i) out.eigenvalues.push_back(es.eigenvalues()(i));
    return out;
}

double second_variation_form(const RadialProfile& f, double lambda, const std::vector<double>& phi) {
    const Hessian2D hs = assemble_hessian(f, lambda);
    const std::size_t m = hs.basis.size();
    if (phi.size() != 5 * f.size()) throw DomainError("second_variation_form: field size mismatch");
    Eigen::VectorXd c(4 * m);
    for (std::size_t j = 0; j < m; ++j) {
        Eigen::Matrix<double, 5, 1> v;
        for (int i = 0; i < 5; ++i) v(i) = phi[5 * (j + 1) + i];
        c.segment<4>(4 * j) = hs.basis[j].transpose() * v;
    }
    return c.dot(hs.h * c);
}

}  // namespace ldg
