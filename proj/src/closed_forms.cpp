#include "ldg/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ldg {

namespace {
const double kS3 = std::sqrt(3.0);
constexpr double kPi = std::numbers::pi;

// Complex-bilinear product of two complexified vectors in the five real coordinates.
cplx bilinear(const std::array<cplx, 5>& a, const std::array<cplx, 5>& b) {
    cplx s = 0.0;
    for (int i = 0; i < 5; ++i) s += a[i] * b[i];
    return s;
}

void check_grid(const SquareGrid& g) {
    if (g.nodes < 5 || !(g.half_width > 0.0)) throw DomainError("square grid needs >= 5 nodes per axis");
}

// Nodal values of the five real components on the grid.
std::vector<std::array<double, 5>> sample_square(const PlanarField& u, const SquareGrid& g) {
    const int n = g.nodes;
    const double h = g.spacing();
    std::vector<std::array<double, 5>> v(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) v[j * n + i] = u(cplx(-g.half_width + i * h, -g.half_width + j * h)).arr();
    return v;
}

// Fourth-order central first and second differences.
constexpr double kD1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
constexpr double kD2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
}  // namespace

UVector small_solution_uS(cplx z) {
    const double r2 = std::norm(z);
    const double r4 = r2 * r2;
    return {(r4 - 3.0) / (r4 + 3.0), {0.0, 0.0}, 2.0 * kS3 * z * z / (r4 + 3.0)};
}

UVector large_solution(cplx mu1, cplx z) {
    const double r2 = std::norm(z);
    const double m2 = std::norm(mu1);
    const double r4 = r2 * r2;
    const double r6 = r4 * r2;
    const double d = 1.0 + m2 * r2 + 3.0 * r4 + m2 * r6 / 3.0;
    UVector u;
    u.u0 = (1.0 - m2 * r2 - 3.0 * r4 + m2 * r6 / 3.0) / d;
    u.u1 = 2.0 * mu1 * z * (1.0 - r4) / d;
    u.u2 = 2.0 * kS3 * z * z * (1.0 + m2 * r2 / 3.0) / d;
    return u;
}

UVector g_hbar(cplx z) {
    const double r2 = std::norm(z);
    const double d = (1.0 + r2) * (1.0 + r2);
    return {(1.0 - 4.0 * r2 + r2 * r2) / d, 2.0 * kS3 * z * (1.0 - r2) / d, 2.0 * kS3 * z * z / d};
}

UVector bubble(cplx z, double theta) {
    const double r2 = std::norm(z);
    return {(1.0 - r2) / (1.0 + r2), 2.0 * std::polar(1.0, theta) * z / (1.0 + r2), {0.0, 0.0}};
}

QTensor hedgehog_sphere(const Eigen::Vector3d& x) {
    if (x.norm() < 1e-300) throw DomainError("hedgehog_sphere: zero point");
    return uniaxial_normalized(x);
}

QTensor constant_norm_hedgehog(const Eigen::Vector2d& x) {
    if (x.norm() < 1e-300) throw DomainError("constant_norm_hedgehog: zero point");
    return uniaxial_normalized(Eigen::Vector3d(x(0), x(1), 0.0));
}

UVector tangent_map_u(double alpha, int sign, const Eigen::Vector3d& x) {
    const double len = x.norm();
    if (len < 1e-300) throw DomainError("tangent_map: zero point");
    if (sign != 1 && sign != -1) throw DomainError("tangent_map: sign must be +1 or -1");
    const UVector u{x(2) / len, cplx(x(0), x(1)) / len, {0.0, 0.0}};
    return rotate(u, alpha) * static_cast<double>(sign);
}

QTensor tangent_map(double alpha, int sign, const Eigen::Vector3d& x) {
    const double len = x.norm();
    if (len < 1e-300) throw DomainError("tangent_map: zero point");
    if (sign != 1 && sign != -1) throw DomainError("tangent_map: sign must be +1 or -1");
    QTensor m;
    m << -x(2), 0.0, kS3 * x(0), 0.0, -x(2), kS3 * x(1), kS3 * x(0), kS3 * x(1), 2.0 * x(2);
    m /= std::sqrt(6.0) * len;
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(alpha, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    return static_cast<double>(sign) * rot * m * rot.transpose();
}

double conformality_residual(const PlanarField& u, const SquareGrid& g) {
    check_grid(g);
    const int n = g.nodes;
    const double h = g.spacing();
    const auto v = sample_square(u, g);
    double worst = 0.0;
    for (int j = 2; j < n - 2; ++j)
        for (int i = 2; i < n - 2; ++i) {
            std::array<cplx, 5> dz{};
            for (int c = 0; c < 5; ++c) {
                double dx = 0.0, dy = 0.0;
                for (int s = 0; s < 5; ++s) {
                    dx += kD1[s] * v[j * n + i + s - 2][c];
                    dy += kD1[s] * v[(j + s - 2) * n + i][c];
                }
                dz[c] = 0.5 * cplx(dx, -dy) / h;
            }
            worst = std::max(worst, std::abs(bilinear(dz, dz)));
        }
    return worst;
}

double isotropy_residual(const PlanarField& u, const SquareGrid& g) {
    check_grid(g);
    const int n = g.nodes;
    const double h = g.spacing();
    const auto v = sample_square(u, g);
    double worst = 0.0;
    for (int j = 2; j < n - 2; ++j)
        for (int i = 2; i < n - 2; ++i) {
            std::array<cplx, 5> dzz{};
            for (int c = 0; c < 5; ++c) {
                double dxx = 0.0, dyy = 0.0, dxy = 0.0;
                for (int s = 0; s < 5; ++s) {
                    dxx += kD2[s] * v[j * n + i + s - 2][c];
                    dyy += kD2[s] * v[(j + s - 2) * n + i][c];
                    if (s == 2) continue;
                    double inner = 0.0;
                    for (int t = 0; t < 5; ++t) inner += kD1[t] * v[(j + t - 2) * n + i + s - 2][c];
                    dxy += kD1[s] * inner;
                }
                dzz[c] = 0.25 * cplx(dxx - dyy, -2.0 * dxy) / (h * h);
            }
            worst = std::max(worst, std::abs(bilinear(dzz, dzz)));
        }
    return worst;
}

double harmonic_ode_residual(const RadialProfile& p) {
    require_unit_profile(p, 1e-6, "harmonic_ode_residual");
    if (!p.uniform()) throw DomainError("harmonic_ode_residual: uniform grid required");
    const std::size_t n = p.size();
    if (n < 3) throw DomainError("harmonic_ode_residual: too few nodes");
    const double h = p.r[1] - p.r[0];
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double r = p.r[k];
        const auto a = p.f[k - 1].arr(), b = p.f[k].arr(), c = p.f[k + 1].arr();
        std::array<double, 5> d1{}, d2{};
        double grad2 = 0.0;
        for (int i = 0; i < 5; ++i) {
            d1[i] = (c[i] - a[i]) / (2.0 * h);
            d2[i] = (c[i] - 2.0 * b[i] + a[i]) / (h * h);
            grad2 += d1[i] * d1[i];
        }
        const double m1 = b[1] * b[1] + b[2] * b[2], m2 = b[3] * b[3] + b[4] * b[4];
        grad2 += (m1 + 4.0 * m2) / (r * r);
        constexpr double kWeight[5] = {0.0, 1.0, 1.0, 4.0, 4.0};
        double res2 = 0.0;
        for (int i = 0; i < 5; ++i) {
            const double e = d2[i] + d1[i] / r - kWeight[i] * b[i] / (r * r) + grad2 * b[i];
            res2 += e * e;
        }
        worst = std::max(worst, std::sqrt(res2));
    }
    return worst;
}

std::vector<double> graded_grid(double r_min, double split, double growth, const std::vector<double>& tail,
                                const std::vector<double>& breakpoints) {
    if (!(r_min > 0.0) || !(split > r_min) || !(growth > 0.0)) throw DomainError("graded_grid: bad parameters");
    std::vector<double> g{0.0};
    for (double s = r_min; s < split; s *= 1.0 + growth) g.push_back(s);
    for (double b : breakpoints)
        if (b > 0.0 && b < split) g.push_back(b);
    g.push_back(split);
    for (double t : tail)
        if (t > split) g.push_back(t);
    std::sort(g.begin(), g.end());
    std::vector<double> out;
    for (double s : g)
        if (out.empty() || s - out.back() > 1e-14 * std::max(1.0, s)) out.push_back(s);
    return out;
}

RadialProfile bubble_insert(const RadialProfile& u, double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("bubble_insert: rho must lie in (0, 1)");
    if (u.f.front().u0 < 0.5) throw DomainError("bubble_insert: input must take the value +e0 at the center");
    const double rho2 = rho * rho, rho3 = rho2 * rho, root = std::sqrt(rho);
    const UVector e0 = e0_vec();
    const UVector at_rho2 = bubble(cplx(rho2 / rho3, 0.0), kPi) * -1.0;  // (|z|^2-1, 2z, 0)/(|z|^2+1)
    const UVector outer = u.at(root);

    std::vector<double> tail;
    for (double s : u.r)
        if (s > root) tail.push_back(s);
    const std::vector<double> grid = graded_grid(rho3 * 1e-3, root, 0.02, tail, {rho2, rho});

    RadialProfile w;
    w.r = grid;
    w.f.reserve(grid.size());
    for (double s : grid) {
        UVector v;
        if (s <= rho2) {
            const double t = s / rho3;
            v = {(t * t - 1.0) / (t * t + 1.0), {2.0 * t / (t * t + 1.0), 0.0}, {0.0, 0.0}};
        } else if (s <= rho) {
            const double t = (s - rho2) / (rho - rho2);
            v = at_rho2 + (e0 - at_rho2) * t;
        } else if (s <= root) {
            const double t = (s - rho) / (root - rho);
            v = e0 + (outer - e0) * t;
        } else {
            v = u.at(s);
        }
        if (v.norm() < 0.5) throw DomainError("bubble_insert: interpolant degenerates, use a smaller rho");
        w.f.push_back(renormalize(v));
    }
    return w;
}

double bubble_energy_disc(double radius, int panels) {
    // |grad u|^2 = 8/(1+r^2)^2 for the bubble; E = 0.5 int |grad u|^2 = int_0^R 8 pi r/(1+r^2)^2 dr.
    // Composite Simpson in v = log(1 + r^2), where the integrand is smooth and non-peaked.
    const double vmax = std::log1p(radius * radius);
    const double h = vmax / panels;
    auto g = [](double v) { return 4.0 * kPi * std::exp(-v); };
    double acc = g(0.0) + g(vmax);
    for (int k = 1; k < panels; ++k) acc += (k % 2 ? 4.0 : 2.0) * g(k * h);
    return acc * h / 3.0;
}

double tangent_map_scaled_energy(double radius, int radial_nodes, int polar_nodes) {
    // Gauss-Legendre in the radius and polar angle; the map is independent of the azimuth
    // up to rotation, so the azimuthal integral contributes 2 pi.
    Eigen::VectorXd xr(radial_nodes), wr(radial_nodes), xp(polar_nodes), wp(polar_nodes);
    auto gauss = [](int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) j(i, i - 1) = j(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
        x = es.eigenvalues();
        w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
    };
    gauss(radial_nodes, xr, wr);
    gauss(polar_nodes, xp, wp);
    double total = 0.0;
    for (int a = 0; a < radial_nodes; ++a) {
        const double s = 0.5 * radius * (xr(a) + 1.0);
        for (int b = 0; b < polar_nodes; ++b) {
            const double c = xp(b);
            const double sn = std::sqrt(1.0 - c * c);
            const Eigen::Vector3d x(s * sn, 0.0, s * c);
            const double step = 1e-5 * s;
            double grad2 = 0.0;
            for (int d = 0; d < 3; ++d) {
                Eigen::Vector3d e = Eigen::Vector3d::Zero();
                e(d) = step;
                const QTensor dq = (tangent_map(0.0, 1, x + e) - tangent_map(0.0, 1, x - e)) / (2.0 * step);
                grad2 += dq.squaredNorm();
            }
            total += 0.5 * grad2 * s * s * wr(a) * 0.5 * radius * wp(b) * 2.0 * kPi;
        }
    }
    return total / radius;
}

}  // namespace ldg
