#include "ldg/tensor.hpp"

#include <cmath>
#include <string>

namespace ldg {

namespace {
const double kS2 = std::sqrt(2.0);
const double kS3 = std::sqrt(3.0);
const double kS6 = std::sqrt(6.0);
}  // namespace

QTensor u_to_q(const UVector& u) {
    const double a = u.u0 / kS3;
    QTensor m;
    m(0, 0) = -a + u.u2.real();
    m(1, 1) = -a - u.u2.real();
    m(2, 2) = 2.0 * a;
    m(0, 1) = m(1, 0) = u.u2.imag();
    m(0, 2) = m(2, 0) = u.u1.real();
    m(1, 2) = m(2, 1) = u.u1.imag();
    return m / kS2;
}

UVector q_to_u(const QTensor& q) {
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > kTracelessTol * scale)
        throw DomainError("q_to_u: matrix is not symmetric");
    if (std::abs(q.trace()) > kTracelessTol * scale) throw DomainError("q_to_u: matrix is not traceless");
    const QTensor m = 0.5 * (q + q.transpose()) * kS2;
    UVector u;
    u.u0 = m(2, 2) * kS3 / 2.0;
    u.u1 = {m(0, 2), m(1, 2)};
    u.u2 = {0.5 * (m(0, 0) - m(1, 1)), m(0, 1)};
    return u;
}

QTensor basis_matrix(int index) {
    if (index < 0 || index > 4) throw std::out_of_range("basis_matrix index");
    double a[5] = {0, 0, 0, 0, 0};
    a[index] = 1.0;
    return u_to_q(UVector::from_array(a));
}

double det_q(const UVector& u) {
    const double c = 1.0 / (2.0 * kS2);
    const double a = 2.0 / kS3;
    const double t = u.u0;
    return c * (a * t * (t * t / 3.0 + std::norm(u.u1) / 2.0 - std::norm(u.u2)) +
                (u.u1 * u.u1 * std::conj(u.u2)).real());
}

UVector det_q_gradient(const UVector& u) {
    const double c = 1.0 / (2.0 * kS2);
    const double a = 2.0 / kS3;
    const double t = u.u0;
    UVector g;
    g.u0 = c * a * (t * t + std::norm(u.u1) / 2.0 - std::norm(u.u2));
    g.u1 = c * (a * t * u.u1 + 2.0 * std::conj(u.u1) * u.u2);
    g.u2 = c * (-2.0 * a * t * u.u2 + u.u1 * u.u1);
    return g;
}

std::array<double, 25> det_q_hessian(const UVector& u) {
    const double c = 1.0 / (2.0 * kS2);
    const double a = 2.0 / kS3;
    const double t = u.u0, x1 = u.u1.real(), y1 = u.u1.imag(), x2 = u.u2.real(), y2 = u.u2.imag();
    // Gradient components:
    // g0 = c a (t^2 + (x1^2+y1^2)/2 - x2^2 - y2^2)
    // g1 = c (a t x1 + 2 (x1 x2 + y1 y2)),  g2 = c (a t y1 + 2 (x1 y2 - y1 x2))
    // g3 = c (-2 a t x2 + x1^2 - y1^2),     g4 = c (-2 a t y2 + 2 x1 y1)
    std::array<double, 25> h{};
    auto set = [&](int i, int j, double v) {
        h[5 * i + j] = c * v;
        h[5 * j + i] = c * v;
    };
    set(0, 0, 2.0 * a * t);
    set(0, 1, a * x1);
    set(0, 2, a * y1);
    set(0, 3, -2.0 * a * x2);
    set(0, 4, -2.0 * a * y2);
    set(1, 1, a * t + 2.0 * x2);
    set(1, 2, 2.0 * y2);
    set(1, 3, 2.0 * x1);
    set(1, 4, 2.0 * y1);
    set(2, 2, a * t - 2.0 * x2);
    set(2, 3, -2.0 * y1);
    set(2, 4, 2.0 * x1);
    set(3, 3, -2.0 * a * t);
    set(3, 4, 0.0);
    set(4, 4, -2.0 * a * t);
    return h;
}

double beta_unit(const UVector& u) { return 3.0 * kS6 * det_q(u); }

double beta_tilde(const UVector& u) {
    const double n = u.norm();
    if (n < 1e-12) throw DomainError("beta_tilde: undefined at zero tensor");
    return 3.0 * kS6 * det_q(u) / (n * n * n);
}

void require_unit(const UVector& u, const char* where) {
    if (std::abs(u.norm() - 1.0) > kUnitTol)
        throw DomainError(std::string(where) + ": input is not unit norm (|u| = " + std::to_string(u.norm()) + ")");
}

double potential_w_ext(const UVector& u) { return 1.0 / (3.0 * kS6) - det_q(u); }

double potential_w(const UVector& u) {
    require_unit(u, "potential_w");
    return (1.0 - beta_unit(u)) / (3.0 * kS6);
}

UVector grad_w_tangential(const UVector& u) {
    require_unit(u, "grad_w_tangential");
    const QTensor q = u_to_q(u);
    const QTensor q2 = q * q;
    const double tr3 = (q2 * q).trace();
    const QTensor g = -(q2 - QTensor::Identity() / 3.0 - tr3 * q);
    // The result is traceless up to rounding of |Q| = 1.
    QTensor gs = 0.5 * (g + g.transpose());
    gs -= (gs.trace() / 3.0) * QTensor::Identity();
    return q_to_u(gs);
}

UVector renormalize(const UVector& u) {
    const double n = u.norm();
    if (n < 1e-300) throw DomainError("renormalize: zero vector");
    return u * (1.0 / n);
}

QTensor uniaxial_raw(const Eigen::Vector3d& n) {
    const double len = n.norm();
    if (len < 1e-300) throw DomainError("uniaxial tensor: zero direction");
    const Eigen::Vector3d v = n / len;
    return v * v.transpose() - QTensor::Identity() / 3.0;
}

QTensor uniaxial_normalized(const Eigen::Vector3d& n) { return std::sqrt(1.5) * uniaxial_raw(n); }

UVector rotate(const UVector& u, double alpha) {
    return {u.u0, u.u1 * std::polar(1.0, alpha), u.u2 * std::polar(1.0, 2.0 * alpha)};
}

}  // namespace ldg
