#pragma once
// Unit-norm traceless tensors in the complex coordinates R + C + C.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <stdexcept>

namespace ldg {

using cplx = std::complex<double>;
using QTensor = Eigen::Matrix3d;

struct UVector {
    double u0 = 0.0;
    cplx u1{0.0, 0.0};
    cplx u2{0.0, 0.0};

    static UVector from_array(const double* a) { return {a[0], {a[1], a[2]}, {a[3], a[4]}}; }
    void to_array(double* a) const {
        a[0] = u0;
        a[1] = u1.real();
        a[2] = u1.imag();
        a[3] = u2.real();
        a[4] = u2.imag();
    }
    std::array<double, 5> arr() const {
        std::array<double, 5> a{};
        to_array(a.data());
        return a;
    }
    double norm2() const { return u0 * u0 + std::norm(u1) + std::norm(u2); }
    double norm() const { return std::sqrt(norm2()); }
    double dot(const UVector& o) const {
        return u0 * o.u0 + (std::conj(u1) * o.u1).real() + (std::conj(u2) * o.u2).real();
    }
    UVector operator+(const UVector& o) const { return {u0 + o.u0, u1 + o.u1, u2 + o.u2}; }
    UVector operator-(const UVector& o) const { return {u0 - o.u0, u1 - o.u1, u2 - o.u2}; }
    UVector operator*(double s) const { return {u0 * s, u1 * s, u2 * s}; }
    UVector operator-() const { return {-u0, -u1, -u2}; }
};

class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

inline constexpr double kUnitTol = 1e-10;
inline constexpr double kTracelessTol = 1e-12;

// Isometric linear map onto symmetric traceless matrices.
QTensor u_to_q(const UVector& u);
// Inverse of u_to_q; throws DomainError for non-symmetric or non-traceless input.
UVector q_to_u(const QTensor& q);

// Basis of traceless symmetric matrices matching the components (u0, Re u1, Im u1, Re u2, Im u2).
QTensor basis_matrix(int index);

double det_q(const UVector& u);
// Euclidean gradient of det_q as a polynomial in the five real coordinates.
UVector det_q_gradient(const UVector& u);
// Euclidean Hessian of det_q, row-major 5x5 in array coordinates.
std::array<double, 25> det_q_hessian(const UVector& u);

// Signed biaxiality; scale invariant, throws on |u| ~ 0.
double beta_tilde(const UVector& u);
// Same quantity for unit vectors, 3*sqrt(6)*det, without validation.
double beta_unit(const UVector& u);

// Reduced potential (1 - beta)/(3 sqrt 6); requires unit input.
double potential_w(const UVector& u);
// Unchecked cubic extension 1/(3 sqrt 6) - det_q, equal to potential_w on the sphere.
double potential_w_ext(const UVector& u);
// Tangential gradient of the potential; requires unit input.
UVector grad_w_tangential(const UVector& u);

UVector renormalize(const UVector& u);
void require_unit(const UVector& u, const char* where);

// sqrt(3/2)(n n^T - I/3) for a unit direction n, and the unnormalized n n^T - I/3.
QTensor uniaxial_normalized(const Eigen::Vector3d& n);
QTensor uniaxial_raw(const Eigen::Vector3d& n);

// Circle action (t, z1, z2) -> (t, e^{ia} z1, e^{2ia} z2).
UVector rotate(const UVector& u, double alpha);

inline UVector e0_vec() { return {1.0, {0.0, 0.0}, {0.0, 0.0}}; }
inline UVector lateral_datum() { return {-0.5, {0.0, 0.0}, {std::sqrt(3.0) / 2.0, 0.0}}; }

}  // namespace ldg
