#pragma once
// Explicit harmonic maps, hedgehogs, tangent maps and analytic verifiers.

#include <functional>

#include "ldg/profile.hpp"
#include "ldg/tensor.hpp"

namespace ldg {

using PlanarField = std::function<UVector(cplx)>;

// Degree-two harmonic map with center value -e0 and energy 2 pi on the disc.
UVector small_solution_uS(cplx z);
// Energy 6 pi family with center value +e0; mu1 = sqrt(3) gives g_hbar.
UVector large_solution(cplx mu1, cplx z);
// Uniaxial member of the family above.
UVector g_hbar(cplx z);
// Harmonic sphere with total energy 4 pi over the plane.
UVector bubble(cplx z, double theta);

QTensor hedgehog_sphere(const Eigen::Vector3d& x);
QTensor constant_norm_hedgehog(const Eigen::Vector2d& x);

// Zero-homogeneous axis singularity profile, optionally negated and rotated.
QTensor tangent_map(double alpha, int sign, const Eigen::Vector3d& x);
// Same map in complex coordinates.
UVector tangent_map_u(double alpha, int sign, const Eigen::Vector3d& x);

// Square sampling grid [-half_width, half_width]^2 with `nodes` points per axis.
struct SquareGrid {
    int nodes = 257;
    double half_width = 1.0;
    double spacing() const { return 2.0 * half_width / (nodes - 1); }
};

// Max over interior nodes of |d_z u . d_z u| with fourth-order central differences.
double conformality_residual(const PlanarField& u, const SquareGrid& grid);
// Max over interior nodes of |d_zz u . d_zz u|.
double isotropy_residual(const PlanarField& u, const SquareGrid& grid);

// Max residual of the harmonic map equations for an equivariant profile on a uniform grid.
double harmonic_ode_residual(const RadialProfile& f);

// Radial grid refined geometrically toward the origin: nodes below `split` follow
// a geometric sequence from `r_min` with ratio 1 + `growth`; `tail` nodes are kept above.
std::vector<double> graded_grid(double r_min, double split, double growth, const std::vector<double>& tail,
                                const std::vector<double>& breakpoints);

// Replace the center value +e0 by -e0 through a rescaled bubble of scale rho^3.
RadialProfile bubble_insert(const RadialProfile& u, double rho);

// Dirichlet energy of the bubble over the disc of radius R (closed form quadrature).
double bubble_energy_disc(double radius, int panels = 20000);

// Scaled energy (1/R) int_{B_R} 0.5 |grad Q|^2 of the tangent map, computed from
// finite-difference gradients in spherical coordinates.
double tangent_map_scaled_energy(double radius, int radial_nodes = 48, int polar_nodes = 48);

}  // namespace ldg
