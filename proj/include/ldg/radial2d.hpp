#pragma once
// Equivariant disc problem: discrete energy, Euler-Lagrange residual, constrained
// minimization within the two center classes, energy curves and the escape threshold.

#include <optional>
#include <string>
#include <vector>

#include "ldg/profile.hpp"
#include "ldg/sphere_opt.hpp"

namespace ldg {

struct EnergyParts {
    double total = 0.0;
    double dirichlet = 0.0;
    double potential = 0.0;  // integral of W over the disc; total = dirichlet + lambda * potential
};

// Piecewise-linear energy of a profile on its own grid.
EnergyParts radial_energy(const RadialProfile& f, double lambda);

struct ResidualReport {
    double residual = 0.0;          // max over interior nodes
    bool boundary_mismatch = false; // f(1) differs from the lateral datum
    bool center_mismatch = false;   // f(0) is not +-e0
};
// Strong-form residual of the equivariant Euler-Lagrange system (nonuniform three-point stencils).
ResidualReport el_residual_2d(const RadialProfile& f, double lambda);

struct MinResult2D {
    RadialProfile profile;
    double energy = 0.0;
    double dirichlet = 0.0;
    double potential = 0.0;
    double residual = 0.0;       // el_residual_2d of the result
    double stationarity = 0.0;   // discrete tangential gradient, mass normalized
    int iterations = 0;
    DiscClass class_tag = DiscClass::S;
    bool class_preserved = true; // sign of f0 at the first interior node never changed
    double beta_min = 0.0, beta_max = 0.0;
    std::string stop_reason;
};

enum class Preset { SmallSolution, GHbar, GHbarReflected, Bubbled };

// Closed-form initial profile on `grid`, optionally perturbed by Gaussian noise of the
// given amplitude at interior nodes and renormalized.
RadialProfile preset_profile(Preset which, const std::vector<double>& grid, double noise = 0.0,
                             std::uint64_t seed = 1);

// Options tuned for the disc problem.
SolveOptions default_options_2d();

MinResult2D minimize_2d(double lambda, DiscClass cls, const RadialProfile& init, const SolveOptions& opts,
                        const IterationObserver& observer = nullptr);

// Transfer a profile to another grid by linear interpolation and renormalization.
RadialProfile resample(const RadialProfile& f, const std::vector<double>& grid);

struct CurveRow {
    double lambda = 0.0;
    double e_star = 0.0;   // class S minimum
    double e = 0.0;        // min(6 pi, e_star)
    double beta_min = 0.0, beta_max = 0.0;
    bool valid = true;
    std::string source;    // which initial profile produced the minimum
};

// Class S minima along a sorted list of couplings with warm starts.
std::vector<CurveRow> energy_curve(const std::vector<double>& lambdas, std::size_t intervals, const SolveOptions& opts);

// Class S minimum at one coupling, best of warm start (if given) and canonical starts.
MinResult2D class_s_minimum(double lambda, std::size_t intervals, const SolveOptions& opts,
                            const RadialProfile* warm = nullptr, std::string* source = nullptr);

struct LambdaStarResult {
    double lo = 0.0, hi = 0.0;
    double seed_lo = 0.0, seed_hi = 0.0;
    double g_lo = 0.0, g_hi = 0.0;  // e*_lambda - 6 pi at the seed bracket ends
    int solves = 0;
};
double lambda_star_lower_bound();
double lambda_star_upper_bound();
LambdaStarResult estimate_lambda_star(double tol, std::size_t intervals, const SolveOptions& opts);

struct SpectrumResult {
    std::vector<double> eigenvalues;  // smallest first
    double residual = 0.0;
};
// Smallest eigenvalues of the mass-normalized Riemannian Hessian over tangent fields
// vanishing at both ends of the grid. Throws if the input is not stationary.
SpectrumResult second_variation_spectrum(const RadialProfile& f, double lambda, int modes,
                                         double stationarity_limit = 1e-3);
// Quadratic form of the same Hessian at a tangent field phi (5 values per node).
double second_variation_form(const RadialProfile& f, double lambda, const std::vector<double>& phi);

// Discrete energy machinery shared with tests.
struct RadialDiscretization {
    std::vector<double> r, edge_coef, inv_r_weight, node_area;  // node_area = 2 pi tau_k r_k
    explicit RadialDiscretization(const std::vector<double>& grid);
    double energy(const std::vector<double>& x, double lambda, std::vector<double>* grad, EnergyParts* parts) const;
};

std::vector<double> to_flat(const RadialProfile& f);
RadialProfile from_flat(const std::vector<double>& grid, const std::vector<double>& x);

}  // namespace ldg
