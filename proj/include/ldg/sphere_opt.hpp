#pragma once
// Riemannian L-BFGS with Armijo backtracking on a product of unit 4-spheres.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ldg {

struct SolveOptions {
    double step = 1.0;         // initial trial step for the first (steepest) direction
    int max_iters = 200000;
    double grad_tol = 1e-6;    // on the mass-normalized tangential gradient, max norm
    double energy_tol = 0.0;   // relative decrement threshold; 0 disables the test
    int patience = 200;        // consecutive small decrements before stopping on energy_tol
    std::uint64_t seed = 1;
    int memory = 12;
    double max_node_move = 0.25;  // cap on the per-node displacement of a trial step
};

// Energy callback: returns the value and, when `grad` is non-null, the Euclidean gradient.
using EnergyFn = std::function<double(const std::vector<double>& x, std::vector<double>* grad)>;
using IterationObserver = std::function<void(int iter, double energy, const std::vector<double>& x)>;

struct SphereProblem {
    std::size_t nodes = 0;
    std::vector<char> fixed;    // per node; fixed nodes never move
    std::vector<double> mass;   // per node, positive on free nodes
    EnergyFn energy;
};

enum class StopReason { GradTol, EnergyTol, MaxIters, Stalled };
const char* to_string(StopReason r);

struct OptResult {
    std::vector<double> x;
    double energy = 0.0;
    double stationarity = 0.0;  // max over free nodes of |P g_k| / m_k
    int iterations = 0;
    StopReason reason = StopReason::MaxIters;
    bool monotone = true;       // every accepted step decreased the energy
};

// Normalize every node of a 5-per-node array to unit length.
void normalize_nodes(std::vector<double>& x);

// Mass-normalized tangential gradient and its max-norm over free nodes.
double stationarity(const SphereProblem& p, const std::vector<double>& x, const std::vector<double>& grad,
                    std::vector<double>* out = nullptr);

OptResult minimize_on_spheres(const SphereProblem& p, std::vector<double> x0, const SolveOptions& opts,
                              const IterationObserver& observer = nullptr);

}  // namespace ldg

namespace ldg {

// Squared great-circle distance between unit vectors as a function of the squared
// chord c = |a - b|^2, with first and second derivatives in c. Using it for edge
// energies keeps a jump across one cell from costing less than a smooth transition.
inline double geodesic_sq(double c, double* d1 = nullptr, double* d2 = nullptr) {
    if (c < 1e-4) {
        if (d1) *d1 = 1.0 + c / 6.0 + c * c / 30.0;
        if (d2) *d2 = 1.0 / 6.0 + c / 15.0;
        return c + c * c / 12.0 + c * c * c / 90.0;
    }
    const double cc = std::min(c, 4.0 - 1e-12);
    const double theta = 2.0 * std::asin(0.5 * std::sqrt(cc));
    const double g = 1.0 / std::sqrt(cc * (1.0 - 0.25 * cc));
    if (d1) *d1 = theta * g;
    if (d2) *d2 = g * g - 0.5 * theta * g * g * g * (1.0 - 0.5 * cc);
    return theta * theta;
}

}  // namespace ldg
