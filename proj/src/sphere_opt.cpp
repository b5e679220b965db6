#include "ldg/sphere_opt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace ldg {

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::GradTol: return "grad_tol";
        case StopReason::EnergyTol: return "energy_tol";
        case StopReason::MaxIters: return "max_iters";
        case StopReason::Stalled: return "stalled";
    }
    return "unknown";
}

void normalize_nodes(std::vector<double>& x) {
    for (std::size_t k = 0; k + 4 < x.size(); k += 5) {
        double n = 0.0;
        for (int i = 0; i < 5; ++i) n += x[k + i] * x[k + i];
        n = std::sqrt(n);
        for (int i = 0; i < 5; ++i) x[k + i] /= n;
    }
}

namespace {

struct Pair {
    std::vector<double> s, y;
    double rho;
};

void project_node(const double* x, double* v) {
    double d = 0.0;
    for (int i = 0; i < 5; ++i) d += x[i] * v[i];
    for (int i = 0; i < 5; ++i) v[i] -= d * x[i];
}

}  // namespace

double stationarity(const SphereProblem& p, const std::vector<double>& x, const std::vector<double>& grad,
                    std::vector<double>* out) {
    std::vector<double> local;
    std::vector<double>& g = out ? *out : local;
    g.assign(5 * p.nodes, 0.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < p.nodes; ++k) {
        if (p.fixed[k]) continue;
        double* gk = &g[5 * k];
        for (int i = 0; i < 5; ++i) gk[i] = grad[5 * k + i];
        project_node(&x[5 * k], gk);
        double n2 = 0.0;
        for (int i = 0; i < 5; ++i) {
            gk[i] /= p.mass[k];
            n2 += gk[i] * gk[i];
        }
        worst = std::max(worst, std::sqrt(n2));
    }
    return worst;
}

OptResult minimize_on_spheres(const SphereProblem& p, std::vector<double> x, const SolveOptions& opts,
                              const IterationObserver& observer) {
    if (x.size() != 5 * p.nodes || p.fixed.size() != p.nodes || p.mass.size() != p.nodes)
        throw std::invalid_argument("minimize_on_spheres: inconsistent problem sizes");
    const std::size_t n = x.size();
    normalize_nodes(x);

    auto dot_m = [&](const std::vector<double>& a, const std::vector<double>& b) {
        long double s = 0.0L;
        for (std::size_t k = 0; k < p.nodes; ++k) {
            if (p.fixed[k]) continue;
            double t = 0.0;
            for (int i = 0; i < 5; ++i) t += a[5 * k + i] * b[5 * k + i];
            s += p.mass[k] * t;
        }
        return static_cast<double>(s);
    };
    auto project_all = [&](const std::vector<double>& at, std::vector<double>& v) {
        for (std::size_t k = 0; k < p.nodes; ++k) {
            if (p.fixed[k]) {
                for (int i = 0; i < 5; ++i) v[5 * k + i] = 0.0;
                continue;
            }
            project_node(&at[5 * k], &v[5 * k]);
        }
    };
    auto max_node_norm = [&](const std::vector<double>& v) {
        double m = 0.0;
        for (std::size_t k = 0; k < p.nodes; ++k) {
            double t = 0.0;
            for (int i = 0; i < 5; ++i) t += v[5 * k + i] * v[5 * k + i];
            m = std::max(m, std::sqrt(t));
        }
        return m;
    };

    OptResult res;
    std::vector<double> grad(n), gm(n), gm_new(n), grad_new(n), d(n), trial(n);
    double energy = p.energy(x, &grad);
    double stat = stationarity(p, x, grad, &gm);
    std::deque<Pair> memory;
    int small_steps = 0;
    int iter = 0;
    bool first = true;

    while (true) {
        if (stat <= opts.grad_tol) {
            res.reason = StopReason::GradTol;
            break;
        }
        if (iter >= opts.max_iters) {
            res.reason = StopReason::MaxIters;
            break;
        }

        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            const bool steepest = memory.empty();
            // Two-loop recursion in the mass-weighted metric.
            d = gm;
            std::vector<double> alpha(memory.size());
            for (std::size_t i = memory.size(); i-- > 0;) {
                alpha[i] = memory[i].rho * dot_m(memory[i].s, d);
                for (std::size_t j = 0; j < n; ++j) d[j] -= alpha[i] * memory[i].y[j];
            }
            if (!steepest) {
                const Pair& last = memory.back();
                const double gamma = 1.0 / (last.rho * dot_m(last.y, last.y));
                for (double& v : d) v *= gamma;
            }
            for (std::size_t i = 0; i < memory.size(); ++i) {
                const double beta = memory[i].rho * dot_m(memory[i].y, d);
                for (std::size_t j = 0; j < n; ++j) d[j] += (alpha[i] - beta) * memory[i].s[j];
            }
            for (double& v : d) v = -v;
            project_all(x, d);
            double slope = dot_m(gm, d);
            if (!(slope < 0.0)) {
                memory.clear();
                continue;
            }
            const double move = max_node_norm(d);
            double t = steepest && first ? opts.step : 1.0;
            if (steepest && !first) {
                // Restart after a memory reset: start from the largest admissible move.
                t = std::min(1.0, opts.max_node_move / std::max(move, 1e-300));
            }
            if (t * move > opts.max_node_move) t = opts.max_node_move / move;
            for (int ls = 0; ls < 50; ++ls) {
                for (std::size_t k = 0; k < p.nodes; ++k)
                    for (int i = 0; i < 5; ++i) trial[5 * k + i] = x[5 * k + i] + (p.fixed[k] ? 0.0 : t * d[5 * k + i]);
                normalize_nodes(trial);
                const double e_new = p.energy(trial, &grad_new);
                if (e_new <= energy + 1e-4 * t * slope && e_new < energy) {
                    const double stat_new = stationarity(p, trial, grad_new, &gm_new);
                    // Curvature pair transported by projection onto the new tangent spaces.
                    Pair pr;
                    pr.s.resize(n);
                    pr.y.resize(n);
                    for (std::size_t j = 0; j < n; ++j) pr.s[j] = trial[j] - x[j];
                    project_all(trial, pr.s);
                    std::vector<double> old_g = gm;
                    project_all(trial, old_g);
                    for (std::size_t j = 0; j < n; ++j) pr.y[j] = gm_new[j] - old_g[j];
                    const double sy = dot_m(pr.s, pr.y);
                    const double ss = dot_m(pr.s, pr.s), yy = dot_m(pr.y, pr.y);
                    if (sy > 1e-12 * std::sqrt(ss * yy)) {
                        pr.rho = 1.0 / sy;
                        memory.push_back(std::move(pr));
                        if (static_cast<int>(memory.size()) > opts.memory) memory.pop_front();
                    }
                    const double decrement = energy - e_new;
                    if (opts.energy_tol > 0.0 && decrement <= opts.energy_tol * std::max(1.0, std::abs(e_new)))
                        ++small_steps;
                    else
                        small_steps = 0;
                    x.swap(trial);
                    grad.swap(grad_new);
                    gm.swap(gm_new);
                    energy = e_new;
                    stat = stat_new;
                    accepted = true;
                    first = false;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) memory.clear();
        }
        if (!accepted) {
            res.reason = StopReason::Stalled;
            break;
        }
        ++iter;
        if (observer) observer(iter, energy, x);
        if (opts.energy_tol > 0.0 && small_steps >= opts.patience) {
            res.reason = StopReason::EnergyTol;
            break;
        }
    }
    res.x = std::move(x);
    res.energy = energy;
    res.stationarity = stat;
    res.iterations = iter;
    return res;
}

}  // namespace ldg
