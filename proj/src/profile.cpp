#include "ldg/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ldg {

UVector RadialProfile::at(double s) const {
    if (s <= r.front()) return f.front();
    if (s >= r.back()) return f.back();
    const auto it = std::upper_bound(r.begin(), r.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - r.begin()) - 1;
    const double t = (s - r[k]) / (r[k + 1] - r[k]);
    return f[k] * (1.0 - t) + f[k + 1] * t;
}

bool RadialProfile::uniform(double rel_tol) const {
    if (r.size() < 2) return false;
    const double h = (r.back() - r.front()) / static_cast<double>(r.size() - 1);
    for (std::size_t k = 0; k + 1 < r.size(); ++k)
        if (std::abs(r[k + 1] - r[k] - h) > rel_tol * h) return false;
    return true;
}

std::vector<double> uniform_grid(std::size_t intervals) {
    std::vector<double> g(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k) g[k] = static_cast<double>(k) / static_cast<double>(intervals);
    return g;
}

RadialProfile sample_profile(const std::function<UVector(cplx)>& u, const std::vector<double>& grid) {
    RadialProfile p;
    p.r = grid;
    p.f.reserve(grid.size());
    for (double s : grid) p.f.push_back(u(cplx(s, 0.0)));
    return p;
}

void require_unit_profile(const RadialProfile& p, double tol, const char* where) {
    for (std::size_t k = 0; k < p.size(); ++k)
        if (std::abs(p.f[k].norm() - 1.0) > tol)
            throw DomainError(std::string(where) + ": profile violates unit norm at node " + std::to_string(k));
}

void write_profile_csv(const RadialProfile& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_profile_csv(p, out);
}

void write_profile_csv(const RadialProfile& p, std::ostream& out) {
    out << "r,f0,re_f1,im_f1,re_f2,im_f2\n" << std::setprecision(17);
    for (std::size_t k = 0; k < p.size(); ++k) {
        const auto a = p.f[k].arr();
        out << p.r[k];
        for (double v : a) out << ',' << v;
        out << '\n';
    }
}

RadialProfile read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    RadialProfile p;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        double v[6];
        for (double& x : v) {
            std::string cell;
            std::getline(ss, cell, ',');
            x = std::stod(cell);
        }
        p.r.push_back(v[0]);
        p.f.push_back(UVector::from_array(v + 1));
    }
    return p;
}

}  // namespace ldg
