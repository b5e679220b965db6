#pragma once
// Equivariant disc configurations sampled on a radial grid.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ldg/tensor.hpp"

namespace ldg {

enum class DiscClass { N, S };

inline const char* to_string(DiscClass c) { return c == DiscClass::N ? "N" : "S"; }

struct RadialProfile {
    std::vector<double> r;   // 0 = r[0] < ... < r[n-1] = 1
    std::vector<UVector> f;  // value at phase angle 0

    std::size_t size() const { return r.size(); }
    // Class tag read from the sign of f0 at the center.
    DiscClass center_class() const { return f.front().u0 >= 0 ? DiscClass::N : DiscClass::S; }
    // Piecewise linear value at radius s (not renormalized).
    UVector at(double s) const;
    bool uniform(double rel_tol = 1e-9) const;
};

// n intervals of equal length on [0, 1].
std::vector<double> uniform_grid(std::size_t intervals);

// Sample a field u(z) on the positive real axis of the disc.
RadialProfile sample_profile(const std::function<UVector(cplx)>& u, const std::vector<double>& grid);

// Throws DomainError if any node violates |f| = 1 beyond tol.
void require_unit_profile(const RadialProfile& p, double tol, const char* where);

// CSV with columns r,f0,re_f1,im_f1,re_f2,im_f2.
void write_profile_csv(const RadialProfile& p, const std::string& path);
void write_profile_csv(const RadialProfile& p, std::ostream& out);
RadialProfile read_profile_csv(const std::string& path);

}  // namespace ldg
