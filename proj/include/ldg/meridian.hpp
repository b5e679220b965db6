#pragma once
// Axisymmetric problem in smoothed cylinders, reduced to the meridian half-plane (r, x3).
//
// Nodes sit on a staggered lattice r_i = (i + 1/2) h_r, x3_j = -h + (j + 1/2) h_z, so no
// node lies on the axis or on the flat walls. Edges leaving the domain end at the
// boundary crossing, where the homeotropic datum of the local normal is imposed.

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldg/profile.hpp"
#include "ldg/radial2d.hpp"
#include "ldg/sphere_opt.hpp"
#include "ldg/tensor.hpp"

namespace ldg {

// Cylinder of radius ell and height 2h whose meridian corners are rounded by 4-norm
// quarter discs of radius rho centered at (ell - rho, +-(h - rho)).
struct CylinderGeometry {
    double h = 1.0, ell = 1.0, rho = 0.1;

    // Closed smoothed region, in meridian coordinates (a = distance to the axis, b = x3).
    bool contains(double a, double b) const;
    // Outer wall abscissa at height b, defined for |b| <= h.
    double wall_r(double b) const;
    // Upper cap ordinate at distance a from the axis, defined for 0 <= a <= ell.
    double cap_z(double a) const;
    // Outward unit normal (n_r, n_3) at a boundary point; throws if the point is off the boundary.
    std::array<double, 2> normal(double a, double b, double tol = 1e-9) const;
    // Hausdorff distance between the smoothed region and the full rectangle.
    double rectangle_gap() const;
};

CylinderGeometry build_geometry(double h, double ell, double rho);

// Homeotropic datum sqrt(3/2)(n n^T - I/3) at phase angle 0 for a boundary point.
UVector homeotropic_datum(const CylinderGeometry& g, double a, double b);

enum class NodeKind : unsigned char { Exterior = 0, Interior = 1, NearBoundary = 2 };

struct MeridianGrid {
    CylinderGeometry geom;
    int nr = 0, nz = 0;      // nz is odd so that one row sits on the midplane
    double hr = 0.0, hz = 0.0;
    std::vector<NodeKind> kind;  // nr * nz, row-major in x3

    double r(int i) const { return (i + 0.5) * hr; }
    double z(int j) const { return -geom.h + (j + 0.5) * hz; }
    int index(int i, int j) const { return j * nr + i; }
    bool inside(int i, int j) const {
        return i >= 0 && i < nr && j >= 0 && j < nz && kind[index(i, j)] != NodeKind::Exterior;
    }
    int mid_row() const { return nz / 2; }
};

// Lattice with spacing close to `spacing` in both directions.
MeridianGrid build_grid(const CylinderGeometry& geom, double spacing);

// Nodewise inclusion of the inner rectangles and containment in the full rectangle.
struct InclusionReport {
    bool inner_lateral = true;  // nodes of [0, ell - rho] x [-h, h] are inside
    bool inner_caps = true;     // nodes of [0, ell] x [-(h - rho), h - rho] are inside
    bool outer = true;          // inside nodes lie in [0, ell] x [-h, h]
};
InclusionReport check_inclusions(const MeridianGrid& grid);

struct MeridianField {
    MeridianGrid grid;
    std::vector<UVector> f;  // per lattice node; exterior entries are ignored

    const UVector& at(int i, int j) const { return f[grid.index(i, j)]; }
    UVector& at(int i, int j) { return f[grid.index(i, j)]; }
};

struct EnergyParts3D {
    double total = 0.0;
    double dirichlet = 0.0;  // interior edges and the 1/r^2 terms
    double boundary = 0.0;   // edges joining nodes to the boundary datum
    double potential = 0.0;  // integral of W; total = dirichlet + boundary + lambda * potential
};

// Unknown-node bookkeeping and the discrete energy on one lattice.
class MeridianDiscretization {
  public:
    explicit MeridianDiscretization(const MeridianGrid& grid);
    std::size_t unknowns() const { return node_of_.size(); }
    const std::vector<int>& nodes() const { return node_of_; }  // lattice index per unknown
    const std::vector<double>& mass() const { return mass_; }
    double energy(const std::vector<double>& x, double lambda, std::vector<double>* grad, EnergyParts3D* parts) const;

    std::vector<double> pack(const MeridianField& F) const;
    void unpack(const std::vector<double>& x, MeridianField& F) const;

    struct Crossing {
        int unknown;
        double weight;   // multiplies pi * geodesic_sq
        double a, b;     // boundary point
        UVector datum;
    };
    // Boundary data may be overwritten, e.g. to impose the trace of an analytic field.
    std::vector<Crossing>& crossings() { return cross_; }
    const std::vector<Crossing>& crossings() const { return cross_; }

    // Energy attributed to each lattice node: half of every interior edge, all of its
    // boundary edges, its 1/r^2 and potential terms. Sums to the total energy.
    std::vector<double> node_energies(const std::vector<double>& x, double lambda) const;
    // Cell of a lattice node as [r_lo, r_hi] x [z_lo, z_hi], truncated at the boundary.
    std::array<double, 4> cell(int lattice_index) const { return cells_[lattice_index]; }

  private:
    struct Edge {
        int a, b;
        double weight;
    };
    MeridianGrid grid_;
    std::vector<int> node_of_;
    std::vector<int> unknown_of_;
    std::vector<double> mass_, inv_r_area_, r_area_;
    std::vector<Edge> edges_;
    std::vector<Crossing> cross_;
    std::vector<std::array<double, 4>> cells_;
};

// Unit-norm check, then the discrete energy with homeotropic data.
EnergyParts3D meridian_energy(const MeridianField& F, double lambda);

enum class Seed { Split, Torus };
const char* to_string(Seed s);

// Split seed: x3-independent extension of a class-S disc profile (at coupling lambda ell^2).
// Torus seed: e0 at every node.
MeridianField seed_field(const MeridianGrid& grid, Seed seed, const RadialProfile* disc_profile = nullptr);
// Field equal to a radial profile (on the unit disc) rescaled to radius ell on every row.
MeridianField extend_profile(const MeridianGrid& grid, const RadialProfile& p);

struct AxisTrace {
    std::vector<double> z;
    std::vector<double> f0;
    std::vector<int> tag;  // +1, -1, or 0 inside a transition
};
AxisTrace axis_trace(const MeridianField& F, double threshold = 0.9);

struct SingularityRecord {
    double position = 0.0;
    int from = 0, to = 0;  // axis tags below and above
};
// Sign changes of f0 along the axis column. With `include_caps` the cap tags (+1) at
// x3 = -h and x3 = h enter the scan. Throws DomainError on an unresolved axis span.
std::vector<SingularityRecord> detect_singularities(const MeridianField& F, bool include_caps = true,
                                                    double threshold = 0.9, int max_span = 3);

enum class Shape { Split, Torus };
const char* to_string(Shape s);

struct RingReport {
    bool present = false;
    double beta_min = 1.0;
    double r = 0.0, z = 0.0;   // location of the minimum
    int nodes = 0;             // size of the off-axis component below the threshold
};
// Largest connected set of nodes with beta <= -1 + eps that avoids the axis column.
RingReport find_ring(const MeridianField& F, double eps = 1e-2);

struct Classification {
    Shape shape = Shape::Torus;
    std::vector<SingularityRecord> singularities;
    RingReport ring;
    double beta_min = 1.0, beta_max = -1.0;
};
Classification classify(const MeridianField& F, double ring_eps = 1e-2);

struct MinResult3D {
    MeridianField field;
    EnergyParts3D parts;
    double stationarity = 0.0;
    int iterations = 0;
    std::string stop_reason;
    bool monotone = true;
    bool converged = false;
    std::optional<Classification> classification;  // empty if the axis is unresolved
    std::string axis_error;
};

SolveOptions default_options_3d();

MinResult3D minimize_3d(double lambda, const MeridianField& init, const SolveOptions& opts,
                        const IterationObserver& observer = nullptr);

// Energy of the field over the part of the domain inside a ball about (0, center) of the
// given radius, with cells weighted by their covered fraction.
double ball_energy(const MeridianField& F, double lambda, double radius, double center = 0.0);
// Energy over the cylinder |x| < radius (all heights).
double cylinder_energy(const MeridianField& F, double lambda, double radius);

// Vertical residuals are relative to the larger side; horizontal and radial ones to the
// sum of the magnitudes of all terms, since their boundary integrands nearly cancel.
struct IdentityResiduals {
    double vertical = 0.0;
    double horizontal = 0.0;
    double radial = 0.0;  // NaN when the geometry leaves no admissible radii
    double vertical_lhs = 0.0, vertical_rhs = 0.0;
    double horizontal_lhs = 0.0, horizontal_rhs = 0.0;
    double radial_lhs = 0.0, radial_rhs = 0.0;
};
struct IdentityParams {
    double t1 = 0.0, t2 = 0.0;  // vertical identity slices
    double s = 0.0;             // horizontal identity half-height
    double r1 = 0.0, r2 = 0.0;  // radial identity radii; both 0 to skip
};
IdentityResiduals energy_identity_residuals(const MeridianField& F, double lambda, const IdentityParams& p);

// Quantity conserved in x3 by minimizers: slice energy minus half the vertical Dirichlet term.
double vertical_flux(const MeridianField& F, double lambda, int row);

struct MonotonicityReport {
    std::vector<double> radii, ratios;  // (1/r) E(B_r)
    double worst_drop = 0.0;             // largest decrease between consecutive radii
};
MonotonicityReport monotonicity_profile(const MeridianField& F, double lambda, const std::vector<double>& radii);

// Radial test profile eta(s) = s^-a (1 - s)^2 on [s0, 1], linear to 0 on [0, s0].
struct TestProfile {
    double exponent = 0.0;
    double inner = 0.1;
    double value(double s) const;
    double slope(double s) const;
};
// 4 pi int_0^1 (eta'^2 - 2 eta^2 / s^2) s^2 ds by adaptive quadrature.
double hardy_deficit(const TestProfile& eta);

// Second variation of the energy along Phi(x) = r^-1/2 eta(|x - p| / r) vbar with p on
// the axis at height `center` and vbar = e_{21}, integrated over the full 3D ball with
// `azimuths` samples of the angle.
double instability_form(const MeridianField& F, double lambda, double center, double radius, const TestProfile& eta,
                        int azimuths = 32);

// CSV dumps: field columns r,x3,f0,re_f1,im_f1,re_f2,im_f2,beta; mask columns i,j,r,x3,kind.
void write_field_csv(const MeridianField& F, const std::string& path);
void write_field_csv(const MeridianField& F, std::ostream& out);
void write_mask_csv(const MeridianGrid& grid, const std::string& path);

}  // namespace ldg
