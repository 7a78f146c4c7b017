#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qdk/rational.hpp"

namespace qdk {

using cplx = std::complex<double>;

enum class Orientation { ccw, cw };

/// Closed analytic curve z(t) = sum_{m=-K}^{K} c_m e^{imt}, t in [0, 2pi).
/// Construction checks immersion, simplicity (at sample resolution) and that the
/// declared orientation matches the sign of the enclosed area.
class BoundaryCurve {
public:
    /// coeffs has odd length 2K+1 and holds c_{-K}..c_K.
    BoundaryCurve(std::vector<cplx> coeffs, Orientation declared, int index = 0);

    /// Resample r(e^{it}) to trig form; the parameter t is preserved.
    static BoundaryCurve from_rational_image(const RationalFunction& r);

    int max_frequency() const { return static_cast<int>(coeffs_.size() / 2); }
    const std::vector<cplx>& coeffs() const { return coeffs_; }
    Orientation orientation() const { return orientation_; }

    cplx point(double t) const;
    /// d^order z / dt^order
    cplx derivative(double t, int order = 1) const;
    /// (1/2i) closed-integral of conj(z) dz; positive for counter-clockwise curves.
    double signed_area() const;
    /// Dense polygon used for validation and point-location tests.
    std::vector<cplx> polygon(std::size_t samples) const;

private:
    std::vector<cplx> coeffs_;
    Orientation orientation_;
};

/// n-connected domain: one ccw outer curve, n-1 cw holes. When built from a rational
/// map of the unit disc the map is kept alongside the resampled curve.
class PlanarDomain {
public:
    PlanarDomain(BoundaryCurve outer, std::vector<BoundaryCurve> holes);
    static PlanarDomain rational_image(const RationalFunction& r);

    const BoundaryCurve& outer() const { return curves_.front(); }
    std::span<const BoundaryCurve> holes() const { return std::span(curves_).subspan(1); }
    const std::vector<BoundaryCurve>& curves() const { return curves_; }
    int connectivity() const { return static_cast<int>(curves_.size()); }
    const std::optional<RationalFunction>& source_map() const { return source_map_; }

private:
    std::vector<BoundaryCurve> curves_;
    std::optional<RationalFunction> source_map_;
};

/// Nystrom discretization: N equispaced parameters per curve, curves stored
/// consecutively (outer first).
struct BoundaryGrid {
    std::uint64_t id = 0;
    int nodes_per_curve = 0;
    int curve_count = 0;
    double dt = 0.0;
    std::vector<double> t;
    std::vector<cplx> z;
    std::vector<cplx> dz;   // z'(t)
    std::vector<cplx> d2z;  // z''(t)
    std::vector<cplx> tangent;
    std::vector<double> weight;  // |z'(t)| dt
    std::vector<double> spacing; // per curve: max node weight

    std::size_t size() const { return z.size(); }
    int curve_of(std::size_t k) const { return static_cast<int>(k) / nodes_per_curve; }
    std::size_t curve_begin(int c) const { return static_cast<std::size_t>(c * nodes_per_curve); }
    double perimeter(int c) const;
    double max_spacing() const;
};

/// Values of a function at the nodes of one grid.
struct BoundaryFunction {
    std::uint64_t grid_id = 0;
    std::vector<cplx> values;

    BoundaryFunction() = default;
    BoundaryFunction(const BoundaryGrid& grid, std::vector<cplx> v);
    static BoundaryFunction sample(const BoundaryGrid& grid, const std::function<cplx(cplx)>& f);
};

BoundaryGrid discretize(const PlanarDomain& domain, int nodes_per_curve);

/// Trapezoid approximation of the closed integral of f dz over the oriented boundary.
cplx contour_integral(const BoundaryGrid& grid, const BoundaryFunction& f);
/// Same over a single curve.
cplx contour_integral(const BoundaryGrid& grid, const BoundaryFunction& f, int curve);

int winding_number(const BoundaryGrid& grid, cplx z0);
double area(const BoundaryGrid& grid);

/// Smallest distance from z to a node, measured in units of the local node spacing.
double spacing_distance(const BoundaryGrid& grid, cplx z);
double distance_to_boundary(const BoundaryGrid& grid, cplx z);

/// Interior value of the holomorphic function whose boundary trace is f (barycentric
/// form of the Cauchy integral). Throws ProximityError within two node spacings of the
/// boundary and DomainError outside the domain.
cplx cauchy_eval(const BoundaryGrid& grid, const BoundaryFunction& f, cplx z);
/// Throws ProximityError within two node spacings of the boundary and DomainError
/// outside the domain.
void require_interior(const BoundaryGrid& grid, cplx z);
/// Normalized barycentric weights at z: cauchy_eval(grid, f, z) = sum_k w_k f_k. Same
/// checks as cauchy_eval.
std::vector<cplx> cauchy_weights(const BoundaryGrid& grid, cplx z);
/// k-th derivative of the same function by the differentiated Cauchy kernel.
cplx cauchy_derivative(const BoundaryGrid& grid, const BoundaryFunction& f, cplx z, int k);

/// d/dt per curve (spectral).
std::vector<cplx> parametric_derivative(const BoundaryGrid& grid, std::span<const cplx> values, int order = 1);
/// Complex derivative along the boundary, (d/dt) / z'(t), applied `order` times.
std::vector<cplx> boundary_derivative(const BoundaryGrid& grid, std::span<const cplx> values, int order = 1);

/// Boundary trace of the exterior Cauchy integral of f. It vanishes exactly when f is
/// the trace of a function holomorphic in the domain.
std::vector<cplx> exterior_cauchy_part(const BoundaryGrid& grid, std::span<const cplx> values);
/// Interior boundary limit of the Cauchy integral of f.
std::vector<cplx> interior_cauchy_limit(const BoundaryGrid& grid, std::span<const cplx> values);

/// Deterministic interior points: a lattice over the bounding box, kept when at least
/// `margin` from the boundary, then thinned by farthest-point sampling starting from the
/// deepest point.
std::vector<cplx> interior_probes(const BoundaryGrid& grid, std::size_t count, double margin);
/// Approximate inradius (deepest lattice point).
double inradius(const BoundaryGrid& grid);
cplx deepest_point(const BoundaryGrid& grid);

/// A point strictly inside the bounded complement region enclosed by hole curve c >= 1.
cplx hole_point(const BoundaryGrid& grid, int c);

} // namespace qdk
