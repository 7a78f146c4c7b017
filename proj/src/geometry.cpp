#include "qdk/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qdk/error.hpp"
#include "qdk/spectral.hpp"

namespace qdk {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::atomic<std::uint64_t> next_grid_id{1};

double cross(cplx a, cplx b)
{
    return a.real() * b.imag() - a.imag() * b.real();
}

bool segments_intersect(cplx p1, cplx p2, cplx q1, cplx q2)
{
    const double d1 = cross(p2 - p1, q1 - p1);
    const double d2 = cross(p2 - p1, q2 - p1);
    const double d3 = cross(q2 - q1, p1 - q1);
    const double d4 = cross(q2 - q1, p2 - q1);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

// Angle-sum winding number of a closed polygon about z.
int polygon_winding(std::span<const cplx> poly, cplx z)
{
    double total = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k)
        total += std::arg((poly[(k + 1) % n] - z) / (poly[k] - z));
    return static_cast<int>(std::lround(total / two_pi));
}

// Index of the first pair of crossing non-adjacent edges, or nullopt.
std::optional<std::pair<std::size_t, std::size_t>> self_crossing(std::span<const cplx> poly)
{
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx a = poly[i];
        const cplx b = poly[(i + 1) % n];
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1)
                continue;
            if (segments_intersect(a, b, poly[j], poly[(j + 1) % n]))
                return std::make_pair(i, j);
        }
    }
    return std::nullopt;
}

bool polygons_cross(std::span<const cplx> p, std::span<const cplx> q)
{
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j)
            if (segments_intersect(p[i], p[(i + 1) % p.size()], q[j], q[(j + 1) % q.size()]))
                return true;
    return false;
}

std::string curve_name(int index)
{
    return index == 0 ? std::string("outer curve") : "hole curve " + std::to_string(index);
}

std::size_t validation_samples(int K)
{
    return static_cast<std::size_t>(std::max(256, 8 * K));
}

} // namespace

// ---------------------------------------------------------------- BoundaryCurve

BoundaryCurve::BoundaryCurve(std::vector<cplx> coeffs, Orientation declared, int index)
    : coeffs_(std::move(coeffs)), orientation_(declared)
{
    if (coeffs_.size() % 2 == 0 || coeffs_.size() < 3)
        throw GeometryError(curve_name(index) + ": trig coefficient list must have odd length 2K+1 with K >= 1");
    const int K = max_frequency();

    double scale = 0.0;
    for (int m = -K; m <= K; ++m)
        scale += std::abs(m) * std::abs(coeffs_[static_cast<std::size_t>(m + K)]);
    if (scale == 0.0)
        throw GeometryError(curve_name(index) + ": curve degenerates to a point");

    const std::size_t M = std::max<std::size_t>(1024, 16 * static_cast<std::size_t>(K));
    for (std::size_t k = 0; k < M; ++k) {
        const double t = two_pi * static_cast<double>(k) / static_cast<double>(M);
        if (std::abs(derivative(t)) <= 1e-9 * scale) {
            std::ostringstream msg;
            msg << curve_name(index) << ": not immersed, z'(t) vanishes near t = " << t;
            throw GeometryError(msg.str());
        }
    }

    const auto poly = polygon(validation_samples(K));
    if (auto hit = self_crossing(poly)) {
        const double dt = two_pi / static_cast<double>(poly.size());
        std::ostringstream msg;
        msg << curve_name(index) << ": self-intersection between parameters t = " << dt * hit->first
            << " and t = " << dt * hit->second;
        throw GeometryError(msg.str());
    }

    const double a = signed_area();
    const Orientation actual = a > 0 ? Orientation::ccw : Orientation::cw;
    if (actual != declared)
        throw GeometryError(curve_name(index) + ": declared orientation does not match the parameterization");
}

BoundaryCurve BoundaryCurve::from_rational_image(const RationalFunction& r)
{
    for (const auto& p : r.poles())
        if (std::abs(p.value) <= 1.0 + 1e-12)
            throw GeometryError("rational map has a pole in the closed unit disc");
    for (std::size_t M = 64; M <= (1u << 15); M *= 2) {
        std::vector<cplx> samples(M);
        for (std::size_t k = 0; k < M; ++k)
            samples[k] = r(std::polar(1.0, two_pi * static_cast<double>(k) / static_cast<double>(M)));
        auto c = spectral::centered_coefficients(samples, 1e-16);
        const int K = static_cast<int>(c.size() / 2);
        if (static_cast<std::size_t>(K) < M / 4)
            return BoundaryCurve(std::move(c), Orientation::ccw, 0);
    }
    throw GeometryError("rational map boundary image is not resolvable by trig resampling");
}

cplx BoundaryCurve::point(double t) const
{
    return derivative(t, 0);
}

cplx BoundaryCurve::derivative(double t, int order) const
{
    const int K = max_frequency();
    cplx acc = 0.0;
    for (int m = -K; m <= K; ++m) {
        const cplx c = coeffs_[static_cast<std::size_t>(m + K)];
        if (c == cplx(0.0))
            continue;
        acc += c * std::pow(cplx(0.0, m), order) * std::polar(1.0, m * t);
    }
    return acc;
}

double BoundaryCurve::signed_area() const
{
    const int K = max_frequency();
    double a = 0.0;
    for (int m = -K; m <= K; ++m)
        a += m * std::norm(coeffs_[static_cast<std::size_t>(m + K)]);
    return std::numbers::pi * a;
}

std::vector<cplx> BoundaryCurve::polygon(std::size_t samples) const
{
    std::vector<cplx> p(samples);
    for (std::size_t k = 0; k < samples; ++k)
        p[k] = point(two_pi * static_cast<double>(k) / static_cast<double>(samples));
    return p;
}

// ---------------------------------------------------------------- PlanarDomain

PlanarDomain::PlanarDomain(BoundaryCurve outer, std::vector<BoundaryCurve> holes)
{
    if (outer.orientation() != Orientation::ccw)
        throw GeometryError("outer curve must be counter-clockwise");
    curves_.push_back(std::move(outer));
    for (std::size_t h = 0; h < holes.size(); ++h) {
        if (holes[h].orientation() != Orientation::cw)
            throw GeometryError(curve_name(static_cast<int>(h + 1)) + " must be clockwise");
        curves_.push_back(std::move(holes[h]));
    }

    std::vector<std::vector<cplx>> polys;
    for (const auto& c : curves_)
        polys.push_back(c.polygon(validation_samples(c.max_frequency())));
    for (std::size_t i = 1; i < polys.size(); ++i) {
        if (polygon_winding(polys[0], polys[i][0]) != 1)
            throw GeometryError(curve_name(static_cast<int>(i)) + " does not lie inside the outer curve");
        for (std::size_t j = 0; j < polys.size(); ++j) {
            if (j == i)
                continue;
            if (j > i && polygons_cross(polys[i], polys[j]))
                throw GeometryError(curve_name(static_cast<int>(i)) + " intersects " + curve_name(static_cast<int>(j)));
            if (j >= 1 && polygon_winding(polys[j], polys[i][0]) != 0)
                throw GeometryError(curve_name(static_cast<int>(i)) + " lies inside " + curve_name(static_cast<int>(j)));
        }
    }
}

PlanarDomain PlanarDomain::rational_image(const RationalFunction& r)
{
    if (r.degree() > 8)
        throw CapacityError("rational map degree exceeds 8");
    BoundaryCurve curve = BoundaryCurve::from_rational_image(r);
    const auto poly = curve.polygon(validation_samples(curve.max_frequency()));
    if (polygon_winding(poly, r(0.0)) != 1)
        throw GeometryError("rational map is not injective on the closed disc: boundary image winds " +
                            std::to_string(polygon_winding(poly, r(0.0))) + " times about r(0)");
    PlanarDomain d(std::move(curve), {});
    d.source_map_ = r;
    return d;
}

// ---------------------------------------------------------------- BoundaryGrid

double BoundaryGrid::perimeter(int c) const
{
    double p = 0.0;
    for (std::size_t k = curve_begin(c); k < curve_begin(c + 1); ++k)
        p += weight[k];
    return p;
}

double BoundaryGrid::max_spacing() const
{
    return *std::max_element(spacing.begin(), spacing.end());
}

BoundaryFunction::BoundaryFunction(const BoundaryGrid& grid, std::vector<cplx> v)
    : grid_id(grid.id), values(std::move(v))
{
    if (values.size() != grid.size())
        throw UsageError("BoundaryFunction: value count does not match grid node count");
}

BoundaryFunction BoundaryFunction::sample(const BoundaryGrid& grid, const std::function<cplx(cplx)>& f)
{
    std::vector<cplx> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        v[k] = f(grid.z[k]);
    return BoundaryFunction(grid, std::move(v));
}

BoundaryGrid discretize(const PlanarDomain& domain, int N)
{
    if (N < 16 || N % 2 != 0)
        throw UsageError("discretize: nodes per curve must be even and at least 16");
    BoundaryGrid g;
    g.id = next_grid_id.fetch_add(1);
    g.nodes_per_curve = N;
    g.curve_count = domain.connectivity();
    g.dt = two_pi / N;
    for (const auto& curve : domain.curves()) {
        double hmax = 0.0;
        for (int k = 0; k < N; ++k) {
            const double t = g.dt * k;
            const cplx d1 = curve.derivative(t, 1);
            g.t.push_back(t);
            g.z.push_back(curve.point(t));
            g.dz.push_back(d1);
            g.d2z.push_back(curve.derivative(t, 2));
            g.tangent.push_back(d1 / std::abs(d1));
            g.weight.push_back(std::abs(d1) * g.dt);
            hmax = std::max(hmax, g.weight.back());
        }
        g.spacing.push_back(hmax);
    }
    return g;
}

namespace {

void check_grid(const BoundaryGrid& grid, const BoundaryFunction& f)
{
    if (f.grid_id != grid.id || f.values.size() != grid.size())
        throw UsageError("boundary function does not belong to this grid");
}

} // namespace

cplx contour_integral(const BoundaryGrid& grid, const BoundaryFunction& f)
{
    check_grid(grid, f);
    cplx acc = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        acc += f.values[k] * grid.dz[k];
    return acc * grid.dt;
}

cplx contour_integral(const BoundaryGrid& grid, const BoundaryFunction& f, int curve)
{
    check_grid(grid, f);
    cplx acc = 0.0;
    for (std::size_t k = grid.curve_begin(curve); k < grid.curve_begin(curve + 1); ++k)
        acc += f.values[k] * grid.dz[k];
    return acc * grid.dt;
}

double spacing_distance(const BoundaryGrid& grid, cplx z)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k)
        best = std::min(best, std::abs(z - grid.z[k]) / grid.spacing[static_cast<std::size_t>(grid.curve_of(k))]);
    return best;
}

double distance_to_boundary(const BoundaryGrid& grid, cplx z)
{
    double best = std::numeric_limits<double>::infinity();
    for (cplx w : grid.z)
        best = std::min(best, std::abs(z - w));
    return best;
}

namespace {

cplx raw_winding(const BoundaryGrid& grid, cplx z0)
{
    cplx acc = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        acc += grid.dz[k] / (grid.z[k] - z0);
    return acc * grid.dt / cplx(0.0, two_pi);
}

} // namespace

int winding_number(const BoundaryGrid& grid, cplx z0)
{
    if (spacing_distance(grid, z0) < 1.0)
        throw ProximityError("winding_number: point within one node spacing of the boundary");
    return static_cast<int>(std::lround(raw_winding(grid, z0).real()));
}

double area(const BoundaryGrid& grid)
{
    cplx acc = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        acc += std::conj(grid.z[k]) * grid.dz[k];
    return (acc * grid.dt / cplx(0.0, 2.0)).real();
}

void require_interior(const BoundaryGrid& grid, cplx z)
{
    if (spacing_distance(grid, z) < 2.0) {
        std::ostringstream msg;
        msg << "point " << z << " lies within two node spacings of the boundary";
        throw ProximityError(msg.str());
    }
    if (std::lround(raw_winding(grid, z).real()) != 1) {
        std::ostringstream msg;
        msg << "point " << z << " lies outside the domain";
        throw DomainError(msg.str());
    }
}

cplx cauchy_eval(const BoundaryGrid& grid, const BoundaryFunction& f, cplx z)
{
    check_grid(grid, f);
    require_interior(grid, z);
    cplx num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const cplx w = grid.dz[k] / (grid.z[k] - z);
        num += f.values[k] * w;
        den += w;
    }
    return num / den;
}

std::vector<cplx> cauchy_weights(const BoundaryGrid& grid, cplx z)
{
    require_interior(grid, z);
    std::vector<cplx> w(grid.size());
    cplx den = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        w[k] = grid.dz[k] / (grid.z[k] - z);
        den += w[k];
    }
    for (auto& x : w)
        x /= den;
    return w;
}

cplx cauchy_derivative(const BoundaryGrid& grid, const BoundaryFunction& f, cplx z, int k)
{
    if (k == 0)
        return cauchy_eval(grid, f, z);
    check_grid(grid, f);
    require_interior(grid, z);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        acc += f.values[j] * grid.dz[j] / std::pow(grid.z[j] - z, k + 1);
    return acc * grid.dt * std::tgamma(k + 1.0) / cplx(0.0, two_pi);
}

std::vector<cplx> parametric_derivative(const BoundaryGrid& grid, std::span<const cplx> values, int order)
{
    if (values.size() != grid.size())
        throw UsageError("parametric_derivative: value count does not match grid");
    std::vector<cplx> out(values.size());
    const std::size_t N = static_cast<std::size_t>(grid.nodes_per_curve);
    for (int c = 0; c < grid.curve_count; ++c) {
        auto d = spectral::derivative(values.subspan(grid.curve_begin(c), N), order);
        std::copy(d.begin(), d.end(), out.begin() + static_cast<long>(grid.curve_begin(c)));
    }
    return out;
}

std::vector<cplx> boundary_derivative(const BoundaryGrid& grid, std::span<const cplx> values, int order)
{
    std::vector<cplx> v(values.begin(), values.end());
    for (int o = 0; o < order; ++o) {
        v = parametric_derivative(grid, v, 1);
        for (std::size_t k = 0; k < v.size(); ++k)
            v[k] /= grid.dz[k];
    }
    return v;
}

std::vector<cplx> exterior_cauchy_part(const BoundaryGrid& grid, std::span<const cplx> values)
{
    if (values.size() != grid.size())
        throw UsageError("exterior_cauchy_part: value count does not match grid");
    const auto dg = parametric_derivative(grid, values, 1);
    std::vector<cplx> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        cplx acc = dg[k];
        for (std::size_t j = 0; j < grid.size(); ++j)
            if (j != k)
                acc += (values[j] - values[k]) * grid.dz[j] / (grid.z[j] - grid.z[k]);
        out[k] = acc * grid.dt / cplx(0.0, two_pi);
    }
    return out;
}

std::vector<cplx> interior_cauchy_limit(const BoundaryGrid& grid, std::span<const cplx> values)
{
    auto out = exterior_cauchy_part(grid, values);
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] += values[k];
    return out;
}

// ---------------------------------------------------------------- probes

namespace {

struct Candidate {
    cplx z;
    double depth;
};

std::vector<Candidate> lattice_candidates(const BoundaryGrid& grid, int L, double margin)
{
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int k = 0; k < grid.nodes_per_curve; ++k) {
        const cplx z = grid.z[static_cast<std::size_t>(k)];
        xmin = std::min(xmin, z.real());
        xmax = std::max(xmax, z.real());
        ymin = std::min(ymin, z.imag());
        ymax = std::max(ymax, z.imag());
    }
    std::vector<std::vector<cplx>> polys;
    for (int c = 0; c < grid.curve_count; ++c)
        polys.emplace_back(grid.z.begin() + static_cast<long>(grid.curve_begin(c)),
                           grid.z.begin() + static_cast<long>(grid.curve_begin(c + 1)));
    std::vector<Candidate> out;
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            const cplx z(xmin + (xmax - xmin) * (i + 0.5) / L, ymin + (ymax - ymin) * (j + 0.5) / L);
            const double d = distance_to_boundary(grid, z);
            if (d < margin)
                continue;
            int w = 0;
            for (const auto& p : polys)
                w += polygon_winding(p, z);
            if (w == 1)
                out.push_back({z, d});
        }
    }
    return out;
}

} // namespace

std::vector<cplx> interior_probes(const BoundaryGrid& grid, std::size_t count, double margin)
{
    const int L = std::max(24, static_cast<int>(std::ceil(std::sqrt(12.0 * static_cast<double>(count)))));
    auto cand = lattice_candidates(grid, L, margin);
    if (cand.empty())
        throw GeometryError("interior_probes: no lattice point clears the requested margin");
    std::size_t first = 0;
    for (std::size_t i = 1; i < cand.size(); ++i)
        if (cand[i].depth > cand[first].depth)
            first = i;
    std::vector<cplx> chosen{cand[first].z};
    std::vector<double> mind(cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i)
        mind[i] = std::abs(cand[i].z - cand[first].z);
    while (chosen.size() < std::min(count, cand.size())) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < cand.size(); ++i)
            if (mind[i] > mind[best])
                best = i;
        chosen.push_back(cand[best].z);
        for (std::size_t i = 0; i < cand.size(); ++i)
            mind[i] = std::min(mind[i], std::abs(cand[i].z - cand[best].z));
    }
    return chosen;
}

namespace {

Candidate deepest(const BoundaryGrid& grid)
{
    auto cand = lattice_candidates(grid, 64, 0.0);
    if (cand.empty())
        throw GeometryError("domain has no interior lattice points");
    auto it = std::max_element(cand.begin(), cand.end(), [](auto& a, auto& b) { return a.depth < b.depth; });
    return *it;
}

} // namespace

double inradius(const BoundaryGrid& grid)
{
    return deepest(grid).depth;
}

cplx deepest_point(const BoundaryGrid& grid)
{
    return deepest(grid).z;
}

cplx hole_point(const BoundaryGrid& grid, int c)
{
    if (c < 1 || c >= grid.curve_count)
        throw UsageError("hole_point: curve index is not a hole");
    std::vector<cplx> poly(grid.z.begin() + static_cast<long>(grid.curve_begin(c)),
                           grid.z.begin() + static_cast<long>(grid.curve_begin(c + 1)));
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (cplx z : poly) {
        xmin = std::min(xmin, z.real());
        xmax = std::max(xmax, z.real());
        ymin = std::min(ymin, z.imag());
        ymax = std::max(ymax, z.imag());
    }
    const int L = 32;
    cplx best = 0.0;
    double best_d = -1.0;
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            const cplx z(xmin + (xmax - xmin) * (i + 0.5) / L, ymin + (ymax - ymin) * (j + 0.5) / L);
            if (polygon_winding(poly, z) == 0)
                continue;
            double d = 1e300;
            for (cplx w : poly)
                d = std::min(d, std::abs(z - w));
            if (d > best_d) {
                best_d = d;
                best = z;
            }
        }
    if (best_d < 0)
        throw GeometryError("hole_point: no interior point found for hole curve " + std::to_string(c));
    return best;
}

} // namespace qdk
