#include "qdk/representative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qdk/error.hpp"
#include "qdk/spectral.hpp"

namespace qdk {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double svd_threshold = 1e-12;
const cplx two_pi_i(0.0, 2.0 * pi);

double factorial(int n)
{
    double f = 1.0;
    for (int k = 2; k <= n; ++k)
        f *= k;
    return f;
}

// Least squares with unit-norm columns and a truncated SVD. Returns the solution in the
// original column scaling and the effective rank.
std::pair<Eigen::VectorXcd, int> truncated_solve(Eigen::MatrixXcd A, const Eigen::VectorXcd& b)
{
    Eigen::VectorXd scale(A.cols());
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
        scale(c) = A.col(c).norm();
        if (scale(c) == 0.0)
            scale(c) = 1.0;
        A.col(c) /= scale(c);
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(svd_threshold);
    Eigen::VectorXcd x = svd.solve(b);
    for (Eigen::Index c = 0; c < x.size(); ++c)
        x(c) /= scale(c);
    return {x, static_cast<int>(svd.rank())};
}

// Argument-principle count of (1/2 pi i) closed-integral of dF / F from a boundary trace.
cplx log_derivative_moment(const BoundaryGrid& g, std::span<const cplx> F, const std::function<cplx(std::size_t)>& weight)
{
    const auto dF = parametric_derivative(g, F, 1);
    cplx acc = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        acc += weight(k) * dF[k] / F[k];
    return acc * g.dt / two_pi_i;
}

int rounded_count(cplx c, const char* what)
{
    const double r = std::round(c.real());
    if (std::abs(c - r) > 1e-3) {
        std::ostringstream msg;
        msg << "argument principle for " << what << " gives the non-integer count " << c;
        throw NumericalError(msg.str());
    }
    return static_cast<int>(r);
}

} // namespace

KernelCombination::KernelCombination(std::shared_ptr<const BergmanData> bd, std::vector<KernelTerm> terms)
    : bd_(std::move(bd)), terms_(std::move(terms))
{
    if (!bd_)
        throw UsageError("kernel combination needs Bergman data");
    if (std::none_of(terms_.begin(), terms_.end(), [](const KernelTerm& t) { return t.coeff != 0.0; }))
        throw UsageError("kernel combination has no nonzero coefficient");
    const auto& g = bd_->grid();
    trace_.assign(g.size(), 0.0);
    for (const auto& t : terms_) {
        if (t.order < 0)
            throw UsageError("kernel combination: negative derivative order");
        require_interior(g, t.node);
        if (t.coeff == 0.0)
            continue;
        const auto v = bd_->boundary_values(t.node, t.order);
        for (std::size_t k = 0; k < g.size(); ++k)
            trace_[k] += t.coeff * v[k];
    }
    lambda_remainder_ = lambda_boundary();
    for (std::size_t k = 0; k < g.size(); ++k)
        for (const auto& t : terms_)
            lambda_remainder_[k] -= std::conj(t.coeff) * factorial(t.order + 1) /
                                    (pi * std::pow(g.z[k] - t.node, t.order + 2));
}

cplx KernelCombination::operator()(cplx z) const
{
    const auto w = cauchy_weights(bd_->grid(), z);
    cplx acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
        acc += w[k] * trace_[k];
    return acc;
}

cplx KernelCombination::derivative(cplx z) const
{
    return cauchy_derivative(bd_->grid(), BoundaryFunction(bd_->grid(), trace_), z, 1);
}

KernelCombination KernelCombination::scaled(cplx s) const
{
    auto t = terms_;
    for (auto& x : t)
        x.coeff *= s;
    return KernelCombination(bd_, std::move(t));
}

std::vector<cplx> KernelCombination::lambda_boundary() const
{
    const auto& g = bd_->grid();
    std::vector<cplx> out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
        out[k] = -std::conj(trace_[k]) * std::conj(g.tangent[k]) / g.tangent[k];
    return out;
}

std::pair<cplx, cplx> KernelCombination::lambda_value(cplx z) const
{
    const auto& g = bd_->grid();
    const BoundaryFunction rem(g, lambda_remainder_);
    cplx v = cauchy_eval(g, rem, z);
    cplx d = cauchy_derivative(g, rem, z, 1);
    for (const auto& t : terms_) {
        const double f = factorial(t.order + 1) / pi;
        v += std::conj(t.coeff) * f / std::pow(z - t.node, t.order + 2);
        d -= std::conj(t.coeff) * f * (t.order + 2.0) / std::pow(z - t.node, t.order + 3);
    }
    return {v, d};
}

std::vector<std::pair<cplx, int>> KernelCombination::lambda_poles() const
{
    std::vector<std::pair<cplx, int>> out;
    for (const auto& t : terms_) {
        if (t.coeff == 0.0)
            continue;
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == t.node; });
        if (it == out.end())
            out.emplace_back(t.node, t.order + 2);
        else
            it->second = std::max(it->second, t.order + 2);
    }
    return out;
}

FitReport fit_combination(std::shared_ptr<const BergmanData> bd, const std::function<cplx(cplx)>& target,
                          const std::vector<cplx>& nodes, const std::vector<int>& orders, int sobolev_order)
{
    if (!bd)
        throw UsageError("fit_combination: missing Bergman data");
    if (nodes.empty() || nodes.size() != orders.size())
        throw UsageError("fit_combination: nodes and orders must be nonempty and of equal length");
    if (sobolev_order < 0)
        throw UsageError("fit_combination: negative Sobolev order");
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (nodes[i] == nodes[j])
                throw UsageError("fit_combination: nodes must be distinct");

    const auto& g = bd->grid();
    const auto N = static_cast<Eigen::Index>(g.size());
    const int q = sobolev_order;

    std::vector<KernelTerm> terms;
    for (std::size_t j = 0; j < nodes.size(); ++j)
        for (int m = 0; m <= orders[j]; ++m)
            terms.push_back({nodes[j], m, 0.0});
    const auto C = static_cast<Eigen::Index>(terms.size());

    // stack d^d/dt^d of each trace for d = 0..q
    auto stacked = [&](const std::vector<cplx>& v, Eigen::Ref<Eigen::VectorXcd> out) {
        for (Eigen::Index k = 0; k < N; ++k)
            out(k) = v[static_cast<std::size_t>(k)];
        for (int d = 1; d <= q; ++d) {
            const auto dv = parametric_derivative(g, v, d);
            for (Eigen::Index k = 0; k < N; ++k)
                out(d * N + k) = dv[static_cast<std::size_t>(k)];
        }
    };

    Eigen::MatrixXcd A((q + 1) * N, C);
    for (Eigen::Index c = 0; c < C; ++c) {
        const auto& t = terms[static_cast<std::size_t>(c)];
        require_interior(g, t.node);
        stacked(bd->boundary_values(t.node, t.order), A.col(c));
    }
    std::vector<cplx> h(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
        h[k] = target(g.z[k]);
    Eigen::VectorXcd b((q + 1) * N);
    stacked(h, b);

    auto [x, rank] = truncated_solve(A, b);
    for (Eigen::Index c = 0; c < C; ++c)
        terms[static_cast<std::size_t>(c)].coeff = x(c);

    const Eigen::VectorXcd r = A * x - b;
    std::vector<double> residuals(static_cast<std::size_t>(q + 1));
    for (int d = 0; d <= q; ++d)
        residuals[static_cast<std::size_t>(d)] = r.segment(d * N, N).cwiseAbs().maxCoeff();

    FitReport out{KernelCombination(bd, std::move(terms)), std::move(residuals), r.norm(), rank, static_cast<int>(C)};
    return out;
}

std::vector<cplx> default_probes(const BoundaryGrid& grid, std::size_t count)
{
    const double inr = inradius(grid);
    return interior_probes(grid, count, std::max(0.1 * inr, std::min(4.0 * grid.max_spacing(), 0.5 * inr)));
}

DefectReport quadrature_defect(const BergmanData& bd, const std::vector<cplx>& nodes, const std::vector<int>& orders,
                               const std::vector<cplx>& probes)
{
    if (nodes.empty() || nodes.size() != orders.size())
        throw UsageError("quadrature_defect: nodes and orders must be nonempty and of equal length");
    if (probes.empty())
        throw UsageError("quadrature_defect: empty probe set");
    const auto P = static_cast<Eigen::Index>(probes.size());
    std::vector<std::pair<std::size_t, int>> cols;
    for (std::size_t j = 0; j < nodes.size(); ++j)
        for (int m = 0; m <= orders[j]; ++m)
            cols.emplace_back(j, m);

    Eigen::MatrixXcd A(P, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto v = bd.values(probes, nodes[cols[c].first], cols[c].second);
        for (Eigen::Index p = 0; p < P; ++p)
            A(p, static_cast<Eigen::Index>(c)) = v[static_cast<std::size_t>(p)];
    }
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(P);
    auto [x, rank] = truncated_solve(A, ones);

    DefectReport rep;
    rep.nodes = nodes;
    rep.orders = orders;
    rep.coeffs.assign(x.data(), x.data() + x.size());
    rep.residual = (ones - A * x).cwiseAbs().maxCoeff();
    rep.rank = rank;
    rep.probe_count = probes.size();
    return rep;
}

cplx default_anchor(const BoundaryGrid& grid)
{
    // area centroid (1/A) (1/2i) closed-integral of z conj(z) dz when it sits well inside
    cplx m = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        m += grid.z[k] * std::conj(grid.z[k]) * grid.dz[k];
    const cplx centroid = m * grid.dt / cplx(0.0, 2.0) / area(grid);
    try {
        if (winding_number(grid, centroid) == 1 && distance_to_boundary(grid, centroid) > 0.75 * inradius(grid))
            return centroid;
    } catch (const ProximityError&) {
    }
    return deepest_point(grid);
}

std::vector<cplx> circle_nodes(const BoundaryGrid& grid, std::size_t count, std::optional<cplx> anchor,
                               std::optional<double> radius)
{
    if (count == 0)
        throw UsageError("node budget must be at least one");
    const cplx c = anchor ? *anchor : default_anchor(grid);
    const double r = radius ? *radius : 0.5 * inradius(grid);
    std::vector<cplx> nodes;
    if (count == 1) {
        nodes.push_back(c);
    } else {
        for (std::size_t k = 0; k < count; ++k)
            nodes.push_back(c + std::polar(r, 2.0 * pi * static_cast<double>(k) / static_cast<double>(count)));
    }
    for (cplx b : nodes) {
        try {
            require_interior(grid, b);
        } catch (const Error& e) {
            throw UsageError(std::string("node placement leaves the domain: ") + e.what());
        }
    }
    return nodes;
}

cplx RepresentativeMap::operator()(cplx z) const { return numerator(z) / denominator(z); }

namespace {

PlanarDomain trig_image(const BoundaryGrid& g, const std::vector<cplx>& samples,
                        const std::vector<Orientation>& orientation)
{
    std::vector<BoundaryCurve> curves;
    for (int c = 0; c < g.curve_count; ++c) {
        const auto begin = samples.begin() + static_cast<std::ptrdiff_t>(g.curve_begin(c));
        const std::vector<cplx> part(begin, begin + g.nodes_per_curve);
        curves.emplace_back(spectral::centered_coefficients(part, 1e-15), orientation[static_cast<std::size_t>(c)], c);
    }
    BoundaryCurve outer = curves.front();
    curves.erase(curves.begin());
    return PlanarDomain(std::move(outer), std::move(curves));
}

} // namespace

RepresentativeMap representative_map(std::shared_ptr<const BergmanData> bd, const RepresentativeOptions& opt)
{
    if (!bd)
        throw UsageError("representative_map: missing Bergman data");
    const auto& g = bd->grid();
    const auto nodes = circle_nodes(g, opt.budget, opt.anchor, opt.radius);
    if (opt.order < 0 || opt.order > 8)
        throw UsageError("representative_map: per-node order must lie in 0..8");
    const std::vector<int> orders(nodes.size(), opt.order);

    auto den = fit_combination(bd, [](cplx) { return cplx(1.0); }, nodes, orders, opt.sobolev_order);
    auto num = fit_combination(bd, [](cplx z) { return z; }, nodes, orders, opt.sobolev_order);

    const auto& K1 = num.combination.boundary_values();
    const auto& K2 = den.combination.boundary_values();
    std::vector<cplx> gz(g.size());
    double deviation = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        gz[k] = K1[k] / K2[k];
        deviation = std::max(deviation, std::abs(gz[k] - g.z[k]));
    }

    InjectivityCertificate cert;
    const auto probes = default_probes(g, opt.certificate_probes);
    cert.probe_count = probes.size();
    cert.denominator_zeros = rounded_count(log_derivative_moment(g, K2, [](std::size_t) { return cplx(1.0); }),
                                           "the denominator");
    double margin = std::numeric_limits<double>::infinity();
    for (cplx v : K2)
        margin = std::min(margin, std::abs(v));
    std::vector<cplx> gp(probes.size());
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const cplx k2 = den.combination(probes[p]);
        margin = std::min(margin, std::abs(k2));
        gp[p] = num.combination(probes[p]) / k2;
    }
    cert.denominator_margin = margin;

    // winding of g(boundary) about g(p); with no poles this counts preimages of g(p)
    const auto dg = parametric_derivative(g, gz, 1);
    cert.min_winding = std::numeric_limits<int>::max();
    cert.max_winding = std::numeric_limits<int>::min();
    for (cplx w : gp) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            acc += dg[k] / (gz[k] - w);
        const int count = rounded_count(acc * g.dt / two_pi_i, "the image winding");
        cert.min_winding = std::min(cert.min_winding, count);
        cert.max_winding = std::max(cert.max_winding, count);
    }

    std::vector<Orientation> orient;
    for (int c = 0; c < g.curve_count; ++c)
        orient.push_back(c == 0 ? Orientation::ccw : Orientation::cw);
    std::optional<PlanarDomain> image;
    try {
        image.emplace(trig_image(g, gz, orient));
        cert.image_simple = true;
    } catch (const GeometryError& e) {
        cert.failure = std::string("image boundary: ") + e.what();
    }

    if (cert.denominator_zeros != 0 && cert.failure.empty())
        cert.failure = "denominator vanishes in the domain";
    else if (!(margin > 0.0) && cert.failure.empty())
        cert.failure = "denominator vanishes at a node or probe";
    else if ((cert.min_winding != 1 || cert.max_winding != 1) && cert.failure.empty())
        cert.failure = "image winding about a probe value differs from one";
    cert.passed = cert.failure.empty();
    if (!cert.passed)
        throw ConsistencyError("representative map not certified injective (" + cert.failure +
                               "); increase the node budget or the Sobolev order");
    if (!(deviation < opt.tolerance)) {
        std::ostringstream msg;
        msg << "representative map deviation " << deviation << " exceeds tolerance " << opt.tolerance
            << "; increase the node budget";
        throw ConsistencyError(msg.str());
    }

    return RepresentativeMap{std::move(num.combination),
                             std::move(den.combination),
                             std::move(num.residuals),
                             std::move(den.residuals),
                             deviation,
                             std::move(cert),
                             std::move(gz),
                             std::move(*image)};
}

std::vector<std::pair<cplx, cplx>> image_quadrature_nodes(const RepresentativeMap& map)
{
    const auto& K2 = map.denominator;
    const auto& g = map.grid();
    const auto poles = K2.lambda_poles();
    const auto L = K2.lambda_boundary();

    // zeros of Lambda_2 from moments of its logarithmic derivative, in a scaled variable
    // u = (z - c) / rho that keeps the boundary inside |u| <= 1
    cplx c = 0.0;
    for (const auto& p : poles)
        c += p.first;
    c /= static_cast<double>(poles.size());
    double rho = 0.0;
    for (cplx z : g.z)
        rho = std::max(rho, std::abs(z - c));

    int pole_total = 0;
    for (const auto& p : poles)
        pole_total += p.second;
    const int zeros = rounded_count(log_derivative_moment(g, L, [](std::size_t) { return cplx(1.0); }), "Lambda_2") +
                      pole_total;
    if (zeros < 0)
        throw NumericalError("negative zero count for Lambda_2");
    if (zeros == 0)
        return {};
    if (zeros > 72)
        throw CapacityError("Lambda_2 has too many zeros for moment-based location");

    std::vector<cplx> s(static_cast<std::size_t>(zeros + 1), 0.0);
    for (int p = 1; p <= zeros; ++p) {
        s[static_cast<std::size_t>(p)] =
            log_derivative_moment(g, L, [&](std::size_t k) { return std::pow((g.z[k] - c) / rho, p); });
        for (const auto& pole : poles)
            s[static_cast<std::size_t>(p)] += static_cast<double>(pole.second) * std::pow((pole.first - c) / rho, p);
    }
    std::vector<cplx> e(static_cast<std::size_t>(zeros + 1), 0.0);
    e[0] = 1.0;
    for (int k = 1; k <= zeros; ++k) {
        cplx acc = 0.0;
        for (int i = 1; i <= k; ++i)
            acc += (i % 2 == 1 ? 1.0 : -1.0) * e[static_cast<std::size_t>(k - i)] * s[static_cast<std::size_t>(i)];
        e[static_cast<std::size_t>(k)] = acc / static_cast<double>(k);
    }
    std::vector<cplx> coeffs(static_cast<std::size_t>(zeros + 1));
    for (int k = 0; k <= zeros; ++k)
        coeffs[static_cast<std::size_t>(zeros - k)] = (k % 2 == 0 ? 1.0 : -1.0) * e[static_cast<std::size_t>(k)];

    std::vector<std::pair<cplx, cplx>> out;
    for (const auto& r : roots(Polynomial(coeffs), RootOptions{1e-6, 8})) {
        cplx z = c + rho * r.value;
        bool converged = false;
        try {
            for (int it = 0; it < 40 && !converged; ++it) {
                const auto [v, d] = K2.lambda_value(z);
                const cplx step = v / d;
                z -= step;
                converged = std::abs(step) < 1e-13 * std::max(1.0, std::abs(z));
            }
        } catch (const Error&) {
            converged = false;
        }
        if (!converged)
            throw NumericalError("Newton refinement of a Lambda_2 zero left the domain or stalled; reduce the node "
                                 "budget or the per-node order");
        for (int rep = 0; rep < r.multiplicity; ++rep)
            out.emplace_back(z, map(z));
    }
    return out;
}

IdentityMapReport verify_identity_map(const SchwarzFunction& S, std::shared_ptr<const BergmanData> bd, double tol,
                                      std::size_t probe_count)
{
    if (!bd)
        throw UsageError("verify_identity_map: missing Bergman data");
    IdentityMapReport rep;
    for (const auto& p : S.poles()) {
        rep.nodes.push_back(p.node);
        rep.orders_one.push_back(p.order - 1);
        rep.orders_z.push_back(2 * p.order - 1);
    }
    if (rep.nodes.empty())
        throw UsageError("verify_identity_map: Schwarz function has no poles");

    auto one = fit_combination(bd, [](cplx) { return cplx(1.0); }, rep.nodes, rep.orders_one, 0);
    auto zed = fit_combination(bd, [](cplx z) { return z; }, rep.nodes, rep.orders_z, 0);
    for (const auto& t : one.combination.terms())
        rep.coeffs_one.push_back(t.coeff);
    for (const auto& t : zed.combination.terms())
        rep.coeffs_z.push_back(t.coeff);

    const auto probes = default_probes(bd->grid(), probe_count);
    rep.probe_count = probes.size();
    for (cplx z : probes) {
        const cplx a = one.combination(z), b = zed.combination(z);
        rep.one_residual = std::max(rep.one_residual, std::abs(1.0 - a));
        rep.z_residual = std::max(rep.z_residual, std::abs(z - b));
        rep.quotient_error = std::max(rep.quotient_error, std::abs(b / a - z));
    }

    // the coefficients representing 1 are the conjugated quadrature data
    const auto quad = quadrature_from_schwarz(S);
    std::size_t col = 0;
    for (std::size_t j = 0; j < rep.nodes.size(); ++j) {
        auto it = std::min_element(quad.nodes.begin(), quad.nodes.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.node - rep.nodes[j]) < std::abs(b.node - rep.nodes[j]);
        });
        for (int m = 0; m <= rep.orders_one[j]; ++m, ++col) {
            const cplx expected =
                static_cast<std::size_t>(m) < it->coeffs.size() ? std::conj(it->coeffs[static_cast<std::size_t>(m)]) : 0.0;
            rep.quadrature_mismatch = std::max(rep.quadrature_mismatch, std::abs(rep.coeffs_one[col] - expected));
        }
    }
    rep.passed = rep.one_residual < tol && rep.quotient_error < tol;
    return rep;
}

GustafssonReport gustafsson_check(const RationalFunction& r, std::size_t samples)
{
    if (!r.is_polynomial())
        throw UsageError("gustafsson_check: the map must be a polynomial");
    const int deg = r.numerator().degree();
    if (deg > 6)
        throw CapacityError("gustafsson_check: degree above 6");
    if (deg < 1)
        throw GeometryError("gustafsson_check: constant map");
    // injectivity on the closed disc
    (void)PlanarDomain::rational_image(r);

    const cplx lead = r.denominator().leading();
    const Polynomial p = (1.0 / lead) * r.numerator();
    const Polynomial dp = p.derivative();
    const Polynomial prod = p * dp;

    GustafssonReport rep;
    for (int m = 0; m <= dp.degree(); ++m)
        rep.derivative_coeffs.push_back(pi * dp.coeff(m) / factorial(m + 1));
    for (int m = 0; m <= prod.degree(); ++m)
        rep.product_coeffs.push_back(pi * prod.coeff(m) / factorial(m + 1));

    auto combine = [](const std::vector<cplx>& c, cplx z) {
        // sum c_m K^{(m)}(z, 0) with K^{(m)}(z, 0) = (m+1)! z^m / pi
        cplx acc = 0.0, zm = 1.0;
        for (std::size_t m = 0; m < c.size(); ++m) {
            acc += c[m] * factorial(static_cast<int>(m) + 1) * zm / pi;
            zm *= z;
        }
        return acc;
    };

    double scale_d = 1.0, scale_p = 1.0, err_d = 0.0, err_p = 0.0, err_q = 0.0;
    const std::size_t rings = 4;
    for (std::size_t i = 1; i <= rings; ++i) {
        const double rad = static_cast<double>(i) / static_cast<double>(rings);
        for (std::size_t k = 0; k < samples; ++k) {
            const cplx z = std::polar(rad, 2.0 * pi * static_cast<double>(k) / static_cast<double>(samples));
            const cplx a = combine(rep.derivative_coeffs, z), b = combine(rep.product_coeffs, z);
            scale_d = std::max(scale_d, std::abs(dp(z)));
            scale_p = std::max(scale_p, std::abs(prod(z)));
            err_d = std::max(err_d, std::abs(a - dp(z)));
            err_p = std::max(err_p, std::abs(b - prod(z)));
            if (std::abs(a) > 1e-3)
                err_q = std::max(err_q, std::abs(b / a - p(z)));
        }
    }
    rep.reconstruction_error = std::max(err_d / scale_d, err_p / scale_p);
    rep.quotient_error = err_q;
    rep.passed = rep.reconstruction_error < 1e-10 && rep.quotient_error < 1e-9;
    return rep;
}

RationalModelReport rational_model_fit(const SchwarzFunction& S, const BergmanData& bd, cplx w0, int deg_z, int deg_s,
                                       std::size_t probe_count)
{
    if (deg_z < 0 || deg_s < 0)
        throw UsageError("rational_model_fit: negative degree");
    const auto& g = bd.grid();
    const auto N = static_cast<Eigen::Index>(g.size());
    const Eigen::Index M = (deg_z + 1) * (deg_s + 1);
    const auto Kb = bd.boundary_values(w0);

    // monomials z^i s^j with s = conj(z) on the boundary
    Eigen::MatrixXcd B(N, M);
    for (Eigen::Index k = 0; k < N; ++k) {
        const cplx z = g.z[static_cast<std::size_t>(k)], s = std::conj(z);
        for (int i = 0; i <= deg_z; ++i)
            for (int j = 0; j <= deg_s; ++j)
                B(k, i * (deg_s + 1) + j) = std::pow(z, i) * std::pow(s, j);
    }
    Eigen::VectorXd scale(M);
    for (Eigen::Index c = 0; c < M; ++c) {
        scale(c) = B.col(c).norm();
        B.col(c) /= scale(c);
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(svd_threshold);
    const Eigen::Index rank = svd.rank();
    const Eigen::MatrixXcd U = svd.matrixU().leftCols(rank);
    const Eigen::VectorXd sig = svd.singularValues().head(rank);
    const Eigen::MatrixXcd V = svd.matrixV().leftCols(rank);

    // Q ranges over span(U) with unit norm on the samples; P is the projection of K Q
    Eigen::VectorXcd Kd(N);
    for (Eigen::Index k = 0; k < N; ++k)
        Kd(k) = Kb[static_cast<std::size_t>(k)];
    Eigen::MatrixXcd KU = Kd.asDiagonal() * U;
    Eigen::MatrixXcd C = KU - U * (U.adjoint() * KU);
    Eigen::BDCSVD<Eigen::MatrixXcd> csvd(C, Eigen::ComputeThinV);
    const Eigen::Index last = csvd.singularValues().size() - 1;
    const Eigen::VectorXcd y = csvd.matrixV().col(last);

    const Eigen::VectorXcd q = V * sig.cwiseInverse().asDiagonal() * y;
    const Eigen::VectorXcd KQ = KU * y;
    const Eigen::VectorXcd p = V * sig.cwiseInverse().asDiagonal() * (U.adjoint() * KQ);

    RationalModelReport rep;
    rep.fit_residual = csvd.singularValues()(last) / KQ.norm();
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(deg_z + 1, deg_s + 1), Q = P;
    for (int i = 0; i <= deg_z; ++i)
        for (int j = 0; j <= deg_s; ++j) {
            const Eigen::Index c = i * (deg_s + 1) + j;
            P(i, j) = p(c) / scale(c);
            Q(i, j) = q(c) / scale(c);
        }
    rep.numerator = TwoVarPolynomial(P);
    rep.denominator = TwoVarPolynomial(Q);

    // held-out interior check, away from the poles of S
    const double inr = inradius(g);
    double err = 0.0, kmax = 0.0;
    for (cplx z : default_probes(g, probe_count)) {
        bool near_pole = false;
        for (const auto& pole : S.poles())
            near_pole = near_pole || std::abs(z - pole.node) < 0.05 * inr;
        if (near_pole)
            continue;
        const cplx s = S(z), k = bd(z, w0);
        err = std::max(err, std::abs(k - rep.numerator(z, s) / rep.denominator(z, s)));
        kmax = std::max(kmax, std::abs(k));
    }
    rep.probe_residual = kmax > 0.0 ? err / kmax : 0.0;
    return rep;
}

} // namespace qdk
