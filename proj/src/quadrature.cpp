#include "qdk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "qdk/error.hpp"

namespace qdk {

namespace {

constexpr double pi = std::numbers::pi;

// Truncated power series: a[k] is the coefficient of x^k, length fixed by n.
namespace series {

using S = std::vector<cplx>;

S mul(const S& a, const S& b, std::size_t n)
{
    S c(n, 0.0);
    for (std::size_t i = 0; i < std::min(n, a.size()); ++i)
        for (std::size_t j = 0; i + j < n && j < b.size(); ++j)
            c[i + j] += a[i] * b[j];
    return c;
}

S inv(const S& a, std::size_t n)
{
    S b(n, 0.0);
    b[0] = 1.0 / a[0];
    for (std::size_t k = 1; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 1; j <= k && j < a.size(); ++j)
            acc += a[j] * b[k - j];
        b[k] = -acc / a[0];
    }
    return b;
}

// a(v(x)) with v(0) = 0
S compose(const S& a, const S& v, std::size_t n)
{
    S r(n, 0.0);
    for (std::size_t k = a.size(); k-- > 0;) {
        r = mul(r, v, n);
        r[0] += a[k];
    }
    return r;
}

// v with a(v(x)) = x, for a(0) = 0, a'(0) != 0
S revert(const S& a, std::size_t n)
{
    S v(n, 0.0);
    v[1] = 1.0 / a[1];
    for (std::size_t it = 0; it < n; ++it) {
        S e = compose(a, v, n);
        e[1] -= 1.0;
        for (std::size_t k = 0; k < n; ++k)
            v[k] -= e[k] / a[1];
    }
    return v;
}

S taylor(const Polynomial& p, cplx center, std::size_t n)
{
    const Polynomial s = p.taylor_shift(center);
    S out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = s.coeff(static_cast<int>(k));
    return out;
}

} // namespace series

double factorial(int n)
{
    return std::tgamma(n + 1.0);
}

double binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0.0;
    return factorial(n) / (factorial(k) * factorial(n - k));
}

} // namespace

// ---------------------------------------------------------------- SchwarzFunction

SchwarzFunction::SchwarzFunction(RationalFunction r, PlanarDomain domain)
    : r_(std::move(r)), rstar_(reflect(r_)), domain_(std::move(domain))
{
    for (const auto& q : rstar_.poles()) {
        if (std::abs(q.value) < 1.0)
            poles_.push_back(SchwarzPole{r_(q.value), q.value, q.multiplicity});
    }
    start_w_.push_back(0.0);
    for (int i = 1; i <= 12; ++i)
        for (int k = 0; k < 64; ++k)
            start_w_.push_back(std::polar((i - 0.25) / 12.0, 2.0 * pi * k / 64.0));
    for (cplx w : start_w_)
        start_z_.push_back(r_(w));
}

cplx SchwarzFunction::preimage(cplx z) const
{
    std::vector<std::size_t> order(start_z_.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::partial_sort(order.begin(), order.begin() + 4, order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(start_z_[a] - z) < std::abs(start_z_[b] - z);
    });
    for (int attempt = 0; attempt < 4; ++attempt) {
        cplx w = start_w_[order[static_cast<std::size_t>(attempt)]];
        bool converged = false;
        for (int it = 0; it < 30; ++it) {
            const cplx res = r_(w) - z;
            if (std::abs(res) <= 1e-12 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
            w -= res / r_.derivative(w);
        }
        if (!converged)
            continue;
        if (std::abs(w) >= 1.0) {
            std::ostringstream msg;
            msg << "point " << z << " lies outside the image of the unit disc";
            throw DomainError(msg.str());
        }
        return w;
    }
    std::ostringstream msg;
    msg << "Newton inversion of the rational map did not converge at " << z;
    throw NumericalError(msg.str());
}

cplx SchwarzFunction::operator()(cplx z) const
{
    return rstar_(preimage(z));
}

cplx SchwarzFunction::derivative(cplx z) const
{
    const cplx w = preimage(z);
    return rstar_.derivative(w) / r_.derivative(w);
}

std::vector<cplx> SchwarzFunction::boundary_values(const BoundaryGrid& grid) const
{
    std::vector<cplx> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        out[k] = rstar_(std::polar(1.0, grid.t[k]));
    return out;
}

std::vector<cplx> SchwarzFunction::boundary_derivative(const BoundaryGrid& grid) const
{
    std::vector<cplx> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const cplx w = std::polar(1.0, grid.t[k]);
        out[k] = rstar_.derivative(w) / r_.derivative(w);
    }
    return out;
}

SchwarzFunction schwarz_from_rational(const RationalFunction& r)
{
    return SchwarzFunction(r, PlanarDomain::rational_image(r));
}

std::vector<PrincipalPart> schwarz_principal_parts(const SchwarzFunction& S, int series_order)
{
    const std::size_t n = static_cast<std::size_t>(series_order);
    const auto& r = S.map();
    const auto& rs = S.reflection();
    std::vector<PrincipalPart> parts;
    for (const auto& pole : S.poles()) {
        const int k = pole.order;
        if (k >= series_order)
            throw CapacityError("pole order exceeds the Laurent series order");
        const cplx q = pole.preimage;

        // local inverse of r about q: w = q + V(u), u = z - r(q)
        series::S a = series::mul(series::taylor(r.numerator(), q, n),
                                  series::inv(series::taylor(r.denominator(), q, n), n), n);
        a[0] = 0.0;
        const series::S V = series::revert(a, n);

        // r*(q + v) = v^{-k} P(v)
        const series::S num = series::taylor(rs.numerator(), q, n + static_cast<std::size_t>(k));
        const series::S den = series::taylor(rs.denominator(), q, n + static_cast<std::size_t>(k));
        series::S E(den.begin() + k, den.end());
        const series::S P = series::mul(num, series::inv(E, n), n);

        // S = u^{-k} W(u)^{-k} P(V(u)) with W = V / u
        series::S W(V.begin() + 1, V.end());
        W.push_back(0.0);
        series::S Wk(n, 0.0);
        Wk[0] = 1.0;
        const series::S Winv = series::inv(W, n);
        for (int j = 0; j < k; ++j)
            Wk = series::mul(Wk, Winv, n);
        const series::S G = series::mul(Wk, series::compose(P, V, n), n);

        PrincipalPart part{pole.node, std::vector<cplx>(static_cast<std::size_t>(k))};
        for (int l = 1; l <= k; ++l)
            part.coeffs[static_cast<std::size_t>(l - 1)] = G[static_cast<std::size_t>(k - l)];
        parts.push_back(std::move(part));
    }
    return parts;
}

// ---------------------------------------------------------------- quadrature data

cplx QuadratureData::apply(const Polynomial& f) const
{
    cplx acc = 0.0;
    for (const auto& nd : nodes) {
        Polynomial d = f;
        for (const cplx c : nd.coeffs) {
            acc += c * d(nd.node);
            d = d.derivative();
        }
    }
    return acc;
}

cplx area_integral(const BoundaryGrid& grid, const BoundaryFunction& f)
{
    if (f.grid_id != grid.id || f.values.size() != grid.size())
        throw UsageError("area_integral: boundary function does not belong to this grid");
    std::vector<cplx> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        v[k] = std::conj(grid.z[k]) * f.values[k];
    return contour_integral(grid, BoundaryFunction(grid, std::move(v))) / cplx(0.0, 2.0);
}

cplx area_integral(const BoundaryGrid& grid, int degree)
{
    if (degree < 0)
        throw UsageError("area_integral: negative monomial degree");
    return area_integral(grid, BoundaryFunction::sample(grid, [&](cplx z) { return std::pow(z, degree); }));
}

QuadratureData quadrature_from_schwarz(const SchwarzFunction& S, int M, int n_points)
{
    const auto parts = schwarz_principal_parts(S);
    // unknown c_{j,m}, m = 0..k_j - 1
    std::vector<std::pair<std::size_t, int>> cols;
    for (std::size_t j = 0; j < parts.size(); ++j)
        for (int m = 0; m < parts[j].order(); ++m)
            cols.emplace_back(j, m);
    if (cols.empty())
        throw NumericalError("Schwarz function has no poles in the domain");
    const int D = static_cast<int>(cols.size()) + static_cast<int>(parts.size()) + M;

    // residue functional on z^d: pi * sum_j sum_l P_l C(d, l-1) p^{d-l+1}
    auto moment = [&](int d) {
        cplx acc = 0.0;
        for (const auto& part : parts)
            for (int l = 1; l <= part.order(); ++l)
                if (d - l + 1 >= 0)
                    acc += part.coeffs[static_cast<std::size_t>(l - 1)] * binomial(d, l - 1) *
                           std::pow(part.pole, d - l + 1);
        return pi * acc;
    };
    // (d/dz)^m z^d at node
    auto deriv = [&](int d, int m, cplx p) {
        if (m > d)
            return cplx(0.0);
        return factorial(d) / factorial(d - m) * std::pow(p, d - m);
    };

    Eigen::MatrixXcd A(D + 1, static_cast<long>(cols.size()));
    Eigen::VectorXcd b(D + 1);
    for (int d = 0; d <= D; ++d) {
        double row = 1.0;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            A(d, static_cast<long>(c)) = deriv(d, cols[c].second, parts[cols[c].first].pole);
            row = std::max(row, std::abs(A(d, static_cast<long>(c))));
        }
        A.row(d) /= row;
        b(d) = moment(d) / row;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
    qr.setThreshold(1e-12);
    if (qr.rank() < static_cast<long>(cols.size()))
        throw NumericalError("quadrature moment system is rank deficient (pole misidentification)");
    const Eigen::VectorXcd x = qr.solve(b);

    QuadratureData out;
    out.fit_residual = (A * x - b).norm() / std::max(b.norm(), 1e-300);
    if (!(out.fit_residual < 1e-9)) {
        std::ostringstream msg;
        msg << "quadrature moment fit residual " << out.fit_residual << " exceeds 1e-9";
        throw NumericalError(msg.str());
    }
    for (std::size_t j = 0; j < parts.size(); ++j)
        out.nodes.push_back(QuadratureNode{parts[j].pole, std::vector<cplx>(static_cast<std::size_t>(parts[j].order()))});
    double mismatch = 0.0, cmax = 0.0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto [j, m] = cols[c];
        const cplx symbolic = pi * parts[j].coeffs[static_cast<std::size_t>(m)] / factorial(m);
        out.nodes[j].coeffs[static_cast<std::size_t>(m)] = x(static_cast<long>(c));
        mismatch = std::max(mismatch, std::abs(symbolic - x(static_cast<long>(c))));
        cmax = std::max(cmax, std::abs(symbolic));
    }
    if (mismatch > 1e-8 * cmax)
        throw ConsistencyError("fitted quadrature coefficients disagree with the residue values");

    // held-out monomials against the boundary-reduced area integral
    const auto grid = discretize(S.domain(), n_points);
    for (int d = D + 1; d <= D + 4; ++d) {
        std::vector<cplx> mono(static_cast<std::size_t>(d + 1), 0.0);
        mono.back() = 1.0;
        const cplx exact = area_integral(grid, d);
        out.holdout_error = std::max(out.holdout_error,
                                     std::abs(out.apply(Polynomial(mono)) - exact) / std::max(1.0, std::abs(exact)));
    }
    return out;
}

cplx q_function(const BoundaryGrid& grid, cplx z)
{
    require_interior(grid, z);
    cplx acc = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        acc += std::conj(grid.z[k]) * grid.dz[k] / (grid.z[k] - z);
    return acc * grid.dt / cplx(0.0, 2.0 * pi);
}

cplx SchwarzDecomposition::p(cplx z) const
{
    cplx acc = 0.0;
    for (const auto& part : principal_parts)
        acc += part(z);
    return acc;
}

SchwarzDecomposition schwarz_decompose(const SchwarzFunction& S, const BoundaryGrid& grid, std::size_t count)
{
    SchwarzDecomposition dec;
    dec.principal_parts = schwarz_principal_parts(S);

    // contour residue probes on a circle about each pole
    for (const auto& part : dec.principal_parts) {
        double radius = 0.5 * distance_to_boundary(grid, part.pole);
        for (const auto& other : dec.principal_parts)
            if (other.pole != part.pole)
                radius = std::min(radius, 0.5 * std::abs(other.pole - part.pole));
        const int samples = 128;
        const int k = part.order();
        std::vector<cplx> probe(static_cast<std::size_t>(k + 1), 0.0);
        for (int s = 0; s < samples; ++s) {
            const cplx e = std::polar(1.0, 2.0 * pi * s / samples);
            const cplx val = S(part.pole + radius * e);
            // (1/2 pi i) closed-integral of S (z-p)^{l-1} dz = mean of S (rho e)^l
            for (int l = 1; l <= k + 1; ++l)
                probe[static_cast<std::size_t>(l - 1)] += val * std::pow(radius * e, l) / static_cast<double>(samples);
        }
        double scale = 0.0;
        for (cplx c : part.coeffs)
            scale = std::max(scale, std::abs(c));
        double err = std::abs(probe[static_cast<std::size_t>(k)]);
        for (int l = 1; l <= k; ++l)
            err = std::max(err, std::abs(probe[static_cast<std::size_t>(l - 1)] - part.coeffs[static_cast<std::size_t>(l - 1)]));
        err /= scale;
        dec.residue_probe_error = std::max(dec.residue_probe_error, err);
        if (err > 1e-6) {
            std::ostringstream msg;
            msg << "pole at " << part.pole << ": residue probe disagrees with the order-" << k
                << " principal part (relative error " << err << ")";
            throw ConsistencyError(msg.str());
        }
    }

    const double margin = std::max(0.1 * inradius(grid), 4.0 * grid.max_spacing());
    const double pole_clearance = 0.1 * inradius(grid);
    for (cplx z : interior_probes(grid, 2 * count, margin)) {
        bool clear = true;
        for (const auto& part : dec.principal_parts)
            clear = clear && std::abs(z - part.pole) >= pole_clearance;
        if (clear)
            dec.probes.push_back(z);
        if (dec.probes.size() == count)
            break;
    }
    for (cplx z : dec.probes)
        dec.residual = std::max(dec.residual, std::abs(S(z) - dec.p(z) - q_function(grid, z)));
    return dec;
}

TwoVarPolynomial boundary_algebraic_curve(const SchwarzFunction& S)
{
    auto build = [](const RationalFunction& f, bool in_s) {
        const Polynomial& N = f.numerator();
        const Polynomial& D = f.denominator();
        const int deg = std::max(N.degree(), D.degree());
        PolynomialOverZS out;
        for (int i = 0; i <= deg; ++i) {
            const TwoVarPolynomial var = in_s ? TwoVarPolynomial::term(0, 1, D.coeff(i))
                                              : TwoVarPolynomial::term(1, 0, D.coeff(i));
            out.push_back(var - TwoVarPolynomial::constant(N.coeff(i)));
        }
        return out;
    };
    return resultant_eliminate(build(S.map(), false), build(S.reflection(), true));
}

UnitDerivativeReport schwarz_unit_derivative_check(const SchwarzFunction& S, const BoundaryGrid& grid)
{
    UnitDerivativeReport rep;
    const auto d = S.boundary_derivative(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const cplx T = grid.tangent[k];
        rep.modulus_residual = std::max(rep.modulus_residual, std::abs(std::abs(d[k]) - 1.0));
        rep.tangent_residual = std::max(rep.tangent_residual, std::abs(T - std::conj(d[k] * T)));
    }
    return rep;
}

} // namespace qdk
