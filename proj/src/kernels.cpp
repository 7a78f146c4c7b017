#include "qdk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "qdk/error.hpp"
#include "qdk/rational.hpp"

namespace qdk {

namespace {

constexpr double pi = std::numbers::pi;
const cplx two_pi_i(0.0, 2.0 * pi);

double factorial(int n)
{
    return std::tgamma(n + 1.0);
}

double binomial(int n, int k)
{
    return factorial(n) / (factorial(k) * factorial(n - k));
}

// H(z, w) = T(w) / (2 pi i (w - z)), the Cauchy kernel against arclength.
cplx cauchy_kernel(cplx z, cplx w, cplx Tw)
{
    return Tw / (two_pi_i * (w - z));
}

double sup_abs(std::span<const cplx> v)
{
    double m = 0.0;
    for (cplx x : v)
        m = std::max(m, std::abs(x));
    return m;
}

} // namespace

// ---------------------------------------------------------------- Szego

SzegoSolver::SzegoSolver(BoundaryGrid grid) : grid_(std::move(grid))
{
    const std::size_t n = grid_.size();
    sqrt_weight_.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        sqrt_weight_[k] = std::sqrt(grid_.weight[k]);

    Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(static_cast<long>(n), static_cast<long>(n));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k)
                continue; // the Kerzman-Stein kernel vanishes on the diagonal
            const cplx A = cauchy_kernel(grid_.z[k], grid_.z[j], grid_.tangent[j]) -
                           std::conj(cauchy_kernel(grid_.z[j], grid_.z[k], grid_.tangent[k]));
            M(static_cast<long>(k), static_cast<long>(j)) = -sqrt_weight_[k] * A * sqrt_weight_[j];
        }
    }
    lu_.compute(M);
    const double rc = lu_.rcond();
    if (!(rc > 1e-14)) {
        std::ostringstream msg;
        msg << "Szego system is numerically singular (reciprocal condition " << rc << ", " << n << " nodes)";
        throw NumericalError(msg.str());
    }
    condition_ = 1.0 / rc;
}

const std::vector<cplx>& SzegoSolver::boundary(cplx a, int m) const
{
    const auto key = std::make_tuple(a.real(), a.imag(), m);
    {
        std::shared_lock lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end())
            return *it->second;
    }
    const std::size_t n = grid_.size();
    Eigen::VectorXcd rhs(static_cast<long>(n));
    const double mf = factorial(m);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx h = grid_.tangent[k] * mf / (two_pi_i * std::pow(grid_.z[k] - a, m + 1));
        rhs(static_cast<long>(k)) = sqrt_weight_[k] * std::conj(h);
    }
    const Eigen::VectorXcd x = lu_.solve(rhs);
    auto values = std::make_shared<std::vector<cplx>>(n);
    for (std::size_t k = 0; k < n; ++k)
        (*values)[k] = x(static_cast<long>(k)) / sqrt_weight_[k];

    std::unique_lock lock(mutex_);
    auto [it, inserted] = cache_.emplace(key, std::move(values));
    return *it->second;
}

cplx SzegoData::szego(cplx z) const
{
    return cauchy_eval(grid(), S, z);
}

cplx SzegoData::garabedian(cplx z) const
{
    const auto& g = grid();
    std::vector<cplx> reg(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
        reg[k] = L.values[k] - 1.0 / (2.0 * pi * (g.z[k] - a));
    return cauchy_eval(g, BoundaryFunction(g, std::move(reg)), z) + 1.0 / (2.0 * pi * (z - a));
}

SzegoData szego_solve(std::shared_ptr<const SzegoSolver> solver, cplx a)
{
    const auto& g = solver->grid();
    require_interior(g, a);
    SzegoData sz;
    sz.solver = solver;
    sz.a = a;
    sz.S = BoundaryFunction(g, solver->boundary(a, 0));
    sz.L = garabedian_boundary(sz);
    const cplx saa = cauchy_eval(g, sz.S, a);
    if (!(saa.real() > 0.0) || std::abs(saa.imag()) > 1e-8 * std::abs(saa)) {
        std::ostringstream msg;
        msg << "S(a,a) = " << saa << " is not real and positive";
        throw NumericalError(msg.str());
    }
    sz.S_aa = saa.real();
    sz.zeros = szego_zeros(sz);
    return sz;
}

SzegoData szego_solve(const BoundaryGrid& grid, cplx a)
{
    return szego_solve(std::make_shared<const SzegoSolver>(grid), a);
}

BoundaryFunction garabedian_boundary(const SzegoData& sz)
{
    const auto& g = sz.grid();
    std::vector<cplx> L(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
        L[k] = cplx(0.0, 1.0) * std::conj(sz.S.values[k]) / g.tangent[k];
    return BoundaryFunction(g, std::move(L));
}

cplx AhlforsMap::operator()(cplx z) const
{
    return cauchy_eval(solver->grid(), boundary, z);
}

AhlforsMap ahlfors_map(const SzegoData& sz)
{
    const auto& g = sz.grid();
    std::vector<cplx> f(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
        f[k] = sz.S.values[k] / sz.L.values[k];
    AhlforsMap map{sz.solver, sz.a, BoundaryFunction(g, std::move(f)), 0.0};
    map.derivative_at_a = cauchy_derivative(g, map.boundary, sz.a, 1);
    return map;
}

std::vector<cplx> szego_zeros(const SzegoData& sz)
{
    const auto& g = sz.grid();
    const int expected = g.curve_count - 1;
    if (expected == 0)
        return {};
    const auto dS = parametric_derivative(g, sz.S.values, 1);

    // power sums p_0..p_m of the zeros
    std::vector<cplx> p(static_cast<std::size_t>(expected + 1), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const cplx q = dS[k] / sz.S.values[k] * g.dt / two_pi_i;
        cplx zp = 1.0;
        for (int j = 0; j <= expected; ++j) {
            p[static_cast<std::size_t>(j)] += zp * q;
            zp *= g.z[k];
        }
    }
    const double count = p[0].real();
    if (std::abs(count - expected) > 1e-3 || std::abs(p[0].imag()) > 1e-3) {
        std::ostringstream msg;
        msg << "argument principle counts " << p[0] << " zeros of S(., a); expected " << expected;
        throw NumericalError(msg.str());
    }

    // Newton's identities: e_k = (1/k) sum_{i=1}^k (-1)^{i-1} e_{k-i} p_i
    std::vector<cplx> e(static_cast<std::size_t>(expected + 1), 0.0);
    e[0] = 1.0;
    for (int k = 1; k <= expected; ++k) {
        cplx acc = 0.0;
        for (int i = 1; i <= k; ++i)
            acc += (i % 2 == 1 ? 1.0 : -1.0) * e[static_cast<std::size_t>(k - i)] * p[static_cast<std::size_t>(i)];
        e[static_cast<std::size_t>(k)] = acc / static_cast<double>(k);
    }
    std::vector<cplx> coeffs(static_cast<std::size_t>(expected + 1));
    for (int k = 0; k <= expected; ++k)
        coeffs[static_cast<std::size_t>(expected - k)] = (k % 2 == 0 ? 1.0 : -1.0) * e[static_cast<std::size_t>(k)];

    const BoundaryFunction dSz(g, boundary_derivative(g, sz.S.values, 1));
    std::vector<cplx> zeros;
    for (const auto& r : roots(Polynomial(coeffs), RootOptions{1e-6, 8})) {
        for (int rep = 0; rep < r.multiplicity; ++rep) {
            cplx z = r.value;
            try {
                for (int it = 0; it < 30; ++it) {
                    const auto w = cauchy_weights(g, z);
                    cplx f = 0.0, df = 0.0;
                    for (std::size_t k = 0; k < g.size(); ++k) {
                        f += w[k] * sz.S.values[k];
                        df += w[k] * dSz.values[k];
                    }
                    const cplx step = f / df;
                    z -= step;
                    if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(z)))
                        break;
                }
                require_interior(g, z);
            } catch (const Error&) {
                // keep the moment estimate when Newton leaves the trusted region
                z = r.value;
            }
            zeros.push_back(z);
        }
    }
    if (static_cast<int>(zeros.size()) != expected)
        throw NumericalError("zero count mismatch after refinement");
    return zeros;
}

// ---------------------------------------------------------------- harmonic measures

double HarmonicBasis::omega(int j, cplx z) const
{
    const auto& g = *grid;
    const auto& tr = cauchy_trace[static_cast<std::size_t>(j)];
    double v = cauchy_eval(g, BoundaryFunction(g, tr), z).real();
    for (std::size_t h = 0; h < hole_points.size(); ++h)
        v += log_coeffs[static_cast<std::size_t>(j)][h] * std::log(std::abs(z - hole_points[h]));
    return v;
}

cplx HarmonicBasis::fprime(int j, cplx z, int m) const
{
    const auto& g = *grid;
    cplx v;
    if (m == 0)
        v = cauchy_eval(g, BoundaryFunction(g, cauchy_deriv[static_cast<std::size_t>(j)]), z);
    else
        v = cauchy_derivative(g, BoundaryFunction(g, cauchy_trace[static_cast<std::size_t>(j)]), z, m + 1);
    const double sign = m % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t h = 0; h < hole_points.size(); ++h)
        v += log_coeffs[static_cast<std::size_t>(j)][h] * sign * factorial(m) / std::pow(z - hole_points[h], m + 1);
    return v;
}

HarmonicBasis harmonic_measures(const BoundaryGrid& grid)
{
    HarmonicBasis hb;
    hb.grid = std::make_shared<const BoundaryGrid>(grid);
    const int holes = grid.curve_count - 1;
    hb.gram = Eigen::MatrixXd::Zero(holes, holes);
    if (holes == 0)
        return hb;

    const long n = static_cast<long>(grid.size());
    for (int h = 1; h <= holes; ++h)
        hb.hole_points.push_back(hole_point(grid, h));

    // [ M  Lg ] [mu]   [rhs]
    // [ C  0  ] [a ] = [ 0 ]
    const long size = n + holes;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(size, size);
    for (long k = 0; k < n; ++k) {
        double diag = 1.0;
        for (long j = 0; j < n; ++j) {
            if (j == k)
                continue;
            const std::size_t uj = static_cast<std::size_t>(j), uk = static_cast<std::size_t>(k);
            const double v = (grid.dz[uj] * grid.dt / (two_pi_i * (grid.z[uj] - grid.z[uk]))).real();
            A(k, j) = v;
            diag -= v;
        }
        A(k, k) = diag;
        for (int h = 0; h < holes; ++h)
            A(k, n + h) = std::log(std::abs(grid.z[static_cast<std::size_t>(k)] - hb.hole_points[static_cast<std::size_t>(h)]));
    }
    for (int h = 0; h < holes; ++h)
        for (std::size_t k = grid.curve_begin(h + 1); k < grid.curve_begin(h + 2); ++k)
            A(n + h, static_cast<long>(k)) = grid.weight[k];

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const double rc = lu.rcond();
    if (!(rc > 1e-13)) {
        std::ostringstream msg;
        msg << "harmonic measure system is numerically singular (reciprocal condition " << rc << ")";
        throw NumericalError(msg.str());
    }

    for (int j = 0; j < holes; ++j) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
        for (std::size_t k = grid.curve_begin(j + 1); k < grid.curve_begin(j + 2); ++k)
            rhs(static_cast<long>(k)) = 1.0;
        const Eigen::VectorXd x = lu.solve(rhs);
        std::vector<double> mu(static_cast<std::size_t>(n));
        std::vector<cplx> mu_c(static_cast<std::size_t>(n));
        for (long k = 0; k < n; ++k) {
            mu[static_cast<std::size_t>(k)] = x(k);
            mu_c[static_cast<std::size_t>(k)] = x(k);
        }
        std::vector<double> a(static_cast<std::size_t>(holes));
        for (int h = 0; h < holes; ++h)
            a[static_cast<std::size_t>(h)] = x(n + h);

        auto trace = interior_cauchy_limit(grid, mu_c);
        auto deriv = boundary_derivative(grid, trace, 1);
        std::vector<double> omega(static_cast<std::size_t>(n));
        std::vector<cplx> fp(static_cast<std::size_t>(n));
        for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
            double w = trace[k].real();
            cplx f = deriv[k];
            for (int h = 0; h < holes; ++h) {
                const cplx d = grid.z[k] - hb.hole_points[static_cast<std::size_t>(h)];
                w += a[static_cast<std::size_t>(h)] * std::log(std::abs(d));
                f += a[static_cast<std::size_t>(h)] / d;
            }
            omega[k] = w;
            fp[k] = f;
        }
        hb.density.push_back(std::move(mu));
        hb.log_coeffs.push_back(std::move(a));
        hb.cauchy_trace.push_back(std::move(trace));
        hb.cauchy_deriv.push_back(std::move(deriv));
        hb.omega_nodes.push_back(std::move(omega));
        hb.fprime_nodes.push_back(std::move(fp));
    }

    // Gram entries <F_i', F_k'> = -i * closed integral over curve k of F_i' dz (the flux of
    // omega_i through that curve).
    for (int i = 0; i < holes; ++i) {
        const BoundaryFunction f(grid, hb.fprime_nodes[static_cast<std::size_t>(i)]);
        for (int k = 0; k < holes; ++k)
            hb.gram(i, k) = (cplx(0.0, -1.0) * contour_integral(grid, f, k + 1)).real();
    }
    hb.gram = 0.5 * (hb.gram + hb.gram.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hb.gram);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw NumericalError("harmonic measure Gram matrix is not positive definite");
    return hb;
}

// ---------------------------------------------------------------- Bergman

BergmanData::BergmanData(std::shared_ptr<const SzegoSolver> solver, HarmonicBasis basis)
    : solver_(std::move(solver)), basis_(std::move(basis))
{
    const auto& g = grid();
    if (basis_.grid && basis_.grid->id != g.id)
        throw UsageError("harmonic basis was built on a different grid");
    const int nb = basis_.size();
    lambda_ = Eigen::MatrixXcd::Zero(nb, nb);
    if (nb == 0)
        return;

    const std::size_t count = static_cast<std::size_t>(2 * nb + 2);
    // four spacings keeps the Szego solves well resolved; thin domains on coarse grids
    // settle for most of the inradius
    const double inr = inradius(g);
    probes_ = interior_probes(g, count, std::max(0.25 * inr, std::min(4.0 * g.max_spacing(), 0.8 * inr)));
    const long P = static_cast<long>(probes_.size());
    Eigen::MatrixXcd V(nb, P), B(nb, P);
    for (long p = 0; p < P; ++p) {
        const cplx w = probes_[static_cast<std::size_t>(p)];
        const auto& s = solver_->boundary(w, 0);
        std::vector<cplx> s2(s.size());
        for (std::size_t k = 0; k < s.size(); ++k)
            s2[k] = s[k] * s[k];
        const BoundaryFunction sq(g, std::move(s2));
        for (int j = 0; j < nb; ++j) {
            const cplx vj = std::conj(basis_.fprime(j, w));
            V(j, p) = vj;
            B(j, p) = vj - 4.0 * pi / cplx(0.0, 1.0) * contour_integral(g, sq, j + 1);
        }
    }
    // Gram * lambda * V = B
    const Eigen::MatrixXcd C = basis_.gram.cast<cplx>().ldlt().solve(B);
    const Eigen::MatrixXcd lt = V.transpose().colPivHouseholderQr().solve(C.transpose());
    lambda_ = lt.transpose();
    lambda_residual_ = (lambda_ * V - C).norm() / std::max(C.norm(), 1e-300);
    lambda_ = 0.5 * (lambda_ + lambda_.adjoint()).eval();
}

std::vector<cplx> BergmanData::boundary_values(cplx w, int m) const
{
    const auto& g = grid();
    std::vector<const std::vector<cplx>*> s(static_cast<std::size_t>(m + 1));
    for (int k = 0; k <= m; ++k)
        s[static_cast<std::size_t>(k)] = &solver_->boundary(w, k);
    std::vector<cplx> out(g.size(), 0.0);
    for (int k = 0; k <= m; ++k) {
        const double c = 4.0 * pi * binomial(m, k);
        const auto& a = *s[static_cast<std::size_t>(k)];
        const auto& b = *s[static_cast<std::size_t>(m - k)];
        for (std::size_t i = 0; i < g.size(); ++i)
            out[i] += c * a[i] * b[i];
    }
    const int nb = basis_.size();
    if (nb > 0) {
        Eigen::VectorXcd v(nb);
        for (int j = 0; j < nb; ++j)
            v(j) = std::conj(basis_.fprime(j, w, m));
        const Eigen::VectorXcd lv = lambda_ * v;
        for (int i = 0; i < nb; ++i)
            for (std::size_t k = 0; k < g.size(); ++k)
                out[k] += lv(i) * basis_.fprime_nodes[static_cast<std::size_t>(i)][k];
    }
    return out;
}

cplx BergmanData::operator()(cplx z, cplx w, int m) const
{
    return values(std::span<const cplx>(&z, 1), w, m).front();
}

std::vector<cplx> BergmanData::values(std::span<const cplx> zs, cplx w, int m) const
{
    const auto& g = grid();
    const auto b = boundary_values(w, m);
    std::vector<cplx> out;
    out.reserve(zs.size());
    for (cplx z : zs) {
        const auto wt = cauchy_weights(g, z);
        cplx acc = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            acc += wt[k] * b[k];
        out.push_back(acc);
    }
    return out;
}

BergmanData bergman_assemble(std::shared_ptr<const SzegoSolver> solver, const HarmonicBasis& basis)
{
    return BergmanData(std::move(solver), basis);
}

BergmanData bergman_assemble(const BoundaryGrid& grid)
{
    auto solver = std::make_shared<const SzegoSolver>(grid);
    return BergmanData(solver, harmonic_measures(solver->grid()));
}

namespace {

void check_order(int m)
{
    if (m < 0 || m > 8)
        throw UsageError("derivative order must be in 0..8");
}

} // namespace

cplx bergman_derivative(const BergmanData& bd, cplx z, cplx w, int m)
{
    check_order(m);
    if (m > 0 && spacing_distance(bd.grid(), w) < 4.0)
        throw ProximityError("bergman_derivative: w is within four node spacings of the boundary");
    return bd(z, w, m);
}

cplx bergman_derivative_circle(const BergmanData& bd, cplx z, cplx w, int m, int samples)
{
    check_order(m);
    if (m == 0)
        return bd(z, w, 0);
    const auto& g = bd.grid();
    const double dist = distance_to_boundary(g, w);
    const double rho = std::min(0.5 * dist, 0.1);
    if (dist - rho < 2.0 * g.max_spacing())
        throw ProximityError("bergman_derivative_circle: differentiation circle too close to the boundary");
    // h(zeta) = conj(K(z, zeta)) is holomorphic in zeta; K^{(m)} = conj(h^{(m)}(w)).
    cplx acc = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double th = 2.0 * pi * k / samples;
        const cplx e = std::polar(1.0, th);
        acc += std::conj(bd(z, w + rho * e, 0)) * std::polar(1.0, -m * th);
    }
    const cplx hm = acc / static_cast<double>(samples) * factorial(m) / std::pow(rho, m);
    return std::conj(hm);
}

std::vector<cplx> lambda_boundary(const BergmanData& bd, cplx w, int m)
{
    check_order(m);
    const auto& g = bd.grid();
    auto K = bd.boundary_values(w, m);
    for (std::size_t k = 0; k < g.size(); ++k)
        K[k] = -std::conj(K[k]) * std::conj(g.tangent[k]) / g.tangent[k];
    return K;
}

LambdaReport lambda_boundary_check(const BergmanData& bd, cplx w, int m)
{
    const auto& g = bd.grid();
    require_interior(g, w);
    auto lam = lambda_boundary(bd, w, m);
    const double scale = sup_abs(lam);
    const double c = factorial(m + 1) / pi;
    for (std::size_t k = 0; k < g.size(); ++k)
        lam[k] -= c / std::pow(g.z[k] - w, m + 2);
    const auto ext = exterior_cauchy_part(g, lam);
    return LambdaReport{w, m, sup_abs(ext) / scale};
}

} // namespace qdk
