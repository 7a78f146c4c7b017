#include "qdk/rational.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qdk/error.hpp"

namespace qdk {

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs))
{
    while (!coeffs_.empty() && coeffs_.back() == cplx(0.0))
        coeffs_.pop_back();
}

Polynomial Polynomial::monomial(int degree, cplx coeff)
{
    std::vector<cplx> c(static_cast<std::size_t>(degree + 1), 0.0);
    c.back() = coeff;
    return Polynomial(std::move(c));
}

Polynomial Polynomial::from_roots(std::span<const cplx> roots, cplx leading)
{
    std::vector<cplx> c{leading};
    for (cplx r : roots) {
        std::vector<cplx> next(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= r * c[k];
        }
        c = std::move(next);
    }
    return Polynomial(std::move(c));
}

cplx Polynomial::coeff(int k) const
{
    if (k < 0 || k > degree())
        return 0.0;
    return coeffs_[static_cast<std::size_t>(k)];
}

cplx Polynomial::leading() const
{
    return coeffs_.empty() ? cplx(0.0) : coeffs_.back();
}

cplx Polynomial::operator()(cplx z) const
{
    cplx acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        acc = acc * z + *it;
    return acc;
}

Polynomial Polynomial::derivative(int order) const
{
    std::vector<cplx> c = coeffs_;
    for (int o = 0; o < order; ++o) {
        if (c.size() <= 1)
            return {};
        std::vector<cplx> d(c.size() - 1);
        for (std::size_t k = 1; k < c.size(); ++k)
            d[k - 1] = static_cast<double>(k) * c[k];
        c = std::move(d);
    }
    return Polynomial(std::move(c));
}

Polynomial Polynomial::taylor_shift(cplx center) const
{
    std::vector<cplx> c = coeffs_;
    const std::size_t n = c.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t k = n - 1; k > i; --k)
            c[k - 1] += center * c[k];
    return Polynomial(std::move(c));
}

Polynomial Polynomial::reversed_conjugate(int formal_degree) const
{
    if (formal_degree < degree())
        throw UsageError("reversed_conjugate: formal degree below actual degree");
    std::vector<cplx> c(static_cast<std::size_t>(formal_degree + 1), 0.0);
    for (int k = 0; k <= degree(); ++k)
        c[static_cast<std::size_t>(formal_degree - k)] = std::conj(coeffs_[static_cast<std::size_t>(k)]);
    return Polynomial(std::move(c));
}

Polynomial Polynomial::operator-() const
{
    std::vector<cplx> c = coeffs_;
    for (auto& v : c)
        v = -v;
    return Polynomial(std::move(c));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b)
{
    std::vector<cplx> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k)
        c[k] += a.coeffs_[k];
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k)
        c[k] += b.coeffs_[k];
    return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b)
{
    return a + (-b);
}

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    if (a.is_zero() || b.is_zero())
        return {};
    std::vector<cplx> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
            c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(c));
}

Polynomial operator*(cplx s, const Polynomial& p)
{
    std::vector<cplx> c = p.coeffs_;
    for (auto& v : c)
        v *= s;
    return Polynomial(std::move(c));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& divisor) const
{
    if (divisor.is_zero())
        throw UsageError("Polynomial::divmod: division by the zero polynomial");
    const int dd = divisor.degree();
    if (degree() < dd)
        return {Polynomial{}, *this};
    std::vector<cplx> rem = coeffs_;
    std::vector<cplx> quot(static_cast<std::size_t>(degree() - dd + 1), 0.0);
    const cplx lead = divisor.leading();
    for (int k = degree() - dd; k >= 0; --k) {
        const cplx q = rem[static_cast<std::size_t>(k + dd)] / lead;
        quot[static_cast<std::size_t>(k)] = q;
        for (int j = 0; j <= dd; ++j)
            rem[static_cast<std::size_t>(k + j)] -= q * divisor.coeffs_[static_cast<std::size_t>(j)];
    }
    rem.resize(static_cast<std::size_t>(std::max(dd, 0)));
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

// ---------------------------------------------------------------- roots

namespace {

double coefficient_scale(const Polynomial& p, double radius)
{
    double s = 0.0;
    double rk = 1.0;
    for (cplx c : p.coeffs()) {
        s += std::abs(c) * rk;
        rk *= radius;
    }
    return s;
}

cplx newton_polish(const Polynomial& p, const Polynomial& dp, cplx z, int iterations)
{
    double best = std::abs(p(z));
    for (int it = 0; it < iterations && best > 0.0; ++it) {
        const cplx d = dp(z);
        if (d == cplx(0.0))
            break;
        const cplx next = z - p(z) / d;
        const double val = std::abs(p(next));
        if (!(val < best))
            break;
        best = val;
        z = next;
    }
    return z;
}

} // namespace

std::vector<Root> roots(const Polynomial& p, const RootOptions& opt)
{
    if (p.is_zero())
        throw UsageError("roots: zero polynomial");
    std::vector<Root> out;
    if (p.degree() == 0)
        return out;

    // exact roots at the origin
    int zeros = 0;
    while (p.coeffs()[static_cast<std::size_t>(zeros)] == cplx(0.0))
        ++zeros;
    std::vector<cplx> rest(p.coeffs().begin() + zeros, p.coeffs().end());
    Polynomial q(std::move(rest));

    std::vector<cplx> raw;
    const int n = q.degree();
    if (n >= 1) {
        Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 1; i < n; ++i)
            companion(i, i - 1) = 1.0;
        for (int i = 0; i < n; ++i)
            companion(i, n - 1) = -q.coeff(i) / q.leading();
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
        if (es.info() != Eigen::Success)
            throw NumericalError("roots: companion eigenvalue iteration failed");
        const Polynomial dq = q.derivative();
        for (int i = 0; i < n; ++i)
            raw.push_back(newton_polish(q, dq, es.eigenvalues()(i), opt.newton_iterations));
    }

    // cluster into multiplicities
    std::vector<bool> used(raw.size(), false);
    std::vector<std::pair<cplx, int>> clusters;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (used[i])
            continue;
        cplx sum = raw[i];
        int count = 1;
        used[i] = true;
        for (std::size_t j = i + 1; j < raw.size(); ++j) {
            if (!used[j] && std::abs(raw[j] - raw[i]) <= opt.cluster_tol * std::max(1.0, std::abs(raw[i]))) {
                used[j] = true;
                sum += raw[j];
                ++count;
            }
        }
        clusters.emplace_back(sum / static_cast<double>(count), count);
    }

    // Eigenvalues of a multiple root split by ~eps^(1/m); merge nearby clusters when the
    // merged point passes a derivative-vanishing test.
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < clusters.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < clusters.size() && !merged; ++j) {
                const cplx a = clusters[i].first;
                const cplx b = clusters[j].first;
                if (std::abs(a - b) > 1e-4 * std::max(1.0, std::abs(a)))
                    continue;
                const int m = clusters[i].second + clusters[j].second;
                const cplx c = (a * static_cast<double>(clusters[i].second) + b * static_cast<double>(clusters[j].second)) /
                               static_cast<double>(m);
                const double scale = coefficient_scale(q, std::max(1.0, std::abs(c)));
                const Polynomial shifted = q.taylor_shift(c);
                bool ok = true;
                const double spread = std::abs(a - b);
                for (int k = 0; k < m && ok; ++k) {
                    // Taylor coefficient k should be O(spread^(m-k)) for an m-fold root
                    const double bound = 64.0 * scale * (std::pow(spread, m - k) + 1e-14);
                    ok = std::abs(shifted.coeff(k)) <= bound;
                }
                if (ok) {
                    clusters[i] = {c, m};
                    clusters.erase(clusters.begin() + static_cast<long>(j));
                    merged = true;
                }
            }
        }
    }

    if (zeros > 0)
        out.push_back({0.0, zeros});
    for (auto& [v, m] : clusters) {
        // an m-fold root is a simple root of the (m-1)-th derivative
        if (m > 1) {
            const Polynomial dm = q.derivative(m - 1);
            v = newton_polish(dm, dm.derivative(), v, opt.newton_iterations);
        }
        out.push_back({v, m});
    }
    return out;
}

// ---------------------------------------------------------------- PrincipalPart

cplx PrincipalPart::operator()(cplx z) const
{
    const cplx u = 1.0 / (z - pole);
    cplx acc = 0.0;
    cplx uk = u;
    for (cplx c : coeffs) {
        acc += c * uk;
        uk *= u;
    }
    return acc;
}

// ---------------------------------------------------------------- RationalFunction

RationalFunction::RationalFunction() : num_(), den_(std::vector<cplx>{1.0}) {}

RationalFunction RationalFunction::polynomial(Polynomial p)
{
    return RationalFunction(std::move(p), Polynomial(std::vector<cplx>{1.0}));
}

RationalFunction::RationalFunction(Polynomial numerator, Polynomial denominator)
    : num_(std::move(numerator)), den_(std::move(denominator))
{
    if (den_.is_zero())
        throw UsageError("RationalFunction: zero denominator");
    const cplx lead = den_.leading();
    num_ = (1.0 / lead) * num_;
    den_ = (1.0 / lead) * den_;
    if (num_.is_zero()) {
        den_ = Polynomial(std::vector<cplx>{1.0});
        return;
    }
    if (den_.degree() == 0 || num_.degree() == 0)
        return;

    auto nr = roots(num_);
    auto dr = roots(den_);
    bool cancelled = false;
    for (auto& d : dr) {
        for (auto& n : nr) {
            while (d.multiplicity > 0 && n.multiplicity > 0 && std::abs(d.value - n.value) <= reduce_tol) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "cancelled common root " << d.value << " (numerator root " << n.value << ", |diff| "
                    << std::abs(d.value - n.value) << ")";
                log_.push_back(msg.str());
                --d.multiplicity;
                --n.multiplicity;
                cancelled = true;
            }
        }
    }
    if (!cancelled)
        return;
    std::vector<cplx> nroots, droots;
    for (auto& n : nr)
        for (int k = 0; k < n.multiplicity; ++k)
            nroots.push_back(n.value);
    for (auto& d : dr)
        for (int k = 0; k < d.multiplicity; ++k)
            droots.push_back(d.value);
    num_ = Polynomial::from_roots(nroots, num_.leading());
    den_ = Polynomial::from_roots(droots, 1.0);
}

int RationalFunction::degree() const
{
    return std::max(num_.degree(), den_.degree());
}

cplx RationalFunction::operator()(cplx z) const
{
    return num_(z) / den_(z);
}

cplx RationalFunction::derivative(cplx z) const
{
    const cplx d = den_(z);
    return (num_.derivative()(z) * d - num_(z) * den_.derivative()(z)) / (d * d);
}

std::vector<Root> RationalFunction::poles() const
{
    return roots(den_);
}

cplx PartialFractions::operator()(cplx z) const
{
    cplx acc = polynomial_part(z);
    for (const auto& p : parts)
        acc += p(z);
    return acc;
}

PartialFractions partial_fractions(const RationalFunction& f)
{
    PartialFractions out;
    out.warnings = f.provenance();
    auto [quot, rem] = f.numerator().divmod(f.denominator());
    out.polynomial_part = quot;
    if (rem.is_zero())
        return out;
    const auto poles = f.poles();
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const cplx p = poles[i].value;
        const int k = poles[i].multiplicity;
        std::vector<cplx> others;
        for (std::size_t j = 0; j < poles.size(); ++j)
            if (j != i)
                for (int m = 0; m < poles[j].multiplicity; ++m)
                    others.push_back(poles[j].value);
        // g = rem / q with q = den / (z - p)^k, expanded about p
        const Polynomial q = Polynomial::from_roots(others).taylor_shift(p);
        const Polynomial r = rem.taylor_shift(p);
        std::vector<cplx> g(static_cast<std::size_t>(k), 0.0);
        for (int n = 0; n < k; ++n) {
            cplx acc = r.coeff(n);
            for (int j = 0; j < n; ++j)
                acc -= g[static_cast<std::size_t>(j)] * q.coeff(n - j);
            g[static_cast<std::size_t>(n)] = acc / q.coeff(0);
        }
        PrincipalPart part{p, std::vector<cplx>(static_cast<std::size_t>(k))};
        for (int j = 1; j <= k; ++j)
            part.coeffs[static_cast<std::size_t>(j - 1)] = g[static_cast<std::size_t>(k - j)];
        // a pole of the reduced denominator cannot have vanishing top coefficient unless
        // the reduction missed a cancellation
        while (!part.coeffs.empty() && std::abs(part.coeffs.back()) == 0.0)
            part.coeffs.pop_back();
        if (part.coeffs.empty()) {
            out.warnings.push_back("pole with vanishing principal part dropped");
            continue;
        }
        out.parts.push_back(std::move(part));
    }
    return out;
}

RationalFunction reflect(const RationalFunction& r)
{
    const int n = r.numerator().degree();
    const int d = r.denominator().degree();
    if (n < 0)
        return r;
    Polynomial num = r.numerator().reversed_conjugate(n);
    Polynomial den = r.denominator().reversed_conjugate(d);
    if (d >= n)
        num = num * Polynomial::monomial(d - n);
    else
        den = den * Polynomial::monomial(n - d);
    return RationalFunction(std::move(num), std::move(den));
}

// ---------------------------------------------------------------- TwoVarPolynomial

namespace {

Eigen::MatrixXcd trimmed(const Eigen::MatrixXcd& a)
{
    Eigen::Index rows = a.rows();
    Eigen::Index cols = a.cols();
    while (rows > 1 && a.row(rows - 1).head(cols).cwiseAbs().maxCoeff() == 0.0)
        --rows;
    while (cols > 1 && a.col(cols - 1).head(rows).cwiseAbs().maxCoeff() == 0.0)
        --cols;
    return a.topLeftCorner(rows, cols);
}

} // namespace

TwoVarPolynomial::TwoVarPolynomial(Eigen::MatrixXcd coeffs)
{
    if (coeffs.rows() == 0 || coeffs.cols() == 0)
        coeffs = Eigen::MatrixXcd::Zero(1, 1);
    a_ = trimmed(coeffs);
}

TwoVarPolynomial TwoVarPolynomial::constant(cplx c)
{
    Eigen::MatrixXcd a(1, 1);
    a(0, 0) = c;
    return TwoVarPolynomial(a);
}

TwoVarPolynomial TwoVarPolynomial::term(int i, int j, cplx c)
{
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(i + 1, j + 1);
    a(i, j) = c;
    return TwoVarPolynomial(a);
}

TwoVarPolynomial TwoVarPolynomial::in_z(const Polynomial& p)
{
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(std::max(p.degree() + 1, 1), 1);
    for (int i = 0; i <= p.degree(); ++i)
        a(i, 0) = p.coeff(i);
    return TwoVarPolynomial(a);
}

int TwoVarPolynomial::degree_z() const
{
    for (Eigen::Index i = a_.rows() - 1; i >= 0; --i)
        if (a_.row(i).cwiseAbs().maxCoeff() > 0.0)
            return static_cast<int>(i);
    return -1;
}

int TwoVarPolynomial::degree_s() const
{
    for (Eigen::Index j = a_.cols() - 1; j >= 0; --j)
        if (a_.col(j).cwiseAbs().maxCoeff() > 0.0)
            return static_cast<int>(j);
    return -1;
}

int TwoVarPolynomial::total_degree() const
{
    int d = -1;
    for (Eigen::Index i = 0; i < a_.rows(); ++i)
        for (Eigen::Index j = 0; j < a_.cols(); ++j)
            if (a_(i, j) != cplx(0.0))
                d = std::max(d, static_cast<int>(i + j));
    return d;
}

bool TwoVarPolynomial::is_zero(double tol) const
{
    return a_.cwiseAbs().maxCoeff() <= tol;
}

cplx TwoVarPolynomial::operator()(cplx z, cplx s) const
{
    cplx acc = 0.0;
    for (Eigen::Index i = a_.rows() - 1; i >= 0; --i) {
        cplx row = 0.0;
        for (Eigen::Index j = a_.cols() - 1; j >= 0; --j)
            row = row * s + a_(i, j);
        acc = acc * z + row;
    }
    return acc;
}

TwoVarPolynomial TwoVarPolynomial::normalized(double chop) const
{
    const double m = a_.cwiseAbs().maxCoeff();
    if (m == 0.0)
        throw AlgebraError("TwoVarPolynomial::normalized: zero polynomial");
    Eigen::MatrixXcd a = a_ / m;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (std::abs(a(i, j)) < chop)
                a(i, j) = 0.0;
    return TwoVarPolynomial(a);
}

TwoVarPolynomial operator+(const TwoVarPolynomial& a, const TwoVarPolynomial& b)
{
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(std::max(a.a_.rows(), b.a_.rows()), std::max(a.a_.cols(), b.a_.cols()));
    c.topLeftCorner(a.a_.rows(), a.a_.cols()) += a.a_;
    c.topLeftCorner(b.a_.rows(), b.a_.cols()) += b.a_;
    return TwoVarPolynomial(c);
}

TwoVarPolynomial operator-(const TwoVarPolynomial& a, const TwoVarPolynomial& b)
{
    TwoVarPolynomial nb(-b.a_);
    return a + nb;
}

TwoVarPolynomial operator*(const TwoVarPolynomial& a, const TwoVarPolynomial& b)
{
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(a.a_.rows() + b.a_.rows() - 1, a.a_.cols() + b.a_.cols() - 1);
    for (Eigen::Index i = 0; i < a.a_.rows(); ++i)
        for (Eigen::Index j = 0; j < a.a_.cols(); ++j)
            if (a.a_(i, j) != cplx(0.0))
                c.block(i, j, b.a_.rows(), b.a_.cols()) += a.a_(i, j) * b.a_;
    return TwoVarPolynomial(c);
}

} // namespace qdk
