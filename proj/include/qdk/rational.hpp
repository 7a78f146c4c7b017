#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qdk {

using cplx = std::complex<double>;

/// Polynomial with complex coefficients in ascending degree order. Trailing zeros are
/// stripped on construction, so the leading coefficient is nonzero unless the
/// polynomial is zero.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<cplx> coeffs);
    static Polynomial monomial(int degree, cplx coeff = 1.0);
    static Polynomial from_roots(std::span<const cplx> roots, cplx leading = 1.0);

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<cplx>& coeffs() const { return coeffs_; }
    cplx coeff(int k) const;
    cplx leading() const;

    cplx operator()(cplx z) const;
    Polynomial derivative(int order = 1) const;
    /// Coefficients of p(center + u) in powers of u.
    Polynomial taylor_shift(cplx center) const;
    /// Conjugated coefficients in reversed order over a formal degree d >= degree():
    /// u^d * conj(p(1/conj(u))).
    Polynomial reversed_conjugate(int formal_degree) const;

    Polynomial operator-() const;
    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(cplx s, const Polynomial& p);

    /// Euclidean division; throws UsageError for a zero divisor.
    std::pair<Polynomial, Polynomial> divmod(const Polynomial& divisor) const;

private:
    std::vector<cplx> coeffs_;
};

struct Root {
    cplx value;
    int multiplicity = 1;
};

struct RootOptions {
    double cluster_tol = 1e-8;
    int newton_iterations = 8;
};

/// Companion-matrix eigenvalues, Newton-polished, clustered into multiplicities.
std::vector<Root> roots(const Polynomial& p, const RootOptions& opt = {});

/// Term c_j / (z - pole)^j for j = 1..coeffs.size().
struct PrincipalPart {
    cplx pole;
    std::vector<cplx> coeffs;

    int order() const { return static_cast<int>(coeffs.size()); }
    cplx operator()(cplx z) const;
};

/// numerator / denominator with a monic denominator. Construction cancels common roots
/// that agree within reduce_tol and records each cancellation in provenance().
class RationalFunction {
public:
    static constexpr double reduce_tol = 1e-10;

    RationalFunction();
    RationalFunction(Polynomial numerator, Polynomial denominator);
    static RationalFunction polynomial(Polynomial p);

    const Polynomial& numerator() const { return num_; }
    const Polynomial& denominator() const { return den_; }
    const std::vector<std::string>& provenance() const { return log_; }
    bool is_polynomial() const { return den_.degree() == 0; }
    /// max(deg num, deg den).
    int degree() const;

    cplx operator()(cplx z) const;
    cplx derivative(cplx z) const;
    std::vector<Root> poles() const;

private:
    Polynomial num_;
    Polynomial den_;
    std::vector<std::string> log_;
};

struct PartialFractions {
    Polynomial polynomial_part;
    std::vector<PrincipalPart> parts;
    std::vector<std::string> warnings;

    cplx operator()(cplx z) const;
};

PartialFractions partial_fractions(const RationalFunction& f);

/// Circle reflection r*(w) = conj(r(1 / conj(w))).
RationalFunction reflect(const RationalFunction& r);

/// Polynomial sum a_ij z^i s^j, with a(i, j) stored in a dense matrix.
class TwoVarPolynomial {
public:
    TwoVarPolynomial() : a_(Eigen::MatrixXcd::Zero(1, 1)) {}
    explicit TwoVarPolynomial(Eigen::MatrixXcd coeffs);
    static TwoVarPolynomial constant(cplx c);
    /// c * z^i * s^j
    static TwoVarPolynomial term(int i, int j, cplx c = 1.0);
    /// p(z) as a polynomial with no s dependence.
    static TwoVarPolynomial in_z(const Polynomial& p);

    const Eigen::MatrixXcd& coeffs() const { return a_; }
    int degree_z() const;
    int degree_s() const;
    int total_degree() const;
    bool is_zero(double tol = 0.0) const;

    cplx operator()(cplx z, cplx s) const;
    /// Scaled copy with max |a_ij| = 1 and entries below chop * max set to zero.
    TwoVarPolynomial normalized(double chop = 0.0) const;

    friend TwoVarPolynomial operator+(const TwoVarPolynomial& a, const TwoVarPolynomial& b);
    friend TwoVarPolynomial operator-(const TwoVarPolynomial& a, const TwoVarPolynomial& b);
    friend TwoVarPolynomial operator*(const TwoVarPolynomial& a, const TwoVarPolynomial& b);

private:
    Eigen::MatrixXcd a_;
};

/// Polynomial in w whose coefficients (ascending in w) are polynomials in (z, s).
using PolynomialOverZS = std::vector<TwoVarPolynomial>;

struct ResultantOptions {
    int max_total_degree = 24;
    double chop = 1e-14;
};

/// Res_w(P, Q) by evaluating Sylvester determinants on a product grid of roots of
/// unity and interpolating with an inverse 2D DFT. Result is normalized.
TwoVarPolynomial resultant_eliminate(const PolynomialOverZS& P, const PolynomialOverZS& Q,
                                     const ResultantOptions& opt = {});

/// Determinant of the Sylvester matrix of two univariate polynomials (formal degrees
/// taken from the coefficient vectors).
cplx sylvester_resultant(std::span<const cplx> p, std::span<const cplx> q);

} // namespace qdk
