#pragma once

#include <vector>

#include "qdk/geometry.hpp"
#include "qdk/rational.hpp"

namespace qdk {

struct SchwarzPole {
    cplx node;      // pole of S in the domain, r(q)
    cplx preimage;  // q, pole of r* in the unit disc
    int order = 1;
};

/// Schwarz function of the image of the unit disc under an injective rational map r:
/// S(r(w)) = r*(w), continued into the domain through w = r^{-1}(z).
class SchwarzFunction {
public:
    SchwarzFunction(RationalFunction r, PlanarDomain domain);

    const RationalFunction& map() const { return r_; }
    const RationalFunction& reflection() const { return rstar_; }
    const PlanarDomain& domain() const { return domain_; }
    const std::vector<SchwarzPole>& poles() const { return poles_; }

    /// w with r(w) = z and |w| < 1, by Newton's method from the nearest tabulated start.
    /// Throws DomainError when z has no preimage in the disc and NumericalError when
    /// Newton fails to converge.
    cplx preimage(cplx z) const;
    cplx operator()(cplx z) const;
    cplx derivative(cplx z) const;
    /// Values at the nodes of a grid built from domain(); the node parameters t_k map to
    /// w_k = exp(i t_k).
    std::vector<cplx> boundary_values(const BoundaryGrid& grid) const;
    std::vector<cplx> boundary_derivative(const BoundaryGrid& grid) const;

private:
    RationalFunction r_;
    RationalFunction rstar_;
    PlanarDomain domain_;
    std::vector<SchwarzPole> poles_;
    std::vector<cplx> start_w_;
    std::vector<cplx> start_z_;
};

/// Certifies r (no poles on the closed disc, simple boundary image winding once about
/// r(0)) and builds S. Errors are GeometryError.
SchwarzFunction schwarz_from_rational(const RationalFunction& r);

/// Principal parts of S at its poles by Laurent inversion: the local inverse of r is a
/// reverted power series and r* is expanded as a Laurent series about each pole of r*.
std::vector<PrincipalPart> schwarz_principal_parts(const SchwarzFunction& S, int series_order = 12);

struct QuadratureNode {
    cplx node;
    std::vector<cplx> coeffs; // c_{j,0..n_j}
};

/// Quadrature identity int_Omega f dA = sum_j sum_m c_{jm} f^{(m)}(w_j).
struct QuadratureData {
    std::vector<QuadratureNode> nodes;
    /// Relative residual of the least-squares fit to the monomial moments.
    double fit_residual = 0.0;
    /// Largest relative error on the held-out monomials against the boundary area oracle.
    double holdout_error = 0.0;

    /// Right-hand side for a polynomial f (ascending coefficients).
    cplx apply(const Polynomial& f) const;
};

/// Residue functional: int z^d dA = pi * sum Res(S z^d). The coefficients are fitted
/// by least squares on degrees 0..sum(n_j + 1) + M and the symbolic values c_{jm} =
/// pi P_{m+1} / m! (P from the principal parts) are used as a cross-check.
QuadratureData quadrature_from_schwarz(const SchwarzFunction& S, int M = 4, int n_points = 256);

/// (1/2i) closed-integral of conj(z) f dz, i.e. the area integral of a holomorphic f.
cplx area_integral(const BoundaryGrid& grid, const BoundaryFunction& f);
cplx area_integral(const BoundaryGrid& grid, int monomial_degree);

/// Qhat(z) = (1/2 pi i) closed-integral of conj(w) / (w - z) dw.
cplx q_function(const BoundaryGrid& grid, cplx z);

struct SchwarzDecomposition {
    std::vector<PrincipalPart> principal_parts;
    std::vector<cplx> probes;
    double residual = 0.0; // sup |S - p - Qhat| over probes
    /// Largest mismatch between the symbolic principal-part coefficients and contour
    /// residue probes around each pole.
    double residue_probe_error = 0.0;

    cplx p(cplx z) const;
};

/// Throws ConsistencyError when a contour residue probe disagrees with the symbolic
/// pole order.
SchwarzDecomposition schwarz_decompose(const SchwarzFunction& S, const BoundaryGrid& grid, std::size_t probes = 50);

/// Resultant of z D(w) - N(w) and s D*(w) - N*(w) in w, where r = N/D and r* = N*/D*.
TwoVarPolynomial boundary_algebraic_curve(const SchwarzFunction& S);

struct UnitDerivativeReport {
    double modulus_residual = 0.0; // sup | |S'(z_k)| - 1 |
    double tangent_residual = 0.0; // sup | T - conj(S' T) |
};

UnitDerivativeReport schwarz_unit_derivative_check(const SchwarzFunction& S, const BoundaryGrid& grid);

} // namespace qdk
