#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qdk/kernels.hpp"
#include "qdk/quadrature.hpp"

namespace qdk {

struct KernelTerm {
    cplx node;
    int order = 0;
    cplx coeff;
};

/// A(z) = sum c_jm K^{(m)}(z, b_j). The boundary trace is formed once; interior values
/// come from the Cauchy integral of the trace.
class KernelCombination {
public:
    /// Throws UsageError when every coefficient is zero or a node is not interior.
    KernelCombination(std::shared_ptr<const BergmanData> bd, std::vector<KernelTerm> terms);

    const std::vector<KernelTerm>& terms() const { return terms_; }
    const BergmanData& bergman() const { return *bd_; }
    std::shared_ptr<const BergmanData> bergman_ptr() const { return bd_; }
    const std::vector<cplx>& boundary_values() const { return trace_; }

    cplx operator()(cplx z) const;
    cplx derivative(cplx z) const;
    KernelCombination scaled(cplx s) const;

    /// Trace of sum conj(c_jm) Lambda^{(m)}(., b_j) = -conj(A) conj(T) / T.
    std::vector<cplx> lambda_boundary() const;
    /// Same function in the interior: the pole model at the nodes plus the Cauchy
    /// integral of the remainder. Returns {value, derivative}.
    std::pair<cplx, cplx> lambda_value(cplx z) const;
    /// Pole order of the Lambda combination at each distinct node.
    std::vector<std::pair<cplx, int>> lambda_poles() const;

private:
    std::shared_ptr<const BergmanData> bd_;
    std::vector<KernelTerm> terms_;
    std::vector<cplx> trace_;
    std::vector<cplx> lambda_remainder_;
};

struct FitReport {
    KernelCombination combination;
    /// sup over boundary nodes of |d^k/dt^k (A - h)| for k = 0..q.
    std::vector<double> residuals;
    /// sqrt of the least-squares objective sum_k sum_{d<=q} |d^d/dt^d (A - h)(z_k)|^2.
    double objective = 0.0;
    int rank = 0;
    int columns = 0;
};

/// Truncated-SVD least squares (singular values below 1e-12 of the largest are dropped)
/// on the boundary Sobolev-q norm. orders[j] is the highest derivative used at nodes[j].
FitReport fit_combination(std::shared_ptr<const BergmanData> bd, const std::function<cplx(cplx)>& target,
                          const std::vector<cplx>& nodes, const std::vector<int>& orders, int sobolev_order = 2);

struct DefectReport {
    std::vector<cplx> nodes;
    std::vector<int> orders;
    std::vector<cplx> coeffs; // column order: node-major, derivative order minor
    double residual = 0.0;    // sup over probes of |1 - sum c K^{(m)}(z, w_j)|
    int rank = 0;
    std::size_t probe_count = 0;
};

/// Default probe set: interior_probes with a margin of a tenth of the inradius (at least
/// four node spacings when the domain allows it).
std::vector<cplx> default_probes(const BoundaryGrid& grid, std::size_t count = 100);

/// Least-squares fit of 1 by kernel derivatives at the given nodes, on the probe set.
DefectReport quadrature_defect(const BergmanData& bd, const std::vector<cplx>& nodes, const std::vector<int>& orders,
                               const std::vector<cplx>& probes);

struct InjectivityCertificate {
    bool passed = false;
    int denominator_zeros = 0;     // argument-principle count of zeros of K2 in the domain
    double denominator_margin = 0; // min |K2| over boundary nodes and probes
    bool image_simple = false;     // image curves simple and correctly nested
    int min_winding = 0;           // winding of g(boundary) about g(p) over probes p
    int max_winding = 0;
    std::size_t probe_count = 0;
    std::string failure;
};

struct RepresentativeOptions {
    std::size_t budget = 8;
    int order = 2; // highest kernel derivative used at each node
    int sobolev_order = 2;
    double tolerance = 0.02;
    std::optional<cplx> anchor;    // default: default_anchor()
    std::optional<double> radius;  // default: half the inradius
    std::size_t certificate_probes = 200;
};

struct RepresentativeMap {
    KernelCombination numerator;   // approximates z
    KernelCombination denominator; // approximates 1
    std::vector<double> numerator_residuals;
    std::vector<double> denominator_residuals;
    double deviation = 0.0; // sup over boundary nodes of |g(z) - z|
    InjectivityCertificate certificate;
    std::vector<cplx> image_boundary; // g(z_k)
    PlanarDomain image;

    cplx operator()(cplx z) const;
    const BoundaryGrid& grid() const { return numerator.bergman().grid(); }
};

/// Nodes equally spaced on a circle about the anchor, both combinations fitted with
/// derivative orders 0..order at every node, the quotient certified injective and its
/// image trig-fitted. Throws ConsistencyError when the certificate fails or the deviation
/// exceeds the tolerance.
RepresentativeMap representative_map(std::shared_ptr<const BergmanData> bd, const RepresentativeOptions& opt = {});

/// Area centroid when it lies at least 3/4 of the inradius from the boundary, otherwise
/// the deepest lattice point.
cplx default_anchor(const BoundaryGrid& grid);

/// Node placement used by representative_map.
std::vector<cplx> circle_nodes(const BoundaryGrid& grid, std::size_t count, std::optional<cplx> anchor = {},
                               std::optional<double> radius = {});

/// The image g(Omega) has Schwarz function with S(g(z)) = Lambda_1(z) / Lambda_2(z); its
/// poles are g at the zeros of Lambda_2 in the domain. Returned as (zero, g(zero)).
std::vector<std::pair<cplx, cplx>> image_quadrature_nodes(const RepresentativeMap& map);

struct IdentityMapReport {
    std::vector<cplx> nodes;
    std::vector<int> orders_one; // pole order - 1
    std::vector<int> orders_z;   // 2 * pole order - 1
    std::vector<cplx> coeffs_one;
    std::vector<cplx> coeffs_z;
    double one_residual = 0.0;      // sup over probes of |1 - K2|
    double z_residual = 0.0;        // sup over probes of |z - K1|
    double quotient_error = 0.0;    // sup over probes of |K1/K2 - z|
    double quadrature_mismatch = 0; // max |coeffs_one - conj(c_jm)| against the residue data
    std::size_t probe_count = 0;
    bool passed = false;
};

/// Check on a rational-image quadrature domain: 1 and z are exact kernel
/// combinations at the poles of S. bd must be built on a grid of S.domain().
IdentityMapReport verify_identity_map(const SchwarzFunction& S, std::shared_ptr<const BergmanData> bd,
                                      double tol = 1e-6, std::size_t probes = 100);

struct GustafssonReport {
    /// r' = sum a_m K^{(m)}(z,0) and r r' = sum b_m K^{(m)}(z,0) on the disc.
    std::vector<cplx> derivative_coeffs;
    std::vector<cplx> product_coeffs;
    double reconstruction_error = 0.0;
    double quotient_error = 0.0;
    bool passed = false;
};

/// Polynomial Gustafsson map r of the unit disc, degree <= 6. Uses the disc identity
/// K^{(m)}(z,0) = (m+1)! z^m / pi. Throws GeometryError for a non-injective r.
GustafssonReport gustafsson_check(const RationalFunction& r, std::size_t samples = 256);

struct RationalModelReport {
    TwoVarPolynomial numerator;
    TwoVarPolynomial denominator;
    double fit_residual = 0.0; // smallest singular value of the projected system
    double probe_residual = 0.0; // sup |K - P/Q| / sup |K| over interior probes
};

/// Fit K(., w0) by P(z, S(z)) / Q(z, S(z)) with deg_z, deg_s bounds on both, from the
/// boundary samples where S(z) = conj(z). Q is normalized on the samples, which rules out
/// multiples of the boundary curve.
RationalModelReport rational_model_fit(const SchwarzFunction& S, const BergmanData& bd, cplx w0, int deg_z = 2,
                                       int deg_s = 2, std::size_t probes = 50);

} // namespace qdk
