#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdk/geometry.hpp"

namespace qdk {

/// Kerzman-Stein boundary integral equation for the Szego kernel on one grid:
///
///   S(z,a) - int A(z,w) S(w,a) ds_w = conj(H(a,z)),
///   H(a,z) = T(z) / (2 pi i (z - a)),  A(z,w) = H(z,w) - conj(H(w,z)),
///
/// discretized by the trapezoid rule and symmetrized with sqrt(ds) weights so the
/// system matrix is identity minus a skew-hermitian matrix. The LU factorization is
/// built once; solutions for each (a, m) are cached.
class SzegoSolver {
public:
    explicit SzegoSolver(BoundaryGrid grid);

    const BoundaryGrid& grid() const { return grid_; }
    /// Boundary values of d^m/d(conj a)^m S(z_k, a). Thread safe.
    const std::vector<cplx>& boundary(cplx a, int m = 0) const;
    /// 1-norm condition estimate of the symmetrized system.
    double condition() const { return condition_; }

private:
    BoundaryGrid grid_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    std::vector<double> sqrt_weight_;
    double condition_ = 0.0;

    mutable std::shared_mutex mutex_;
    mutable std::map<std::tuple<double, double, int>, std::shared_ptr<const std::vector<cplx>>> cache_;
};

struct SzegoData {
    std::shared_ptr<const SzegoSolver> solver;
    cplx a;
    BoundaryFunction S; // S(z_k, a)
    BoundaryFunction L; // L(z_k, a)
    double S_aa = 0.0;
    std::vector<cplx> zeros;

    const BoundaryGrid& grid() const { return solver->grid(); }
    /// Interior values.
    cplx szego(cplx z) const;
    cplx garabedian(cplx z) const;
};

/// Solve for S(., a). Throws ProximityError when a is within two node spacings of the
/// boundary and DomainError when a is outside.
SzegoData szego_solve(std::shared_ptr<const SzegoSolver> solver, cplx a);
SzegoData szego_solve(const BoundaryGrid& grid, cplx a);

/// L(z_k, a) = i conj(S(z_k, a)) / T(z_k).
BoundaryFunction garabedian_boundary(const SzegoData& sz);

struct AhlforsMap {
    std::shared_ptr<const SzegoSolver> solver;
    cplx a;
    BoundaryFunction boundary; // f_a(z_k) = S / L
    cplx derivative_at_a;      // f_a'(a) from the Cauchy derivative formula

    cplx operator()(cplx z) const;
};

AhlforsMap ahlfors_map(const SzegoData& sz);

/// The n-1 zeros of S(., a) in the domain: moments of the logarithmic derivative give
/// the power sums, Newton's identities give a polynomial with those roots, then each root
/// is refined by Newton's method on the interior evaluator.
std::vector<cplx> szego_zeros(const SzegoData& sz);

/// Harmonic measures omega_j of the holes (curves j = 1..n-1) written as
/// Re(C mu_j) + sum_h a_jh log|z - p_h| with a real density mu_j and one point p_h inside
/// each hole, plus F_j' = 2 d(omega_j)/dz.
struct HarmonicBasis {
    std::shared_ptr<const BoundaryGrid> grid;
    std::vector<cplx> hole_points;
    std::vector<std::vector<double>> density;      // mu_j
    std::vector<std::vector<double>> log_coeffs;   // a_jh
    std::vector<std::vector<cplx>> cauchy_trace;   // C+ mu_j at the nodes
    std::vector<std::vector<cplx>> cauchy_deriv;   // (C mu_j)' at the nodes
    std::vector<std::vector<double>> omega_nodes;  // omega_j at the nodes
    std::vector<std::vector<cplx>> fprime_nodes;   // F_j' at the nodes
    Eigen::MatrixXd gram;                          // <F_i', F_k'> in the Bergman space

    int size() const { return static_cast<int>(density.size()); }
    double omega(int j, cplx z) const;
    /// d^m/dz^m F_j'(z) at an interior point.
    cplx fprime(int j, cplx z, int m = 0) const;
};

/// Throws UsageError for a grid that is not from this solver family; returns an empty
/// basis for simply connected domains.
HarmonicBasis harmonic_measures(const BoundaryGrid& grid);

/// Bergman kernel K(z,w) = 4 pi S(z,w)^2 + sum lambda_ij F_i'(z) conj(F_j'(w)). The
/// coefficients lambda come from the reproducing identity against each F_k', reduced to
/// boundary integrals and imposed at a few interior probe points in least squares.
class BergmanData {
public:
    BergmanData(std::shared_ptr<const SzegoSolver> solver, HarmonicBasis basis);

    const BoundaryGrid& grid() const { return solver_->grid(); }
    const SzegoSolver& solver() const { return *solver_; }
    std::shared_ptr<const SzegoSolver> solver_ptr() const { return solver_; }
    const HarmonicBasis& basis() const { return basis_; }
    const Eigen::MatrixXcd& lambda() const { return lambda_; }
    const std::vector<cplx>& probes() const { return probes_; }
    /// Relative least-squares residual of the lambda system.
    double lambda_residual() const { return lambda_residual_; }

    /// K^{(m)}(z_k, w) = d^m/d(conj w)^m K at every boundary node.
    std::vector<cplx> boundary_values(cplx w, int m = 0) const;
    /// K^{(m)}(z, w) for interior z and w.
    cplx operator()(cplx z, cplx w, int m = 0) const;
    /// Same for many z at once.
    std::vector<cplx> values(std::span<const cplx> zs, cplx w, int m = 0) const;

private:
    std::shared_ptr<const SzegoSolver> solver_;
    HarmonicBasis basis_;
    Eigen::MatrixXcd lambda_;
    std::vector<cplx> probes_;
    double lambda_residual_ = 0.0;
};

BergmanData bergman_assemble(std::shared_ptr<const SzegoSolver> solver, const HarmonicBasis& basis);
/// Convenience: build solver and basis for the grid.
BergmanData bergman_assemble(const BoundaryGrid& grid);

/// K^{(m)}(z,w). Exact differentiation of the Szego right-hand side in conj(w) is used,
/// so m is limited only by m <= 8.
cplx bergman_derivative(const BergmanData& bd, cplx z, cplx w, int m);
/// Same quantity by the Cauchy integral of w -> conj(K(z,w)) over a circle of radius
/// min(dist(w)/2, 0.1) about w; kept as an independent check.
cplx bergman_derivative_circle(const BergmanData& bd, cplx z, cplx w, int m, int samples = 32);

/// Boundary trace of Lambda^{(m)}(z_k, w) = -conj(K^{(m)}(z_k, w)) conj(T_k) / T_k.
std::vector<cplx> lambda_boundary(const BergmanData& bd, cplx w, int m = 0);

struct LambdaReport {
    cplx w;
    int order = 0;
    /// sup over nodes of the exterior Cauchy part of Lambda^{(m)} minus its pole model,
    /// divided by sup |Lambda^{(m)}|.
    double residual = 0.0;
};

LambdaReport lambda_boundary_check(const BergmanData& bd, cplx w, int m = 0);

} // namespace qdk
