#include <algorithm>
#include <cmath>
#include <numbers>

#include "qdk/error.hpp"
#include "qdk/rational.hpp"

namespace qdk {

cplx sylvester_resultant(std::span<const cplx> p, std::span<const cplx> q)
{
    const int m = static_cast<int>(p.size()) - 1;
    const int n = static_cast<int>(q.size()) - 1;
    if (m < 0 || n < 0)
        throw UsageError("sylvester_resultant: empty coefficient list");
    const int size = m + n;
    if (size == 0)
        return 1.0;
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(size, size);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k <= m; ++k)
            S(i, i + k) = p[static_cast<std::size_t>(m - k)];
    for (int i = 0; i < m; ++i)
        for (int k = 0; k <= n; ++k)
            S(n + i, i + k) = q[static_cast<std::size_t>(n - k)];
    return S.partialPivLu().determinant();
}

namespace {

struct DegreeBound {
    int z = 0;
    int s = 0;
    int total = 0;
};

DegreeBound coefficient_degrees(const PolynomialOverZS& P)
{
    DegreeBound d;
    for (const auto& c : P) {
        d.z = std::max(d.z, c.degree_z());
        d.s = std::max(d.s, c.degree_s());
        d.total = std::max(d.total, c.total_degree());
    }
    return d;
}

} // namespace

TwoVarPolynomial resultant_eliminate(const PolynomialOverZS& P, const PolynomialOverZS& Q, const ResultantOptions& opt)
{
    const int m = static_cast<int>(P.size()) - 1;
    const int n = static_cast<int>(Q.size()) - 1;
    if (m < 1 || n < 1)
        throw UsageError("resultant_eliminate: both polynomials must be nonconstant in w");

    const DegreeBound dp = coefficient_degrees(P);
    const DegreeBound dq = coefficient_degrees(Q);
    const int dz = n * dp.z + m * dq.z;
    const int ds = n * dp.s + m * dq.s;
    const int total = n * dp.total + m * dq.total;
    if (total > opt.max_total_degree)
        throw CapacityError("resultant_eliminate: total degree bound " + std::to_string(total) + " exceeds cap " +
                            std::to_string(opt.max_total_degree));

    const int Mz = dz + 1;
    const int Ms = ds + 1;
    const double two_pi = 2.0 * std::numbers::pi;
    Eigen::MatrixXcd values(Mz, Ms);
    double hadamard = 0.0;
    std::vector<cplx> pv(static_cast<std::size_t>(m + 1)), qv(static_cast<std::size_t>(n + 1));
    for (int a = 0; a < Mz; ++a) {
        const cplx z = std::polar(1.0, two_pi * a / Mz);
        for (int b = 0; b < Ms; ++b) {
            const cplx s = std::polar(1.0, two_pi * b / Ms);
            double pn = 0.0, qn = 0.0;
            for (int k = 0; k <= m; ++k) {
                pv[static_cast<std::size_t>(k)] = P[static_cast<std::size_t>(k)](z, s);
                pn += std::norm(pv[static_cast<std::size_t>(k)]);
            }
            for (int k = 0; k <= n; ++k) {
                qv[static_cast<std::size_t>(k)] = Q[static_cast<std::size_t>(k)](z, s);
                qn += std::norm(qv[static_cast<std::size_t>(k)]);
            }
            values(a, b) = sylvester_resultant(pv, qv);
            hadamard = std::max(hadamard, std::pow(pn, 0.5 * n) * std::pow(qn, 0.5 * m));
        }
    }

    if (values.cwiseAbs().maxCoeff() <= 1e-12 * hadamard)
        throw AlgebraError("resultant_eliminate: resultant vanishes identically (common factor in w)");

    Eigen::MatrixXcd coeffs = Eigen::MatrixXcd::Zero(Mz, Ms);
    for (int i = 0; i < Mz; ++i)
        for (int j = 0; j < Ms; ++j) {
            cplx acc = 0.0;
            for (int a = 0; a < Mz; ++a)
                for (int b = 0; b < Ms; ++b)
                    acc += values(a, b) * std::polar(1.0, -two_pi * (static_cast<double>(a) * i / Mz +
                                                                     static_cast<double>(b) * j / Ms));
            coeffs(i, j) = acc / static_cast<double>(Mz * Ms);
        }
    return TwoVarPolynomial(coeffs).normalized(opt.chop);
}

} // namespace qdk
