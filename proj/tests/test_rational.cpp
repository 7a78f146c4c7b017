#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "qdk/error.hpp"
#include "qdk/rational.hpp"

using namespace qdk;
using cplx = std::complex<double>;

namespace {

Polynomial poly(std::initializer_list<cplx> c) { return Polynomial(std::vector<cplx>(c)); }

bool has_root(const std::vector<Root>& rs, cplx v, int mult, double tol = 1e-10)
{
    return std::any_of(rs.begin(), rs.end(),
                       [&](const Root& r) { return std::abs(r.value - v) < tol && r.multiplicity == mult; });
}

double rel_coeff_error(const Polynomial& a, const Polynomial& b)
{
    double num = 0.0, den = 0.0;
    for (int k = 0; k <= std::max(a.degree(), b.degree()); ++k) {
        num = std::max(num, std::abs(a.coeff(k) - b.coeff(k)));
        den = std::max(den, std::abs(b.coeff(k)));
    }
    return num / den;
}

Polynomial reconstruct(const std::vector<Root>& rs, cplx lead)
{
    std::vector<cplx> all;
    for (const auto& r : rs)
        for (int k = 0; k < r.multiplicity; ++k)
            all.push_back(r.value);
    return Polynomial::from_roots(all, lead);
}

} // namespace

TEST_CASE("polynomial basics")
{
    Polynomial p = poly({1.0, 2.0, 0.0, 0.0});
    CHECK(p.degree() == 1);
    CHECK(Polynomial().is_zero());
    CHECK(Polynomial().degree() == -1);
    auto [q, r] = poly({-1.0, 0.0, 1.0}).divmod(poly({-1.0, 1.0}));
    CHECK(std::abs(q.coeff(0) - 1.0) < 1e-15);
    CHECK(std::abs(q.coeff(1) - 1.0) < 1e-15);
    CHECK(r.is_zero());
    CHECK_THROWS_AS(p.divmod(Polynomial()), UsageError);
    // p(1 + u) for p = z^2
    Polynomial s = poly({0.0, 0.0, 1.0}).taylor_shift(1.0);
    CHECK(std::abs(s.coeff(0) - 1.0) < 1e-15);
    CHECK(std::abs(s.coeff(1) - 2.0) < 1e-15);
    CHECK(std::abs(s.coeff(2) - 1.0) < 1e-15);
}

TEST_CASE("roots of small polynomials")
{
    auto r1 = roots(poly({-1.0, 0.0, 1.0}));
    CHECK(r1.size() == 2);
    CHECK(has_root(r1, 1.0, 1));
    CHECK(has_root(r1, -1.0, 1));

    auto r2 = roots(poly({0.0, 0.0, 1.0}));
    REQUIRE(r2.size() == 1);
    CHECK(has_root(r2, 0.0, 2));

    auto [a, b] = oracle::quadratic_roots(1.0, -2.0, 5.0);
    auto r3 = roots(poly({5.0, -2.0, 1.0}));
    CHECK(has_root(r3, a, 1));
    CHECK(has_root(r3, b, 1));

    CHECK_THROWS_AS(roots(Polynomial()), UsageError);
}

TEST_CASE("multiple roots are clustered")
{
    const cplx c(0.3, -0.2);
    std::vector<cplx> rs{c, c, c, 1.0};
    auto r = roots(Polynomial::from_roots(rs));
    CHECK(r.size() == 2);
    CHECK(has_root(r, c, 3, 1e-6));
    CHECK(has_root(r, 1.0, 1, 1e-9));
}

TEST_CASE("roots reconstruct random polynomials")
{
    std::mt19937_64 gen(20240611);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int deg = 1 + trial % 10;
        std::vector<cplx> c(static_cast<std::size_t>(deg + 1));
        for (auto& x : c)
            x = cplx(u(gen), u(gen));
        Polynomial p(c);
        auto rs = roots(p);
        CHECK(rel_coeff_error(reconstruct(rs, p.leading()), p) < 1e-8);
    }
}

TEST_CASE("partial fractions examples")
{
    // 1/(w(w-1)) = -1/w + 1/(w-1)
    RationalFunction f(poly({1.0}), poly({0.0, -1.0, 1.0}));
    auto pf = partial_fractions(f);
    CHECK(pf.polynomial_part.is_zero());
    REQUIRE(pf.parts.size() == 2);
    for (const auto& part : pf.parts) {
        REQUIRE(part.order() == 1);
        if (std::abs(part.pole) < 1e-12)
            CHECK(std::abs(part.coeffs[0] + 1.0) < 1e-12);
        else
            CHECK(std::abs(part.coeffs[0] - 1.0) < 1e-12);
    }

    // (w^2+1)/w = w + 1/w
    auto pf2 = partial_fractions(RationalFunction(poly({1.0, 0.0, 1.0}), poly({0.0, 1.0})));
    CHECK(pf2.polynomial_part.degree() == 1);
    CHECK(std::abs(pf2.polynomial_part.coeff(1) - 1.0) < 1e-15);
    REQUIRE(pf2.parts.size() == 1);
    CHECK(std::abs(pf2.parts[0].coeffs[0] - 1.0) < 1e-12);

    // r*(w) = 1/w + 0.3/w^2 for r = w + 0.3 w^2: double pole at 0
    auto rstar = reflect(RationalFunction::polynomial(poly({0.0, 1.0, 0.3})));
    auto pf3 = partial_fractions(rstar);
    CHECK(pf3.polynomial_part.is_zero());
    REQUIRE(pf3.parts.size() == 1);
    REQUIRE(pf3.parts[0].order() == 2);
    CHECK(std::abs(pf3.parts[0].pole) < 1e-14);
    CHECK(std::abs(pf3.parts[0].coeffs[0] - 1.0) < 1e-14);
    CHECK(std::abs(pf3.parts[0].coeffs[1] - 0.3) < 1e-14);
}

TEST_CASE("common roots are cancelled and logged")
{
    // (w-0.5)(w+2) / ((w-0.5) w)
    RationalFunction f(Polynomial::from_roots(std::vector<cplx>{0.5, -2.0}),
                       Polynomial::from_roots(std::vector<cplx>{0.5, 0.0}));
    CHECK(f.denominator().degree() == 1);
    CHECK(f.numerator().degree() == 1);
    CHECK(f.provenance().size() == 1);
    auto pf = partial_fractions(f);
    CHECK(pf.warnings.size() == 1);
    for (cplx z : {cplx(0.3, 0.1), cplx(-1.0, 2.0)})
        CHECK(std::abs(pf(z) - (z + 2.0) / z) < 1e-12);
}

TEST_CASE("partial fractions recombine for random rationals")
{
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int np = 1 + trial % 5;
        std::vector<cplx> poles;
        while (static_cast<int>(poles.size()) < np) {
            cplx p(2.0 * u(gen), 2.0 * u(gen));
            bool ok = true;
            for (cplx q : poles)
                ok = ok && std::abs(p - q) > 0.1;
            if (ok)
                poles.push_back(p);
        }
        if (trial % 3 == 0)
            poles.push_back(poles.front()); // one double pole
        std::vector<cplx> nc(static_cast<std::size_t>(trial % 7 + 1));
        for (auto& x : nc)
            x = cplx(u(gen), u(gen));
        RationalFunction f(Polynomial(nc), Polynomial::from_roots(poles));
        auto pf = partial_fractions(f);
        for (int s = 0; s < 100; ++s) {
            const cplx z(3.0 * u(gen), 3.0 * u(gen));
            const cplx exact = f(z);
            CHECK(std::abs(pf(z) - exact) <= 1e-9 * std::max(1.0, std::abs(exact)));
        }
    }
}

TEST_CASE("reflection")
{
    auto id = reflect(RationalFunction::polynomial(poly({0.0, 1.0})));
    CHECK(std::abs(id(cplx(0.3, 0.4)) - 1.0 / cplx(0.3, 0.4)) < 1e-15);

    auto r2 = reflect(RationalFunction::polynomial(poly({0.0, 1.0, 0.3})));
    const cplx w(0.2, -0.7);
    CHECK(std::abs(r2(w) - (1.0 / w + 0.3 / (w * w))) < 1e-14);

    const cplx c(0.2, 0.1);
    RationalFunction r(poly({0.0, 1.0}), poly({1.0, -c}));
    auto rs = reflect(r);
    for (int k = 0; k < 100; ++k) {
        const cplx z = std::polar(1.0, 2.0 * oracle::pi * k / 100.0 + 0.01);
        CHECK(std::abs(rs(z) - std::conj(r(1.0 / std::conj(z)))) < 1e-12);
        CHECK(std::abs(rs(z) - 1.0 / (z - std::conj(c))) < 1e-12);
    }
    auto back = reflect(rs);
    for (int k = 0; k < 256; ++k) {
        const cplx z = std::polar(1.0, 2.0 * oracle::pi * k / 256.0);
        CHECK(std::abs(back(z) - r(z)) < 1e-12);
        CHECK(std::abs(std::conj(r(z)) - rs(z)) < 1e-12);
    }
}

TEST_CASE("sylvester resultant of univariate polynomials")
{
    // Res(w - a, w - b) = b - a (leading coefficients 1, Sylvester sign convention a - b up to sign)
    std::vector<cplx> p{-2.0, 1.0}, q{-5.0, 1.0};
    CHECK(std::abs(std::abs(sylvester_resultant(p, q)) - 3.0) < 1e-14);
    // shared root -> zero
    std::vector<cplx> p2{2.0, -3.0, 1.0}, q2{-2.0, 1.0};
    CHECK(std::abs(sylvester_resultant(p2, q2)) < 1e-14);
}

namespace {

// |P| normalized against the scale of its coefficients
TwoVarPolynomial elim(const PolynomialOverZS& P, const PolynomialOverZS& Q) { return resultant_eliminate(P, Q); }

double proportional_error(const TwoVarPolynomial& got, const Eigen::MatrixXcd& want)
{
    // locate the largest entry of want and scale got to it
    Eigen::Index i0 = 0, j0 = 0;
    want.cwiseAbs().maxCoeff(&i0, &j0);
    const Eigen::MatrixXcd& g = got.coeffs();
    if (g.rows() != want.rows() || g.cols() != want.cols())
        return 1e300;
    const cplx s = want(i0, j0) / g(i0, j0);
    return (g * s - want).cwiseAbs().maxCoeff() / want.cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("resultant elimination")
{
    using T = TwoVarPolynomial;
    // P = z - w, Q = s w - 1  ->  z s - 1
    PolynomialOverZS P{T::term(1, 0), T::constant(-1.0)};
    PolynomialOverZS Q{T::constant(-1.0), T::term(0, 1)};
    auto R = elim(P, Q);
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(2, 2);
    want(0, 0) = -1.0;
    want(1, 1) = 1.0;
    CHECK(proportional_error(R, want) < 1e-13);
    CHECK(std::abs(R.coeffs().cwiseAbs().maxCoeff() - 1.0) < 1e-15);

    // P = z - w^2, Q = s - w  ->  z - s^2
    PolynomialOverZS P2{T::term(1, 0), T::constant(0.0), T::constant(-1.0)};
    PolynomialOverZS Q2{T::term(0, 1), T::constant(-1.0)};
    auto R2 = elim(P2, Q2);
    Eigen::MatrixXcd want2 = Eigen::MatrixXcd::Zero(2, 3);
    want2(1, 0) = 1.0;
    want2(0, 2) = -1.0;
    CHECK(proportional_error(R2, want2) < 1e-13);

    // common factor in w
    PolynomialOverZS P3{T::term(1, 0), T::constant(-1.0)};
    CHECK_THROWS_AS(elim(P3, P3), AlgebraError);

    // capacity
    ResultantOptions tight;
    tight.max_total_degree = 1;
    CHECK_THROWS_AS(resultant_eliminate(P2, Q2, tight), CapacityError);
}

TEST_CASE("resultant vanishes at constructed common roots")
{
    using T = TwoVarPolynomial;
    // P = w^2 - z w + s, Q = w^2 + s w - z - 1 (both monic in w)
    PolynomialOverZS P{T::term(0, 1), T::term(1, 0, -1.0), T::constant(1.0)};
    PolynomialOverZS Q{T::term(1, 0, -1.0) - T::constant(1.0), T::term(0, 1), T::constant(1.0)};
    auto R = resultant_eliminate(P, Q);
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    cplx ratio = 0.0;
    for (int k = 0; k < 20; ++k) {
        const cplx w0(u(gen), u(gen));
        // shared root w0: P(w0) = Q(w0) = 0 fixes s and z
        const cplx s = (w0 * w0 * w0 - w0 * w0 - w0) / (1.0 - w0 * w0);
        const cplx z = w0 * w0 + s * w0 - 1.0;
        CHECK(std::abs(R(z, s)) < 1e-8);

        // generic point: R is a fixed multiple of Q(w0) Q(w1) over the roots of P
        const cplx zz(u(gen), u(gen)), ss(u(gen), u(gen));
        auto [w1, w2] = oracle::quadratic_roots(1.0, -zz, ss);
        const cplx prod = (w1 * w1 + ss * w1 - zz - 1.0) * (w2 * w2 + ss * w2 - zz - 1.0);
        if (k == 0)
            ratio = R(zz, ss) / prod;
        else
            CHECK(std::abs(R(zz, ss) - ratio * prod) < 1e-10 * std::max(1.0, std::abs(ratio * prod)));
    }
}
