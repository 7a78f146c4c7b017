#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qdk/error.hpp"
#include "qdk/representative.hpp"

using namespace qdk;
using cplx = std::complex<double>;

namespace {

constexpr double pi = oracle::pi;

PlanarDomain disc() { return PlanarDomain(BoundaryCurve({0.0, 0.0, 1.0}, Orientation::ccw), {}); }
// e^{it} + 0.05 e^{-2it}
PlanarDomain perturbed() { return PlanarDomain(BoundaryCurve({0.05, 0.0, 0.0, 1.0, 0.0}, Orientation::ccw), {}); }
// e^{it} + 0.25 e^{-it}, not a quadrature domain
PlanarDomain ellipse() { return PlanarDomain(BoundaryCurve({0.25, 0.0, 1.0}, Orientation::ccw), {}); }
// degree three trig curve e^{it} + 0.1 e^{-it} + 0.05 e^{3it}
PlanarDomain cubic()
{
    std::vector<cplx> c(7, 0.0);
    c[2] = 0.1;
    c[4] = 1.0;
    c[6] = 0.05;
    return PlanarDomain(BoundaryCurve(c, Orientation::ccw), {});
}

std::shared_ptr<const BergmanData> bergman(const PlanarDomain& d, int N = 256)
{
    return std::make_shared<const BergmanData>(bergman_assemble(discretize(d, N)));
}

RationalFunction poly_map(std::vector<cplx> c) { return RationalFunction::polynomial(Polynomial(std::move(c))); }

const auto one = [](cplx) { return cplx(1.0); };
const auto ident = [](cplx z) { return z; };

} // namespace

TEST_CASE("fits on the disc are exact")
{
    auto bd = bergman(disc());
    auto f1 = fit_combination(bd, one, {0.0}, {0}, 2);
    REQUIRE(f1.combination.terms().size() == 1);
    CHECK(std::abs(f1.combination.terms()[0].coeff - pi) < 1e-10);
    CHECK(f1.residuals[0] < 1e-12);

    auto fz = fit_combination(bd, ident, {0.0}, {1}, 2);
    REQUIRE(fz.combination.terms().size() == 2);
    CHECK(std::abs(fz.combination.terms()[0].coeff) < 1e-10);
    CHECK(std::abs(fz.combination.terms()[1].coeff - pi / 2) < 1e-10);
    CHECK(fz.residuals[0] < 1e-10);
    CHECK(std::abs(fz.combination(cplx(0.3, 0.4)) - cplx(0.3, 0.4)) < 1e-10);

    CHECK_THROWS_AS(fit_combination(bd, one, {0.1, 0.1}, {0, 0}), UsageError);
    CHECK_THROWS_AS(fit_combination(bd, one, {2.0}, {0}), DomainError);
    CHECK_THROWS_AS(KernelCombination(bd, {{0.0, 0, 0.0}}), UsageError);
}

TEST_CASE("fit residual is monotone in nested node sets")
{
    auto bd = bergman(perturbed());
    const auto six = circle_nodes(bd->grid(), 6);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= six.size(); ++k) {
        std::vector<cplx> nodes(six.begin(), six.begin() + static_cast<std::ptrdiff_t>(k));
        auto f = fit_combination(bd, one, nodes, std::vector<int>(k, 0), 2);
        CHECK(f.objective <= prev * (1.0 + 1e-12));
        prev = f.objective;
    }

    // budgets 2, 4, 8, 16 on a circle are nested
    auto bc = bergman(cubic());
    std::vector<double> sup;
    for (std::size_t B : {2, 4, 8, 16}) {
        auto f = fit_combination(bc, one, circle_nodes(bc->grid(), B), std::vector<int>(B, 0), 2);
        if (!sup.empty())
            CHECK(f.residuals[0] <= sup.back());
        sup.push_back(f.residuals[0]);
    }
    CHECK(sup.back() * 10.0 <= sup.front());
}

TEST_CASE("quadrature defect")
{
    auto bd = bergman(disc());
    auto d0 = quadrature_defect(*bd, {0.0}, {0}, default_probes(bd->grid()));
    CHECK(std::abs(d0.coeffs[0] - pi) < 1e-10);
    CHECK(d0.residual < 1e-10);
    CHECK(d0.probe_count == 100);

    auto S = schwarz_from_rational(poly_map({0.0, 1.0, 0.3}));
    auto bq = bergman(S.domain());
    CHECK(quadrature_defect(*bq, {0.0}, {1}, default_probes(bq->grid())).residual < 1e-6);

    // negative control on a fixed probe set
    auto b256 = bergman(ellipse(), 256);
    auto b128 = bergman(ellipse(), 128);
    const auto probes = default_probes(b256->grid());
    const double e256 = quadrature_defect(*b256, {0.0}, {1}, probes).residual;
    const double e128 = quadrature_defect(*b128, {0.0}, {1}, probes).residual;
    CHECK(e256 > 1e-2);
    CHECK(e128 > 1e-2);
    CHECK(std::abs(e256 - e128) < 1e-6 * e256);
}

TEST_CASE("identity map on rational-image quadrature domains")
{
    for (double R : {1.0, 1.5}) {
        auto S = schwarz_from_rational(poly_map({0.0, R}));
        auto rep = verify_identity_map(S, bergman(S.domain()));
        CHECK(rep.passed);
        REQUIRE(rep.coeffs_one.size() == 1);
        CHECK(std::abs(rep.coeffs_one[0] - pi * R * R) < 1e-8);
        REQUIRE(rep.coeffs_z.size() == 2);
        CHECK(std::abs(rep.coeffs_z[1] - pi * R * R * R * R / 2) < 1e-8);
        CHECK(rep.quotient_error < 1e-6);
    }
    for (auto r : {poly_map({0.0, 1.0, 0.3}), RationalFunction(Polynomial({0.0, 1.0}), Polynomial({1.0, -0.4}))}) {
        auto S = schwarz_from_rational(r);
        auto rep = verify_identity_map(S, bergman(S.domain()));
        CHECK(rep.probe_count == 100);
        CHECK(rep.one_residual < 1e-6);
        CHECK(rep.z_residual < 1e-6);
        CHECK(rep.quotient_error < 1e-6);
        CHECK(rep.quadrature_mismatch < 1e-8);
        CHECK(rep.passed);
    }
}

TEST_CASE("representative map of the disc is the identity")
{
    auto bd = bergman(disc());
    RepresentativeOptions opt;
    opt.budget = 1;
    auto m = representative_map(bd, opt);
    CHECK(m.deviation < 1e-10);
    CHECK(m.certificate.passed);
    CHECK(std::abs(m(cplx(0.2, -0.5)) - cplx(0.2, -0.5)) < 1e-10);
    const auto& c = m.image.outer().coeffs();
    const auto K = m.image.outer().max_frequency();
    for (int k = -K; k <= K; ++k)
        CHECK(std::abs(c[static_cast<std::size_t>(k + K)] - (k == 1 ? 1.0 : 0.0)) < 1e-10);
}

TEST_CASE("representative map of a perturbed disc")
{
    auto bd = bergman(perturbed());
    auto m8 = representative_map(bd);
    CHECK(m8.certificate.passed);
    CHECK(m8.certificate.denominator_zeros == 0);
    CHECK(m8.certificate.min_winding == 1);
    CHECK(m8.certificate.max_winding == 1);
    CHECK(m8.certificate.denominator_margin > 0.5);
    CHECK(m8.deviation < 0.02);

    RepresentativeOptions opt;
    opt.budget = 16;
    auto m16 = representative_map(bd, opt);
    CHECK(m16.deviation < m8.deviation);

    // the image is a quadrature domain whose nodes are g at the zeros of Lambda_2
    const auto nodes = image_quadrature_nodes(m8);
    CHECK(nodes.size() == 30);
    std::vector<cplx> in;
    for (const auto& p : nodes)
        in.push_back(p.second);
    auto ibd = bergman_assemble(discretize(m8.image, 256));
    auto defect = quadrature_defect(ibd, in, std::vector<int>(in.size(), 0), default_probes(ibd.grid()));
    CHECK(defect.residual < 1e-4);

    // injectivity spot check
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.1, 1.1);
    std::vector<cplx> pts;
    while (pts.size() < 1000) {
        const cplx z(u(gen), u(gen));
        if (distance_to_boundary(bd->grid(), z) > 0.1 && winding_number(bd->grid(), z) == 1)
            pts.push_back(z);
    }
    double closest = 1e9;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
        closest = std::min(closest, std::abs(m8(pts[i]) - m8(pts[i + 1])) / std::abs(pts[i] - pts[i + 1]));
    CHECK(closest > 1e-9);

    // quotient invariance
    const cplx s(0.3, -2.0);
    const auto n2 = m8.numerator.scaled(s), d2 = m8.denominator.scaled(s);
    for (cplx z : {cplx(0.1, 0.2), cplx(-0.5, 0.3)})
        CHECK(std::abs(n2(z) / d2(z) - m8(z)) < 1e-13);

    RepresentativeOptions bad;
    bad.order = 0;
    CHECK_THROWS_AS(representative_map(bd, bad), ConsistencyError);
}

TEST_CASE("Gustafsson maps of the disc")
{
    auto g1 = gustafsson_check(poly_map({0.0, 1.0}));
    CHECK(g1.passed);
    REQUIRE(g1.derivative_coeffs.size() == 1);
    CHECK(std::abs(g1.derivative_coeffs[0] - pi) < 1e-14);
    REQUIRE(g1.product_coeffs.size() == 2);
    CHECK(std::abs(g1.product_coeffs[1] - pi / 2) < 1e-14);

    auto g2 = gustafsson_check(poly_map({0.0, 1.0, 0.3}));
    CHECK(g2.passed);
    CHECK(std::abs(g2.derivative_coeffs[0] - pi) < 1e-14);
    CHECK(std::abs(g2.derivative_coeffs[1] - 0.3 * pi) < 1e-14);
    REQUIRE(g2.product_coeffs.size() == 4);
    CHECK(std::abs(g2.product_coeffs[1] - pi / 2) < 1e-14);
    CHECK(std::abs(g2.product_coeffs[2] - 0.9 * pi / 6) < 1e-14);
    CHECK(std::abs(g2.product_coeffs[3] - 0.18 * pi / 24) < 1e-14);

    // random injective polynomials up to degree 6: small higher coefficients
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<cplx> c{0.0, 1.0};
        for (int k = 2; k <= 2 + trial % 5; ++k)
            c.emplace_back(0.5 * u(gen) / (k * k), 0.5 * u(gen) / (k * k));
        auto rep = gustafsson_check(poly_map(c));
        CHECK(rep.reconstruction_error < 1e-10);
        CHECK(rep.quotient_error < 1e-9);
        // the K^{(m)}(., 0) coefficient is pi times the z^m coefficient of r' over (m+1)!
        const auto dp = Polynomial(c).derivative();
        for (int m = 0; m <= dp.degree(); ++m)
            CHECK(rep.derivative_coeffs[static_cast<std::size_t>(m)] ==
                  pi * dp.coeff(m) / std::tgamma(m + 2.0));
    }

    // the series identity against the computed disc kernel
    auto bd = bergman(disc());
    auto g = gustafsson_check(poly_map({0.0, 1.0, 0.2, 0.05}));
    for (cplx z : {cplx(0.3, 0.1), cplx(-0.2, 0.6)}) {
        cplx a = 0.0;
        for (std::size_t m = 0; m < g.derivative_coeffs.size(); ++m)
            a += g.derivative_coeffs[m] * bergman_derivative(*bd, z, 0.0, static_cast<int>(m));
        CHECK(std::abs(a - (1.0 + 0.4 * z + 0.15 * z * z)) < 1e-10);
    }

    CHECK_THROWS_AS(gustafsson_check(poly_map({0.0, 1.0, 0.7})), GeometryError);
    CHECK_THROWS_AS(gustafsson_check(poly_map({0.0, 1.0, 0, 0, 0, 0, 0, 0.01})), CapacityError);
}

TEST_CASE("rational model of the Bergman kernel")
{
    auto S = schwarz_from_rational(poly_map({0.0, 1.0}));
    auto bd = bergman(S.domain());
    auto rep = rational_model_fit(S, *bd, cplx(0.3, 0.1), 2, 2);
    CHECK(rep.fit_residual < 1e-8);
    CHECK(rep.probe_residual < 1e-8);

    // report mode on a non-disc quadrature domain: run and record, no threshold
    auto Sq = schwarz_from_rational(poly_map({0.0, 1.0, 0.3}));
    auto bq = bergman(Sq.domain());
    auto rq = rational_model_fit(Sq, *bq, cplx(0.3, 0.1), 4, 4);
    CHECK(std::isfinite(rq.probe_residual));
    MESSAGE("degree (4,4) model on w + 0.3 w^2: residual " << rq.probe_residual);
}
