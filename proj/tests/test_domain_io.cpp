#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qdk/domain_io.hpp"
#include "qdk/error.hpp"
#include "qdk/verify.hpp"

using namespace qdk;

namespace {

const std::filesystem::path data_dir = QDK_TEST_DATA;

double coeff_gap(const PlanarDomain& a, const PlanarDomain& b)
{
    REQUIRE(a.connectivity() == b.connectivity());
    double gap = 0.0;
    for (int c = 0; c < a.connectivity(); ++c) {
        const auto& ca = a.curves()[static_cast<std::size_t>(c)];
        const auto& cb = b.curves()[static_cast<std::size_t>(c)];
        REQUIRE(ca.coeffs().size() == cb.coeffs().size());
        CHECK(ca.orientation() == cb.orientation());
        for (std::size_t k = 0; k < ca.coeffs().size(); ++k)
            gap = std::max(gap, std::abs(ca.coeffs()[k] - cb.coeffs()[k]));
    }
    return gap;
}

} // namespace

TEST_CASE("trig specs round-trip")
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        // small random perturbations of a circle with a circular hole
        std::vector<cplx> outer(7, 0.0), hole(5, 0.0);
        outer[4] = 1.0;
        hole[2] = cplx(0.1 * u(gen), 0.1 * u(gen));
        hole[1] = 0.3;
        for (std::size_t k : {0u, 1u, 2u, 5u, 6u})
            outer[k] = cplx(0.02 * u(gen), 0.02 * u(gen));
        hole[0] = cplx(0.01 * u(gen), 0.01 * u(gen));
        PlanarDomain d(BoundaryCurve(outer, Orientation::ccw), {BoundaryCurve(hole, Orientation::cw, 1)});
        const std::string text = domain_to_json(d).dump();
        const PlanarDomain back = parse_domain_text(text);
        CHECK(coeff_gap(d, back) <= 1e-15);
        CHECK(domain_to_json(back).dump() == text);
    }
}

TEST_CASE("rational image specs round-trip")
{
    for (const char* name : {"disc.json", "quadratic.json", "mobius.json"}) {
        const PlanarDomain d = load_domain(data_dir / name);
        REQUIRE(d.source_map());
        const json j = domain_to_json(d);
        CHECK(j["type"] == "rational_image");
        const PlanarDomain back = parse_domain(j);
        REQUIRE(back.source_map());
        const auto& r1 = *d.source_map();
        const auto& r2 = *back.source_map();
        CHECK(r1.numerator().coeffs() == r2.numerator().coeffs());
        CHECK(r1.denominator().coeffs() == r2.denominator().coeffs());
        CHECK(coeff_gap(d, back) <= 1e-15);
    }
    // a denominator with a non-unit leading term comes back monic
    auto m = parse_domain_text(R"({"type":"rational_image","numerator":[[0,0],[2,0]],"denominator":[[2,0],[-0.8,0]]})");
    auto back = parse_domain(domain_to_json(m));
    CHECK(std::abs(back.source_map()->denominator().leading() - 1.0) < 1e-15);
    CHECK(std::abs((*back.source_map())(0.3) - (*m.source_map())(0.3)) < 1e-15);
}

TEST_CASE("malformed specs raise parse errors with a location")
{
    CHECK_THROWS_AS(load_domain(data_dir / "malformed.json"), ParseError);
    CHECK_THROWS_AS(load_domain(data_dir / "no_such_file.json"), ParseError);
    CHECK_THROWS_AS(parse_domain_text("{}"), ParseError);
    CHECK_THROWS_AS(parse_domain_text(R"({"type":"spline"})"), ParseError);
    CHECK_THROWS_AS(parse_domain_text(R"({"type":"trig","curves":[]})"), ParseError);
    CHECK_THROWS_AS(parse_domain_text(R"({"type":"trig","curves":[{"coeffs":[[1,0],[0,0]]}]})"), ParseError);
    CHECK_THROWS_AS(parse_domain_text(R"({"type":"trig","curves":[{"coeffs":[[0,0],[0,0],"x"]}]})"), ParseError);
    CHECK_THROWS_AS(parse_domain_text(R"({"type":"trig","curves":[{"coeffs":[0,0,1],"orientation":"up"}]})"),
                    ParseError);
    try {
        parse_domain_text(R"({"type":"trig","curves":[{"coeffs":[0,0,1]},{"coeffs":[[0,0],[1,2,3],0]}]})");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("domain.curves[1].coeffs[1]") != std::string::npos);
    }
    // well-formed but geometrically invalid: clockwise outer curve
    CHECK_THROWS_AS(parse_domain_text(R"({"type":"trig","curves":[{"coeffs":[1,0,0],"orientation":"ccw"}]})"),
                    GeometryError);
}

TEST_CASE("quadrature and polynomial records round-trip")
{
    QuadratureData q;
    q.nodes.push_back({cplx(0.1, -0.2), {cplx(3.7070793312, 0.0), cplx(0.94247779607693793, 1e-17)}});
    q.nodes.push_back({cplx(-0.5), {cplx(1.0 / 3.0, 2.0 / 7.0)}});
    q.fit_residual = 1.2345678901234567e-13;
    const auto back = quadrature_from_json(json::parse(quadrature_to_json(q).dump()));
    REQUIRE(back.nodes.size() == 2);
    CHECK(back.nodes[0].node == q.nodes[0].node);
    CHECK(back.nodes[0].coeffs == q.nodes[0].coeffs);
    CHECK(back.nodes[1].coeffs == q.nodes[1].coeffs);
    CHECK(back.fit_residual == q.fit_residual);

    Eigen::MatrixXcd a(2, 3);
    a << 1.0, cplx(0, 0.1), 0.0, 0.5, -1.0 / 3.0, cplx(2, 2);
    const TwoVarPolynomial P(a);
    const auto P2 = two_var_from_json(json::parse(two_var_to_json(P).dump()));
    CHECK(P2.coeffs() == P.coeffs());
    CHECK_THROWS_AS(two_var_from_json(json::parse(R"({"coeffs":[[1],[1,2]]})")), ParseError);
}

TEST_CASE("format_double is lossless")
{
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(gen) * std::pow(10.0, i % 40 - 20);
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("verify config parsing")
{
    auto c = load_verify_config(data_dir / "verify_ellipse_defect.json");
    CHECK(c.domain_label == "ellipse.json");
    CHECK(c.n_points == 256);
    REQUIRE(c.require_defect);
    CHECK(c.require_defect->tolerance == 1e-6);
    CHECK(c.require_defect->orders == std::vector<int>{1});

    CHECK_THROWS_AS(load_verify_config(data_dir / "verify_malformed.json"), ParseError);
    CHECK_THROWS_AS(parse_verify_config(json::parse(R"({"n_points":64})")), ParseError);
    CHECK_THROWS_AS(parse_verify_config(json::parse(R"({"domain":{},"n_points":63})")), ParseError);
    CHECK_THROWS_AS(parse_verify_config(json::parse(R"({"domain":{},"speed":1})")), ParseError);
    CHECK_THROWS_AS(parse_verify_config(json::parse(R"({"domain":{},"require":{"area":1}})")), ParseError);
    auto inline_cfg = parse_verify_config(json::parse(R"({"domain":{"type":"trig","curves":[{"coeffs":[0,0,1]}]}})"));
    CHECK(inline_cfg.domain_label == "inline");
}

TEST_CASE("verification suite outcomes")
{
    auto disc = run_verification(load_verify_config(data_dir / "verify_disc.json"));
    INFO(disc.text());
    CHECK(disc.passed);
    CHECK(disc.rational_image);
    CHECK(disc.checks.size() >= 17);
    CHECK(disc.text() == run_verification(load_verify_config(data_dir / "verify_disc.json")).text());

    auto ellipse = run_verification(load_verify_config(data_dir / "verify_ellipse_defect.json"));
    INFO(ellipse.text());
    CHECK_FALSE(ellipse.passed);
    REQUIRE(!ellipse.checks.empty());
    CHECK(ellipse.checks.back().name == "required_quadrature_defect");
    CHECK_FALSE(ellipse.checks.back().passed);
    CHECK(ellipse.checks.back().residual > 1e-2);
    // the kernel identities hold on the ellipse; only the requirement fails
    for (std::size_t i = 0; i + 1 < ellipse.checks.size(); ++i)
        CHECK(ellipse.checks[i].passed);

    auto annulus = run_verification(load_verify_config(data_dir / "verify_annulus.json"));
    INFO(annulus.text());
    CHECK(annulus.passed);
    CHECK(annulus.connectivity == 2);

    // base point outside the domain is a configuration error
    auto bad = parse_verify_config(json::parse(R"({"domain":{"type":"trig","curves":[{"coeffs":[0,0,1]}]},"base_point":[2,0]})"));
    CHECK_THROWS_AS(run_verification(bad), DomainError);
}
