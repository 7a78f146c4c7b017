// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [path/to/qdk] [work dir]
//
// Criterion 9 drives the command-line tool; without a path it is reported as FAIL.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qdk/error.hpp"
#include "qdk/kernels.hpp"
#include "qdk/quadrature.hpp"
#include "qdk/representative.hpp"

using namespace qdk;
using cplx = std::complex<double>;
namespace fs = std::filesystem;

namespace {

constexpr double pi = oracle::pi;

struct Gate {
    bool ok = true;
    std::ostringstream notes;

    void require(bool cond, const std::string& what, double value)
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s=%.3e ", what.c_str(), value);
        notes << buf;
        if (!cond)
            ok = false;
    }
    void note(const std::string& what, double value)
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s=%.3e(report) ", what.c_str(), value);
        notes << buf;
    }
};

PlanarDomain disc() { return PlanarDomain(BoundaryCurve({0.0, 0.0, 1.0}, Orientation::ccw), {}); }
PlanarDomain annulus()
{
    return PlanarDomain(BoundaryCurve({0.0, 0.0, 1.0}, Orientation::ccw),
                        {BoundaryCurve({0.5, 0.0, 0.0}, Orientation::cw, 1)});
}
PlanarDomain two_holes()
{
    std::vector<cplx> outer(9, 0.0);
    outer[5] = 1.2;
    outer[3] = 0.1;
    outer[4] = 0.05;
    return PlanarDomain(BoundaryCurve(outer, Orientation::ccw),
                        {BoundaryCurve({0.2, -0.45, 0.0}, Orientation::cw, 1),
                         BoundaryCurve({cplx(0.0, 0.15), cplx(0.4, 0.1), 0.0}, Orientation::cw, 2)});
}
PlanarDomain perturbed() { return PlanarDomain(BoundaryCurve({0.05, 0.0, 0.0, 1.0, 0.0}, Orientation::ccw), {}); }
PlanarDomain ellipse() { return PlanarDomain(BoundaryCurve({0.25, 0.0, 1.0}, Orientation::ccw), {}); }

RationalFunction poly_map(std::vector<cplx> c) { return RationalFunction::polynomial(Polynomial(std::move(c))); }
RationalFunction mobius() { return RationalFunction(Polynomial({0.0, 1.0}), Polynomial({1.0, -0.4})); }

std::shared_ptr<const BergmanData> bergman(const PlanarDomain& d, int N = 256)
{
    return std::make_shared<const BergmanData>(bergman_assemble(discretize(d, N)));
}

double sup_over(std::size_t n, const std::function<double(std::size_t)>& f)
{
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        m = std::max(m, f(k));
    return m;
}

void kernel_oracles(Gate& g)
{
    {
        const auto grid = discretize(disc(), 256);
        auto solver = std::make_shared<const SzegoSolver>(grid);
        auto bd = bergman_assemble(grid);
        double err = 0.0;
        for (cplx a : {cplx(0.0), cplx(0.4), cplx(-0.3, 0.5)}) {
            auto sz = szego_solve(solver, a);
            err = std::max(err, sup_over(grid.size(), [&](std::size_t k) {
                               return std::max(std::abs(sz.S.values[k] - oracle::disc_szego(grid.z[k], a)),
                                               std::abs(sz.L.values[k] - oracle::disc_garabedian(grid.z[k], a)));
                           }));
            auto Kb = bd.boundary_values(a);
            err = std::max(err, sup_over(grid.size(), [&](std::size_t k) {
                               return std::abs(Kb[k] - oracle::disc_bergman(grid.z[k], a));
                           }));
            for (cplx z : {cplx(0.1, 0.2), cplx(-0.6, 0.1)}) {
                err = std::max(err, std::abs(sz.szego(z) - oracle::disc_szego(z, a)));
                err = std::max(err, std::abs(sz.garabedian(z) - oracle::disc_garabedian(z, a)));
                err = std::max(err, std::abs(bd(z, a) - oracle::disc_bergman(z, a)));
            }
        }
        g.require(err < 1e-9, "disc", err);
    }
    {
        const double rho = 0.5;
        const auto grid = discretize(annulus(), 256);
        auto solver = std::make_shared<const SzegoSolver>(grid);
        auto bd = bergman_assemble(solver, harmonic_measures(grid));
        double err = 0.0;
        for (cplx a : {cplx(0.7), cplx(0.0, -0.75), cplx(-0.55, 0.3)}) {
            auto sz = szego_solve(solver, a);
            err = std::max(err, sup_over(grid.size(), [&](std::size_t k) {
                               const cplx s = oracle::annulus_szego(grid.z[k], a, rho, 400);
                               return std::max(std::abs(sz.S.values[k] - s),
                                               std::abs(std::abs(sz.L.values[k]) - std::abs(s)));
                           }));
            auto Kb = bd.boundary_values(a);
            err = std::max(err, sup_over(grid.size(), [&](std::size_t k) {
                               return std::abs(Kb[k] - oracle::annulus_bergman(grid.z[k], a, rho, 400));
                           }));
            for (cplx z : {cplx(0.1, -0.8), cplx(-0.6, 0.2)}) {
                err = std::max(err, std::abs(sz.szego(z) - oracle::annulus_szego(z, a, rho, 400)));
                err = std::max(err, std::abs(bd(z, a) - oracle::annulus_bergman(z, a, rho, 400)));
            }
        }
        g.require(err < 1e-7, "annulus", err);
    }
}

void identity_suite(Gate& g)
{
    double e22 = 0.0, e23 = 0.0, tsq = 0.0, e34 = 0.0;
    for (const auto& d : {disc(), annulus(), two_holes()}) {
        const auto grid = discretize(d, 256);
        auto solver = std::make_shared<const SzegoSolver>(grid);
        const cplx a = d.holes().empty() ? cplx(0.3, -0.2) : cplx(-0.7, 0.1);
        auto sz = szego_solve(solver, a);
        auto fa = ahlfors_map(sz);
        e23 = std::max({e23, std::abs(fa(a)), std::abs(fa.derivative_at_a - 2 * pi * sz.S_aa)});
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const cplx T = grid.tangent[k];
            const cplx L = sz.L.values[k];
            const cplx S_az = std::conj(sz.S.values[k]);
            e22 = std::max(e22, std::abs(L * T / cplx(0, 1) - S_az));
            e23 = std::max(e23, std::abs(std::abs(fa.boundary.values[k]) - 1.0));
            tsq = std::max(tsq, std::abs(T * T + S_az * S_az / (L * L)));
        }
        const auto hb = harmonic_measures(grid);
        for (const auto& fp : hb.fprime_nodes)
            for (std::size_t k = 0; k < grid.size(); ++k)
                e34 = std::max(e34, std::abs(fp[k] * grid.tangent[k] + std::conj(fp[k] * grid.tangent[k])));
    }
    g.require(e22 < 1e-9, "garabedian_szego", e22);
    g.require(e23 < 1e-8, "ahlfors", e23);

    double r64 = 0.0, r128 = 0.0, r256 = 0.0;
    for (const auto& d : {annulus(), two_holes()}) {
        const cplx w = d.holes().size() == 1 ? cplx(0.0, 0.7) : cplx(-0.7, 0.1);
        const double a64 = lambda_boundary_check(*bergman(d, 64), w).residual;
        const double a128 = lambda_boundary_check(*bergman(d, 128), w).residual;
        const double a256 = lambda_boundary_check(*bergman(d, 256), w).residual;
        g.require(a128 * 10.0 <= a64, "lambda_decay_ratio", a64 / std::max(a128, 1e-300));
        r64 = std::max(r64, a64);
        r128 = std::max(r128, a128);
        r256 = std::max(r256, a256);
    }
    g.require(r64 < 1e-7 && r128 < 1e-7 && r256 < 1e-7, "lambda", std::max({r64, r128, r256}));
    g.require(e34 < 1e-9, "harmonic_tangent", e34);
    g.require(tsq < 1e-8, "tangent_square", tsq);
}

void quadrature_identity(Gate& g)
{
    auto r = poly_map({0.0, 1.0, 0.3});
    auto S = schwarz_from_rational(r);
    auto q = quadrature_from_schwarz(S);
    bool shape = q.nodes.size() == 1 && std::abs(q.nodes[0].node) < 1e-12 && q.nodes[0].coeffs.size() == 2;
    double cerr = 1.0;
    if (shape)
        cerr = std::max(std::abs(q.nodes[0].coeffs[0] - 1.18 * pi), std::abs(q.nodes[0].coeffs[1] - 0.3 * pi));
    g.require(shape && cerr < 1e-10, "coeffs", cerr);

    const auto grid = discretize(S.domain(), 256);
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<cplx> c(static_cast<std::size_t>(1 + trial % 11));
        for (auto& x : c)
            x = cplx(u(gen), u(gen));
        const Polynomial f(c);
        auto fz = [&](cplx z) { return f(z); };
        const cplx boundary = area_integral(grid, BoundaryFunction::sample(grid, fz));
        const cplx pull = oracle::pullback_area_integral([&](cplx w) { return r(w); },
                                                         [&](cplx w) { return r.derivative(w); }, fz, 60, 512);
        worst = std::max({worst, std::abs(q.apply(f) - boundary) / (1.0 + std::abs(boundary)),
                          std::abs(q.apply(f) - pull) / (1.0 + std::abs(pull))});
    }
    g.require(worst < 1e-7, "random_polys", worst);

    auto Sd = schwarz_from_rational(poly_map({0.0, 1.0}));
    auto qd = quadrature_from_schwarz(Sd);
    double derr = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<cplx> c(static_cast<std::size_t>(1 + trial));
        for (auto& x : c)
            x = cplx(u(gen), u(gen));
        const Polynomial f(c);
        derr = std::max(derr, std::abs(qd.apply(f) - pi * f(0.0)));
    }
    g.require(derr < 1e-10, "disc_mean_value", derr);
}

void schwarz_pipeline(Gate& g)
{
    double sb = 0.0, dec = 0.0, unit = 0.0, curve = 0.0;
    for (auto r : {poly_map({0.0, 1.0}), poly_map({0.0, 1.5}), poly_map({0.0, 1.0, 0.3}), mobius()}) {
        auto S = schwarz_from_rational(r);
        const auto grid = discretize(S.domain(), 256);
        auto sv = S.boundary_values(grid);
        sb = std::max(sb, sup_over(grid.size(), [&](std::size_t k) { return std::abs(sv[k] - std::conj(grid.z[k])); }));
        dec = std::max(dec, schwarz_decompose(S, grid).residual);
        const auto ud = schwarz_unit_derivative_check(S, grid);
        unit = std::max({unit, ud.modulus_residual, ud.tangent_residual});
        const auto P = boundary_algebraic_curve(S);
        curve = std::max(curve, sup_over(grid.size(), [&](std::size_t k) {
                             return std::abs(P(grid.z[k], std::conj(grid.z[k])));
                         }));
    }
    g.require(sb < 1e-9, "S_boundary", sb);
    g.require(dec < 1e-7, "decomposition", dec);
    g.require(unit < 1e-8, "unit_derivative", unit);
    g.require(curve < 1e-8, "curve", curve);
}

void identity_map(Gate& g)
{
    double one = 0.0, quot = 0.0;
    for (auto r : {poly_map({0.0, 1.0}), poly_map({0.0, 1.5}), poly_map({0.0, 1.0, 0.3}), mobius()}) {
        auto S = schwarz_from_rational(r);
        auto rep = verify_identity_map(S, bergman(S.domain()));
        one = std::max(one, rep.one_residual);
        quot = std::max(quot, rep.quotient_error);
    }
    g.require(one < 1e-6, "one_fit", one);
    g.require(quot < 1e-6, "quotient", quot);
    auto be = bergman(ellipse());
    const double defect = quadrature_defect(*be, {0.0}, {1}, default_probes(be->grid())).residual;
    g.require(defect > 1e-2, "ellipse_defect", defect);
}

void representative(Gate& g)
{
    auto bd = bergman(perturbed());
    const auto m8 = representative_map(bd);
    g.require(m8.certificate.passed, "certified", m8.certificate.passed ? 1.0 : 0.0);
    g.require(m8.deviation < 0.02, "deviation", m8.deviation);

    std::vector<cplx> nodes;
    for (const auto& p : image_quadrature_nodes(m8))
        nodes.push_back(p.second);
    auto ibd = bergman_assemble(discretize(m8.image, 256));
    const double defect =
        quadrature_defect(ibd, nodes, std::vector<int>(nodes.size(), 0), default_probes(ibd.grid())).residual;
    g.require(defect < 1e-4, "image_defect", defect);

    RepresentativeOptions opt;
    opt.budget = 16;
    const auto m16 = representative_map(bd, opt);
    const double fit8 = std::max(m8.numerator_residuals[0], m8.denominator_residuals[0]);
    const double fit16 = std::max(m16.numerator_residuals[0], m16.denominator_residuals[0]);
    g.require(fit16 < fit8, "fit8", fit8);
    g.require(fit16 < fit8, "fit16", fit16);
    g.require(m16.deviation < m8.deviation, "deviation16", m16.deviation);
}

void gustafsson(Gate& g)
{
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double rec = 0.0, quot = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cplx> c{0.0, 1.0};
        for (int k = 2; k <= 2 + trial % 5; ++k)
            c.emplace_back(0.5 * u(gen) / (k * k), 0.5 * u(gen) / (k * k));
        const auto rep = gustafsson_check(poly_map(c));
        rec = std::max(rec, rep.reconstruction_error);
        quot = std::max(quot, rep.quotient_error);
    }
    g.require(rec < 1e-10, "reconstruction", rec);
    g.require(quot < 1e-9, "quotient", quot);
}

void rational_model(Gate& g)
{
    auto S = schwarz_from_rational(poly_map({0.0, 1.0}));
    auto bd = bergman(S.domain());
    const auto rep = rational_model_fit(S, *bd, cplx(0.3, 0.1), 2, 2);
    g.require(rep.fit_residual < 1e-8 && rep.probe_residual < 1e-8, "disc", std::max(rep.fit_residual, rep.probe_residual));
    auto Sq = schwarz_from_rational(poly_map({0.0, 1.0, 0.3}));
    auto bq = bergman(Sq.domain());
    g.note("quadratic", rational_model_fit(Sq, *bq, cplx(0.2, 0.1), 2, 2).probe_residual);
}

int run_cli(const std::string& qdk, const std::string& args, const fs::path& out)
{
    const std::string cmd = "\"" + qdk + "\" " + args + " > \"" + out.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void cli_contract(Gate& g, const std::string& qdk, const fs::path& work)
{
    if (qdk.empty()) {
        g.require(false, "no_cli_path", 0.0);
        return;
    }
    fs::create_directories(work);
    const fs::path data = QDK_TEST_DATA;
    const std::string v = "verify ";
    const int disc = run_cli(qdk, v + "\"" + (data / "verify_disc.json").string() + "\"", work / "disc1.txt");
    const int disc2 = run_cli(qdk, v + "\"" + (data / "verify_disc.json").string() + "\"", work / "disc2.txt");
    const int bad = run_cli(qdk, v + "\"" + (data / "verify_malformed.json").string() + "\"", work / "bad.txt");
    const int ell = run_cli(qdk, v + "\"" + (data / "verify_ellipse_defect.json").string() + "\"", work / "ell1.txt");
    const int ell2 = run_cli(qdk, v + "\"" + (data / "verify_ellipse_defect.json").string() + "\"", work / "ell2.txt");
    const int usage = run_cli(qdk, "verify", work / "usage.txt");
    g.require(disc == 0, "disc_exit", disc);
    g.require(bad == 2, "malformed_exit", bad);
    g.require(ell == 1, "ellipse_exit", ell);
    g.require(usage == 2, "usage_exit", usage);
    const bool same = slurp(work / "disc1.txt") == slurp(work / "disc2.txt") && disc2 == disc &&
                      slurp(work / "ell1.txt") == slurp(work / "ell2.txt") && ell2 == ell;
    g.require(same, "byte_identical", same ? 1.0 : 0.0);
}

} // namespace

int main(int argc, char** argv)
{
    const std::string qdk = argc > 1 ? argv[1] : "";
    const fs::path work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "qdk_acceptance";

    struct Criterion {
        const char* name;
        std::function<void(Gate&)> run;
    };
    const std::vector<Criterion> criteria = {
        {"kernel oracles (disc 1e-9, annulus 1e-7)", kernel_oracles},
        {"kernel identity suite", identity_suite},
        {"quadrature identity for w+0.3w^2 and the disc", quadrature_identity},
        {"Schwarz function pipeline", schwarz_pipeline},
        {"identity map on quadrature domains, ellipse control", identity_map},
        {"representative map of e^{it}+0.05e^{-2it}", representative},
        {"Gustafsson reconstruction on the disc", gustafsson},
        {"rational model of the disc kernel", rational_model},
        {"CLI exit codes and determinism", [&](Gate& g) { cli_contract(g, qdk, work); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Gate g;
        try {
            criteria[i].run(g);
        } catch (const std::exception& e) {
            g.ok = false;
            g.notes << "exception: " << e.what();
        }
        std::printf("%s %zu %s: %s\n", g.ok ? "PASS" : "FAIL", i + 1, criteria[i].name, g.notes.str().c_str());
        std::fflush(stdout);
        failed += g.ok ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
