#include "qdk/verify.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "qdk/error.hpp"
#include "qdk/kernels.hpp"
#include "qdk/quadrature.hpp"
#include "qdk/representative.hpp"

namespace qdk {

namespace {

constexpr double pi = std::numbers::pi;

std::string sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

double sup_abs(std::size_t n, const std::function<double(std::size_t)>& f)
{
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        m = std::max(m, f(k));
    return m;
}

class Suite {
public:
    explicit Suite(VerificationReport& rep) : rep_(rep) {}

    void run(const std::string& name, double tol, const std::function<double()>& residual)
    {
        CheckResult c{name, 0.0, tol, false, {}};
        try {
            c.residual = residual();
            c.passed = std::isfinite(c.residual) && c.residual <= tol;
        } catch (const Error& e) {
            c.residual = std::numeric_limits<double>::infinity();
            c.detail = e.what();
        }
        rep_.checks.push_back(std::move(c));
    }

private:
    VerificationReport& rep_;
};

DefectRequirement parse_requirement(const json& v)
{
    DefectRequirement r;
    if (!v.is_object())
        throw ParseError("config.require.quadrature_defect: expected an object");
    for (const auto& [key, val] : v.items()) {
        if (key == "tolerance") {
            if (!val.is_number() || val.get<double>() <= 0.0)
                throw ParseError("config.require.quadrature_defect.tolerance: expected a positive number");
            r.tolerance = val.get<double>();
        } else if (key == "nodes") {
            r.nodes = parse_complex_list(val, "config.require.quadrature_defect.nodes");
        } else if (key == "orders") {
            if (!val.is_array())
                throw ParseError("config.require.quadrature_defect.orders: expected an array");
            for (const auto& o : val) {
                if (!o.is_number_integer() || o.get<int>() < 0)
                    throw ParseError("config.require.quadrature_defect.orders: expected non-negative integers");
                r.orders.push_back(o.get<int>());
            }
        } else {
            throw ParseError("config.require.quadrature_defect: unknown key \"" + key + "\"");
        }
    }
    if (!r.orders.empty() && !r.nodes.empty() && r.orders.size() != r.nodes.size())
        throw ParseError("config.require.quadrature_defect: nodes and orders differ in length");
    return r;
}

} // namespace

VerifyConfig parse_verify_config(const json& cfg, const std::filesystem::path& base_dir)
{
    if (!cfg.is_object())
        throw ParseError("config: expected an object");
    VerifyConfig c;
    bool have_domain = false;
    for (const auto& [key, val] : cfg.items()) {
        if (key == "domain") {
            if (val.is_string()) {
                std::filesystem::path p = val.get<std::string>();
                if (p.is_relative())
                    p = base_dir / p;
                std::ifstream in(p);
                if (!in)
                    throw ParseError("config.domain: cannot open " + p.string());
                std::stringstream ss;
                ss << in.rdbuf();
                try {
                    c.domain = json::parse(ss.str());
                } catch (const json::parse_error& e) {
                    throw ParseError(p.string() + ": " + e.what());
                }
                c.domain_label = val.get<std::string>();
            } else if (val.is_object()) {
                c.domain = val;
                c.domain_label = "inline";
            } else {
                throw ParseError("config.domain: expected a path or an inline domain spec");
            }
            have_domain = true;
        } else if (key == "n_points") {
            if (!val.is_number_integer())
                throw ParseError("config.n_points: expected an integer");
            c.n_points = val.get<int>();
            if (c.n_points < 16 || c.n_points % 2 != 0)
                throw ParseError("config.n_points: need an even count >= 16");
        } else if (key == "base_point") {
            c.base_point = parse_complex(val, "config.base_point");
        } else if (key == "seed") {
            if (!val.is_number_unsigned())
                throw ParseError("config.seed: expected a non-negative integer");
            c.seed = val.get<std::uint64_t>();
        } else if (key == "require") {
            if (!val.is_object())
                throw ParseError("config.require: expected an object");
            for (const auto& [rk, rv] : val.items()) {
                if (rk != "quadrature_defect")
                    throw ParseError("config.require: unknown requirement \"" + rk + "\"");
                c.require_defect = parse_requirement(rv);
            }
        } else {
            throw ParseError("config: unknown key \"" + key + "\"");
        }
    }
    if (!have_domain)
        throw ParseError("config: missing key \"domain\"");
    return c;
}

VerifyConfig load_verify_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    json cfg;
    try {
        cfg = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return parse_verify_config(cfg, path.parent_path());
}

std::string VerificationReport::text() const
{
    std::ostringstream os;
    os << "qdk verification report\n";
    os << "domain: " << domain_label << "\n";
    os << "connectivity: " << connectivity << "\n";
    os << "rational_image: " << (rational_image ? "yes" : "no") << "\n";
    os << "n_points: " << n_points << "\n";
    os << "base_point: " << format_double(base_point.real()) << " " << format_double(base_point.imag()) << "\n";
    os << "seed: " << seed << "\n\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-32s %-10s %-10s %s\n", "check", "residual", "tolerance", "status");
    os << line;
    std::size_t ok = 0;
    for (const auto& c : checks) {
        std::snprintf(line, sizeof line, "%-32s %-10s %-10s %s\n", c.name.c_str(), sci(c.residual).c_str(),
                      sci(c.tolerance).c_str(), c.passed ? "PASS" : "FAIL");
        os << line;
        if (!c.detail.empty())
            os << "  error: " << c.detail << "\n";
        ok += c.passed ? 1 : 0;
    }
    os << "\noverall: " << (passed ? "PASS" : "FAIL") << " (" << ok << "/" << checks.size() << " checks passed)\n";
    return os.str();
}

VerificationReport run_verification(const VerifyConfig& cfg)
{
    const PlanarDomain domain = parse_domain(cfg.domain);
    const BoundaryGrid grid = discretize(domain, cfg.n_points);
    const cplx a = cfg.base_point ? *cfg.base_point : default_anchor(grid);
    require_interior(grid, a);

    VerificationReport rep;
    rep.domain_label = cfg.domain_label;
    rep.connectivity = domain.connectivity();
    rep.rational_image = domain.source_map().has_value();
    rep.n_points = cfg.n_points;
    rep.base_point = a;
    rep.seed = cfg.seed;
    Suite suite(rep);

    auto solver = std::make_shared<const SzegoSolver>(grid);
    const SzegoData sz = szego_solve(solver, a);
    const auto& g = solver->grid();
    const std::size_t n = g.size();

    suite.run("szego_reproducing", 1e-8, [&] {
        double worst = 0.0;
        for (int m = 0; m <= 8; ++m) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc += std::pow(g.z[k], m) * std::conj(sz.S.values[k]) * g.weight[k];
            worst = std::max(worst, std::abs(acc - std::pow(a, m)) / std::max(1.0, std::pow(std::abs(a), m)));
        }
        return worst;
    });
    suite.run("garabedian_szego_boundary", 1e-9, [&] {
        return sup_abs(n, [&](std::size_t k) {
            return std::abs(sz.L.values[k] * g.tangent[k] / cplx(0, 1) - std::conj(sz.S.values[k]));
        });
    });
    suite.run("ahlfors_boundary_modulus", 1e-8, [&] {
        return sup_abs(n, [&](std::size_t k) { return std::abs(std::abs(sz.S.values[k] / sz.L.values[k]) - 1.0); });
    });
    suite.run("ahlfors_normalization", 1e-8, [&] {
        const AhlforsMap f = ahlfors_map(sz);
        return std::max(std::abs(f(a)), std::abs(f.derivative_at_a - 2.0 * pi * sz.S_aa));
    });
    suite.run("tangent_square_identity", 1e-8, [&] {
        return sup_abs(n, [&](std::size_t k) {
            const cplx T = g.tangent[k];
            const cplx S_az = std::conj(sz.S.values[k]);
            return std::abs(T * T + S_az * S_az / (sz.L.values[k] * sz.L.values[k]));
        });
    });
    suite.run("szego_zero_count", 0.5, [&] {
        return std::abs(static_cast<double>(sz.zeros.size()) - (domain.connectivity() - 1));
    });

    auto bd = std::make_shared<const BergmanData>(bergman_assemble(solver, harmonic_measures(grid)));

    suite.run("bergman_reproducing", 1e-7, [&] {
        auto Kw = bd->boundary_values(a);
        double worst = 0.0;
        for (int m = 0; m <= 8; ++m) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc += Kw[k] * std::pow(std::conj(g.z[k]), m + 1) * g.dz[k];
            acc *= g.dt / (cplx(0, 2) * (m + 1.0));
            worst = std::max(worst, std::abs(acc - std::pow(std::conj(a), m)) / std::max(1.0, std::pow(std::abs(a), m)));
        }
        return worst;
    });
    suite.run("bergman_hermitian", 1e-8, [&] {
        // interior evaluation is only trusted several node spacings in
        auto pts = interior_probes(g, 4, 0.5 * inradius(g));
        pts.push_back(a);
        double worst = 0.0, scale = 0.0;
        for (cplx z : pts)
            for (cplx w : pts) {
                const cplx kzw = (*bd)(z, w);
                scale = std::max(scale, std::abs(kzw));
                worst = std::max(worst, std::abs((*bd)(w, z) - std::conj(kzw)));
            }
        return worst / std::max(1.0, scale);
    });
    suite.run("lambda_boundary_analyticity", 1e-7, [&] {
        return std::max(lambda_boundary_check(*bd, a, 0).residual, lambda_boundary_check(*bd, a, 1).residual);
    });
    suite.run("harmonic_derivative_tangent", 1e-9, [&] {
        double worst = 0.0;
        for (const auto& fp : bd->basis().fprime_nodes)
            worst = std::max(worst, sup_abs(n, [&](std::size_t k) { return std::abs((fp[k] * g.tangent[k]).real()); }));
        return worst;
    });

    if (domain.source_map()) {
        const SchwarzFunction S = schwarz_from_rational(*domain.source_map());
        suite.run("schwarz_boundary_values", 1e-9, [&] {
            auto sv = S.boundary_values(grid);
            return sup_abs(n, [&](std::size_t k) { return std::abs(sv[k] - std::conj(grid.z[k])); });
        });
        suite.run("schwarz_decomposition", 1e-7, [&] { return schwarz_decompose(S, grid).residual; });
        suite.run("schwarz_unit_derivative", 1e-8, [&] {
            auto u = schwarz_unit_derivative_check(S, grid);
            return std::max(u.modulus_residual, u.tangent_residual);
        });
        suite.run("algebraic_boundary_curve", 1e-8, [&] {
            auto P = boundary_algebraic_curve(S);
            return sup_abs(n, [&](std::size_t k) { return std::abs(P(grid.z[k], std::conj(grid.z[k]))); });
        });
        suite.run("quadrature_identity", 1e-7, [&] {
            auto q = quadrature_from_schwarz(S, 4, cfg.n_points);
            std::mt19937_64 gen(cfg.seed);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            double worst = 0.0;
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<cplx> c(static_cast<std::size_t>(1 + trial % 11));
                for (auto& x : c)
                    x = cplx(u(gen), u(gen));
                const Polynomial f(c);
                const cplx area = area_integral(grid, BoundaryFunction::sample(grid, [&](cplx z) { return f(z); }));
                worst = std::max(worst, std::abs(q.apply(f) - area) / (1.0 + std::abs(area)));
            }
            return worst;
        });
        suite.run("identity_map", 1e-6, [&] {
            auto r = verify_identity_map(S, bd);
            return std::max({r.one_residual, r.quotient_error, r.quadrature_mismatch});
        });
        const auto& r = *domain.source_map();
        if (r.is_polynomial() && r.degree() <= 6) {
            std::optional<GustafssonReport> gr;
            auto gust = [&]() -> const GustafssonReport& {
                if (!gr)
                    gr = gustafsson_check(r);
                return *gr;
            };
            suite.run("gustafsson_reconstruction", 1e-10, [&] { return gust().reconstruction_error; });
            suite.run("gustafsson_quotient", 1e-9, [&] { return gust().quotient_error; });
        }
    }

    if (cfg.require_defect) {
        const auto& req = *cfg.require_defect;
        std::vector<cplx> nodes = req.nodes.empty() ? std::vector<cplx>{a} : req.nodes;
        std::vector<int> orders = req.orders.empty() ? std::vector<int>(nodes.size(), 1) : req.orders;
        if (orders.size() != nodes.size())
            throw ParseError("config.require.quadrature_defect: orders given without matching nodes");
        suite.run("required_quadrature_defect", req.tolerance,
                  [&] { return quadrature_defect(*bd, nodes, orders, default_probes(grid)).residual; });
    }

    rep.passed = !rep.checks.empty();
    for (const auto& c : rep.checks)
        rep.passed = rep.passed && c.passed;
    return rep;
}

} // namespace qdk
