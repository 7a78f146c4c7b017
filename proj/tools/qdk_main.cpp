// qdk: verification suite, computations and plot data for planar domain specs.
//
// Exit codes: 0 success, 1 verification or certification failure, 2 usage, parse or
// domain-spec error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qdk/domain_io.hpp"
#include "qdk/error.hpp"
#include "qdk/kernels.hpp"
#include "qdk/quadrature.hpp"
#include "qdk/representative.hpp"
#include "qdk/spectral.hpp"
#include "qdk/verify.hpp"

using namespace qdk;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

int exit_code_for(const Error& e)
{
    if (dynamic_cast<const ConsistencyError*>(&e) || dynamic_cast<const NumericalError*>(&e) ||
        dynamic_cast<const AlgebraError*>(&e))
        return exit_fail;
    return exit_usage;
}

std::optional<cplx> parse_point(const std::string& s)
{
    if (s.empty())
        return std::nullopt;
    double re = 0.0, im = 0.0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%lf,%lf%c", &re, &im, &tail) == 2 || std::sscanf(s.c_str(), "%lf%c", &re, &tail) == 1)
        return cplx(re, im);
    throw UsageError("--base-point: expected \"re,im\", got \"" + s + "\"");
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot write " + path);
    out << text;
}

std::string csv_header() { return "t,re(z),im(z),re(f),im(f)\n"; }

void csv_row(std::ostringstream& os, double t, cplx z, cplx f)
{
    os << format_double(t) << ',' << format_double(z.real()) << ',' << format_double(z.imag()) << ','
       << format_double(f.real()) << ',' << format_double(f.imag()) << '\n';
}

/// Rows at the grid nodes, curve by curve.
std::string grid_csv(const BoundaryGrid& g, std::span<const cplx> f)
{
    std::ostringstream os;
    os << csv_header();
    for (std::size_t k = 0; k < g.size(); ++k)
        csv_row(os, g.t[k], g.z[k], f[k]);
    return os.str();
}

/// Trigonometric resampling of node values to `density` points per curve.
std::string resampled_csv(const PlanarDomain& d, const BoundaryGrid& g, std::span<const cplx> f, std::size_t density)
{
    std::ostringstream os;
    os << csv_header();
    const auto N = static_cast<std::size_t>(g.nodes_per_curve);
    for (int c = 0; c < g.curve_count; ++c) {
        auto part = f.subspan(g.curve_begin(c), N);
        auto v = density == N ? std::vector<cplx>(part.begin(), part.end()) : spectral::resample(part, density);
        const auto& curve = d.curves()[static_cast<std::size_t>(c)];
        for (std::size_t k = 0; k < density; ++k) {
            const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(density);
            csv_row(os, t, curve.point(t), v[k]);
        }
    }
    return os.str();
}

struct Common {
    std::string domain_path;
    int n_points = 256;
    std::string base_point;
    std::string output;
};

struct Loaded {
    PlanarDomain domain;
    BoundaryGrid grid;
    cplx a;
};

Loaded load(const Common& c)
{
    if (c.n_points < 16 || c.n_points % 2 != 0)
        throw UsageError("--n-points: need an even count >= 16");
    PlanarDomain d = load_domain(c.domain_path);
    BoundaryGrid g = discretize(d, c.n_points);
    auto p = parse_point(c.base_point);
    const cplx a = p ? *p : default_anchor(g);
    require_interior(g, a);
    return {std::move(d), std::move(g), a};
}

SchwarzFunction schwarz_of(const PlanarDomain& d)
{
    if (!d.source_map())
        throw UsageError("this computation needs a rational_image domain spec");
    return schwarz_from_rational(*d.source_map());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_verify(const std::string& config, const std::string& output)
{
    const auto cfg = load_verify_config(config);
    const auto rep = run_verification(cfg);
    const std::string text = rep.text();
    std::cout << text;
    if (!output.empty())
        write_text(output, text);
    return rep.passed ? exit_ok : exit_fail;
}

struct ComputeFlags {
    std::size_t nodes = 8;
    int degree = 2;
    double tolerance = 0.02;
    std::string csv;
};

int cmd_compute(const std::string& what, const Common& c, const ComputeFlags& f)
{
    auto L = load(c);
    const auto& g = L.grid;
    json out;
    std::vector<cplx> field;

    if (what == "kernels" || what == "ahlfors") {
        auto solver = std::make_shared<const SzegoSolver>(g);
        const auto sz = szego_solve(solver, L.a);
        const auto fa = ahlfors_map(sz);
        if (what == "kernels") {
            const auto bd = bergman_assemble(solver, harmonic_measures(g));
            json lam = json::array();
            for (Eigen::Index i = 0; i < bd.lambda().rows(); ++i) {
                json row = json::array();
                for (Eigen::Index j = 0; j < bd.lambda().cols(); ++j)
                    row.push_back(complex_to_json(bd.lambda()(i, j)));
                lam.push_back(row);
            }
            out = {{"base_point", complex_to_json(L.a)},
                   {"n_points", c.n_points},
                   {"szego_diagonal", sz.S_aa},
                   {"szego_zeros", complex_list_to_json(sz.zeros)},
                   {"bergman_diagonal", bd(L.a, L.a).real()},
                   {"lambda", lam},
                   {"lambda_residual", bd.lambda_residual()}};
            field = sz.S.values;
        } else {
            double modulus = 0.0;
            for (cplx v : fa.boundary.values)
                modulus = std::max(modulus, std::abs(std::abs(v) - 1.0));
            out = {{"base_point", complex_to_json(L.a)},
                   {"n_points", c.n_points},
                   {"derivative", complex_to_json(fa.derivative_at_a)},
                   {"zeros", complex_list_to_json(sz.zeros)},
                   {"boundary_modulus_residual", modulus}};
            field = fa.boundary.values;
        }
    } else if (what == "schwarz") {
        const auto S = schwarz_of(L.domain);
        json parts = json::array();
        for (const auto& p : schwarz_principal_parts(S))
            parts.push_back({{"pole", complex_to_json(p.pole)}, {"coeffs", complex_list_to_json(p.coeffs)}});
        const auto dec = schwarz_decompose(S, g);
        const auto ud = schwarz_unit_derivative_check(S, g);
        out = {{"principal_parts", parts},
               {"decomposition_residual", dec.residual},
               {"modulus_residual", ud.modulus_residual},
               {"tangent_residual", ud.tangent_residual}};
        field = S.boundary_values(g);
    } else if (what == "quadrature") {
        out = quadrature_to_json(quadrature_from_schwarz(schwarz_of(L.domain), 4, c.n_points));
    } else if (what == "curve") {
        out = two_var_to_json(boundary_algebraic_curve(schwarz_of(L.domain)).normalized(1e-14));
    } else if (what == "repmap") {
        auto bd = std::make_shared<const BergmanData>(bergman_assemble(g));
        RepresentativeOptions opt;
        opt.budget = f.nodes;
        opt.order = f.degree;
        opt.tolerance = f.tolerance;
        if (!c.base_point.empty())
            opt.anchor = L.a;
        const auto map = representative_map(bd, opt);
        out = representative_to_json(map);
        json image_nodes = json::array();
        for (const auto& [zero, node] : image_quadrature_nodes(map))
            image_nodes.push_back({{"zero", complex_to_json(zero)}, {"node", complex_to_json(node)}});
        out["image_quadrature_nodes"] = image_nodes;
        field = map.image_boundary;
    }

    write_text(c.output, dump(out));
    if (!f.csv.empty()) {
        if (field.empty())
            throw UsageError("--csv: no boundary field for compute " + what);
        write_text(f.csv, grid_csv(g, field));
    }
    return exit_ok;
}

int cmd_plot(const std::string& field, std::size_t density, const Common& c)
{
    if (density < 2)
        throw UsageError("--density: need at least 2 samples");
    auto L = load(c);
    const auto& g = L.grid;
    std::string csv;
    if (field == "boundary") {
        std::ostringstream os;
        os << csv_header();
        for (const auto& curve : L.domain.curves())
            for (std::size_t k = 0; k < density; ++k) {
                const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(density);
                csv_row(os, t, curve.point(t), curve.point(t));
            }
        csv = os.str();
    } else if (field == "szego" || field == "garabedian" || field == "ahlfors") {
        const auto sz = szego_solve(g, L.a);
        std::vector<cplx> v(g.size());
        for (std::size_t k = 0; k < g.size(); ++k)
            v[k] = field == "szego" ? sz.S.values[k] : field == "garabedian" ? sz.L.values[k] : sz.S.values[k] / sz.L.values[k];
        csv = resampled_csv(L.domain, g, v, density);
    } else if (field == "lambda") {
        const auto bd = bergman_assemble(g);
        csv = resampled_csv(L.domain, g, lambda_boundary(bd, L.a), density);
    } else if (field == "schwarz") {
        const auto S = schwarz_of(L.domain);
        if (density < 16 || density % 2 != 0)
            throw UsageError("--density: the schwarz field needs an even count >= 16");
        const auto gd = discretize(L.domain, static_cast<int>(density));
        csv = grid_csv(gd, S.boundary_values(gd));
    } else if (field == "qhat") {
        // ray from the base point along +x, stopping at 80% of the boundary distance
        const double reach = 0.8 * distance_to_boundary(g, L.a);
        std::ostringstream os;
        os << csv_header();
        for (std::size_t k = 0; k < density; ++k) {
            const double s = static_cast<double>(k) / static_cast<double>(density - 1);
            const cplx z = L.a + s * reach;
            csv_row(os, s, z, q_function(g, z));
        }
        csv = os.str();
    }
    write_text(c.output, csv);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kernel functions and quadrature domains of planar domains"};
    app.require_subcommand(1);

    std::string config, verify_out;
    auto* verify = app.add_subcommand("verify", "Run the identity suite on a config file");
    verify->add_option("config", config, "Config JSON")->required();
    verify->add_option("--output", verify_out, "Also write the report to this file");

    Common cc;
    ComputeFlags cf;
    std::string what;
    auto* compute = app.add_subcommand("compute", "Compute kernel, quadrature or representative-map data");
    compute->add_option("what", what, "Computation")
        ->required()
        ->check(CLI::IsMember({"kernels", "ahlfors", "schwarz", "quadrature", "curve", "repmap"}));
    compute->add_option("domain", cc.domain_path, "Domain spec JSON")->required();
    compute->add_option("--n-points", cc.n_points, "Nodes per boundary curve")->capture_default_str();
    compute->add_option("--base-point", cc.base_point, "Base point \"re,im\" (default: interior anchor)");
    compute->add_option("--nodes", cf.nodes, "repmap: node budget")->capture_default_str();
    compute->add_option("--degree", cf.degree, "repmap: highest kernel derivative per node")->capture_default_str();
    compute->add_option("--tolerance", cf.tolerance, "repmap: allowed sup |g - z| on the boundary")
        ->capture_default_str();
    compute->add_option("--output", cc.output, "Write JSON here instead of stdout");
    compute->add_option("--csv", cf.csv, "Write boundary samples of the main field as CSV");

    Common pc;
    std::string field;
    std::size_t density = 256;
    auto* plot = app.add_subcommand("plot-data", "Emit CSV samples of a boundary or interior field");
    plot->add_option("domain", pc.domain_path, "Domain spec JSON")->required();
    plot->add_option("--field", field, "Field to sample")
        ->required()
        ->check(CLI::IsMember({"boundary", "szego", "garabedian", "ahlfors", "lambda", "schwarz", "qhat"}));
    plot->add_option("--density", density, "Samples per curve (or along the ray)")->capture_default_str();
    plot->add_option("--n-points", pc.n_points, "Nodes per boundary curve")->capture_default_str();
    plot->add_option("--base-point", pc.base_point, "Base point \"re,im\" (default: interior anchor)");
    plot->add_option("--output", pc.output, "Write CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*verify)
            return cmd_verify(config, verify_out);
        if (*compute)
            return cmd_compute(what, cc, cf);
        return cmd_plot(field, density, pc);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
}
