#include "qdk/domain_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qdk/error.hpp"

namespace qdk {

namespace {

const json& member(const json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object())
        throw ParseError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(where + ": missing key \"" + key + "\"");
    return *it;
}

Orientation parse_orientation(const json& v, const std::string& where)
{
    if (!v.is_string())
        throw ParseError(where + ": orientation must be \"ccw\" or \"cw\"");
    const auto s = v.get<std::string>();
    if (s == "ccw")
        return Orientation::ccw;
    if (s == "cw")
        return Orientation::cw;
    throw ParseError(where + ": unknown orientation \"" + s + "\"");
}

json poly_to_json(const Polynomial& p) { return complex_list_to_json(p.coeffs()); }

} // namespace

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

cplx parse_complex(const json& v, const std::string& where)
{
    if (v.is_number())
        return {v.get<double>(), 0.0};
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ParseError(where + ": expected a number or [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::vector<cplx> parse_complex_list(const json& v, const std::string& where)
{
    if (!v.is_array())
        throw ParseError(where + ": expected an array");
    std::vector<cplx> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(parse_complex(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

json complex_list_to_json(std::span<const cplx> zs)
{
    json a = json::array();
    for (cplx z : zs)
        a.push_back(complex_to_json(z));
    return a;
}

PlanarDomain parse_domain(const json& spec)
{
    const auto& type = member(spec, "type", "domain");
    if (!type.is_string())
        throw ParseError("domain.type: expected a string");
    const auto kind = type.get<std::string>();
    if (kind == "rational_image") {
        auto num = parse_complex_list(member(spec, "numerator", "domain"), "domain.numerator");
        std::vector<cplx> den{1.0};
        if (spec.contains("denominator"))
            den = parse_complex_list(spec["denominator"], "domain.denominator");
        if (num.empty() || den.empty())
            throw ParseError("domain: empty coefficient list");
        Polynomial d(den);
        if (d.is_zero())
            throw ParseError("domain.denominator: zero polynomial");
        return PlanarDomain::rational_image(RationalFunction(Polynomial(num), d));
    }
    if (kind != "trig")
        throw ParseError("domain.type: unknown type \"" + kind + "\" (expected \"trig\" or \"rational_image\")");
    const auto& curves = member(spec, "curves", "domain");
    if (!curves.is_array() || curves.empty())
        throw ParseError("domain.curves: expected a non-empty array");
    std::vector<BoundaryCurve> parsed;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const std::string where = "domain.curves[" + std::to_string(i) + "]";
        auto coeffs = parse_complex_list(member(curves[i], "coeffs", where), where + ".coeffs");
        if (coeffs.size() % 2 == 0)
            throw ParseError(where + ".coeffs: need an odd count 2K+1 (c_{-K}..c_{K})");
        const Orientation o = curves[i].contains("orientation")
                                  ? parse_orientation(curves[i]["orientation"], where + ".orientation")
                                  : (i == 0 ? Orientation::ccw : Orientation::cw);
        parsed.emplace_back(std::move(coeffs), o, static_cast<int>(i));
    }
    BoundaryCurve outer = parsed.front();
    parsed.erase(parsed.begin());
    return PlanarDomain(std::move(outer), std::move(parsed));
}

PlanarDomain parse_domain_text(const std::string& text)
{
    json spec;
    try {
        spec = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("domain spec: ") + e.what());
    }
    return parse_domain(spec);
}

PlanarDomain load_domain(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_domain_text(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

json domain_to_json(const PlanarDomain& domain)
{
    if (domain.source_map()) {
        const auto& r = *domain.source_map();
        return {{"type", "rational_image"},
                {"numerator", poly_to_json(r.numerator())},
                {"denominator", poly_to_json(r.denominator())}};
    }
    json curves = json::array();
    for (const auto& c : domain.curves())
        curves.push_back({{"coeffs", complex_list_to_json(c.coeffs())},
                          {"orientation", c.orientation() == Orientation::ccw ? "ccw" : "cw"}});
    return {{"type", "trig"}, {"curves", curves}};
}

json quadrature_to_json(const QuadratureData& q)
{
    json nodes = json::array();
    for (const auto& n : q.nodes)
        nodes.push_back({{"node", complex_to_json(n.node)}, {"coeffs", complex_list_to_json(n.coeffs)}});
    return {{"nodes", nodes}, {"fit_residual", q.fit_residual}, {"holdout_error", q.holdout_error}};
}

QuadratureData quadrature_from_json(const json& v)
{
    QuadratureData q;
    const auto& nodes = member(v, "nodes", "quadrature");
    if (!nodes.is_array())
        throw ParseError("quadrature.nodes: expected an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string where = "quadrature.nodes[" + std::to_string(i) + "]";
        q.nodes.push_back({parse_complex(member(nodes[i], "node", where), where + ".node"),
                           parse_complex_list(member(nodes[i], "coeffs", where), where + ".coeffs")});
    }
    if (v.contains("fit_residual"))
        q.fit_residual = v["fit_residual"].get<double>();
    if (v.contains("holdout_error"))
        q.holdout_error = v["holdout_error"].get<double>();
    return q;
}

json two_var_to_json(const TwoVarPolynomial& p)
{
    const auto& a = p.coeffs();
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            row.push_back(complex_to_json(a(i, j)));
        rows.push_back(row);
    }
    return {{"coeffs", rows}, {"degree_z", p.degree_z()}, {"degree_s", p.degree_s()}};
}

TwoVarPolynomial two_var_from_json(const json& v)
{
    const auto& rows = member(v, "coeffs", "polynomial");
    if (!rows.is_array() || rows.empty() || !rows[0].is_array() || rows[0].empty())
        throw ParseError("polynomial.coeffs: expected a non-empty matrix");
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto row = parse_complex_list(rows[i], "polynomial.coeffs[" + std::to_string(i) + "]");
        if (row.size() != static_cast<std::size_t>(a.cols()))
            throw ParseError("polynomial.coeffs: ragged rows");
        for (std::size_t j = 0; j < row.size(); ++j)
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
    return TwoVarPolynomial(a);
}

json kernel_terms_to_json(const KernelCombination& k)
{
    json terms = json::array();
    for (const auto& t : k.terms())
        terms.push_back({{"node", complex_to_json(t.node)}, {"order", t.order}, {"coeff", complex_to_json(t.coeff)}});
    return terms;
}

json representative_to_json(const RepresentativeMap& map)
{
    const auto& c = map.certificate;
    json cert = {{"passed", c.passed},
                 {"denominator_zeros", c.denominator_zeros},
                 {"denominator_margin", c.denominator_margin},
                 {"image_simple", c.image_simple},
                 {"min_winding", c.min_winding},
                 {"max_winding", c.max_winding},
                 {"probe_count", c.probe_count}};
    if (!c.failure.empty())
        cert["failure"] = c.failure;
    return {{"numerator", kernel_terms_to_json(map.numerator)},
            {"denominator", kernel_terms_to_json(map.denominator)},
            {"numerator_residuals", map.numerator_residuals},
            {"denominator_residuals", map.denominator_residuals},
            {"deviation", map.deviation},
            {"certificate", cert},
            {"image", domain_to_json(map.image)}};
}

} // namespace qdk
