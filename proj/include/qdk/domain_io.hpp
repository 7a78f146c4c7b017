#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "qdk/geometry.hpp"
#include "qdk/quadrature.hpp"
#include "qdk/representative.hpp"

namespace qdk {

using json = nlohmann::json;

/// Domain specification files:
///   {"type":"trig","curves":[{"coeffs":[[re,im],...],"orientation":"ccw"}, ...]}
///   {"type":"rational_image","numerator":[[re,im],...],"denominator":[[re,im],...]}
/// Trig coefficients run c_{-K}..c_{K}; polynomial coefficients are ascending. The first
/// trig curve is the outer boundary. Malformed input throws ParseError; well-formed but
/// invalid geometry throws GeometryError.
PlanarDomain parse_domain(const json& spec);
PlanarDomain parse_domain_text(const std::string& text);
PlanarDomain load_domain(const std::filesystem::path& path);

/// Rational images are written in rational_image form, everything else as trig curves.
json domain_to_json(const PlanarDomain& domain);

cplx parse_complex(const json& v, const std::string& where);
json complex_to_json(cplx z);
std::vector<cplx> parse_complex_list(const json& v, const std::string& where);
json complex_list_to_json(std::span<const cplx> zs);

/// [{"node":[re,im],"coeffs":[[re,im],...]}, ...]
json quadrature_to_json(const QuadratureData& q);
QuadratureData quadrature_from_json(const json& v);

/// Rows indexed by the power of z, columns by the power of s.
json two_var_to_json(const TwoVarPolynomial& p);
TwoVarPolynomial two_var_from_json(const json& v);

json kernel_terms_to_json(const KernelCombination& k);

/// Numerator and denominator terms {node, order, coeff}, fit data, certificate and the
/// image domain in the domain-spec format.
json representative_to_json(const RepresentativeMap& map);

/// Fixed-width text with %.17g numbers, used by every emitter that promises byte-stable
/// output.
std::string format_double(double x);

} // namespace qdk
