#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qdk/domain_io.hpp"
#include "qdk/error.hpp"
#include "qdk/kernels.hpp"
#include "qdk/quadrature.hpp"
#include "qdk/representative.hpp"
#include "qdk/verify.hpp"

namespace py = pybind11;
using namespace qdk;

namespace {

py::array_t<cplx> to_array(const std::vector<cplx>& v) { return py::array_t<cplx>(static_cast<py::ssize_t>(v.size()), v.data()); }
py::array_t<double> to_array(const std::vector<double>& v)
{
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::object from_json(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

RationalFunction rational(std::vector<cplx> num, std::vector<cplx> den)
{
    return RationalFunction(Polynomial(std::move(num)), Polynomial(std::move(den)));
}

} // namespace

PYBIND11_MODULE(_qdk, m)
{
    m.doc() = "Kernel functions and quadrature domains of planar domains";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
    py::register_exception<UsageError>(m, "UsageError", base.ptr());
    py::register_exception<ProximityError>(m, "ProximityError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
    py::register_exception<AlgebraError>(m, "AlgebraError", base.ptr());
    py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());

    py::class_<PlanarDomain>(m, "Domain")
        .def_static(
            "from_spec", [](const std::string& text) { return parse_domain_text(text); }, py::arg("spec"),
            "Parse a JSON domain spec")
        .def_static("load", &load_domain, py::arg("path"))
        .def_static(
            "trig",
            [](const std::vector<std::vector<cplx>>& curves) {
                std::vector<BoundaryCurve> holes;
                for (std::size_t i = 1; i < curves.size(); ++i)
                    holes.emplace_back(curves[i], Orientation::cw, static_cast<int>(i));
                if (curves.empty())
                    throw UsageError("need at least one curve");
                return PlanarDomain(BoundaryCurve(curves[0], Orientation::ccw), std::move(holes));
            },
            py::arg("curves"), "Outer curve then holes, each as coefficients c_{-K}..c_{K}")
        .def_static(
            "rational_image",
            [](std::vector<cplx> num, std::vector<cplx> den) {
                return PlanarDomain::rational_image(rational(std::move(num), std::move(den)));
            },
            py::arg("numerator"), py::arg("denominator") = std::vector<cplx>{1.0})
        .def_property_readonly("connectivity", &PlanarDomain::connectivity)
        .def_property_readonly("is_rational_image", [](const PlanarDomain& d) { return d.source_map().has_value(); })
        .def("to_spec", [](const PlanarDomain& d) { return domain_to_json(d).dump(); });

    py::class_<BoundaryGrid>(m, "Grid")
        .def_property_readonly("t", [](const BoundaryGrid& g) { return to_array(g.t); })
        .def_property_readonly("z", [](const BoundaryGrid& g) { return to_array(g.z); })
        .def_property_readonly("tangent", [](const BoundaryGrid& g) { return to_array(g.tangent); })
        .def_property_readonly("weight", [](const BoundaryGrid& g) { return to_array(g.weight); })
        .def_readonly("nodes_per_curve", &BoundaryGrid::nodes_per_curve)
        .def("__len__", &BoundaryGrid::size)
        .def("area", [](const BoundaryGrid& g) { return area(g); })
        .def("winding_number", [](const BoundaryGrid& g, cplx z) { return winding_number(g, z); })
        .def("default_anchor", [](const BoundaryGrid& g) { return default_anchor(g); });
    m.def("discretize", &discretize, py::arg("domain"), py::arg("n_points") = 256);

    py::class_<SzegoData>(m, "Szego")
        .def_readonly("a", &SzegoData::a)
        .def_readonly("S_aa", &SzegoData::S_aa)
        .def_readonly("zeros", &SzegoData::zeros)
        .def_property_readonly("boundary_szego", [](const SzegoData& s) { return to_array(s.S.values); })
        .def_property_readonly("boundary_garabedian", [](const SzegoData& s) { return to_array(s.L.values); })
        .def("szego", &SzegoData::szego, py::arg("z"))
        .def("garabedian", &SzegoData::garabedian, py::arg("z"));
    m.def(
        "szego", [](const BoundaryGrid& g, cplx a) { return szego_solve(g, a); }, py::arg("grid"), py::arg("a"));

    py::class_<AhlforsMap>(m, "Ahlfors")
        .def_readonly("a", &AhlforsMap::a)
        .def_readonly("derivative_at_a", &AhlforsMap::derivative_at_a)
        .def_property_readonly("boundary", [](const AhlforsMap& f) { return to_array(f.boundary.values); })
        .def("__call__", &AhlforsMap::operator(), py::arg("z"));
    m.def("ahlfors", &ahlfors_map, py::arg("szego"));

    py::class_<BergmanData, std::shared_ptr<BergmanData>>(m, "Bergman")
        .def(py::init([](const BoundaryGrid& g) { return std::make_shared<BergmanData>(bergman_assemble(g)); }),
             py::arg("grid"))
        .def("__call__", [](const BergmanData& b, cplx z, cplx w, int m) { return bergman_derivative(b, z, w, m); },
             py::arg("z"), py::arg("w"), py::arg("m") = 0, "K^{(m)}(z, w)")
        .def("boundary_values", &BergmanData::boundary_values, py::arg("w"), py::arg("m") = 0)
        .def("lambda_boundary", [](const BergmanData& b, cplx w, int m) { return to_array(lambda_boundary(b, w, m)); },
             py::arg("w"), py::arg("m") = 0)
        .def("lambda_residual",
             [](const BergmanData& b, cplx w, int m) { return lambda_boundary_check(b, w, m).residual; },
             py::arg("w"), py::arg("m") = 0)
        .def("quadrature_defect",
             [](const BergmanData& b, std::vector<cplx> nodes, std::vector<int> orders) {
                 return quadrature_defect(b, nodes, orders, default_probes(b.grid())).residual;
             },
             py::arg("nodes"), py::arg("orders"));

    py::class_<SchwarzFunction>(m, "Schwarz")
        .def(py::init([](std::vector<cplx> num, std::vector<cplx> den) {
                 return schwarz_from_rational(rational(std::move(num), std::move(den)));
             }),
             py::arg("numerator"), py::arg("denominator") = std::vector<cplx>{1.0})
        .def("__call__", &SchwarzFunction::operator(), py::arg("z"))
        .def("derivative", &SchwarzFunction::derivative, py::arg("z"))
        .def_property_readonly("domain", &SchwarzFunction::domain)
        .def("quadrature", [](const SchwarzFunction& S) { return from_json(quadrature_to_json(quadrature_from_schwarz(S))); })
        .def("algebraic_curve", [](const SchwarzFunction& S) {
            return from_json(two_var_to_json(boundary_algebraic_curve(S).normalized(1e-14)));
        })
        .def("principal_parts", [](const SchwarzFunction& S) {
            py::list out;
            for (const auto& p : schwarz_principal_parts(S))
                out.append(py::make_tuple(p.pole, p.coeffs));
            return out;
        });

    m.def(
        "representative_map",
        [](const PlanarDomain& d, int n_points, std::size_t budget, int order, double tolerance) {
            auto bd = std::make_shared<const BergmanData>(bergman_assemble(discretize(d, n_points)));
            RepresentativeOptions opt;
            opt.budget = budget;
            opt.order = order;
            opt.tolerance = tolerance;
            return from_json(representative_to_json(representative_map(bd, opt)));
        },
        py::arg("domain"), py::arg("n_points") = 256, py::arg("budget") = 8, py::arg("order") = 2,
        py::arg("tolerance") = 0.02, "Certified kernel quotient close to the identity; returns its JSON record");

    m.def(
        "gustafsson_check",
        [](std::vector<cplx> coeffs) {
            auto r = gustafsson_check(RationalFunction::polynomial(Polynomial(std::move(coeffs))));
            py::dict d;
            d["derivative_coeffs"] = r.derivative_coeffs;
            d["product_coeffs"] = r.product_coeffs;
            d["reconstruction_error"] = r.reconstruction_error;
            d["quotient_error"] = r.quotient_error;
            d["passed"] = r.passed;
            return d;
        },
        py::arg("coeffs"));

    m.def(
        "verify",
        [](const std::filesystem::path& config) {
            auto rep = run_verification(load_verify_config(config));
            return py::make_tuple(rep.passed, rep.text());
        },
        py::arg("config"), "Run the identity suite; returns (passed, report text)");
}
