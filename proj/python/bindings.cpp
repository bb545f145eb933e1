#include "rvb/analysis.hpp"
#include "rvb/errors.hpp"
#include "rvb/exact.hpp"
#include "rvb/io.hpp"
#include "rvb/lattice.hpp"
#include "rvb/mc.hpp"
#include "rvb/version.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <tuple>
#include <vector>

namespace py = pybind11;
using namespace rvb;

namespace {

// Exact values cross the boundary as fractions.Fraction.
py::object to_py(const Rational& q) {
  static py::object fraction_type = py::module_::import("fractions").attr("Fraction");
  return fraction_type(to_fraction_string(q));
}

Rational from_py(const py::handle& value) { return parse_fraction(py::str(value).cast<std::string>()); }

bool is_exact(const py::handle& value) {
  return py::isinstance<py::int_>(value) ||
         py::isinstance(value, py::module_::import("fractions").attr("Fraction"));
}

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::list to_py(const std::vector<Rational>& values) {
  py::list out;
  for (const auto& v : values) out.append(to_py(v));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of the rvb package";
  m.attr("__version__") = std::string(kCodeVersion);

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ResourceGuardError>(m, "ResourceGuardError", PyExc_RuntimeError);

  py::class_<Lattice>(m, "Lattice")
      .def(py::init([](int L, const std::string& bc) { return Lattice(L, parse_boundary(bc)); }), py::arg("L"),
           py::arg("bc") = "periodic")
      .def_property_readonly("L", &Lattice::size)
      .def_property_readonly("bc", [](const Lattice& l) { return std::string(to_string(l.boundary())); })
      .def_property_readonly("n_sites", &Lattice::n_sites)
      .def_property_readonly("n_bonds", &Lattice::n_bonds)
      .def_property_readonly("n_plaquettes", &Lattice::n_plaquettes)
      .def("site", &Lattice::site, py::arg("x"), py::arg("y"))
      .def("sublattice", [](const Lattice& l, int s) { return static_cast<int>(l.sublattice(s)); })
      .def("bonds",
           [](const Lattice& l) {
             std::vector<std::pair<int, int>> out;
             for (const auto& b : l.bonds()) out.emplace_back(b.first, b.second);
             return out;
           })
      .def("bond_index", &Lattice::bond_index)
      .def("__repr__", [](const Lattice& l) {
        return "Lattice(L=" + std::to_string(l.size()) + ", bc='" + std::string(to_string(l.boundary())) + "')";
      });

  m.def("bond_orbits", &bond_orbits, py::arg("lattice"),
        "Bond indices grouped by symmetry, centermost orbit first.");
  m.def("equivalent_partner_count", &equivalent_partner_count, py::arg("lattice"), py::arg("i"), py::arg("j"));

  m.def(
      "count_nn_coverings",
      [](int L, const std::string& bc) {
        return py::int_(py::str(count_nn_coverings_transfer(L, parse_boundary(bc)).get_str()));
      },
      py::arg("L"), py::arg("bc") = "periodic", "Number of nearest-neighbour dimer coverings (transfer matrix).");

  m.def(
      "exact_bond_correlators",
      [](const Lattice& lat, unsigned threads) {
        std::vector<Rational> values;
        {
          py::gil_scoped_release release;
          values = exact_bond_correlators(lat, enumerate_nn_coverings(lat), threads);
        }
        return to_py(values);
      },
      py::arg("lattice"), py::arg("threads") = 0, "Exact <S_i.S_j> for every bond, indexed like Lattice.bonds().");
  m.def(
      "exact_nn_correlator",
      [](const Lattice& lat, int i, int j) {
        Rational v;
        {
          py::gil_scoped_release release;
          v = exact_nn_correlator(lat, i, j).value;
        }
        return to_py(v);
      },
      py::arg("lattice"), py::arg("i"), py::arg("j"));
  m.def(
      "exact_gas_correlator",
      [](int N, bool same_sublattice) { return to_py(exact_gas_correlator(N, same_sublattice).value); },
      py::arg("N"), py::arg("same_sublattice") = false);
  m.def(
      "gas_correlation_matrix",
      [](int N) {
        const auto gas = enumerate_bipartite_pairings(N);
        py::list rows;
        for (const auto& row : statevector_correlation_matrix(gas.coverings, gas.sublattice)) rows.append(to_py(row));
        return rows;
      },
      py::arg("N"), "All <S_i.S_j> of the 2N-site gas from its explicit state vector (even sites are A).");

  py::class_<McConfig>(m, "McConfig")
      .def(py::init<>())
      .def(py::init([](int L, std::uint64_t seed, std::int64_t n_sweeps, int n_bins) {
             McConfig c;
             c.L = L;
             c.seed = seed;
             c.n_sweeps = n_sweeps;
             c.n_bins = n_bins;
             return c;
           }),
           py::arg("L"), py::arg("seed"), py::arg("n_sweeps") = 100000, py::arg("n_bins") = 100)
      .def_readwrite("L", &McConfig::L)
      .def_property(
          "bc", [](const McConfig& c) { return std::string(to_string(c.bc)); },
          [](McConfig& c, const std::string& bc) { c.bc = parse_boundary(bc); })
      .def_readwrite("seed", &McConfig::seed)
      .def_readwrite("n_therm", &McConfig::n_therm)
      .def_readwrite("n_sweeps", &McConfig::n_sweeps)
      .def_readwrite("n_bins", &McConfig::n_bins)
      .def_readwrite("winding_fraction", &McConfig::winding_fraction)
      .def_readwrite("worm_fraction", &McConfig::worm_fraction)
      .def_readwrite("allow_sector_freezing", &McConfig::allow_sector_freezing)
      .def("validate", &McConfig::validate);

  m.def(
      "run_chain",
      [](const McConfig& cfg) {
        McResult r;
        {
          py::gil_scoped_release release;
          r = run_chain(cfg);
        }
        return to_py(to_json(r));
      },
      py::arg("config"), "Run one chain; returns the result document as a dict.");

  m.def(
      "werner_p",
      [](const py::object& corr) -> py::object {
        if (is_exact(corr)) return to_py(werner_p(from_py(corr)));
        return py::float_(werner_p(corr.cast<double>()));
      },
      py::arg("corr"), "p = -(4/3) <S_i.S_j>; exact for Fraction/int input.");
  m.def(
      "concurrence",
      [](const py::object& p) -> py::object {
        if (is_exact(p)) return to_py(concurrence(from_py(p)));
        return py::float_(concurrence(p.cast<double>()));
      },
      py::arg("p"));
  m.def("eof", &eof, py::arg("p"), "Entanglement of formation (ebits) of the Werner state.");
  m.def(
      "entanglement_verdict",
      [](const py::object& p) {
        return is_exact(p) ? entanglement_verdict(from_py(p)) : entanglement_verdict(p.cast<double>());
      },
      py::arg("p"));

  py::class_<AndersonBound>(m, "AndersonBound")
      .def_property_readonly("corr_min", [](const AndersonBound& b) { return to_py(b.corr_min); })
      .def_property_readonly("p_max", [](const AndersonBound& b) { return to_py(b.p_max); });
  m.def("anderson_bound", &anderson_bound, py::arg("z"));
  m.def(
      "check_bound",
      [](const py::object& corr, double err, int z) {
        const BoundStatus s = is_exact(corr) ? check_bound(from_py(corr), z) : check_bound(corr.cast<double>(), err, z);
        return std::string(to_string(s));
      },
      py::arg("corr"), py::arg("err") = 0.0, py::arg("z") = 4,
      "'satisfied', 'saturated' or 'violated'; Fraction input is compared exactly.");
  m.def(
      "gas_closed_forms",
      [](int N) {
        const auto g = gas_closed_forms(N);
        py::dict d;
        d["corr_opposite"] = to_py(g.corr_opposite);
        d["corr_same"] = g.corr_same ? to_py(*g.corr_same) : py::none();
        d["p"] = to_py(g.p);
        return d;
      },
      py::arg("N"));

  m.def(
      "extrapolate",
      [](const std::vector<std::tuple<int, double, double>>& points, bool scan_l_min, bool inflate_by_chi2) {
        std::vector<FitPoint> pts;
        for (const auto& [L, p, err] : points) pts.push_back({L, p, err});
        return to_py(to_json(extrapolate(pts, FitOptions{scan_l_min, inflate_by_chi2})));
      },
      py::arg("points"), py::arg("scan_l_min") = true, py::arg("inflate_by_chi2") = true,
      "Fit p(L) = p_inf + a/L + b/L^2 to (L, p, p_err) triples.");
}
