#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <bit>

#include "dyadic/experiment.hpp"
#include "dyadic/haar.hpp"
#include "dyadic/norms.hpp"
#include "dyadic/opnorm.hpp"
#include "dyadic/paraproducts.hpp"
#include "dyadic/shifts.hpp"

namespace py = pybind11;
using namespace dyadic;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Shape shape_of(const Array& a) {
  if (a.ndim() < 1) throw py::value_error("expected at least one axis");
  std::vector<int> depths;
  for (py::ssize_t i = 0; i < a.ndim(); ++i) {
    const auto n = static_cast<std::size_t>(a.shape(i));
    if (n == 0 || !std::has_single_bit(n)) throw py::value_error("axis lengths must be powers of two");
    depths.push_back(std::countr_zero(n));
  }
  return Shape(std::move(depths));
}

std::vector<double> values_of(const Array& a) { return {a.data(), a.data() + a.size()}; }

Array to_array(const Shape& s, std::span<const double> v) {
  std::vector<py::ssize_t> dims;
  for (std::size_t a = 0; a < s.n_params(); ++a) dims.push_back(static_cast<py::ssize_t>(s.extent(a)));
  Array out(dims);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

HaarExpansion expansion(const Array& a) { return HaarExpansion(shape_of(a), values_of(a)); }

}  // namespace

PYBIND11_MODULE(_dyadic, m) {
  m.doc() = "Dyadic Haar analysis on the multi-parameter torus";

  m.def("haar_forward", [](const Array& sig) {
    const auto e = haar_forward(GridSignal(shape_of(sig), values_of(sig)));
    return to_array(e.shape(), e.coeffs());
  }, py::arg("signal"), "Cell values to Haar coefficients.");

  m.def("haar_inverse", [](const Array& coeffs) {
    const auto s = haar_inverse(expansion(coeffs));
    return to_array(s.shape(), s.values());
  }, py::arg("coeffs"), "Haar coefficients to cell values.");

  m.def("bmo_norm", [](const Array& sig) { return bmo_norm(GridSignal(shape_of(sig), values_of(sig))).value; },
        py::arg("signal"), "Little bmo norm of cell values.");
  m.def("product_bmo_norm", [](const Array& c) { return product_bmo_norm(expansion(c)).value; }, py::arg("coeffs"),
        "Squared product BMO norm of a coefficient array.");
  m.def("lmo_norm", [](const Array& c) { return lmo_norm(expansion(c)).value; }, py::arg("coeffs"));

  m.def("pi_main", [](const Array& phi, const Array& b) {
    const auto y = pi_main(expansion(phi), expansion(b));
    return to_array(y.shape(), y.coeffs());
  }, py::arg("phi"), py::arg("b"), "The paraproduct Pi_phi b on coefficient arrays.");

  m.def("paraproduct_opnorm", [](const Array& psi) { return l2_opnorm(paraproduct_operator(expansion(psi), Space::Full)); },
        py::arg("psi"), "L2 operator norm of f -> Pi_psi f.");

  m.def("iterated_commutator", [](const Array& phi, const Array& b, const std::vector<std::size_t>& axes) {
    const auto r = iterated_commutator(expansion(phi), expansion(b), axes);
    return py::make_tuple(to_array(r.output.shape(), r.output.coeffs()), r.truncated);
  }, py::arg("phi"), py::arg("b"), py::arg("axes"), "Nested shift commutator with multiplication by phi.");

  m.def("run_experiment", [](const std::string& config_json) {
    const auto out = run_experiment(parse_config(config_json));
    return py::make_tuple(out.csv, out.json);
  }, py::arg("config_json"), "Runs an experiment config; returns (csv, json) text.");
  m.def("config_hash", [](const std::string& config_json) { return config_hash(parse_config(config_json)); },
        py::arg("config_json"));

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
