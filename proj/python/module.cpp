#include "choiceworks/convex_cut.hpp"
#include "choiceworks/names.hpp"
#include "choiceworks/zero_finder.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace cw;

namespace {

// Rationals cross the boundary as "p/q" strings so nothing is rounded.
std::vector<std::string> to_strings(const std::vector<Scalar>& xs) {
  std::vector<std::string> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(to_string(x));
  return out;
}

py::dict localize(const std::string& spec_json, int precision) {
  auto f = parse_function_spec(spec_json);
  auto res = localize_zeros(f, precision);
  py::list splits;
  for (const auto& s : res.splits) {
    py::dict d;
    d["obstruction"] = std::string(1, s.obstruction);
    d["at"] = to_string(s.at);
    d["parent"] = py::make_tuple(s.parent_i, s.parent_j);
    d["left"] = py::make_tuple(s.left_i, s.left_j);
    d["right"] = py::make_tuple(s.right_i, s.right_j);
    splits.append(d);
  }
  py::dict out;
  out["candidates"] = to_strings(res.candidates);
  out["splits"] = splits;
  return out;
}

py::dict filter_cands(const std::string& spec_json, const std::vector<std::string>& candidates,
                      int precision) {
  auto f = parse_function_spec(spec_json);
  std::vector<Scalar> cands;
  for (const auto& c : candidates) cands.push_back(parse_scalar(c));
  auto res = filter_candidates(f, cands, precision);
  py::dict out;
  out["index"] = res.index;
  out["point"] = to_string(res.point);
  out["removed"] = res.removed;
  return out;
}

py::dict validate(const std::string& scenario_json, int max_stage) {
  ValidationResult res;
  bool convex = scenario_json.find("\"convex\"") != std::string::npos;
  if (convex) {
    auto name = parse_convex_script(scenario_json);
    res = validate_convex_name(name, max_stage);
  } else {
    auto name = adversarial_name(parse_event_script(scenario_json));
    res = validate_name(name, max_stage);
  }
  py::dict out;
  out["ok"] = res.ok;
  out["stage"] = res.stage;
  out["message"] = res.message;
  return out;
}

py::dict slice_convex(const std::string& script_json, int m, int max_stage) {
  auto name = parse_convex_script(script_json);
  auto res = slice(name, m, max_stage);
  py::dict out;
  out["axis"] = res.axis;
  out["i"] = res.i;
  out["stage"] = res.stage;
  out["sliced"] = convex_script_to_json(res.sliced, max_stage > 8 ? 8 : max_stage);
  return out;
}

py::list kappa_table(int max) {
  KappaTable t;
  py::list rows;
  for (int i = 0; i <= max; ++i) {
    py::list row;
    for (int j = 0; j <= max; ++j) row.append(py::make_tuple(t.k1(i, j), t.k2(i, j)));
    rows.append(row);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_choiceworks, m) {
  m.doc() = "validated set-name transformations and certified zero localization";

  py::register_exception<Error>(m, "ChoiceworksError");

  m.def("kappa", &kappa, py::arg("n"),
        "candidate count for a function with at most n interior local minima");
  m.def("kappa_table", &kappa_table, py::arg("max") = 5,
        "(k1, k2) pairs for budget indices 0..max");
  m.def("localize_zeros", &localize, py::arg("spec_json"), py::arg("precision"),
        "dyadic candidates covering every zero of the function spec to 2^-precision");
  m.def("filter_candidates", &filter_cands, py::arg("spec_json"), py::arg("candidates"),
        py::arg("precision"), "drop candidates certified nonzero; first survivor wins");
  m.def("validate_name", &validate, py::arg("scenario_json"), py::arg("max_stage") = 32,
        "run the mechanical name validator over a scenario script");
  m.def("slice_convex", &slice_convex, py::arg("script_json"), py::arg("m") = 2,
        py::arg("max_stage") = 64, "cut a convex script along a grid hyperplane");
}
