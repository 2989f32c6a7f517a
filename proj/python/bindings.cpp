#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gsr/bench.hpp"
#include "gsr/errors.hpp"
#include "gsr/io.hpp"
#include "gsr/mscra.hpp"
#include "gsr/phi.hpp"
#include "gsr/wl21.hpp"

namespace py = pybind11;
using namespace gsr;

namespace {

// Configs cross the boundary as JSON text; the Python side does the dumps/loads.
nlohmann::json parse_or_empty(const std::string& text) {
  return text.empty() ? nlohmann::json::object() : nlohmann::json::parse(text);
}

PhiSpec phi_spec(const std::string& text) {
  return text.empty() ? PhiSpec{} : PhiSpec::from_json(nlohmann::json::parse(text));
}

GroupStructure groups_from_lists(Index p, const std::vector<IndexList>& groups) {
  return GroupStructure(p, groups);
}

py::dict solve_stats_dict(const SolveStats& s) {
  py::dict d;
  d["converged"] = s.converged;
  d["stalled"] = s.stalled;
  d["message"] = s.message;
  d["outer_iterations"] = s.outer.size();
  d["wall_seconds"] = s.wall_seconds;
  if (!s.outer.empty()) {
    const auto& r = s.outer.back();
    d["pinf"] = r.pinf;
    d["dinf"] = r.dinf;
    d["gap"] = r.gap;
    d["sigma"] = r.sigma;
  }
  return d;
}

py::dict mscra_dict(const MscraResult& r) {
  py::dict d;
  d["x"] = r.x;
  d["stages"] = r.stages();
  d["reason"] = to_string(r.reason);
  d["converged"] = r.converged();
  d["nu"] = r.nu;
  d["rho_bar"] = r.rho_bar;
  d["lipschitz"] = r.lipschitz;
  d["wall_seconds"] = r.wall_seconds;
  nlohmann::json traces = nlohmann::json::array();
  for (const auto& t : r.traces) traces.push_back(t.to_json(false));
  d["traces_json"] = traces.dump();
  return d;
}

}  // namespace

PYBIND11_MODULE(_gsr, m) {
  m.doc() = "Group-sparse regression by multi-stage convex relaxation";

  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<SolverStall>(m, "SolverStall", PyExc_RuntimeError);
  py::register_exception<SingularDesign>(m, "SingularDesign", PyExc_RuntimeError);
  py::register_exception<DegenerateIterate>(m, "DegenerateIterate", PyExc_RuntimeError);

  m.def("phi_eval", [](const std::string& spec, double t) {
    return phi_eval(phi_spec(spec), t);
  });
  m.def("psi_star", [](const std::string& spec, double s) {
    return psi_star_eval(phi_spec(spec), s);
  });
  m.def("theta", [](const std::string& spec, double s) {
    return theta_eval(phi_spec(spec), s);
  });
  m.def("phi_constants", [](const std::string& spec) {
    const auto c = phi_constants(phi_spec(spec));
    py::dict d;
    d["t_star"] = c.t_star;
    d["t_bar"] = c.t_bar;
    d["phi_prime_minus_1"] = c.phi_prime_minus_1;
    d["phi_prime_plus_tbar"] = c.phi_prime_plus_tbar;
    return d;
  });

  py::class_<Instance>(m, "Instance")
      .def_property_readonly("A", [](const Instance& i) { return i.A; })
      .def_property_readonly("b", [](const Instance& i) { return i.b; })
      .def_property_readonly("x_true", [](const Instance& i) { return i.x_true; })
      .def_property_readonly("support_true", [](const Instance& i) { return i.support_true; })
      .def_property_readonly("groups", [](const Instance& i) { return i.groups.groups(); })
      .def_property_readonly("radius", [](const Instance& i) { return i.radius; })
      .def_property_readonly("seed", [](const Instance& i) { return i.seed; })
      .def_property_readonly("meta_json", [](const Instance& i) { return i.meta.dump(); })
      .def_property_readonly("n", &Instance::n)
      .def_property_readonly("p", &Instance::p);

  m.def(
      "make_instance",
      [](const std::string& design, const std::string& signal, Index n, Index p, Index groups,
         Index r_bar, double alpha, double theta1, double theta2, std::uint64_t seed,
         std::uint64_t index) {
        InstanceSpec sp;
        sp.design = design_kind_from_string(design);
        sp.signal = signal_kind_from_string(signal);
        sp.n = n;
        sp.p = p;
        sp.m = groups;
        sp.r_bar = r_bar;
        sp.alpha = alpha;
        sp.theta1 = theta1;
        sp.theta2 = theta2;
        sp.seed = seed;
        sp.index = index;
        return make_instance(sp);
      },
      py::arg("design"), py::arg("signal"), py::arg("n"), py::arg("p"), py::arg("m"),
      py::arg("r_bar"), py::arg("alpha") = 2.0, py::arg("theta1") = 0.0, py::arg("theta2") = 0.0,
      py::arg("seed") = 0, py::arg("index") = 0);

  m.def("load_instance", [](const std::filesystem::path& dir) { return load_instance(dir); });
  m.def("save_instance",
        [](const std::filesystem::path& dir, const Instance& inst) { save_instance(dir, inst); });

  m.def(
      "solve_instance",
      [](const Instance& inst, const std::string& config) {
        MscraProblem prob{make_dense_design(inst.A), inst.b, inst.groups,
                          BoxConstraint(inst.radius)};
        MscraResult r;
        {
          py::gil_scoped_release nogil;
          r = run(prob, MscraConfig::from_json(parse_or_empty(config)));
        }
        return mscra_dict(r);
      },
      py::arg("instance"), py::arg("config") = "");

  m.def(
      "solve",
      [](const Mat& a, const Vec& b, const std::vector<IndexList>& groups, double radius,
         const std::string& config) {
        MscraProblem prob{make_dense_design(a), b, groups_from_lists(a.cols(), groups),
                          BoxConstraint(radius)};
        MscraResult r;
        {
          py::gil_scoped_release nogil;
          r = run(prob, MscraConfig::from_json(parse_or_empty(config)));
        }
        return mscra_dict(r);
      },
      py::arg("A"), py::arg("b"), py::arg("groups"), py::arg("radius"), py::arg("config") = "");

  m.def(
      "alm_solve",
      [](const Mat& a, const Vec& b, const std::vector<IndexList>& groups, const Vec& omega,
         double radius, const std::string& config) {
        SubproblemSpec spec{make_dense_design(a), b, groups_from_lists(a.cols(), groups), omega,
                            BoxConstraint(radius)};
        AlmResult r;
        {
          py::gil_scoped_release nogil;
          r = alm_solve(spec, AlmConfig::from_json(parse_or_empty(config)));
        }
        py::dict d = solve_stats_dict(r.stats);
        d["x"] = r.x;
        d["objective"] = subproblem_objective(r.x, spec);
        return d;
      },
      py::arg("A"), py::arg("b"), py::arg("groups"), py::arg("omega"), py::arg("radius"),
      py::arg("config") = "");

  m.def("oracle_ls", [](const Instance& inst) { return oracle_ls(inst).x_ls; });

  m.def("metrics", [](const Vec& x, const Instance& inst) {
    const Metrics mt = metrics(x, inst);
    py::dict d;
    d["relerr"] = mt.relerr;
    d["group_sparsity"] = mt.group_sparsity;
    d["support_precision"] = mt.support_precision;
    d["support_recall"] = mt.support_recall;
    d["exact_support"] = mt.exact_support;
    return d;
  });
}
