#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qwitness/analysis.hpp"
#include "qwitness/csv.hpp"
#include "qwitness/moments.hpp"
#include "qwitness/sampler.hpp"
#include "qwitness/states.hpp"
#include "qwitness/version.hpp"
#include "qwitness/witness.hpp"

namespace py = pybind11;
using namespace qwitness;

namespace {

StateSpec make_state(const std::string& kind, double parameter) {
  switch (state_kind_from_string(kind)) {
    case StateKind::fock_mixture: return StateSpec::fock_mixture(parameter);
    case StateKind::thermal: return StateSpec::thermal(parameter);
    case StateKind::coherent_phase_averaged: return StateSpec::coherent_phase_averaged(parameter);
  }
  throw Error(ErrorKind::invalid_argument, "unknown state kind");
}

QuadratureDataset make_dataset(std::vector<double> values, std::optional<std::vector<double>> phases,
                               double convention_variance) {
  if (phases) return QuadratureDataset::tagged(std::move(values), std::move(*phases), convention_variance);
  return QuadratureDataset::randomized(std::move(values), convention_variance);
}

py::dict solution_dict(const WitnessSolution& s) {
  py::dict d;
  d["order"] = s.witness.order();
  d["coeffs"] = s.witness.coeffs();
  d["scale"] = s.witness.scale();
  d["min_F"] = s.min_F;
  d["min_F_shortcut"] = s.min_F_shortcut;
  d["condition_number"] = s.diagnostics.condition_number;
  d["residual"] = s.diagnostics.residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qwitness, m) {
  m.doc() = "Quadrature-moment nonclassicality witnesses";
  m.attr("__version__") = std::string(kVersion);

  static py::exception<Error> base(m, "QwitnessError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(to_string(e.kind())) + ": " + e.what();
      PyErr_SetString(base.ptr(), msg.c_str());
    }
  });

  m.def("oracle_moments",
        [](const std::string& kind, double parameter, int max_k) {
          return oracle_radial_moments(make_state(kind, parameter), max_k).values();
        },
        py::arg("kind"), py::arg("parameter"), py::arg("max_k"),
        "Closed-form radial moments <r^{2k}>, k = 0..max_k.");

  m.def("wigner_radial",
        [](const std::string& kind, double parameter, double r) {
          return wigner_radial(make_state(kind, parameter), r);
        },
        py::arg("kind"), py::arg("parameter"), py::arg("r"));

  m.def("marginal_pdf",
        [](const std::string& kind, double parameter, double x) {
          return marginal_pdf(make_state(kind, parameter), x);
        },
        py::arg("kind"), py::arg("parameter"), py::arg("x"));

  m.def("sample",
        [](const std::string& kind, double parameter, std::size_t n, std::uint64_t seed,
           bool tagged, unsigned threads) {
          const auto d = sample(make_state(kind, parameter), n, seed,
                                tagged ? PhaseMode::tagged : PhaseMode::randomized, threads);
          py::dict out;
          out["x"] = d.values();
          if (tagged) out["phase"] = std::vector<double>(d.phases().begin(), d.phases().end());
          return out;
        },
        py::arg("kind"), py::arg("parameter"), py::arg("n"), py::arg("seed") = 1,
        py::arg("tagged") = false, py::arg("threads") = 1,
        "Synthetic homodyne record as {'x': [...], 'phase': [...]}.");

  m.def("estimate_moments",
        [](std::vector<double> x, int max_k, std::optional<std::vector<double>> phases,
           double convention_variance) {
          const auto mu = estimate_radial_moments(
              make_dataset(std::move(x), std::move(phases), convention_variance), max_k);
          py::dict out;
          out["mu"] = mu.values();
          if (mu.standard_errors()) out["stderr"] = *mu.standard_errors();
          return out;
        },
        py::arg("x"), py::arg("max_k"), py::arg("phases") = py::none(),
        py::arg("convention_variance") = kVacuumVariance);

  m.def("symmetric_moments",
        [](const std::map<int, double>& x_moments, int max_k) {
          return radial_moments_symmetric(x_moments, max_k).values();
        },
        py::arg("x_moments"), py::arg("max_k"),
        "Radial moments from quadrature moments {k: <x^{2k}>}.");

  m.def("optimize_witness",
        [](std::vector<double> mu, int order) {
          return solution_dict(optimize_witness(RadialMomentSet(std::move(mu), MomentSource::oracle), order));
        },
        py::arg("mu"), py::arg("order"));

  m.def("onset_order",
        [](std::vector<double> mu, int n_max, double tol_neg) {
          return onset_order(RadialMomentSet(std::move(mu), MomentSource::oracle), n_max, tol_neg).onset;
        },
        py::arg("mu"), py::arg("n_max"), py::arg("tol_neg") = 1e-9);

  m.def("significance",
        [](const std::vector<double>& coeffs, std::vector<double> x, double convention_variance) {
          const int order = 2 * static_cast<int>(coeffs.size());
          const auto s = significance(Witness(order, coeffs),
                                      QuadratureDataset::randomized(std::move(x), convention_variance));
          py::dict out;
          out["n"] = s.sample_count;
          out["mean"] = s.mean;
          out["std"] = s.stddev;
          out["g_state"] = s.g_state;
          out["z_score"] = s.z_score;
          return out;
        },
        py::arg("coeffs"), py::arg("x"), py::arg("convention_variance") = kVacuumVariance);

  m.def("analyze_json",
        [](std::vector<double> x, const std::string& config_json,
           std::optional<std::vector<double>> phases, double convention_variance) {
          auto config = config_from_json(nlohmann::json::parse(config_json.empty() ? "{}" : config_json));
          config.convention_variance = convention_variance;
          const auto data = make_dataset(std::move(x), std::move(phases), convention_variance);
          py::gil_scoped_release release;
          return to_json(analyze_dataset(data, config)).dump();
        },
        py::arg("x"), py::arg("config_json") = "{}", py::arg("phases") = py::none(),
        py::arg("convention_variance") = kVacuumVariance,
        "Full analysis; returns the versioned JSON report as a string.");

  m.def("sweep",
        [](const std::vector<double>& etas, int max_order) {
          std::vector<std::optional<int>> out;
          for (const auto& p : sweep_onset(etas, max_order)) out.push_back(p.onset);
          return out;
        },
        py::arg("etas"), py::arg("max_order") = 20);
}
