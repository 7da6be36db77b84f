#include "naqtur/collision.hpp"
#include "naqtur/config.hpp"
#include "naqtur/harness.hpp"
#include "naqtur/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace naqtur;

namespace {

py::dict record_dict(const ExperimentRecord& er) {
  const CollisionRecord& c = er.collision;
  py::dict d;
  d["sample_id"] = er.sample_id;
  d["strategy"] = std::string(to_string(er.strategy));
  d["round"] = er.round;
  d["parent_id"] = er.parent_id ? py::cast(*er.parent_id) : py::none();
  d["mode"] = std::string(to_string(c.mode));
  d["r"] = c.r;
  d["phi"] = c.phi;
  d["eps"] = c.eps;
  d["sigma"] = c.sigma;
  d["mutual_info"] = c.mutual_info;
  d["d_bath"] = c.d_bath;
  d["bound_B"] = c.bound_B;
  d["s_simple"] = c.s_simple;
  d["F_of_s"] = c.F_of_s;
  d["gap_abs"] = c.gap_abs;
  d["rel_slack"] = c.rel_slack;
  d["cov_drift"] = c.cov_drift;
  d["robertson_C"] = c.robertson_C;
  d["dq"] = c.dq;
  d["V"] = c.V;
  d["Vp"] = c.Vp;
  d["range_residual"] = c.range_residual;
  d["flags"] = c.flags;
  d["sample_seed"] = c.sample_seed;
  return d;
}

ExperimentConfig make_config(const std::vector<std::pair<std::string, std::string>>& entries) {
  ExperimentConfig cfg;
  apply_config_entries(cfg, entries);
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Matrix thermodynamic uncertainty bounds for qubit collision models";

  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("bloch_state", [](double r, const Vec3& n) { return bloch_state(r, n).matrix(); }, py::arg("r"),
        py::arg("n"));
  m.def("partial_trace",
        [](const CMatrix& mat, int dim_a, int dim_b, const std::string& keep) {
          if (keep != "A" && keep != "B") throw py::value_error("keep must be 'A' or 'B'");
          return partial_trace(mat, dim_a, dim_b, keep == "A" ? Subsystem::A : Subsystem::B);
        },
        py::arg("m"), py::arg("dim_a"), py::arg("dim_b"), py::arg("keep"));
  m.def("hermitian_eig",
        [](const CMatrix& h) {
          const SpectralDecomposition s = hermitian_eig(h);
          return py::make_tuple(s.eigenvalues, s.eigenvectors);
        },
        py::arg("h"));

  m.def("relative_entropy",
        [](const CMatrix& rho, const CMatrix& sigma, double floor) {
          return relative_entropy(DensityMatrix(rho), DensityMatrix(sigma), floor);
        },
        py::arg("rho"), py::arg("sigma"), py::arg("floor") = kDefaultFloor);
  m.def("chi2_lambda",
        [](const CMatrix& rho, const CMatrix& sigma, double lambda) {
          const FlaggedValue v = chi2_lambda(DensityMatrix(rho), DensityMatrix(sigma), lambda);
          return py::make_tuple(v.value, v.regularized);
        },
        py::arg("rho"), py::arg("sigma"), py::arg("lam"));
  m.def("kl_via_weights",
        [](const CMatrix& rho, const CMatrix& sigma, int order) {
          return f_divergence_via_weights(DensityMatrix(rho), DensityMatrix(sigma), WeightFunction::kl(),
                                          gauss_legendre(order))
              .value;
        },
        py::arg("rho"), py::arg("sigma"), py::arg("order") = kDefaultQuadratureOrder);
  m.def("gauss_legendre",
        [](int order) {
          const QuadratureRule q = gauss_legendre(order);
          return py::make_tuple(q.nodes, q.weights);
        },
        py::arg("order"));

  m.def("bound_B",
        [](const RVector& dq, const RMatrix& v, const RMatrix& vp, int order) {
          const BoundReport r = bound_B(dq, v, vp, gauss_legendre(order));
          py::dict d;
          d["bound_B"] = r.B;
          d["s_simple"] = r.s_simple;
          d["F_of_s"] = r.F_of_s;
          d["range_residual"] = r.range_residual;
          d["out_of_range"] = r.out_of_range();
          return d;
        },
        py::arg("dq"), py::arg("V"), py::arg("Vp"), py::arg("order") = kDefaultQuadratureOrder);
  m.def("F_closed", &F_closed, py::arg("s"));
  m.def("G_of_D", &G_of_D, py::arg("D"));
  m.def("f_of_D", &f_of_D, py::arg("D"));
  m.def("g_inverse", &g_inverse, py::arg("y"));
  m.def("matrix_tur_check", &matrix_tur_check, py::arg("V"), py::arg("dq"), py::arg("D"));
  m.def("witness_bound_integral",
        [](const RVector& u, const RVector& dq, const RMatrix& v, const RMatrix& vp, int order) {
          return witness_bound_integral(u, dq, v, vp, gauss_legendre(order));
        },
        py::arg("u"), py::arg("dq"), py::arg("V"), py::arg("Vp"), py::arg("order") = kDefaultQuadratureOrder);

  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"));
  m.def("config_keys", &config_keys);
  m.def("_simulate_one",
        [](const std::vector<std::pair<std::string, std::string>>& entries, std::uint64_t seed) {
          const ExperimentConfig cfg = make_config(entries);
          ExperimentRecord er;
          er.sample_id = 0;
          er.collision = simulate_one(cfg.collision, seed, gauss_legendre(cfg.quadrature_order));
          return record_dict(er);
        });
  m.def("_run_experiment", [](const std::vector<std::pair<std::string, std::string>>& entries) {
    const ExperimentConfig cfg = make_config(entries);
    ExperimentResult result;
    {
      py::gil_scoped_release release;
      result = run_experiment(cfg);
    }
    py::list out;
    for (const auto& r : result.records) out.append(record_dict(r));
    return py::make_tuple(out, py::bytes(records_to_csv(result.records)));
  });
  m.def("verify",
        [](int order, std::uint64_t seed, int samples) {
          VerifyOptions opts;
          opts.quadrature_order = order;
          opts.seed = seed;
          opts.samples = samples;
          py::list out;
          for (const auto& c : run_verify_suite(opts)) {
            py::dict d;
            d["check"] = c.module + "." + c.name;
            d["residual"] = c.residual;
            d["tolerance"] = c.tolerance;
            d["passed"] = c.passed;
            out.append(d);
          }
          return out;
        },
        py::arg("order") = kDefaultQuadratureOrder, py::arg("seed") = 0, py::arg("samples") = 300);
}
