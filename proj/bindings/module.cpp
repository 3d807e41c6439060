// Python bindings for the core operations: band structure, fiber determinant,
// critical couplings, classification, counting, and the accumulation model.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "torspec/asymptotics.hpp"
#include "torspec/birman_schwinger.hpp"
#include "torspec/direct.hpp"
#include "torspec/errors.hpp"
#include "torspec/friedrichs.hpp"
#include "torspec/quadrature.hpp"

namespace py = pybind11;
using namespace torspec;

namespace {

Side parse_side(const std::string& s) {
  if (s == "below") return Side::below;
  if (s == "above") return Side::above;
  throw DomainError("side must be 'below' or 'above', got '" + s + "'");
}

py::dict interval_dict(const Interval& iv) {
  py::dict d;
  d["lo"] = iv.lo;
  d["hi"] = iv.hi;
  return d;
}

}  // namespace

PYBIND11_MODULE(torspec_py, m) {
  m.doc() = "spectral toolkit for a coupled two-channel lattice model";

  py::register_exception<DomainError>(m, "DomainError");
  py::register_exception<ConvergenceFailure>(m, "ConvergenceFailure");
  py::register_exception<SignConditionError>(m, "SignConditionError");
  py::register_exception<AmbiguityError>(m, "AmbiguityError");
  py::register_exception<BandInteriorError>(m, "BandInteriorError");
  py::register_exception<CapacityError>(m, "CapacityError");
  py::register_exception<TruncationError>(m, "TruncationError");
  py::register_exception<InsufficientData>(m, "InsufficientData");

  m.def("band_edges",
        [](double kx, double ky, double kz) {
          const BandEdges e = band_edges({kx, ky, kz});
          return py::make_tuple(e.lo, e.hi);
        },
        py::arg("kx"), py::arg("ky"), py::arg("kz"),
        "per-fiber band interval of the two-particle symbol");

  m.def("global_band_edges",
        [] {
          const BandEdges e = global_band_edges();
          return py::make_tuple(e.lo, e.hi);
        },
        "extremes of the two-particle symbol over all momenta");

  m.def("delta",
        [](double kx, double ky, double kz, double z, double mu, double gamma) {
          return delta({kx, ky, kz}, z, {mu, gamma});
        },
        py::arg("kx"), py::arg("ky"), py::arg("kz"), py::arg("z"),
        py::arg("mu"), py::arg("gamma"),
        "fiber determinant at momentum k and spectral parameter z");

  m.def("critical_mu",
        [](const std::string& side, double gamma) {
          return critical_mu(parse_side(side), gamma);
        },
        py::arg("side"), py::arg("gamma"),
        "coupling at which the branch touches the band edge");

  m.def("critical_constants",
        [] {
          const auto cc = critical_constants();
          py::dict d;
          d["J0"] = cc.J0;
          d["mu0"] = cc.mu0;
          d["gamma0"] = cc.gamma0;
          d["gamma1"] = cc.gamma1;
          return d;
        },
        "threshold integral, double-critical coupling, regime boundaries");

  m.def("essential_spectrum",
        [](double mu, double gamma, int kgrid) {
          BranchOptions bo;
          bo.kgrid = kgrid;
          const auto ess = essential_spectrum({mu, gamma}, bo);
          py::list out;
          for (const auto& iv : ess.intervals) out.append(interval_dict(iv));
          return out;
        },
        py::arg("mu"), py::arg("gamma"), py::arg("kgrid") = 8,
        "disjoint closed intervals of the essential spectrum");

  m.def("classify",
        [](double mu, double gamma, int kgrid) {
          BranchOptions bo;
          bo.kgrid = kgrid;
          const auto cls = classify_bands({mu, gamma}, bo);
          py::dict d;
          d["label"] = cls.label;
          py::list iv;
          for (const auto& v : cls.intervals) iv.append(interval_dict(v));
          d["intervals"] = iv;
          return d;
        },
        py::arg("mu"), py::arg("gamma"), py::arg("kgrid") = 8,
        "interval structure label of the essential spectrum");

  m.def("count_discrete",
        [](double mu, double gamma, double z, int n, bool matched) {
          BSOptions bo;
          bo.n = n;
          bo.delta_mode = matched ? DeltaMode::matched : DeltaMode::integrated;
          return count_discrete({mu, gamma}, z, bo).count;
        },
        py::arg("mu"), py::arg("gamma"), py::arg("z"), py::arg("n") = 16,
        py::arg("matched") = false,
        "number of discrete eigenvalues beyond z (counting-operator route)");

  m.def("schur_count",
        [](double mu, double gamma, double z, int n, const std::string& side) {
          return schur_count({mu, gamma}, n, z, parse_side(side));
        },
        py::arg("mu"), py::arg("gamma"), py::arg("z"), py::arg("n") = 6,
        py::arg("side") = "below",
        "direct finite-section eigenvalue count (independent route)");

  m.def("locate_eigenvalues",
        [](double mu, double gamma, double a, double b, int n, bool matched) {
          LocateOptions lo;
          lo.bs.n = n;
          lo.bs.delta_mode =
              matched ? DeltaMode::matched : DeltaMode::integrated;
          return locate_eigenvalues({mu, gamma}, a, b, lo);
        },
        py::arg("mu"), py::arg("gamma"), py::arg("a"), py::arg("b"),
        py::arg("n") = 8, py::arg("matched") = true,
        "individual eigenvalues in a window outside the bands");

  m.def("verify_faddeev",
        [](double mu, double gamma, double z, int n, bool matched) {
          BSOptions bo;
          bo.n = n;
          bo.delta_mode = matched ? DeltaMode::matched : DeltaMode::integrated;
          return verify_faddeev({mu, gamma}, z, bo);
        },
        py::arg("mu"), py::arg("gamma"), py::arg("z"), py::arg("n") = 8,
        py::arg("matched") = true,
        "distance of the transfer-operator spectrum from 1 at z");

  m.def("count_S",
        [](double lam, double r) { return count_S(lam, make_sector_spec(r)); },
        py::arg("lam"), py::arg("r"),
        "eigenvalue count of the radially truncated accumulation model");

  m.def("U_estimate",
        [](double lam, const std::vector<double>& r_list) {
          const auto ue = U_estimate(lam, r_list);
          py::dict d;
          d["value"] = ue.value;
          d["residual"] = ue.residual;
          d["counts"] = ue.counts;
          return d;
        },
        py::arg("lam") = 1.0,
        py::arg("r_list") = std::vector<double>{40.0, 60.0, 80.0},
        "half growth rate of the truncated counting function");

  m.def("fit_log_asymptotics",
        [](const std::vector<std::pair<double, std::int64_t>>& samples,
           double threshold) {
          const auto fit = fit_log_asymptotics(samples, threshold);
          py::dict d;
          d["slope"] = fit.slope;
          d["intercept"] = fit.intercept;
          d["residual"] = fit.residual;
          d["slope_stderr"] = fit.slope_stderr;
          return d;
        },
        py::arg("samples"), py::arg("threshold") = 0.0,
        "least-squares fit of counts against |log distance to threshold|");
}
