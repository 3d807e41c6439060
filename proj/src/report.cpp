// report.cpp — JSON / CSV emission.
#include "torspec/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "torspec/errors.hpp"

namespace torspec {

namespace {

const char* side_name(Side s) { return s == Side::below ? "below" : "above"; }

Json vec3_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

}  // namespace

Json params_json(const ReportMeta& meta) {
  return Json{
      {"mu", meta.params.mu},
      {"gamma", meta.params.gamma},
      {"grid", meta.grid},
      {"kgrid", meta.kgrid},
      {"tol", meta.tol},
      {"measure", meta.normalized_measure ? "normalized" : "lebesgue"},
      {"kernel_reading",
       "two-particle symbol eps(k)+eps(mid(k,p))+eps(p) with geodesic midpoint; "
       "asymptotic kernel 25/(8 pi^2 sqrt 6)/(5 cosh y + t), t = inner product"},
  };
}

Json interval_json(const Interval& iv) { return Json::array({iv.lo, iv.hi}); }

Json intervals_json(const std::vector<Interval>& ivs) {
  Json a = Json::array();
  for (const auto& iv : ivs) a.push_back(interval_json(iv));
  return a;
}

Json branch_json(const BranchResult& br) {
  Json j{{"exists", br.exists}, {"fibers_with_root", br.fibers_with_root}};
  if (br.exists) {
    j["hull"] = interval_json(br.hull);
    j["arg_lo"] = vec3_json(br.arg_lo);
    j["arg_hi"] = vec3_json(br.arg_hi);
  }
  return j;
}

Json essential_json(const EssentialSpectrum& ess) {
  return Json{
      {"intervals", intervals_json(ess.intervals)},
      {"band", interval_json(ess.band)},
      {"branch_below", branch_json(ess.below)},
      {"branch_above", branch_json(ess.above)},
  };
}

Json classification_json(const Classification& cls) {
  return Json{
      {"label", cls.label},
      {"intervals", intervals_json(cls.intervals)},
      {"essential", essential_json(cls.ess)},
  };
}

Json constants_json(const CriticalConstants& cc) {
  return Json{
      {"J0", cc.J0},           {"mu0", cc.mu0},
      {"gamma0", cc.gamma0},   {"gamma1", cc.gamma1},
      {"k0", vec3_json(cc.k0)}, {"k1", vec3_json(cc.k1)},
      {"iters0", cc.iters0},   {"iters1", cc.iters1},
  };
}

Json count_json(const CountResult& cr) {
  return Json{
      {"count", cr.count},
      {"z", cr.z},
      {"side", side_name(cr.side)},
      {"grid", cr.n},
      {"min_abs_delta", cr.min_abs_delta},
  };
}

Json logfit_json(const LogFit& fit) {
  Json samples = Json::array();
  for (const auto& [z, N] : fit.samples)
    samples.push_back(Json{{"z", z}, {"N", N}});
  return Json{
      {"threshold", fit.threshold},
      {"slope", fit.slope},
      {"intercept", fit.intercept},
      {"residual", fit.residual},
      {"slope_stderr", fit.slope_stderr},
      {"window", Json::array({fit.window.first, fit.window.second})},
      {"samples", samples},
  };
}

Json u_estimate_json(const UEstimate& ue) {
  return Json{
      {"value", ue.value},
      {"residual", ue.residual},
      {"r_list", ue.r_list},
      {"counts", ue.counts},
  };
}

Json make_report(const ReportMeta& meta, double elapsed_ms) {
  Json provenance{{"version", kToolkitVersion}, {"seed", meta.seed}};
  if (!meta.no_timing) provenance["elapsed_ms"] = elapsed_ms;
  return Json{{"params", params_json(meta)}, {"provenance", provenance}};
}

std::string to_string(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_counts(const std::vector<std::pair<double, std::int64_t>>& rows) {
  std::ostringstream os;
  os << "r,count\n";
  for (const auto& [r, c] : rows) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", r);
    os << buf << "," << c << "\n";
  }
  return os.str();
}

std::string csv_logfit(const LogFit& fit) {
  std::ostringstream os;
  os << "z,N,log_abs\n";
  for (const auto& [z, N] : fit.samples) {
    char zb[64], lb[64];
    std::snprintf(zb, sizeof zb, "%.17g", z);
    std::snprintf(lb, sizeof lb, "%.17g",
                  std::fabs(std::log(std::fabs(z - fit.threshold))));
    os << zb << "," << N << "," << lb << "\n";
  }
  return os.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open " + path + " for writing");
  f << content;
  if (!f) throw DomainError("short write to " + path);
}

}  // namespace torspec
