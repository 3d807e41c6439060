// report.hpp — machine-readable result documents: key-sorted JSON reports,
// plot-ready CSV tables, deterministic byte output.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "torspec/asymptotics.hpp"
#include "torspec/birman_schwinger.hpp"
#include "torspec/friedrichs.hpp"

namespace torspec {

// nlohmann's default json keeps object keys in sorted order — exactly the
// stable layout the report format promises.
using Json = nlohmann::json;

inline constexpr const char* kToolkitVersion = "1.0.0";

// Every report embeds the conventions needed to interpret its numbers.
struct ReportMeta {
  ModelParams params{};
  int grid{64};
  int kgrid{16};
  double tol{1e-6};
  bool normalized_measure{false};
  std::uint64_t seed{0};
  bool no_timing{false};
};

Json params_json(const ReportMeta& meta);
Json interval_json(const Interval& iv);
Json intervals_json(const std::vector<Interval>& ivs);
Json branch_json(const BranchResult& br);
Json essential_json(const EssentialSpectrum& ess);
Json classification_json(const Classification& cls);
Json constants_json(const CriticalConstants& cc);
Json count_json(const CountResult& cr);
Json logfit_json(const LogFit& fit);
Json u_estimate_json(const UEstimate& ue);

// Assemble the full document: meta under "params", provenance (version, seed,
// optional timing) under "provenance", plus whatever sections the caller adds.
Json make_report(const ReportMeta& meta, double elapsed_ms);

// Serialize with 2-space indentation and a trailing newline; key-sorted by
// construction, byte-stable for identical inputs.
std::string to_string(const Json& j);

// ---- CSV tables ------------------------------------------------------------

// "r,count" rows under a header.
std::string csv_counts(const std::vector<std::pair<double, std::int64_t>>& rows);
// "z,N,log_abs" rows under a header: the fit's samples with their abscissae.
std::string csv_logfit(const LogFit& fit);

// Write a string to a path ("-" or empty = stdout).
void write_output(const std::string& path, const std::string& content);

}  // namespace torspec
