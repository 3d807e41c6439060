// main.cpp — command-line front end: spectra, counts, fits, self-test.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "torspec/asymptotics.hpp"
#include "torspec/birman_schwinger.hpp"
#include "torspec/direct.hpp"
#include "torspec/errors.hpp"
#include "torspec/friedrichs.hpp"
#include "torspec/quadrature.hpp"
#include "torspec/report.hpp"

namespace ts = torspec;

namespace {

struct Options {
  double gamma{6.0};
  std::optional<double> mu;  // default: critical double-threshold coupling
  int grid{64};
  int kgrid{16};
  double tol{1e-6};
  std::vector<double> zs;
  std::string side;
  std::vector<double> r_list{40.0, 60.0, 80.0};
  std::string out{"json"};
  std::string output;
  int threads{1};
  bool normalized{false};
  std::uint64_t seed{0};
  bool no_timing{false};
  bool matched{false};
  double lambda{1.0};
  double a{0.0}, b{0.0};
  double fit_threshold{std::numeric_limits<double>::quiet_NaN()};
  std::string dump_path;
};

double resolve_mu(const Options& o) {
  if (o.mu) return *o.mu;
  const double j0 = ts::I_integral(ts::kZero, 0.0).value;
  return std::sqrt(ts::kMirrorGammaSum / j0);
}

ts::ModelParams model(const Options& o) { return {resolve_mu(o), o.gamma}; }

ts::Side parse_side(const std::string& s) {
  if (s == "below") return ts::Side::below;
  if (s == "above") return ts::Side::above;
  throw ts::DomainError("side must be 'below' or 'above', got '" + s + "'");
}

ts::ReportMeta meta_of(const Options& o, const ts::ModelParams& p) {
  ts::ReportMeta m;
  m.params = p;
  m.grid = o.grid;
  m.kgrid = o.kgrid;
  m.tol = o.tol;
  m.normalized_measure = o.normalized;
  m.seed = o.seed;
  m.no_timing = o.no_timing;
  return m;
}

ts::BranchOptions branch_opts(const Options& o) {
  ts::BranchOptions bo;
  bo.kgrid = o.kgrid;
  bo.quad.normalized_measure = false;  // fiber integrals use the model measure
  return bo;
}

ts::BSOptions bs_opts(const Options& o) {
  ts::BSOptions b;
  b.n = o.grid;
  b.delta_mode = o.matched ? ts::DeltaMode::matched : ts::DeltaMode::integrated;
  b.normalized_measure = o.normalized;
  b.threads = o.threads;
  return b;
}

void warn_resolution(const Options& o) {
  const double scale = (ts::kTwoPi / o.grid) * (ts::kTwoPi / o.grid);
  for (double z : o.zs) {
    const double dist = std::min(std::fabs(z), std::fabs(z - ts::kBandTop));
    if (dist > 0.0 && dist < scale)
      std::cerr << "warning: |z - edge| = " << dist
                << " is below the resolvable scale ~" << scale << " of grid "
                << o.grid << "; counts may lag the true accumulation\n";
  }
}

// ---- subcommand bodies -----------------------------------------------------

ts::Json run_edges(const Options& o, const ts::ModelParams& p) {
  const ts::BandEdges e = ts::global_band_edges();
  ts::Json j = ts::make_report(meta_of(o, p), 0.0);
  j["edges"] = ts::Json{{"lo", e.lo}, {"hi", e.hi}};
  j["bands"] = ts::Json::array({ts::Json::array({e.lo, e.hi})});
  return j;
}

ts::Json run_branch(const Options& o, const ts::ModelParams& p) {
  if (o.side.empty())
    throw ts::DomainError("branch requires --side below|above");
  const auto br = ts::two_particle_branch(parse_side(o.side), p, branch_opts(o));
  ts::Json j = ts::make_report(meta_of(o, p), 0.0);
  j["branch"] = ts::branch_json(br);
  return j;
}

ts::Json run_spectrum(const Options& o, const ts::ModelParams& p) {
  const auto ess = ts::essential_spectrum(p, branch_opts(o));
  ts::Json j = ts::make_report(meta_of(o, p), 0.0);
  j["bands"] = ts::intervals_json(ess.intervals);
  j["essential"] = ts::essential_json(ess);
  return j;
}

ts::Json run_classify(const Options& o) {
  if (o.side != "left" && o.side != "right")
    throw ts::DomainError("classify requires --side left|right (which critical "
                          "coupling family to sit on)");
  const bool right = o.side == "right";
  const double g = o.gamma;
  std::string regime;
  const double btol = 1e-9;
  // The inner regime boundaries (the dual critical shifts) are expensive to
  // compute, so they are resolved only when gamma actually lands near them.
  if (right) {
    if (std::fabs(g - 6.0) < btol || std::fabs(g - 12.0) < btol)
      throw ts::AmbiguityError("gamma sits on a regime boundary");
    if (g >= 12.0)
      throw ts::DomainError("right-critical coupling needs gamma < 12");
    if (g > 6.0) {
      regime = "6 <= gamma < 12";
    } else {
      const auto cc = ts::critical_constants();
      if (std::fabs(g - cc.gamma0) < btol)
        throw ts::AmbiguityError("gamma sits on a regime boundary");
      regime = g < cc.gamma0 ? "gamma < gamma0" : "gamma0 <= gamma < 6";
    }
  } else {
    if (std::fabs(g) < btol || std::fabs(g - 6.0) < btol)
      throw ts::AmbiguityError("gamma sits on a regime boundary");
    if (g <= 0.0)
      throw ts::DomainError("left-critical coupling needs gamma > 0");
    if (g < 6.0) {
      regime = "0 < gamma <= 6";
    } else {
      const auto cc = ts::critical_constants();
      if (std::fabs(g - cc.gamma1) < btol)
        throw ts::AmbiguityError("gamma sits on a regime boundary");
      regime = g <= cc.gamma1 ? "6 < gamma <= gamma1" : "gamma > gamma1";
    }
  }
  ts::ModelParams p;
  p.gamma = g;
  p.mu = o.mu ? *o.mu
              : ts::critical_mu(right ? ts::Side::above : ts::Side::below, g);
  const auto cls = ts::classify_bands(p, branch_opts(o));
  ts::Json j = ts::make_report(meta_of(o, p), 0.0);
  j["case"] = regime;
  j["bands"] = ts::intervals_json(cls.intervals);
  j["classification"] = ts::classification_json(cls);
  return j;
}

ts::Json run_critical(const Options& o) {
  const auto cc = ts::critical_constants();
  ts::ModelParams p{cc.mu0, o.gamma};
  ts::Json j = ts::make_report(meta_of(o, p), 0.0);
  j["constants"] = ts::constants_json(cc);
  return j;
}

std::vector<ts::CountResult> compute_counts(const Options& o,
                                            const ts::ModelParams& p) {
  warn_resolution(o);
  const ts::BSOptions bo = bs_opts(o);
  std::vector<ts::CountResult> all;
  if (o.grid <= ts::kDenseMaxN) {
    for (double z : o.zs) all.push_back(ts::count_discrete(p, z, bo));
  } else {
    // Channel path: group by side, then restore the input order.
    std::vector<double> lows, highs;
    for (double z : o.zs) (z <= 0.0 ? lows : highs).push_back(z);
    ts::ChannelCounter cc(p, bo);
    std::vector<ts::CountResult> lr, hr;
    if (!lows.empty()) lr = cc.counts(lows, ts::Side::below);
    if (!highs.empty()) hr = cc.counts(highs, ts::Side::above);
    std::size_t il = 0, ih = 0;
    for (double z : o.zs) all.push_back(z <= 0.0 ? lr[il++] : hr[ih++]);
  }
  return all;
}

ts::Json run_count(const Options& o, const ts::ModelParams& p) {
  if (o.zs.empty()) throw ts::DomainError("count requires at least one --z");
  if (!o.side.empty()) {
    const ts::Side want = parse_side(o.side);
    for (double z : o.zs) {
      const ts::Side got = z <= 0.0 ? ts::Side::below : ts::Side::above;
      if (got != want)
        throw ts::DomainError("z = " + std::to_string(z) +
                              " is not on the requested side");
    }
  }
  const auto counts = compute_counts(o, p);
  ts::Json j = ts::make_report(meta_of(o, p), 0.0);
  ts::Json arr = ts::Json::array();
  for (const auto& c : counts) arr.push_back(ts::count_json(c));
  j["counts"] = arr;
  if (!std::isnan(o.fit_threshold)) {
    std::vector<std::pair<double, std::int64_t>> samples;
    for (const auto& c : counts) samples.emplace_back(c.z, c.count);
    j["fits"] = ts::Json::array(
        {ts::logfit_json(ts::fit_log_asymptotics(samples, o.fit_threshold))});
  }
  return j;
}

std::string count_csv(const Options& o, const ts::ModelParams& p) {
  if (o.zs.empty()) throw ts::DomainError("count requires at least one --z");
  const auto counts = compute_counts(o, p);
  std::ostringstream os;
  os << "z,N,log_abs\n";
  for (const auto& c : counts) {
    const double dist =
        std::min(std::fabs(c.z), std::fabs(c.z - ts::kBandTop));
    char zb[64], lb[64];
    std::snprintf(zb, sizeof zb, "%.17g", c.z);
    std::snprintf(lb, sizeof lb, "%.17g", std::fabs(std::log(dist)));
    os << zb << "," << c.count << "," << lb << "\n";
  }
  return os.str();
}

ts::Json run_eigs(const Options& o, const ts::ModelParams& p) {
  if (!(o.a < o.b)) throw ts::DomainError("eigs requires --a < --b");
  ts::LocateOptions lo;
  lo.bs = bs_opts(o);
  lo.tol = o.tol;
  const auto evs = ts::locate_eigenvalues(p, o.a, o.b, lo);
  ts::Json j = ts::make_report(meta_of(o, p), 0.0);
  j["eigenvalues"] = evs;
  if (o.grid <= 12) {
    ts::Json res = ts::Json::array();
    for (double e : evs) res.push_back(ts::verify_faddeev(p, e, lo.bs));
    j["residuals"] = res;
  }
  return j;
}

ts::Json run_asymp(const Options& o, const ts::ModelParams& p) {
  const auto ue = ts::U_estimate(o.lambda, o.r_list);
  ts::Json j = ts::make_report(meta_of(o, p), 0.0);
  j["u_estimate"] = ts::u_estimate_json(ue);
  return j;
}

std::string asymp_csv(const Options& o) {
  const auto ue = ts::U_estimate(o.lambda, o.r_list);
  std::vector<std::pair<double, std::int64_t>> rows;
  for (std::size_t i = 0; i < ue.r_list.size(); ++i)
    rows.emplace_back(ue.r_list[i], ue.counts[i]);
  return ts::csv_counts(rows);
}

ts::Json run_oracle(const Options& o, const ts::ModelParams& p) {
  ts::Json j = ts::make_report(meta_of(o, p), 0.0);
  ts::Json sec;
  const std::int64_t n3 = static_cast<std::int64_t>(o.grid) * o.grid * o.grid;
  const std::int64_t dim = n3 + n3 * (n3 + 1) / 2;
  sec["band_fuzz"] = ts::band_fuzz(o.grid);
  if (dim <= ts::kDirectDenseMaxDim) {
    const auto m = ts::build_direct_matrix(p, o.grid, o.normalized);
    const auto spec = ts::direct_spectrum(m);
    sec["dim"] = m.dim();
    sec["min_eigenvalue"] = spec.front();
    sec["max_eigenvalue"] = spec.back();
    if (!o.dump_path.empty()) {
      ts::dump_matrix(m, o.dump_path);
      sec["dump"] = o.dump_path;
    }
    ts::Json counts = ts::Json::array();
    for (double z : o.zs) {
      const ts::Side side = z <= 0.0 ? ts::Side::below : ts::Side::above;
      counts.push_back(ts::Json{{"z", z},
                                {"count", ts::direct_count(spec, o.grid, z, side)},
                                {"route", "dense"}});
    }
    sec["counts"] = counts;
  } else {
    if (!o.dump_path.empty())
      throw ts::CapacityError("matrix too large to build; cannot dump");
    ts::Json counts = ts::Json::array();
    for (double z : o.zs) {
      const ts::Side side = z <= 0.0 ? ts::Side::below : ts::Side::above;
      counts.push_back(
          ts::Json{{"z", z},
                   {"count", ts::schur_count(p, o.grid, z, side, o.normalized)},
                   {"route", "schur"}});
    }
    sec["counts"] = counts;
  }
  j["oracle"] = sec;
  return j;
}

// ---- self-test -------------------------------------------------------------

struct Suite {
  std::string name;
  bool pass;
  std::string note;
};

ts::Json run_selftest(const Options& o) {
  std::vector<Suite> suites;
  auto add = [&](const std::string& name, bool ok, const std::string& note) {
    suites.push_back({name, ok, note});
  };
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> uni(-ts::kPi, ts::kPi);

  {  // global band edges
    const auto e = ts::global_band_edges();
    const bool ok = std::fabs(e.lo) <= 1e-9 && std::fabs(e.hi - 18.0) <= 1e-9;
    add("band-edges", ok, "lo=" + std::to_string(e.lo));
  }
  {  // two-particle symbol mirror identity on random pairs
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const ts::Vec3 k{uni(rng), uni(rng), uni(rng)};
      const ts::Vec3 p{uni(rng), uni(rng), uni(rng)};
      worst = std::max(
          worst, std::fabs(ts::w2(ts::mirror(k), ts::mirror(p)) + ts::w2(k, p) -
                           ts::kBandTop));
    }
    add("symbol-mirror", worst <= 1e-12, "max residual " + std::to_string(worst));
  }
  {  // threshold fiber integral against its frozen value
    const double j0 = ts::I_integral(ts::kZero, 0.0).value;
    add("threshold-integral", std::fabs(j0 - 95.47006999944851) <= 1e-6,
        "J0=" + std::to_string(j0));
  }
  {  // critical-coupling duality on a gamma grid
    double worst = 0.0;
    for (double g : {1.0, 3.0, 5.0, 6.0, 8.5, 11.0}) {
      worst = std::max(worst, std::fabs(ts::critical_mu(ts::Side::above, g) -
                                        ts::critical_mu(ts::Side::below,
                                                        ts::kMirrorGammaSum - g)));
    }
    add("critical-duality", worst <= 1e-13, "max gap " + std::to_string(worst));
  }
  {  // determinant mirror identity at a few random points
    double worst = 0.0;
    ts::QuadratureSpec qs{{16, 32, 64}, false, 0.0};
    for (int t = 0; t < 5; ++t) {
      const ts::Vec3 k{uni(rng), uni(rng), uni(rng)};
      const double z = -0.5 - 2.0 * (t + 1);
      const double mu = 0.3 + 0.1 * t, g = 2.0 + t;
      const double d1 = ts::delta(ts::add(ts::kCorner, k), ts::kBandTop - z,
                                  {mu, g}, qs);
      const double d2 = ts::delta(k, z, {mu, ts::kMirrorGammaSum - g}, qs);
      worst = std::max(worst, std::fabs(d1 + d2));
    }
    add("determinant-mirror", worst <= 1e-6, "max residual " + std::to_string(worst));
  }
  {  // counting identity against the brute-force section
    const ts::ModelParams p{1.5, 0.0};
    ts::BSOptions bo;
    bo.n = 6;
    bo.delta_mode = ts::DeltaMode::matched;
    bool ok = true;
    for (double z : {-16.0, -18.0, -24.0}) {
      const auto c = ts::count_discrete(p, z, bo);
      const auto s = ts::schur_count(p, 6, z, ts::Side::below);
      ok = ok && c.count == s;
    }
    add("count-vs-direct", ok, "matched grid 6");
  }
  {  // symmetrized pair embedding preserves norms
    const int n = 4;
    const ts::TorusGrid tg(n);
    const std::int64_t N = tg.size();
    std::vector<double> f(static_cast<std::size_t>(N) * N);
    for (std::int64_t i = 0; i < N; ++i)
      for (std::int64_t j = i; j < N; ++j)
        f[i * N + j] = f[j * N + i] = uni(rng);
    double full = 0.0, packed = 0.0;
    for (std::int64_t i = 0; i < N; ++i)
      for (std::int64_t j = 0; j < N; ++j)
        full += tg.weight * tg.weight * f[i * N + j] * f[i * N + j];
    for (std::int64_t i = 0; i < N; ++i)
      for (std::int64_t j = i; j < N; ++j) {
        const double s = (i == j) ? 1.0 : std::sqrt(2.0);
        const double v = s * tg.weight * f[i * N + j];
        packed += v * v;
      }
    add("pair-isometry", std::fabs(full - packed) <= 1e-13 * std::max(1.0, full),
        "defect " + std::to_string(full - packed));
  }
  {  // sector closed forms vs quadrature
    double worst = 0.0;
    for (double y : {0.0, 0.7, 2.0, 10.0, 40.0}) {
      worst = std::max(worst, std::fabs(ts::sector_kernel(0, y) -
                                        ts::sector_kernel_closed(0, y)));
      worst = std::max(worst, std::fabs(ts::sector_kernel(1, y) -
                                        ts::sector_kernel_closed(1, y)));
    }
    add("sector-closed-forms", worst <= 1e-10, "max gap " + std::to_string(worst));
  }
  {  // truncated model operator: frozen small-radius count
    const auto c = ts::count_S(1.0, ts::make_sector_spec(20.0));
    add("sector-count", c == 1, "count " + std::to_string(c));
  }
  {  // report round-trip
    ts::ReportMeta m;
    m.no_timing = true;
    ts::Json j = ts::make_report(m, 0.0);
    j["counts"] = ts::Json::array({ts::count_json({3, -1.0, ts::Side::below, 8, 0.5})});
    const std::string s1 = ts::to_string(j);
    const std::string s2 = ts::to_string(ts::Json::parse(s1));
    add("report-roundtrip", s1 == s2, "");
  }

  bool all = true;
  ts::Json arr = ts::Json::array();
  for (const auto& s : suites) {
    all = all && s.pass;
    arr.push_back(ts::Json{{"name", s.name}, {"pass", s.pass}, {"note", s.note}});
  }
  ts::ReportMeta m;
  m.seed = o.seed;
  m.no_timing = o.no_timing;
  ts::Json j = ts::make_report(m, 0.0);
  j["suites"] = arr;
  j["all_pass"] = all;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral toolkit for a coupled two-channel lattice model"};
  app.fallthrough();
  app.set_config("--config");
  Options o;
  double mu_in = std::numeric_limits<double>::quiet_NaN();

  app.add_option("--gamma", o.gamma, "one-particle channel shift");
  app.add_option("--mu", mu_in, "coupling strength (default: critical)");
  app.add_option("--grid", o.grid, "product-grid nodes per axis");
  app.add_option("--kgrid", o.kgrid, "fiber-sweep nodes per axis");
  app.add_option("--tol", o.tol, "tolerance for root finding / localization");
  app.add_option("--z", o.zs, "spectral parameter(s)");
  app.add_option("--side", o.side, "below|above (branch, count) or left|right (classify)");
  app.add_option("--r-list", o.r_list, "radii for the growth estimate")->delimiter(',');
  app.add_option("--out", o.out, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output", o.output, "output path (default stdout)");
  app.add_option("--threads", o.threads, "assembly threads");
  app.add_flag("--normalized-measure", o.normalized, "probability measure on the torus");
  app.add_option("--seed", o.seed, "seed for randomized suites");
  app.add_flag("--no-timing", o.no_timing, "omit timing from provenance");
  app.add_flag("--matched", o.matched, "same-grid determinant (oracle pairing)");
  app.add_option("--lambda", o.lambda, "counting level for the model operator");
  app.add_option("--a", o.a, "window lower end (eigs)");
  app.add_option("--b", o.b, "window upper end (eigs)");
  app.add_option("--fit-threshold", o.fit_threshold,
                 "fit counts against |log|z - threshold||");
  app.add_option("--dump", o.dump_path, "binary matrix dump path (oracle)");

  auto* c_edges = app.add_subcommand("edges", "global band edges");
  auto* c_branch = app.add_subcommand("branch", "fiber-root branch hull");
  auto* c_spectrum = app.add_subcommand("spectrum", "essential spectrum intervals");
  auto* c_classify = app.add_subcommand("classify", "regime classification at critical coupling");
  auto* c_critical = app.add_subcommand("critical", "critical couplings and constants");
  auto* c_count = app.add_subcommand("count", "eigenvalue counts outside the band");
  auto* c_eigs = app.add_subcommand("eigs", "individual eigenvalues in a window");
  auto* c_asymp = app.add_subcommand("asymp", "model-operator growth estimate");
  auto* c_oracle = app.add_subcommand("oracle", "brute-force finite-section oracle");
  auto* c_selftest = app.add_subcommand("selftest", "invariant suites");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // usage problems map to the invalid-parameter code
  }
  if (!std::isnan(mu_in)) o.mu = mu_in;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    ts::Json j;
    std::string text;
    if (c_edges->parsed()) j = run_edges(o, model(o));
    else if (c_branch->parsed()) j = run_branch(o, model(o));
    else if (c_spectrum->parsed()) j = run_spectrum(o, model(o));
    else if (c_classify->parsed()) j = run_classify(o);
    else if (c_critical->parsed()) j = run_critical(o);
    else if (c_count->parsed()) {
      if (o.out == "csv") text = count_csv(o, model(o));
      else j = run_count(o, model(o));
    } else if (c_eigs->parsed()) j = run_eigs(o, model(o));
    else if (c_asymp->parsed()) {
      if (o.out == "csv") text = asymp_csv(o);
      else j = run_asymp(o, model(o));
    } else if (c_oracle->parsed()) j = run_oracle(o, model(o));
    else if (c_selftest->parsed()) j = run_selftest(o);

    if (text.empty()) {
      if (!o.no_timing) {
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        if (j.contains("provenance")) j["provenance"]["elapsed_ms"] = ms;
      }
      text = ts::to_string(j);
    }
    ts::write_output(o.output, text);
    if (c_selftest->parsed() && j.contains("all_pass") && !j["all_pass"].get<bool>())
      return 1;
    return 0;
  } catch (const ts::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
