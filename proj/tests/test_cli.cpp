// End-to-end tests driving the installed command-line binary.
// The binary path arrives as the final command-line argument (or via the
// TORSPEC_CLI environment variable); everything before it goes to doctest.
#define DOCTEST_CONFIG_IMPLEMENT
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/stat.h>
#include <sys/wait.h>
#include <vector>

#include <doctest.h>
#include <json.hpp>

namespace {

std::string g_cli;
int g_serial = 0;

struct RunResult {
  int code{-1};
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  const std::string tag = "/tmp/torspec_cli_" + std::to_string(++g_serial);
  const std::string outp = tag + ".out", errp = tag + ".err";
  const std::string cmd = g_cli + " " + args + " >" + outp + " 2>" + errp;
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.code = (rc == -1) ? -1 : (WIFEXITED(rc) ? WEXITSTATUS(rc) : -2);
  r.out = slurp(outp);
  r.err = slurp(errp);
  std::remove(outp.c_str());
  std::remove(errp.c_str());
  return r;
}

nlohmann::json parse(const std::string& s) { return nlohmann::json::parse(s); }

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").code == 0);
  CHECK(run("--help").out.find("edges") != std::string::npos);
  CHECK(run("").code == 2);                  // a subcommand is required
  CHECK(run("count --grid nope").code == 2); // unparsable value
}

TEST_CASE("edges reports the global band") {
  const auto r = run("edges --no-timing");
  REQUIRE(r.code == 0);
  const auto j = parse(r.out);
  CHECK(std::fabs(j["edges"]["lo"].get<double>()) <= 1e-9);
  CHECK(std::fabs(j["edges"]["hi"].get<double>() - 18.0) <= 1e-9);
  REQUIRE(j["bands"].size() == 1);
  CHECK(j["params"]["measure"] == "lebesgue");
}

TEST_CASE("spectrum at negligible coupling is the bare band") {
  const auto r = run("spectrum --gamma 6 --mu 1e-6 --kgrid 4 --no-timing");
  REQUIRE(r.code == 0);
  const auto j = parse(r.out);
  REQUIRE(j["bands"].size() == 1);
  CHECK(j["bands"][0][0].get<double>() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(j["bands"][0][1].get<double>() == doctest::Approx(18.0).epsilon(1e-9));
}

TEST_CASE("branch hull at strong coupling sits fully below the band") {
  const auto r = run("branch --side below --gamma 0 --mu 1.5 --kgrid 4 --no-timing");
  REQUIRE(r.code == 0);
  const auto j = parse(r.out);
  CHECK(j["branch"]["exists"] == true);
  // kgrid 4 has 2 distinct node magnitudes: 4 wedge triples + 2 extremal fibers
  CHECK(j["branch"]["fibers_with_root"].get<int>() == 6);
  CHECK(j["branch"]["hull"][1].get<double>() < 0.0);
  CHECK(j["branch"]["hull"][0].get<double>() <= j["branch"]["hull"][1].get<double>());
}

TEST_CASE("classify mid-regime on the right-critical family") {
  const auto r = run("classify --side right --gamma 7 --kgrid 4 --no-timing");
  REQUIRE(r.code == 0);
  const auto j = parse(r.out);
  CHECK(j["case"] == "6 <= gamma < 12");
  REQUIRE(j["bands"].size() == 1);
  CHECK(j["bands"][0][0].get<double>() == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(j["bands"][0][1].get<double>() == doctest::Approx(18.0).epsilon(1e-6));
}

TEST_CASE("classify rejects out-of-domain and boundary shifts") {
  CHECK(run("classify --side right --gamma 13").code == 2);
  CHECK(run("classify --side left --gamma 6").code == 4);
  CHECK(run("classify --side up --gamma 3").code == 2);
}

TEST_CASE("critical constants through the pipe") {
  const auto r = run("critical --no-timing");
  REQUIRE(r.code == 0);
  const auto j = parse(r.out)["constants"];
  CHECK(j["J0"].get<double>() == doctest::Approx(95.47006999944851).epsilon(1e-9));
  CHECK(j["mu0"].get<double>() ==
        doctest::Approx(0.3545332750360475).epsilon(1e-10));
  CHECK(std::fabs(j["gamma0"].get<double>() - (-3.127352359755146)) <= 1e-6);
  CHECK(std::fabs(j["gamma1"].get<double>() - 15.127352359755145) <= 1e-6);
  CHECK(std::fabs(j["gamma0"].get<double>() + j["gamma1"].get<double>() - 12.0) <=
        1e-9);
}

TEST_CASE("count: frozen values, determinism, side screening") {
  const std::string cmd =
      "count --gamma 0 --mu 1.5 --grid 6 --matched --z -16 --z -24 --no-timing";
  const auto r1 = run(cmd);
  REQUIRE(r1.code == 0);
  const auto j = parse(r1.out);
  REQUIRE(j["counts"].size() == 2);
  CHECK(j["counts"][0]["count"].get<int>() == 1);
  CHECK(j["counts"][1]["count"].get<int>() == 0);
  CHECK(j["counts"][0]["side"] == "below");
  const auto r2 = run(cmd);
  CHECK(r1.out == r2.out);  // byte-identical reruns
  CHECK(run("count --gamma 0 --mu 1.5 --grid 6 --matched --z -16 --side above")
            .code == 2);
}

TEST_CASE("count error mapping") {
  CHECK(run("count --gamma 6 --mu 0.5 --grid 6 --matched --z -0.3").code == 4);
  CHECK(run("count --gamma 0 --mu 1.5 --grid 5 --matched --z -16").code == 2);
  CHECK(run("count --gamma 0 --mu 1.5 --grid 6 --matched --z 9").code == 4);
  CHECK(run("count --gamma 0 --mu 1.5 --grid 6 --matched").code == 2);
}

TEST_CASE("count warns when z is below the resolvable scale") {
  const auto r = run("count --gamma 6 --grid 16 --z -1e-3 --no-timing");
  REQUIRE(r.code == 0);
  CHECK(r.err.find("resolvable") != std::string::npos);
  const auto j = parse(r.out);
  CHECK(j["counts"][0]["count"].get<int>() == 0);
}

TEST_CASE("count CSV layout") {
  const auto r = run(
      "count --gamma 0 --mu 1.5 --grid 6 --matched --z -16 --out csv");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "z,N,log_abs");
  REQUIRE(std::getline(in, line));
  CHECK(line.substr(0, 6) == "-16,1,");
}

TEST_CASE("asymp growth estimate, json and csv") {
  const auto r = run("asymp --no-timing");
  REQUIRE(r.code == 0);
  const auto j = parse(r.out)["u_estimate"];
  CHECK(j["value"].get<double>() == doctest::Approx(0.0125).epsilon(1e-9));
  REQUIRE(j["counts"].size() == 3);

  const auto c = run("asymp --out csv");
  REQUIRE(c.code == 0);
  std::istringstream in(c.out);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "r,count");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3);

  const auto s = run("asymp --r-list 20,40,60 --no-timing");
  REQUIRE(s.code == 0);
  const auto js = parse(s.out)["u_estimate"];
  CHECK(js["value"].get<double>() == doctest::Approx(0.0125).epsilon(1e-9));
  CHECK(js["counts"] == nlohmann::json::array({1, 2, 2}));
}

TEST_CASE("oracle: dense section, counts, dump") {
  const std::string dump = "/tmp/torspec_cli_dump.bin";
  const auto r = run("oracle --gamma 6 --mu 0.5 --grid 4 --z -8 --z 26 --dump " +
                     dump + " --no-timing");
  REQUIRE(r.code == 0);
  const auto j = parse(r.out)["oracle"];
  // grid 4: 64 one-particle modes + 64*65/2 = 2080 symmetric pair modes
  CHECK(j["dim"].get<int>() == 2144);
  CHECK(std::fabs(j["min_eigenvalue"].get<double>() - (-0.750237)) <= 2e-6);
  CHECK(j["counts"][0]["count"].get<int>() == 0);
  CHECK(j["counts"][1]["count"].get<int>() == 0);
  CHECK(j["counts"][0]["route"] == "dense");
  struct stat st{};
  REQUIRE(stat(dump.c_str(), &st) == 0);
  CHECK(st.st_size ==
        16 + static_cast<long long>(2144) * 2144 * 8);
  std::remove(dump.c_str());
}

TEST_CASE("eigs localizes the edge eigenvalue with a certificate") {
  const auto r = run(
      "eigs --gamma 6 --mu 0.5 --grid 4 --matched --a -2 --b -0.3 --no-timing");
  REQUIRE(r.code == 0);
  const auto j = parse(r.out);
  REQUIRE(j["eigenvalues"].size() == 1);
  CHECK(std::fabs(j["eigenvalues"][0].get<double>() - (-0.750237)) <= 2e-6);
  REQUIRE(j["residuals"].size() == 1);
  CHECK(j["residuals"][0].get<double>() <= 1e-4);
}

TEST_CASE("selftest passes and is deterministic") {
  const auto r1 = run("selftest --no-timing --seed 3");
  REQUIRE(r1.code == 0);
  const auto j = parse(r1.out);
  CHECK(j["all_pass"] == true);
  CHECK(j["suites"].size() == 10);
  for (const auto& s : j["suites"]) CHECK(s["pass"] == true);
  const auto r2 = run("selftest --no-timing --seed 3");
  CHECK(r1.out == r2.out);
}

TEST_CASE("config file values are picked up") {
  const std::string cfg = "/tmp/torspec_cli_cfg.ini";
  {
    std::ofstream f(cfg);
    f << "gamma=0\nmu=1.5\ngrid=6\nmatched=true\nno-timing=true\n";
  }
  const auto r = run("count --config " + cfg + " --z -16");
  REQUIRE(r.code == 0);
  const auto j = parse(r.out);
  CHECK(j["counts"][0]["count"].get<int>() == 1);
  CHECK(j["params"]["gamma"].get<double>() == doctest::Approx(0.0));
  std::remove(cfg.c_str());
}

TEST_CASE("--output writes the report to a file") {
  const std::string path = "/tmp/torspec_cli_edges.json";
  const auto r = run("edges --no-timing --output " + path);
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const auto j = parse(slurp(path));
  CHECK(j.contains("edges"));
  std::remove(path.c_str());
}

int main(int argc, char** argv) {
  std::vector<const char*> args;
  for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
  if (args.size() > 1 && args.back()[0] != '-') {
    g_cli = args.back();
    args.pop_back();
  }
  if (g_cli.empty()) {
    if (const char* env = std::getenv("TORSPEC_CLI")) g_cli = env;
  }
  if (g_cli.empty()) {
    std::fprintf(stderr,
                 "usage: %s [doctest flags] <path-to-cli-binary>\n"
                 "(or set TORSPEC_CLI)\n",
                 argv[0]);
    return 2;
  }
  doctest::Context ctx(static_cast<int>(args.size()),
                       const_cast<char**>(args.data()));
  return ctx.run();
}
