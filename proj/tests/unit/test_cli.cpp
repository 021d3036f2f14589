#include <catch_amalgamated.hpp>

#include <gevrey/gevrey.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gevrey;
namespace fs = std::filesystem;

namespace {

struct Run {
  std::string out;
  int code = -1;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(GEVREY_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string sample(const std::string& name) { return std::string(GEVREY_SOURCE_DIR) + "/samples/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpectrumSpec spectrum_of(const std::string& name) { return parse_spectrum(slurp(sample(name))); }
StateVector state_of(const std::string& name) { return parse_state(slurp(sample(name))); }

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("gevrey_cli_test_" + std::to_string(getpid()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("classify matches the module call") {
  const Run r = run("classify --spectrum " + sample("real_power.json") + " --beta 1");
  CHECK(r.code == 0);
  const SpectrumSpec spec = spectrum_of("real_power.json");
  CHECK(r.out == cmd_classify(spec, 1.0, default_b_grid(), spec.truncation_default(), Format::json).output);
  const Json j = Json::parse(r.out);
  CHECK(j.at("complement_bounded") == true);
  CHECK(j.contains("radius"));
  CHECK(j.contains("witnesses"));
  CHECK(j.contains("b_found"));

  const Run csv = run("classify --spectrum " + sample("imaginary_exponential.json") + " --beta 2 --format csv");
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("im,re_minus,re_plus\n", 0) == 0);
}

TEST_CASE("gevrey and estimate match the module calls") {
  const SpectrumSpec spec = spectrum_of("real_power.json");
  const StateVector f = state_of("exp_linear.json");
  const Run g = run("gevrey --spectrum " + sample("real_power.json") + " --state " + sample("exp_linear.json") +
                    " --beta 1 --flavor roumieu");
  CHECK(g.code == 0);
  CHECK(g.out == cmd_gevrey(spec, f, 1.0, Flavor::roumieu, {0.5, 1, 2}, 0).output);
  CHECK(Json::parse(g.out).at("member") == "yes");

  const Run b = run("gevrey --spectrum " + sample("real_power.json") + " --state " + sample("exp_linear.json") +
                    " --beta 1 --flavor beurling");
  CHECK(Json::parse(b.out).at("member") == "no");

  const Run e = run("estimate --spectrum " + sample("real_power.json") + " --state " + sample("exp_linear.json") +
                    " --format csv");
  CHECK(e.code == 0);
  CHECK(e.out == cmd_estimate(spec, f, 40, 0, Format::csv).output);
  CHECK(e.out.rfind("n,log_m_n,fitted_log_m_n\n", 0) == 0);
}

TEST_CASE("evolve and apply match the module calls") {
  const SpectrumSpec spec = spectrum_of("finite_list.json");
  const StateVector f = state_of("finite_state.json");
  const std::string args = "evolve --spectrum " + sample("finite_list.json") + " --state " + sample("finite_state.json") +
                           " --t-grid -0.5:0.5:0.25 --derivatives 2 --check-mild";
  for (Format fmt : {Format::json, Format::csv}) {
    const Run r = run(args + (fmt == Format::csv ? " --format csv" : ""));
    CHECK(r.code == 0);
    CHECK(r.out == cmd_evolve(spec, f, {-0.5, -0.25, 0, 0.25, 0.5}, 2, true, 0, fmt).output);
  }

  const Run a = run("apply --spectrum " + sample("finite_list.json") + " --state " + sample("finite_state.json") +
                    " --fn 'exp(t*lambda)' --t 0.5");
  CHECK(a.code == 0);
  CHECK(a.out == cmd_apply(spec, f, "exp(t*lambda)", {{"t", 0.5}}, 0).output);

  // e^{2A} e^{-k} on lambda_k = k is outside the domain.
  const Run d = run("apply --spectrum " + sample("real_power.json") + " --state " + sample("exp_linear.json") +
                    " --fn 'exp(t*lambda)' --t 2");
  CHECK(d.code == 1);
  CHECK(Json::parse(d.out).at("domain").at("verdict") == "diverges");
}

TEST_CASE("counterexample writes the state and certificate") {
  const fs::path dir = scratch();
  const std::string fpath = (dir / "f.json").string(), cpath = (dir / "cert.json").string();
  const Run r = run("counterexample --spectrum " + sample("imaginary_exponential.json") + " --beta 1 --out " + fpath +
                    "," + cpath);
  CHECK(r.code == 0);
  const SpectrumSpec spec = spectrum_of("imaginary_exponential.json");
  const CommandResult direct =
      cmd_counterexample(spec, 1.0, 8, default_s_grid(), spec.truncation_default(), {fpath, cpath});
  CHECK(r.out == direct.output);
  REQUIRE(direct.files.size() == 2);
  CHECK(slurp(fpath) == direct.files[0].second);
  CHECK(slurp(cpath) == direct.files[1].second);
  CHECK(Json::parse(slurp(cpath)).at("valid") == true);
  fs::remove_all(dir);

  // A real spectrum has no escaping points; the input is rejected.
  CHECK(run("counterexample --spectrum " + sample("real_power.json") + " --beta 1").code == 2);
}

TEST_CASE("verify is deterministic and matches the module call") {
  const std::string args = "verify --suite theorem_real --trials 6 --seed 3";
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  VerifyOptions opt;
  opt.trials = 6;
  opt.seed = 3;
  CHECK(a.out == cmd_verify(Suite::theorem_real, opt, Format::json).output);
  const Json j = Json::parse(a.out);
  CHECK(j.at("agreements").get<int>() + j.at("inconclusives").get<int>() + j.at("disagreements").size() == 6);

  // Global options may follow the subcommand.
  CHECK(run("verify --suite self_adjoint --trials 3 --seed 1 --format csv").out ==
        run("--format csv --seed 1 verify --suite self_adjoint --trials 3").out);
}

TEST_CASE("out path") {
  const fs::path dir = scratch();
  const std::string path = (dir / "r.json").string();
  const Run r = run("classify --spectrum " + sample("real_power.json") + " --beta 1 --out " + path);
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(slurp(path) == run("classify --spectrum " + sample("real_power.json") + " --beta 1").out);
  fs::remove_all(dir);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").code == 2);
  CHECK(run("classify --beta 1").code == 2);
  CHECK(run("verify --suite nope").code == 2);
  CHECK(run("classify --spectrum /nonexistent.json --beta 1").code == 2);
  CHECK(run("classify --spectrum " + sample("real_power.json") + " --beta -1").code == 2);
  CHECK(run("gevrey --spectrum " + sample("real_power.json") + " --state " + sample("exp_linear.json") +
            " --beta 1 --s-grid 1,x")
            .code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("report exit codes") {
  VerifyReport rep;
  rep.trials = 20;
  rep.agreements = 20;
  CHECK(exit_code(rep) == 0);
  rep.agreements = 19;
  rep.disagreements.push_back({});
  CHECK(exit_code(rep) == 3);
  rep.disagreements.clear();
  rep.agreements = 17;
  rep.inconclusives = 3;
  CHECK(exit_code(rep) == 4);
  rep.agreements = 18;
  rep.inconclusives = 2;
  CHECK(exit_code(rep) == 0);
}
