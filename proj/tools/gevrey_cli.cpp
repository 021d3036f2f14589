// Command-line front end: every subcommand reads its inputs, calls one
// function from commands.hpp and writes the bytes it returns.

#include <gevrey/gevrey.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gevrey::ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_paths(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gevrey;
  CLI::App app{"Gevrey regularity of weak solutions for diagonal spectral operators"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  Index truncation = 0;
  std::string out_path;
  std::string format_text = "json";
  app.add_option("--seed", seed, "Random seed (verify)");
  app.add_option("--truncation", truncation, "Number of materialized atoms N")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_path, "Output path (default: stdout)");
  app.add_option("--format", format_text, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::string spectrum_path, state_path, fn_text, s_grid_text = "0.5,1,2", b_grid_text = "1,0.5,0.25,0.1,0.01";
  std::string t_grid_text = "-1:1:0.1", flavor_text = "roumieu", suite_text = "theorem_real", beta_text = "1,2";
  std::string cert_s_grid_text = "0.1,0.5,1,2";
  double beta = 1.0, t = 0.0, im_max = 10.0;
  int derivatives = 0, n_max = 40, trials = 100;
  Index count = 8;
  bool check_mild = false, allow_inconclusive = false;
  std::vector<std::string> params;

  auto* classify = app.add_subcommand("classify", "Region criterion for sigma(A)");
  classify->add_option("--spectrum", spectrum_path)->required();
  classify->add_option("--beta", beta)->required();
  classify->add_option("--b-grid", b_grid_text, "Comma-separated b values, tried in order");
  classify->add_option("--im-max", im_max, "Half-width of the CSV boundary curves");

  auto* evolve_cmd = app.add_subcommand("evolve", "Trace of y(t) = e^{tA} f");
  evolve_cmd->add_option("--spectrum", spectrum_path)->required();
  evolve_cmd->add_option("--state", state_path)->required();
  evolve_cmd->add_option("--t-grid", t_grid_text, "start:stop:step or a list");
  evolve_cmd->add_option("--derivatives", derivatives)->check(CLI::NonNegativeNumber);
  evolve_cmd->add_flag("--check-mild", check_mild);

  auto* apply = app.add_subcommand("apply", "F(A) f for a Borel function F");
  apply->add_option("--spectrum", spectrum_path)->required();
  apply->add_option("--state", state_path)->required();
  apply->add_option("--fn", fn_text)->required();
  apply->add_option("--t", t, "Value of t in F");
  apply->add_option("--param", params, "name=value for further symbols in F");

  auto* gevrey_cmd = app.add_subcommand("gevrey", "Gevrey class membership of f");
  gevrey_cmd->add_option("--spectrum", spectrum_path)->required();
  gevrey_cmd->add_option("--state", state_path)->required();
  gevrey_cmd->add_option("--beta", beta)->required();
  gevrey_cmd->add_option("--flavor", flavor_text)->check(CLI::IsMember({"roumieu", "beurling"}));
  gevrey_cmd->add_option("--s-grid", s_grid_text);

  auto* estimate = app.add_subcommand("estimate", "Fit of log ||A^n f||");
  estimate->add_option("--spectrum", spectrum_path)->required();
  estimate->add_option("--state", state_path)->required();
  estimate->add_option("--n-max", n_max);

  auto* counter = app.add_subcommand("counterexample", "Initial value refuting Roumieu membership");
  counter->add_option("--spectrum", spectrum_path)->required();
  counter->add_option("--beta", beta)->required();
  counter->add_option("--count", count);
  counter->add_option("--s-grid", cert_s_grid_text);

  auto* verify = app.add_subcommand("verify", "Randomized theorem checks");
  verify->add_option("--suite", suite_text)
      ->check(CLI::IsMember({"theorem_real", "ol1", "smoothness_improvement", "self_adjoint"}));
  verify->add_option("--trials", trials);
  verify->add_option("--beta", beta_text, "Comma-separated orders");
  verify->add_flag("--allow-inconclusive", allow_inconclusive);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Format format = *format_from_name(format_text);
    std::vector<std::string> extra_paths;
    if (app.got_subcommand(counter) && out_path.find(',') != std::string::npos) {
      extra_paths = split_paths(out_path);
      out_path.clear();
    }
    CommandResult result;
    if (app.got_subcommand(verify)) {
      VerifyOptions opt;
      opt.trials = trials;
      opt.seed = seed;
      opt.betas = parse_list(beta_text, "--beta");
      if (truncation > 0) opt.truncation = truncation;
      opt.allow_inconclusive = allow_inconclusive;
      result = cmd_verify(*suite_from_name(suite_text), opt, format);
    } else {
      const SpectrumSpec spec = parse_spectrum(read_file(spectrum_path));
      const Index n = truncation;
      if (app.got_subcommand(classify)) {
        result = cmd_classify(spec, beta, parse_list(b_grid_text, "--b-grid"), n > 0 ? n : spec.truncation_default(),
                              format, im_max);
      } else if (app.got_subcommand(counter)) {
        result = cmd_counterexample(spec, beta, count, parse_list(cert_s_grid_text, "--s-grid"),
                                    n > 0 ? n : spec.truncation_default(), extra_paths);
      } else {
        const StateVector f = parse_state(read_file(state_path));
        if (app.got_subcommand(evolve_cmd)) {
          result = cmd_evolve(spec, f, parse_range(t_grid_text, "--t-grid"), derivatives, check_mild, n, format);
        } else if (app.got_subcommand(apply)) {
          std::map<std::string, double> values{{"t", t}};
          for (const auto& p : params) {
            const auto eq = p.find('=');
            if (eq == std::string::npos) throw ValidationError("--param expects name=value, got '" + p + "'");
            values[p.substr(0, eq)] = parse_list(p.substr(eq + 1), "--param").at(0);
          }
          result = cmd_apply(spec, f, fn_text, values, n);
        } else if (app.got_subcommand(gevrey_cmd)) {
          result = cmd_gevrey(spec, f, beta, flavor_text == "beurling" ? Flavor::beurling : Flavor::roumieu,
                              parse_list(s_grid_text, "--s-grid"), n);
        } else {
          result = cmd_estimate(spec, f, n_max, n, format);
        }
      }
    }
    for (const auto& [path, bytes] : result.files) write_file(path, bytes);
    if (out_path.empty()) {
      std::cout << result.output;
    } else {
      write_file(out_path, result.output);
    }
    return result.exit_code;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << " (index " << e.index() << ")\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
