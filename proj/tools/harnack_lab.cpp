// harnack-lab: command line front end for the library.
//
//   harnack_lab ehi --graph lattice:2:24 --R 2,4,8 --out out
//   harnack_lab run --config configs/ehi_lattice.ini
//   harnack_lab verify --only 1,2,3

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "harnack/config.hpp"
#include "harnack/runner.hpp"
#include "harnack/verify.hpp"

namespace {

struct Flags {
  std::string graph;
  std::string center;
  std::vector<int> radii;
  std::optional<double> k;
  std::string d_spec = "2R";
  std::uint64_t trials = 10'000;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::optional<std::uint64_t> cap;
  unsigned threads = 1;
  double eps = 0.1;
};

void add_run_flags(CLI::App* sub, Flags& f, const std::string& op) {
  sub->add_option("--graph", f.graph, "lattice:D:W, three_rail:N, lamplighter[:R], path:N or a TSV file")
      ->required(op != "couple" && op != "osc-fail");
  sub->add_option("--center", f.center, "center vertex label (default: the origin)");
  if (op != "gen") sub->add_option("--R", f.radii, "radius, or a comma list for a batch")->delimiter(',')->required();
  if (op == "oi" || op == "couple" || op == "osc-fail") sub->add_option("--K", f.k, "outer ball factor");
  if (op == "hg" || op == "annulus") sub->add_option("--D", f.d_spec, "Green domain B(x0, 2R) or B(x0, 4R)");
  if (op == "couple" || op == "osc-fail") {
    sub->add_option("--trials", f.trials, "Monte Carlo trials per start");
    sub->add_option("--seed", f.seed, "top-level seed");
  }
  if (op == "couple") sub->add_option("--eps", f.eps, "inner interval slack");
  sub->add_option("--cap", f.cap, "event cap (couple, osc-fail) or pair cap (db)");
  sub->add_option("--threads", f.threads, "worker threads; results do not depend on it");
  sub->add_option("--out", f.out, "output directory (HARNACK_LAB_OUT_DIR overrides)");
}

harnack::ExperimentConfig to_config(const Flags& f, const std::string& op) {
  harnack::ExperimentConfig c;
  c.graph = f.graph.empty() && (op == "couple" || op == "osc-fail") ? "lamplighter" : f.graph;
  c.operation = op;
  if (!f.center.empty()) c.center = f.center;
  c.radii = f.radii;
  c.k = f.k;
  c.d_spec = f.d_spec;
  c.trials = f.trials;
  c.seed = f.seed;
  c.cap = f.cap;
  c.threads = f.threads;
  c.eps = f.eps;
  c.out_dir = f.out;
  return c;
}

int report(const harnack::RunResult& r) {
  for (const auto& f : r.files) std::cout << f << "\n";
  for (const auto& m : r.messages) std::cerr << "error: " << m << "\n";
  return r.exit_code;
}

// run_experiment validates first and leaves an error report on disk
int run_config(const harnack::ExperimentConfig& c) { return report(harnack::run_experiment(c)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harnack inequality laboratory for weighted graphs"};
  app.set_version_flag("--version", std::string(harnack::version()));
  app.require_subcommand(1);

  Flags flags;
  std::string op_chosen;
  for (const std::string op : {"gen", "ehi", "hg", "annulus", "oi", "thm1", "db", "couple", "osc-fail"}) {
    auto* sub = app.add_subcommand(op, "run the " + op + " operation");
    add_run_flags(sub, flags, op);
    sub->callback([&, op] { op_chosen = op; });
  }

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment config file");
  run->add_option("--config", config_path, "INI config")->required()->check(CLI::ExistingFile);

  harnack::VerifyOptions vopts;
  std::vector<int> only;
  std::vector<std::string> tol;
  std::string json_path;
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("--seed", vopts.seed, "top-level seed");
  verify->add_option("--threads", vopts.threads, "worker threads");
  verify->add_option("--only", only, "criterion ids, comma separated")->delimiter(',');
  verify->add_option("--tol", tol, "tolerance override key=value, e.g. c1.tol=1e-6")->delimiter(',');
  verify->add_option("--json", json_path, "write the summary JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return harnack::kExitPrecondition;  // bad flags are a precondition failure like any other
  }

  if (!op_chosen.empty()) return run_config(to_config(flags, op_chosen));
  if (run->parsed()) {
    harnack::ExperimentConfig c;
    try {
      c = harnack::load_config(config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return harnack::exit_code_for(e);
    }
    return run_config(c);
  }
  vopts.only = std::set<int>(only.begin(), only.end());
  try {
    for (const auto& item : tol) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw harnack::precondition_error("--tol expects key=value, got '" + item + "'");
      vopts.tolerances[item.substr(0, eq)] = harnack::detail::parse_real(item.substr(eq + 1), item.substr(0, eq));
    }
    const auto s = harnack::verify_suite(
        vopts, [](const harnack::CriterionResult& r) { std::cout << harnack::summary_line(r) << std::endl; });
    const std::string text = s.to_json(vopts.seed).dump(2) + "\n";
    if (!json_path.empty()) {
      std::ofstream out(json_path, std::ios::binary);
      out << text;
    }
    std::cout << (s.all_passed ? "all criteria passed" : "some criteria failed") << "\n";
    return s.all_passed ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return harnack::exit_code_for(e);
  }
}
