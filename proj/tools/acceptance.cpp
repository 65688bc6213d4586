// Acceptance run: one line per criterion, exit status 0 only if every
// criterion passed within its runtime limit.
//
//   acceptance [--seed N] [--threads T] [--json summary.json]

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "harnack/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  harnack::VerifyOptions opts;
  std::string json_path;
  app.add_option("--seed", opts.seed, "top-level seed");
  app.add_option("--threads", opts.threads, "worker threads");
  app.add_option("--json", json_path, "write the summary JSON here");
  CLI11_PARSE(app, argc, argv);

  bool ok = true;
  const auto s = harnack::verify_suite(opts, [&](const harnack::CriterionResult& r) {
    ok = ok && r.within_limit();
    std::cout << harnack::summary_line(r) << std::endl;
  });
  if (!json_path.empty()) std::ofstream(json_path, std::ios::binary) << s.to_json(opts.seed).dump(2) << "\n";
  ok = ok && s.all_passed;
  std::cout << (ok ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << std::endl;
  return ok ? 0 : 1;
}
