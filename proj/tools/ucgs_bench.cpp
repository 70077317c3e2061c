// Command-line harness: runs a configured solver and writes its CSV trace,
// compares oracle costs across methods over an accuracy grid, or certifies
// the library's runtime invariants on a configured instance.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ucgs/bench.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::vector<std::string> overrides;
  int jobs = 0;
};

void attach_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "path to a key=value config file");
  cmd->add_option("--out", args->out_path, "output path (CSV trace or report)");
  cmd->add_option("--set", args->overrides, "config override KEY=VALUE (repeatable)");
  cmd->add_option("--jobs", args->jobs, "worker threads for compare runs");
}

int load_config(const CommonArgs& args, ucgs::RunConfig* cfg) {
  try {
    if (!args.config_path.empty()) {
      std::ifstream file(args.config_path, std::ios::binary);
      if (!file) {
        std::cerr << "config error: cannot open '" << args.config_path << "'\n";
        return ucgs::bench::kConfigError;
      }
      std::ostringstream text;
      text << file.rdbuf();
      *cfg = ucgs::parse_config(text.str());
    }
    for (const std::string& assignment : args.overrides) {
      ucgs::apply_override(*cfg, assignment);
    }
    if (!args.out_path.empty()) cfg->out = args.out_path;
    if (args.jobs > 0) cfg->jobs = args.jobs;
  } catch (const ucgs::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ucgs::bench::kConfigError;
  }
  return ucgs::bench::kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"projection-free convex optimization bench (cg / gug-sliding / ucgs)"};
  app.require_subcommand(1);

  CommonArgs run_args, compare_args, certify_args;
  CLI::App* run_cmd = app.add_subcommand("run", "run one method, write its CSV trace");
  attach_common(run_cmd, &run_args);
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "LMO cost per method across an accuracy grid");
  attach_common(compare_cmd, &compare_args);
  CLI::App* certify_cmd =
      app.add_subcommand("certify", "exercise runtime invariants on the configured instance");
  attach_common(certify_cmd, &certify_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ucgs::bench::kConfigError;
  }

  ucgs::RunConfig cfg;
  if (run_cmd->parsed()) {
    if (int code = load_config(run_args, &cfg); code != 0) return code;
    return ucgs::bench::cmd_run(cfg, std::cout);
  }
  if (compare_cmd->parsed()) {
    if (int code = load_config(compare_args, &cfg); code != 0) return code;
    return ucgs::bench::cmd_compare(cfg, std::cout);
  }
  if (int code = load_config(certify_args, &cfg); code != 0) return code;
  return ucgs::bench::cmd_certify(cfg, std::cout);
}
