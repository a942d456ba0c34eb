#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "proxkit/cli.hpp"

namespace {

using proxkit::io::Command;
using proxkit::io::JobConfig;

struct Flags {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::string scale;
  std::string suite;
  std::string preset;
};

JobConfig make_job(Command cmd, const Flags& f) {
  JobConfig job;
  if (!f.config.empty()) {
    job = proxkit::io::load_job(f.config);
    if (job.command != cmd) {
      throw proxkit::ConfigError(f.config + ": config is for '" + proxkit::io::to_string(job.command) +
                                     "', not '" + proxkit::io::to_string(cmd) + "'",
                                 "/command");
    }
  } else if (cmd != Command::Verify && cmd != Command::Figure) {
    throw proxkit::ConfigError("--config is required for " + proxkit::io::to_string(cmd));
  }
  job.command = cmd;
  if (f.config.empty() && cmd == Command::Verify) job.output.format = proxkit::io::Format::Json;
  if (!f.out.empty()) job.output.path = f.out;
  if (!f.format.empty()) job.output.format = proxkit::io::format_from_string(f.format);
  if (f.seed) job.seed = *f.seed;
  if (!f.scale.empty()) job.scale = f.scale;
  if (!f.suite.empty()) job.suite = f.suite;
  if (!f.preset.empty()) {
    job.preset = f.preset;
    job.composition.reset();
  }
  if (cmd == Command::Figure && job.preset.empty() && !job.composition) job.preset = "example1";
  // Same validation as a config file.
  return proxkit::io::job_from_json(proxkit::io::to_json(job));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximal composition and cocomposition toolkit"};
  app.require_subcommand(1);
  Flags flags;

  struct Sub {
    Command cmd;
    const char* help;
  };
  const Sub subs[] = {
      {Command::Eval, "Evaluate a function, composition, cocomposition or mixture at points"},
      {Command::Prox, "Proximity operator at points"},
      {Command::Envelope, "Moreau envelope at points"},
      {Command::Sweep, "Composition and cocomposition along a gamma sweep"},
      {Command::Figure, "Grid data of g(Lx) and the cocomposition for several gammas"},
      {Command::Argmin, "Minimizer of a cocomposition or comixture"},
      {Command::Verify, "Run property suites and print a JSON report bundle"},
  };
  std::optional<Command> chosen;
  for (const auto& s : subs) {
    CLI::App* sc = app.add_subcommand(proxkit::io::to_string(s.cmd), s.help);
    sc->add_option("--config", flags.config, "Job config (JSON)")->check(CLI::ExistingFile);
    sc->add_option("--out", flags.out, "Output path (default: standard output)");
    sc->add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sc->add_option("--seed", flags.seed, "Seed of the random instances");
    sc->add_option("--scale", flags.scale, "Suite scale")->check(CLI::IsMember({"small", "default", "large"}));
    if (s.cmd == Command::Verify) sc->add_option("suite", flags.suite, "Suite id or 'all'");
    if (s.cmd == Command::Figure) sc->add_option("--preset", flags.preset, "example1 or example2");
    sc->callback([&chosen, c = s.cmd] { chosen = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return proxkit::cli::kExitConfig;
  }

  try {
    JobConfig job = make_job(*chosen, flags);
    if (job.output.path.empty()) return proxkit::cli::run_job(job, std::cout, std::cerr);
    std::ofstream out(job.output.path, std::ios::binary);
    if (!out) throw proxkit::ConfigError("cannot write '" + job.output.path + "'", "/output/path");
    int code = proxkit::cli::run_job(job, out, std::cerr);
    out.close();
    if (!out) {
      std::cerr << "error: writing '" << job.output.path << "' failed\n";
      return 1;
    }
    return code;
  } catch (const proxkit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return proxkit::cli::kExitConfig;
  } catch (const proxkit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return proxkit::cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
