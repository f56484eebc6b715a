#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "plab/scenario.hpp"

namespace {

namespace sc = plab::scenario;

// Leftover `--key=value` / `--key value` arguments, applied in order.
void apply_overrides(sc::Settings& s, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string arg = extras[i];
    if (arg.rfind("--", 0) != 0) throw plab::ConfigError("unexpected argument '" + arg + "'");
    arg.erase(0, 2);
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      s.set(arg.substr(0, eq), arg.substr(eq + 1));
    } else if (i + 1 < extras.size()) {
      s.set(arg, extras[++i]);
    } else {
      throw plab::ConfigError("--" + arg + ": missing value");
    }
  }
}

struct Flags {
  std::string config;
  std::optional<std::string> out, format;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plab: pullback attractor lab for a Heaviside reaction-diffusion inclusion"};
  app.require_subcommand(1);
  app.footer(
      "Any configuration key can also be given as --key=value or --section.key=value.\n"
      "Exit codes: 0 success, 1 verify criterion failed, 2 config/validation error,\n"
      "3 convergence failure, 4 I/O error.");

  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"equilibria", "closed-form and discrete stationary states v1+ and v1-"},
      {"simulate", "one trajectory under a fixed selection policy"},
      {"extremal", "extremal complete trajectories on a time window"},
      {"pullback", "pullback attractor samples and structure defects"},
      {"asymptotic", "convergence table toward the limit autonomous problem"},
      {"verify", "full property suite, one line per criterion"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->allow_extras();
    sub->add_option("--config", flags.config, "INI scenario file")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "sampling and random_switch seed");
    sub->add_option("--format", flags.format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CLI::App* chosen = nullptr;
  for (auto* sub : subs) {
    if (sub->parsed()) chosen = sub;
  }

  try {
    sc::Settings settings;
    if (!flags.config.empty()) sc::merge_ini_file(settings, flags.config);
    apply_overrides(settings, chosen->remaining());
    if (flags.out) settings.set("out", *flags.out);
    if (flags.format) settings.set("format", *flags.format);
    if (flags.seed) settings.set("seed", std::to_string(*flags.seed));
    if (flags.jobs) settings.set("jobs", std::to_string(*flags.jobs));
    settings.set("kind", chosen->get_name());
    const auto config = sc::resolve(settings);
    return sc::run_scenario(config, std::cout, std::cerr);
  } catch (const plab::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 4;
  } catch (const plab::ValidationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const plab::UsageError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
}
