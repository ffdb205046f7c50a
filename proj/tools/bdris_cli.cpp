// bdris command-line tool.
//
// Subcommands map to the three experiments plus a projection utility:
//
//   bdris channel-gain --out gains.csv [--config scenario.cfg] ...
//   bdris sum-rate     --out rates.csv ...
//   bdris timing       --out times.csv ...
//   bdris project      --in z.csv --op symuni --out theta.csv
//
// Option precedence: command-line flag > config file > built-in default.
// CSV schema and config keys are documented in the README.

#include <cstdio>
#include <ctime>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bdris/bdris.hpp"

namespace {

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void add_experiment_options(CLI::App* cmd, bdris::RunManifest& manifest) {
  cmd->add_option("--config", manifest.config_path,
                  "Scenario config file (key = value lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", manifest.output_path, "Output CSV path")
      ->required();
  cmd->add_option("--seed", manifest.seed_override,
                  "Override the RNG seed from the config");
  cmd->add_option("--trials", manifest.trials_override,
                  "Override the Monte-Carlo trial count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--strategies", manifest.strategies,
                  "Comma-separated strategy labels (e.g. PoP-FC,NoRIS)")
      ->delimiter(',');
  cmd->add_option("--n-list", manifest.n_list,
                  "Comma-separated RIS element counts")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  cmd->add_option("--poo-n-cap", manifest.poo_n_cap,
                  "Largest N at which PoO strategies run (default 32)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BD-RIS beamforming experiments"};
  app.require_subcommand(1);

  bdris::RunManifest manifest;
  manifest.timestamp = utc_timestamp();

  CLI::App* gain = app.add_subcommand(
      "channel-gain", "Mean aggregate channel gain per strategy and N");
  add_experiment_options(gain, manifest);

  CLI::App* rate = app.add_subcommand(
      "sum-rate", "Mean sum rate of the two-stage pipeline per strategy and N");
  add_experiment_options(rate, manifest);

  CLI::App* timing = app.add_subcommand(
      "timing", "Wall time of the two-stage solve per strategy and N");
  add_experiment_options(timing, manifest);

  CLI::App* project = app.add_subcommand(
      "project", "Apply a scattering-matrix projection to a matrix file");
  project->add_option("--in", manifest.input_path,
                      "Input matrix CSV (complex literals a+bj)")
      ->required()
      ->check(CLI::ExistingFile);
  project->add_option("--op", manifest.op,
                      "Projection: sym, uni, symuni, group or single")
      ->required();
  project->add_option("--out", manifest.output_path, "Output matrix CSV")
      ->required();
  project->add_option("--group-size", manifest.group_size,
                      "Block size for --op group (default 2)")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  manifest.subcommand = app.get_subcommands().front()->get_name();
  std::fprintf(stderr, "[%s] bdris %s\n", manifest.timestamp.c_str(),
               manifest.subcommand.c_str());

  try {
    bdris::run_manifest(manifest);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
