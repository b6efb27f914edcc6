// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "castid/cli.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"castid: cast identification in TV episodes"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<std::string> config;
  app.add_option("--seed", seed, "random seed")->expected(1);
  app.add_option("--config", config, "configuration file of key = value lines");

  std::string manifest, out_dir, stage = "all", labels, gt, wav, out_path, in_dir;
  bool grayscale = false;

  auto* validate = app.add_subcommand("validate", "check a dataset manifest and its files");
  validate->add_option("manifest", manifest)->required();

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic episode");
  simulate->add_option("out_dir", out_dir)->required();

  auto* run = app.add_subcommand("run", "run the labelling pipeline");
  run->add_option("manifest", manifest)->required();
  run->add_option("out_dir", out_dir)->required();
  run->add_option("--stage", stage, "1, 2, voice, 3 or all")
      ->check(CLI::IsMember({"1", "2", "voice", "3", "all"}));

  auto* eval = app.add_subcommand("eval", "score labels against ground truth");
  eval->add_option("labels", labels)->required();
  eval->add_option("ground_truth", gt)->required();
  eval->add_option("out_dir", out_dir)->required();

  auto* spectrogram = app.add_subcommand("spectrogram", "compute a magnitude spectrogram");
  spectrogram->add_option("wav", wav)->required();
  spectrogram->add_option("out", out_path, "output .cmeb or .csv")->required();

  auto* augment = app.add_subcommand("augment", "write augmented copies of PNG images");
  augment->add_option("in_dir", in_dir)->required();
  augment->add_option("out_dir", out_dir)->required();
  augment->add_flag("--grayscale", grayscale);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  std::optional<fs::path> config_path;
  if (config) config_path = fs::path(*config);

  if (*validate) return castid::cli::cmd_validate(manifest, std::cout, std::cerr);
  if (*simulate) {
    return castid::cli::cmd_simulate(config_path, out_dir, seed, std::cout, std::cerr);
  }
  if (*run) {
    return castid::cli::cmd_run(manifest, config_path, out_dir, stage, seed, std::cout,
                                std::cerr);
  }
  if (*eval) return castid::cli::cmd_eval(labels, gt, out_dir, std::cout, std::cerr);
  if (*spectrogram) return castid::cli::cmd_spectrogram(wav, out_path, std::cout, std::cerr);
  if (*augment) {
    return castid::cli::cmd_augment(in_dir, out_dir, grayscale, std::cout, std::cerr);
  }
  return 1;
}
