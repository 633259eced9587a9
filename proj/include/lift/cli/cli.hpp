#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lift/seqreg/seqreg.hpp"
#include "lift/simscene/simscene.hpp"

namespace lift::cli {

/// Everything a run needs. Defaults are the desk-scale setup; a config file
/// overrides any subset and flags override the file.
struct RunConfig {
  std::filesystem::path data_root = "data";
  std::filesystem::path output_dir = "runs";
  std::uint64_t seed = 0;
  simscene::SyntheticSceneConfig scene;
  seqreg::ModelConfig model;
  seqreg::TrainHyper training;
  /// Cell names; empty means the full grid.
  std::vector<std::string> cells;
  /// 0 means one per available core.
  int workers = 0;
  bool deterministic = false;
  /// Early-stop on 10% of the training windows, not the held-out participant.
  bool inner_validation = false;

  /// Throws BadConfig.
  void validate() const;
};

/// Small transformer and schedule sized so the full synthetic grid trains
/// in minutes on one core.
seqreg::ModelConfig desk_model();
seqreg::TrainHyper desk_training();
RunConfig default_run_config();

/// Unknown keys and ill-typed values throw BadConfig.
RunConfig parse_run_config(std::string_view json_text, RunConfig base = default_run_config());
RunConfig load_run_config(const std::filesystem::path& path);
std::string format_run_config(const RunConfig& config);

/// Digest of the fields that determine results (paths and worker count are
/// excluded).
std::string config_digest(const RunConfig& config);

/// Parses argv and runs one subcommand. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& log);

}  // namespace lift::cli
