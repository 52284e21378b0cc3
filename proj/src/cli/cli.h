#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "svgr/dwt.h"
#include "svgr/grpo.h"
#include "svgr/reward.h"
#include "svgr/scorer.h"

namespace svgr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitScorer = 3;

inline constexpr const char* kScorerUrlEnv = "REASON_SVG_SCORER_URL";

struct CliConfig {
  RewardWeights weights;
  GrpoConfig grpo;
  // Set when group_size came from the config file or a flag; otherwise
  // grpo-sim takes each group's own size.
  bool group_size_pinned = false;
  ThinkRewardConfig think;
  std::optional<std::string> scorer_url;
  ScorerMode scorer_mode = ScorerMode::kMock;
  int scorer_max_in_flight = 8;
  int scorer_timeout_seconds = 60;
  int raster_size = kDefaultRasterSize;
  double consistency_threshold = 0.8;
  int jobs = 1;

  // Throws Error(kInputError) on an invalid combination.
  void validate() const;
};

// Loads [weights] [grpo] [think] [scorer] [eval] sections from an ini/TOML
// style key = value file into `config`. Throws Error(kInputError).
void load_config_file(const std::filesystem::path& path, CliConfig& config);

std::unique_ptr<ScorerClient> make_scorer(const CliConfig& config);

// Entry point; never throws. Returns one of the kExit* codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace svgr::cli
