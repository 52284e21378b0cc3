#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>

#include "cli.h"
#include "svgr/error.h"

namespace svgr::cli {

namespace {

namespace pt = boost::property_tree;

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return s;
}

template <typename T>
void read_key(const pt::ptree& tree, const std::string& key, T& target, bool* seen = nullptr) {
  auto node = tree.get_child_optional(pt::ptree::path_type(key, '.'));
  if (!node) return;
  std::string raw = unquote(node->get_value<std::string>());
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      target = raw;
    } else if constexpr (std::is_same_v<T, bool>) {
      for (auto& c : raw) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (raw == "true" || raw == "1") {
        target = true;
      } else if (raw == "false" || raw == "0") {
        target = false;
      } else {
        throw std::invalid_argument("not a boolean");
      }
    } else if constexpr (std::is_same_v<T, int>) {
      std::size_t used = 0;
      target = std::stoi(raw, &used);
      if (used != raw.size()) throw std::invalid_argument("trailing characters");
    } else {
      std::size_t used = 0;
      target = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument("trailing characters");
    }
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInputError, "config key " + key + ": invalid value \"" + raw + "\"");
  }
  if (seen) *seen = true;
}

}  // namespace

void CliConfig::validate() const {
  try {
    weights.validate();
    grpo.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInputError, e.what());
  }
  if (scorer_mode == ScorerMode::kRemote && (!scorer_url || scorer_url->empty())) {
    throw Error(ErrorCode::kInputError, "remote scorer mode requires a scorer URL");
  }
  if (raster_size <= 0) throw Error(ErrorCode::kInputError, "raster_size must be positive");
  if (jobs <= 0) throw Error(ErrorCode::kInputError, "jobs must be positive");
  if (scorer_max_in_flight <= 0 || scorer_max_in_flight > 1024) {
    throw Error(ErrorCode::kInputError, "scorer max_in_flight must be in [1, 1024]");
  }
  if (scorer_timeout_seconds <= 0) throw Error(ErrorCode::kInputError, "scorer timeout must be positive");
}

void load_config_file(const std::filesystem::path& path, CliConfig& config) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::kInputError, std::string("config: ") + e.what());
  }
  read_key(tree, "weights.think", config.weights.think);
  read_key(tree, "weights.render", config.weights.render);
  read_key(tree, "weights.semantic", config.weights.semantic);
  read_key(tree, "weights.aesthetic", config.weights.aesthetic);

  read_key(tree, "grpo.group_size", config.grpo.group_size, &config.group_size_pinned);
  read_key(tree, "grpo.clip_epsilon", config.grpo.clip_epsilon);
  read_key(tree, "grpo.kl_beta", config.grpo.kl_beta);
  read_key(tree, "grpo.advantage_delta", config.grpo.advantage_delta);
  read_key(tree, "grpo.ema_decay", config.grpo.ema_decay);

  std::string mode;
  read_key(tree, "think.mode", mode);
  if (!mode.empty()) {
    if (mode == "binary") {
      config.think.mode = ThinkRewardMode::kBinary;
    } else if (mode == "partial") {
      config.think.mode = ThinkRewardMode::kPartial;
    } else {
      throw Error(ErrorCode::kInputError, "config key think.mode must be binary or partial");
    }
  }
  read_key(tree, "think.require_order", config.think.require_order);

  std::string url;
  read_key(tree, "scorer.url", url);
  if (!url.empty()) config.scorer_url = url;
  std::string scorer_mode;
  read_key(tree, "scorer.mode", scorer_mode);
  if (scorer_mode == "remote") {
    config.scorer_mode = ScorerMode::kRemote;
  } else if (scorer_mode == "mock") {
    config.scorer_mode = ScorerMode::kMock;
  } else if (!scorer_mode.empty()) {
    throw Error(ErrorCode::kInputError, "config key scorer.mode must be mock or remote");
  }
  read_key(tree, "scorer.max_in_flight", config.scorer_max_in_flight);
  read_key(tree, "scorer.timeout", config.scorer_timeout_seconds);

  read_key(tree, "eval.raster_size", config.raster_size);
  read_key(tree, "eval.threshold", config.consistency_threshold);
  read_key(tree, "eval.jobs", config.jobs);
}

std::unique_ptr<ScorerClient> make_scorer(const CliConfig& config) {
  if (config.scorer_mode == ScorerMode::kRemote) {
    return std::make_unique<RemoteScorer>(*config.scorer_url, config.scorer_max_in_flight,
                                          config.scorer_timeout_seconds);
  }
  return std::make_unique<MockScorer>();
}

}  // namespace svgr::cli
