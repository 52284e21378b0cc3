#include "svgr/grpo.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "svgr/error.h"

namespace svgr {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch,
                std::string(what) + ": lengths " + std::to_string(a) + " and " + std::to_string(b));
  }
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

void GrpoConfig::validate() const {
  if (group_size < 2) throw Error(ErrorCode::kInvalidArgument, "group_size must be >= 2");
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) throw Error(ErrorCode::kInvalidArgument, "clip_epsilon must be in (0,1)");
  if (!(kl_beta >= 0.0) || !std::isfinite(kl_beta)) throw Error(ErrorCode::kInvalidArgument, "kl_beta must be >= 0");
  if (!(advantage_delta >= 0.0) || !std::isfinite(advantage_delta)) {
    throw Error(ErrorCode::kInvalidArgument, "advantage_delta must be >= 0");
  }
  if (!(ema_decay >= 0.0 && ema_decay <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "ema_decay must be in [0,1]");
}

TokenLogProbs::TokenLogProbs(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] > 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "log-probability at token " + std::to_string(i) + " must be finite and <= 0");
    }
  }
}

std::vector<double> group_advantages(std::span<const double> rewards, double delta) {
  const std::size_t g = rewards.size();
  if (g < 2) throw Error(ErrorCode::kInvalidArgument, "a group needs at least 2 rewards");
  if (!(delta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be >= 0");
  double mean = 0.0;
  for (double r : rewards) {
    if (!std::isfinite(r)) throw Error(ErrorCode::kInvalidArgument, "rewards must be finite");
    mean += r;
  }
  mean /= static_cast<double>(g);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(g);
  const double std_dev = std::sqrt(var);

  const bool all_equal = std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards[0]; });
  std::vector<double> out(g, 0.0);
  if (all_equal) {
    if (delta == 0.0) throw Error(ErrorCode::kDegenerateGroup, "all rewards equal and delta = 0");
    return out;
  }
  const double denom = std_dev + delta;
  for (std::size_t i = 0; i < g; ++i) out[i] = (rewards[i] - mean) / denom;
  return out;
}

std::vector<double> probability_ratio(const TokenLogProbs& logp_new, const TokenLogProbs& logp_old) {
  require_same_length(logp_new.size(), logp_old.size(), "probability_ratio");
  std::vector<double> out(logp_new.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = std::exp(logp_new.values()[t] - logp_old.values()[t]);
  return out;
}

double clipped_surrogate(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

std::vector<double> clipped_surrogate(std::span<const double> ratios, double advantage, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be in (0,1)");
  std::vector<double> out(ratios.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = clipped_surrogate(ratios[t], advantage, epsilon);
  return out;
}

std::vector<double> kl_estimate(const TokenLogProbs& logp_new, const TokenLogProbs& logp_ref) {
  require_same_length(logp_new.size(), logp_ref.size(), "kl_estimate");
  std::vector<double> out(logp_new.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    const double d = logp_ref.values()[t] - logp_new.values()[t];
    // expm1 keeps precision for small d; the result is >= 0 up to rounding
    out[t] = std::max(0.0, std::expm1(d) - d);
  }
  return out;
}

GrpoStepResult grpo_objective(std::span<const GroupSample> group, const GrpoConfig& config) {
  if (group.empty()) throw Error(ErrorCode::kEmptyInput, "empty group");
  config.validate();
  if (group.size() != static_cast<std::size_t>(config.group_size)) {
    throw Error(ErrorCode::kInvalidArgument, "group has " + std::to_string(group.size()) + " samples, expected " +
                                                 std::to_string(config.group_size));
  }
  std::vector<double> rewards;
  rewards.reserve(group.size());
  for (const auto& s : group) rewards.push_back(s.reward);

  GrpoStepResult result;
  result.advantages = group_advantages(rewards, config.advantage_delta);
  double surrogate_sum = 0.0;
  double kl_sum = 0.0;
  for (std::size_t k = 0; k < group.size(); ++k) {
    const auto& s = group[k];
    require_same_length(s.logp_new.size(), s.logp_old.size(), "logp_new/logp_old");
    require_same_length(s.logp_new.size(), s.logp_ref.size(), "logp_new/logp_ref");
    if (s.logp_new.empty()) throw Error(ErrorCode::kEmptySequence, "sample " + std::to_string(k) + " has no tokens");
    auto ratios = probability_ratio(s.logp_new, s.logp_old);
    result.per_token_surrogate.push_back(clipped_surrogate(ratios, result.advantages[k], config.clip_epsilon));
    result.per_token_kl.push_back(kl_estimate(s.logp_new, s.logp_ref));
    surrogate_sum += mean_of(result.per_token_surrogate.back());
    kl_sum += mean_of(result.per_token_kl.back());
  }
  const double n = static_cast<double>(group.size());
  result.mean_surrogate = surrogate_sum / n;
  result.mean_kl = kl_sum / n;
  result.objective = result.mean_surrogate - config.kl_beta * result.mean_kl;
  return result;
}

std::vector<double> ema_update(std::span<const double> reference, std::span<const double> policy, double decay) {
  require_same_length(reference.size(), policy.size(), "ema_update");
  if (!(decay >= 0.0 && decay <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "decay must be in [0,1]");
  std::vector<double> out(reference.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = decay * reference[i] + (1.0 - decay) * policy[i];
  return out;
}

double sft_nll(const TokenLogProbs& logp) {
  if (logp.empty()) throw Error(ErrorCode::kEmptySequence, "sft_nll of an empty sequence");
  double s = 0.0;
  for (double v : logp.values()) s -= v;
  return s;
}

}  // namespace svgr
