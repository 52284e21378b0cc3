#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace svgr {

struct GrpoConfig {
  int group_size = 8;
  double clip_epsilon = 0.2;
  double kl_beta = 0.01;
  double advantage_delta = 1e-4;
  double ema_decay = 0.99;

  // G >= 2, 0 < eps < 1, beta >= 0, delta >= 0, decay in [0,1].
  void validate() const;
};

// Per-token log-probabilities of one generated trajectory; every value is
// finite and <= 0.
class TokenLogProbs {
 public:
  TokenLogProbs() = default;
  // Throws Error(kInvalidArgument) on a positive or non-finite value.
  explicit TokenLogProbs(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

struct GroupSample {
  double reward = 0.0;
  TokenLogProbs logp_new;
  TokenLogProbs logp_old;
  TokenLogProbs logp_ref;
};

struct GrpoStepResult {
  std::vector<double> advantages;
  std::vector<std::vector<double>> per_token_surrogate;
  std::vector<std::vector<double>> per_token_kl;
  double mean_surrogate = 0.0;
  double mean_kl = 0.0;
  double objective = 0.0;
};

// (R_k - mean) / (population std + delta). Throws kDegenerateGroup when all
// rewards are equal and delta == 0, kInvalidArgument for G < 2 or delta < 0.
std::vector<double> group_advantages(std::span<const double> rewards, double delta);

// exp(logp_new - logp_old), elementwise. Throws kLengthMismatch.
std::vector<double> probability_ratio(const TokenLogProbs& logp_new, const TokenLogProbs& logp_old);

// min(r * A, clip(r, 1 - eps, 1 + eps) * A), elementwise.
double clipped_surrogate(double ratio, double advantage, double epsilon);
std::vector<double> clipped_surrogate(std::span<const double> ratios, double advantage, double epsilon);

// exp(d) - d - 1 with d = logp_ref - logp_new, elementwise. Throws
// kLengthMismatch.
std::vector<double> kl_estimate(const TokenLogProbs& logp_new, const TokenLogProbs& logp_ref);

// Mean over responses of the per-token mean surrogate minus beta times the
// same two-level mean of the KL estimate. Throws kEmptyInput for an empty
// group, kInvalidArgument when the group size disagrees with the config,
// kLengthMismatch for unequal trajectories and kEmptySequence for a
// zero-length one.
GrpoStepResult grpo_objective(std::span<const GroupSample> group, const GrpoConfig& config);

// decay * reference + (1 - decay) * policy.
std::vector<double> ema_update(std::span<const double> reference, std::span<const double> policy, double decay);

// -sum(logp). Throws kEmptySequence.
double sft_nll(const TokenLogProbs& logp);

}  // namespace svgr
