#pragma once

#include <optional>
#include <string_view>

#include "svgr/complexity.h"
#include "svgr/dwt.h"
#include "svgr/raster.h"
#include "svgr/scorer.h"

namespace svgr {

// Hybrid reward coefficients. Defaults: think 0.1, render 0.1,
// semantic 0.6, aesthetic 0.2.
struct RewardWeights {
  double think = 0.1;
  double render = 0.1;
  double semantic = 0.6;
  double aesthetic = 0.2;

  // All finite and >= 0, at least one > 0; else Error(kInvalidArgument).
  void validate() const;
  RewardWeights scaled(double factor) const {
    return {think * factor, render * factor, semantic * factor, aesthetic * factor};
  }
};

struct RewardComponents {
  double think = 0.0;      // [0,1]
  double render = 0.0;     // 0 or 1
  double semantic = 0.0;   // [0,1]
  double aesthetic = 0.0;  // [0,1]
};

struct RewardBreakdown {
  double r_think = 0.0;
  double r_render = 0.0;
  double r_semantic = 0.0;
  double r_aesthetic = 0.0;
  double total = 0.0;
  RewardWeights weights_used;
};

// max(0, cosine similarity). Throws kDimensionMismatch or kZeroVector.
double semantic_reward(const EmbeddingVector& image_embedding, const EmbeddingVector& text_embedding);

// Weighted sum of the four components. Throws kComponentOutOfRange when a
// component leaves its range (render must be exactly 0 or 1).
RewardBreakdown hybrid_reward(const RewardComponents& components, const RewardWeights& weights);

struct CandidateConfig {
  ThinkRewardConfig think;
  int raster_size = kDefaultRasterSize;
};

// Everything computed while scoring one response, kept for reporting.
struct CandidateEvaluation {
  RewardBreakdown breakdown;
  ResponseParts parts;
  DwtTrace trace;
  bool structurally_valid = false;
  RenderVerdict verdict;
  // Present when the extracted SVG parsed.
  std::optional<ComplexityReport> complexity;
};

// split -> trace -> think reward; render check -> render reward; for a
// renderable SVG the scorer supplies image/text embeddings and the
// aesthetic score, otherwise semantic and aesthetic are 0. Scorer failures
// propagate as Error(kScorerUnavailable).
CandidateEvaluation score_candidate(std::string_view prompt, std::string_view response_text,
                                    const RewardWeights& weights, ScorerClient& scorer,
                                    const CandidateConfig& config = {});

RewardBreakdown evaluate_candidate(std::string_view prompt, std::string_view response_text,
                                   const RewardWeights& weights, ScorerClient& scorer,
                                   const CandidateConfig& config = {});

}  // namespace svgr
