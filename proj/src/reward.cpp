#include "svgr/reward.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "svgr/error.h"

namespace svgr {

void RewardWeights::validate() const {
  const double w[] = {think, render, semantic, aesthetic};
  bool any_positive = false;
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::kInvalidArgument, "reward weights must be finite and >= 0");
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) throw Error(ErrorCode::kInvalidArgument, "at least one reward weight must be positive");
}

double semantic_reward(const EmbeddingVector& image_embedding, const EmbeddingVector& text_embedding) {
  const auto& a = image_embedding.values();
  const auto& b = text_embedding.values();
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding dims " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::kZeroVector, "cannot normalize a zero embedding");
  double cos = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(cos, 0.0, 1.0);
}

RewardBreakdown hybrid_reward(const RewardComponents& c, const RewardWeights& weights) {
  weights.validate();
  auto check_unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kComponentOutOfRange, std::string(name) + " = " + std::to_string(v) + " not in [0,1]");
    }
  };
  check_unit(c.think, "r_think");
  check_unit(c.semantic, "r_semantic");
  check_unit(c.aesthetic, "r_aesthetic");
  if (c.render != 0.0 && c.render != 1.0) {
    throw Error(ErrorCode::kComponentOutOfRange, "r_render = " + std::to_string(c.render) + " not in {0,1}");
  }
  RewardBreakdown out;
  out.r_think = c.think;
  out.r_render = c.render;
  out.r_semantic = c.semantic;
  out.r_aesthetic = c.aesthetic;
  out.weights_used = weights;
  out.total = weights.think * c.think + weights.render * c.render + weights.semantic * c.semantic +
              weights.aesthetic * c.aesthetic;
  return out;
}

CandidateEvaluation score_candidate(std::string_view prompt, std::string_view response_text,
                                    const RewardWeights& weights, ScorerClient& scorer,
                                    const CandidateConfig& config) {
  weights.validate();
  CandidateEvaluation ev;
  ev.parts = split_response(response_text);
  ev.trace = trace_of(ev.parts);
  ev.structurally_valid = structural_validity(ev.parts, ev.trace);

  RewardComponents components;
  components.think = think_reward(ev.parts, ev.trace, config.think);

  if (ev.parts.svg_text) {
    ev.verdict = check_renderable(*ev.parts.svg_text, config.raster_size);
    try {
      ev.complexity = count_complexity(parse_svg(*ev.parts.svg_text));
    } catch (const Error&) {
      // unparseable: no complexity
    }
  } else {
    ev.verdict.renderable = false;
    ev.verdict.failure_stage = FailureStage::kParseError;
    ev.verdict.detail = "response contains no complete <svg> element";
  }

  if (ev.verdict.renderable) {
    components.render = 1.0;
    const RasterImage& raster = *ev.verdict.raster;
    components.semantic = semantic_reward(scorer.embed_image(raster), scorer.embed_text(prompt));
    double aesthetic = scorer.aesthetic(raster, prompt);
    if (!(aesthetic >= 0.0 && aesthetic <= 1.0)) {
      throw Error(ErrorCode::kComponentOutOfRange, "aesthetic scorer returned " + std::to_string(aesthetic));
    }
    components.aesthetic = aesthetic;
  }
  ev.breakdown = hybrid_reward(components, weights);
  return ev;
}

RewardBreakdown evaluate_candidate(std::string_view prompt, std::string_view response_text,
                                   const RewardWeights& weights, ScorerClient& scorer,
                                   const CandidateConfig& config) {
  return score_candidate(prompt, response_text, weights, scorer, config).breakdown;
}

}  // namespace svgr
