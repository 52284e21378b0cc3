#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svgr/raster.h"
#include "svgr/scorer.h"

namespace svgr {

enum class Domain { kLogoEmoji, kIconography, kUiLayout, kDiagram };

std::string_view domain_name(Domain d);
// Accepts the canonical names case-insensitively, ignoring '_', '-', ' '
// and '/' ("logo_emoji", "UI Layout", ...). Throws kInvalidArgument.
Domain parse_domain(std::string_view text);

struct Triplet {
  std::string id;
  std::string prompt;
  std::string dwt_text;
  std::string svg_text;
  std::optional<Domain> domain;
};

enum class RejectStage { kSyntaxStage, kRenderStage, kConsistencyStage };

std::string_view reject_stage_name(RejectStage s);

struct FilterVerdict {
  bool accepted = false;
  std::optional<RejectStage> rejected_at;
  std::optional<double> consistency_score;
  std::string detail;
};

inline constexpr double kDefaultConsistencyThreshold = 0.8;

struct FilterConfig {
  double threshold = kDefaultConsistencyThreshold;
  int raster_size = kDefaultRasterSize;
};

// Syntax: the SVG parses and the reasoning text is non-empty with no
// unterminated <think>. Render: check_renderable passes. Consistency: the
// scorer rates (raster, prompt, dwt) at or above the threshold. Later
// stages run only when earlier ones pass. Scorer failures propagate.
FilterVerdict filter_triplet(const Triplet& t, ScorerClient& scorer, const FilterConfig& config = {});

// Verdicts in input order. Throws kInvalidArgument for duplicate ids or an
// empty prompt.
std::vector<FilterVerdict> filter_corpus(std::span<const Triplet> triplets, ScorerClient& scorer,
                                         const FilterConfig& config = {}, int jobs = 1);

// Approximate-token buckets for reasoning length.
inline constexpr std::array<std::string_view, 5> kTokenBucketNames = {"<500", "500-1000", "1001-2000", "2001-3000",
                                                                      ">3000"};
std::size_t token_bucket(std::size_t tokens);

struct CorpusStats {
  std::size_t n = 0;
  std::size_t accepted = 0;
  std::map<std::string, std::size_t> domain_histogram;  // includes "Unspecified"
  std::array<std::size_t, 5> dwt_token_buckets{};
  std::map<std::string, std::size_t> rejected_by_stage;
  double acceptance_rate = 0.0;
  bool tokens_approximate = true;
};

// Throws kEmptyInput or kLengthMismatch.
CorpusStats corpus_stats(std::span<const Triplet> triplets, std::span<const FilterVerdict> verdicts);

}  // namespace svgr
