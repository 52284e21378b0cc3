#include "svgr/pipeline.h"

#include <cctype>
#include <set>

#include "svgr/dwt.h"
#include "svgr/error.h"
#include "svgr/metrics.h"
#include "svgr/parallel.h"
#include "svgr/svg_document.h"
#include "text_util.h"

namespace svgr {

std::string_view domain_name(Domain d) {
  switch (d) {
    case Domain::kLogoEmoji: return "LogoEmoji";
    case Domain::kIconography: return "Iconography";
    case Domain::kUiLayout: return "UiLayout";
    case Domain::kDiagram: return "Diagram";
  }
  return "Unknown";
}

Domain parse_domain(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (c == '_' || c == '-' || c == ' ' || c == '/') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "logoemoji") return Domain::kLogoEmoji;
  if (key == "iconography" || key == "icon") return Domain::kIconography;
  if (key == "uilayout") return Domain::kUiLayout;
  if (key == "diagram") return Domain::kDiagram;
  throw Error(ErrorCode::kInvalidArgument, "unknown domain \"" + std::string(text) + "\"");
}

std::string_view reject_stage_name(RejectStage s) {
  switch (s) {
    case RejectStage::kSyntaxStage: return "SyntaxStage";
    case RejectStage::kRenderStage: return "RenderStage";
    case RejectStage::kConsistencyStage: return "ConsistencyStage";
  }
  return "Unknown";
}

FilterVerdict filter_triplet(const Triplet& t, ScorerClient& scorer, const FilterConfig& config) {
  FilterVerdict v;
  auto reject = [&](RejectStage stage, std::string detail) {
    v.accepted = false;
    v.rejected_at = stage;
    v.detail = std::move(detail);
    return v;
  };

  if (detail::trim(t.dwt_text).empty()) return reject(RejectStage::kSyntaxStage, "empty reasoning text");
  if (split_response(t.dwt_text).issue) return reject(RejectStage::kSyntaxStage, "unterminated <think> block");
  try {
    parse_svg(t.svg_text);
  } catch (const Error& e) {
    return reject(RejectStage::kSyntaxStage, e.what());
  }

  RenderVerdict rv = check_renderable(t.svg_text, config.raster_size);
  if (!rv.renderable) {
    return reject(RejectStage::kRenderStage, std::string(failure_stage_name(*rv.failure_stage)) + ": " + rv.detail);
  }

  const double score = scorer.consistency(*rv.raster, t.prompt, t.dwt_text);
  v.consistency_score = score;
  if (score >= config.threshold) {
    v.accepted = true;
    return v;
  }
  return reject(RejectStage::kConsistencyStage, "consistency below threshold");
}

std::vector<FilterVerdict> filter_corpus(std::span<const Triplet> triplets, ScorerClient& scorer,
                                         const FilterConfig& config, int jobs) {
  std::set<std::string_view> ids;
  for (const auto& t : triplets) {
    if (!ids.insert(t.id).second) throw Error(ErrorCode::kInvalidArgument, "duplicate triplet id \"" + t.id + "\"");
    if (t.prompt.empty()) throw Error(ErrorCode::kInvalidArgument, "triplet \"" + t.id + "\" has an empty prompt");
  }
  std::vector<FilterVerdict> verdicts(triplets.size());
  parallel_for(triplets.size(), jobs, [&](std::size_t i) { verdicts[i] = filter_triplet(triplets[i], scorer, config); });
  return verdicts;
}

std::size_t token_bucket(std::size_t tokens) {
  if (tokens < 500) return 0;
  if (tokens <= 1000) return 1;
  if (tokens <= 2000) return 2;
  if (tokens <= 3000) return 3;
  return 4;
}

CorpusStats corpus_stats(std::span<const Triplet> triplets, std::span<const FilterVerdict> verdicts) {
  if (triplets.empty()) throw Error(ErrorCode::kEmptyInput, "corpus_stats of an empty corpus");
  if (triplets.size() != verdicts.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(triplets.size()) + " triplets but " +
                                                std::to_string(verdicts.size()) + " verdicts");
  }
  CorpusStats s;
  s.n = triplets.size();
  for (std::size_t i = 0; i < s.n; ++i) {
    const auto& t = triplets[i];
    ++s.domain_histogram[t.domain ? std::string(domain_name(*t.domain)) : "Unspecified"];
    ++s.dwt_token_buckets[token_bucket(approx_token_count(t.dwt_text))];
    if (verdicts[i].accepted) {
      ++s.accepted;
    } else if (verdicts[i].rejected_at) {
      ++s.rejected_by_stage[std::string(reject_stage_name(*verdicts[i].rejected_at))];
    }
  }
  s.acceptance_rate = static_cast<double>(s.accepted) / static_cast<double>(s.n);
  return s;
}

}  // namespace svgr
