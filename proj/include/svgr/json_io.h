#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "svgr/grpo.h"
#include "svgr/metrics.h"
#include "svgr/pipeline.h"
#include "svgr/reward.h"

namespace svgr {

using Json = nlohmann::json;

// Compact JSON with object keys sorted, floats printed with 9 significant
// digits and non-finite floats as the strings "inf", "-inf" and "nan".
std::string canonical_dump(const Json& value);

// A JSON value per non-blank line. Throws Error(kInputError) naming the
// file and line for unreadable files and invalid JSON.
std::vector<Json> read_jsonl(const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

// Truncates and writes `path`.
// Throws Error(kInputError) on I/O failure.
void write_text(const std::filesystem::path& path, std::string_view text);

struct CandidateInput {
  std::string id;
  std::string prompt;
  std::string response;
  std::optional<std::string> reference_svg;
};

// Schema checks throw Error(kInputError) with the offending field.
CandidateInput candidate_from_json(const Json& j);
Triplet triplet_from_json(const Json& j);
Json triplet_to_json(const Triplet& t);

struct LoggedSample {
  std::string group_id;
  GroupSample sample;
};
LoggedSample logged_sample_from_json(const Json& j);

// Groups samples by group_id in order of first appearance.
std::vector<std::pair<std::string, std::vector<GroupSample>>> group_samples(std::vector<LoggedSample> samples);

// Feature files: .json/.jsonl hold one array per line; anything else is a
// little-endian binary matrix (u64 D, u64 N, then N*D f64 row-major).
FeatureSet load_feature_set(const std::filesystem::path& path);

Json to_json(const RewardWeights& w);
Json to_json(const RewardBreakdown& b);
Json to_json(const ComplexityReport& c);
Json to_json(const RasterSimilarity& s);
Json to_json(const EvalReport& r);
Json to_json(const FilterVerdict& v, std::string_view id);
Json to_json(const CorpusStats& s);
Json to_json(const GrpoStepResult& r);

}  // namespace svgr
