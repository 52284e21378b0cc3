#include "svgr/json_io.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "svgr/error.h"

namespace svgr {

namespace {

void dump_to(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {  // std::map: sorted keys
        if (!first) out.push_back(',');
        first = false;
        out += Json(it.key()).dump(-1, ' ', false, Json::error_handler_t::replace);
        out.push_back(':');
        dump_to(it.value(), out);
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      out.push_back('[');
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out.push_back(',');
        dump_to(v[i], out);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (std::isnan(d)) {
        out += "\"nan\"";
      } else if (std::isinf(d)) {
        out += d > 0 ? "\"inf\"" : "\"-inf\"";
      } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", d == 0.0 ? 0.0 : d);
        out += buf;
      }
      break;
    }
    default:
      out += v.dump(-1, ' ', false, Json::error_handler_t::replace);
  }
}

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::kInputError, what); }

std::string required_string(const Json& j, const char* key, bool allow_empty = true) {
  if (!j.is_object()) schema_error("record is not a JSON object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(std::string("missing field \"") + key + "\"");
  if (!it->is_string()) schema_error(std::string("field \"") + key + "\" must be a string");
  std::string s = it->get<std::string>();
  if (!allow_empty && s.empty()) schema_error(std::string("field \"") + key + "\" must be non-empty");
  return s;
}

std::optional<std::string> optional_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) schema_error(std::string("field \"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::string id_of(const Json& j, const char* key) {
  if (!j.is_object()) schema_error("record is not a JSON object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(std::string("missing field \"") + key + "\"");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return it->dump();
  schema_error(std::string("field \"") + key + "\" must be a string or integer");
}

double required_number(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) schema_error(std::string("missing field \"") + key + "\"");
  if (!it->is_number()) schema_error(std::string("field \"") + key + "\" must be a number");
  return it->get<double>();
}

TokenLogProbs required_logprobs(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) schema_error(std::string("missing field \"") + key + "\"");
  if (!it->is_array()) schema_error(std::string("field \"") + key + "\" must be an array");
  std::vector<double> values;
  values.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number()) schema_error(std::string("field \"") + key + "\" must contain numbers");
    values.push_back(v.get<double>());
  }
  try {
    return TokenLogProbs(std::move(values));
  } catch (const Error& e) {
    schema_error(std::string("field \"") + key + "\": " + e.detail());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInputError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kInputError, "cannot read " + path.string());
  return ss.str();
}

Json float_or_null(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string canonical_dump(const Json& value) {
  std::string out;
  dump_to(value, out);
  return out;
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<Json> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = nl == std::string::npos ? text.size() : nl;
    ++line_no;
    std::string_view line(text.data() + pos, end - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        out.push_back(Json::parse(line));
      } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::kInputError,
                    path.string() + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what());
      }
    }
    pos = end + 1;
  }
  return out;
}

Json read_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kInputError, path.string() + ": invalid JSON: " + e.what());
  }
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInputError, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kInputError, "failed writing " + path.string());
}

CandidateInput candidate_from_json(const Json& j) {
  CandidateInput c;
  c.id = id_of(j, "id");
  c.prompt = required_string(j, "prompt", false);
  c.response = required_string(j, "response");
  c.reference_svg = optional_string(j, "reference_svg");
  return c;
}

Triplet triplet_from_json(const Json& j) {
  Triplet t;
  t.id = id_of(j, "id");
  t.prompt = required_string(j, "prompt", false);
  t.dwt_text = required_string(j, "dwt");
  t.svg_text = required_string(j, "svg");
  if (auto d = optional_string(j, "domain")) {
    try {
      t.domain = parse_domain(*d);
    } catch (const Error& e) {
      schema_error(e.detail());
    }
  }
  return t;
}

Json triplet_to_json(const Triplet& t) {
  Json j = {{"id", t.id}, {"prompt", t.prompt}, {"dwt", t.dwt_text}, {"svg", t.svg_text}};
  if (t.domain) j["domain"] = std::string(domain_name(*t.domain));
  return j;
}

LoggedSample logged_sample_from_json(const Json& j) {
  LoggedSample s;
  s.group_id = id_of(j, "group_id");
  s.sample.reward = required_number(j, "reward");
  if (!std::isfinite(s.sample.reward)) schema_error("field \"reward\" must be finite");
  s.sample.logp_new = required_logprobs(j, "logp_new");
  s.sample.logp_old = required_logprobs(j, "logp_old");
  s.sample.logp_ref = required_logprobs(j, "logp_ref");
  if (s.sample.logp_new.size() != s.sample.logp_old.size() || s.sample.logp_new.size() != s.sample.logp_ref.size()) {
    schema_error("logp_new, logp_old and logp_ref must have equal lengths");
  }
  if (s.sample.logp_new.empty()) schema_error("log-probability arrays must be non-empty");
  return s;
}

std::vector<std::pair<std::string, std::vector<GroupSample>>> group_samples(std::vector<LoggedSample> samples) {
  std::vector<std::pair<std::string, std::vector<GroupSample>>> groups;
  std::map<std::string, std::size_t> index;
  for (auto& s : samples) {
    auto [it, inserted] = index.emplace(s.group_id, groups.size());
    if (inserted) groups.emplace_back(s.group_id, std::vector<GroupSample>{});
    groups[it->second].second.push_back(std::move(s.sample));
  }
  return groups;
}

FeatureSet load_feature_set(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  const std::string label = path.filename().string();
  try {
    if (ext == ".json" || ext == ".jsonl") {
      std::vector<std::vector<double>> rows;
      for (const auto& line : read_jsonl(path)) {
        if (!line.is_array()) schema_error(path.string() + ": each line must be an array of numbers");
        std::vector<double> row;
        for (const auto& v : line) {
          if (!v.is_number()) schema_error(path.string() + ": feature values must be numbers");
          row.push_back(v.get<double>());
        }
        rows.push_back(std::move(row));
      }
      return FeatureSet::from_rows(rows, label);
    }
    const std::string bytes = read_file(path);
    auto read_u64 = [&](std::size_t off) {
      std::uint64_t v = 0;
      for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes[off + i]);
      return v;
    };
    if (bytes.size() < 16) schema_error(path.string() + ": truncated feature header");
    const std::uint64_t dim = read_u64(0);
    const std::uint64_t rows = read_u64(8);
    if (dim == 0 || rows > (bytes.size() - 16) / 8 / dim || bytes.size() != 16 + rows * dim * 8) {
      schema_error(path.string() + ": feature file size does not match its header");
    }
    std::vector<double> values(rows * dim);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::bit_cast<double>(read_u64(16 + i * 8));
    return FeatureSet(rows, dim, std::move(values), label);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInputError) throw;
    throw Error(ErrorCode::kInputError, path.string() + ": " + e.what());
  }
}

Json to_json(const RewardWeights& w) {
  return {{"think", w.think}, {"render", w.render}, {"semantic", w.semantic}, {"aesthetic", w.aesthetic}};
}

Json to_json(const RewardBreakdown& b) {
  return {{"r_think", b.r_think},       {"r_render", b.r_render}, {"r_semantic", b.r_semantic},
          {"r_aesthetic", b.r_aesthetic}, {"total", b.total},       {"weights_used", to_json(b.weights_used)}};
}

Json to_json(const ComplexityReport& c) {
  return {{"path_command_count", c.path_command_count},
          {"primitive_count", c.primitive_count},
          {"total", c.total},
          {"malformed_paths", c.malformed_paths}};
}

Json to_json(const RasterSimilarity& s) {
  return {{"mse", s.mse}, {"psnr", s.psnr}, {"ssim", s.ssim}, {"embed_cos", float_or_null(s.embed_cos)}};
}

Json to_json(const EvalReport& r) {
  Json j = {{"n_candidates", r.n_candidates},
            {"validity_rate_pct", r.validity_rate_pct},
            {"dwt_cover_pct", r.dwt_cover_pct},
            {"mean_complexity", r.mean_complexity},
            {"mean_semantic", r.mean_semantic},
            {"mean_aesthetic", r.mean_aesthetic},
            {"mean_reward", r.mean_reward},
            {"mean_dwt_tokens_approx", r.mean_dwt_tokens_approx},
            {"fid", float_or_null(r.fid)},
            {"raster_similarity", nullptr}};
  if (r.raster_similarity) {
    const auto& s = *r.raster_similarity;
    j["raster_similarity"] = {{"count", s.count},
                              {"mse", s.mse},
                              {"psnr", s.psnr},
                              {"ssim", s.ssim},
                              {"embed_cos", float_or_null(s.embed_cos)}};
  }
  return j;
}

Json to_json(const FilterVerdict& v, std::string_view id) {
  Json j = {{"id", std::string(id)}, {"accepted", v.accepted}};
  if (v.rejected_at) j["rejected_at"] = std::string(reject_stage_name(*v.rejected_at));
  if (v.consistency_score) j["consistency_score"] = *v.consistency_score;
  return j;
}

Json to_json(const CorpusStats& s) {
  Json buckets = Json::object();
  for (std::size_t i = 0; i < kTokenBucketNames.size(); ++i) {
    buckets[std::string(kTokenBucketNames[i])] = s.dwt_token_buckets[i];
  }
  return {{"n", s.n},
          {"accepted", s.accepted},
          {"acceptance_rate", s.acceptance_rate},
          {"domain_histogram", s.domain_histogram},
          {"dwt_token_buckets", buckets},
          {"dwt_tokens_approximate", s.tokens_approximate},
          {"rejected_by_stage", s.rejected_by_stage}};
}

Json to_json(const GrpoStepResult& r) {
  return {{"advantages", r.advantages},
          {"per_token_surrogate", r.per_token_surrogate},
          {"per_token_kl", r.per_token_kl},
          {"mean_surrogate", r.mean_surrogate},
          {"mean_kl", r.mean_kl},
          {"objective", r.objective}};
}

}  // namespace svgr
