#include "cli.h"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "svgr/error.h"
#include "svgr/json_io.h"
#include "svgr/metrics.h"
#include "svgr/parallel.h"
#include "svgr/pipeline.h"
#include "svgr/png.h"

namespace svgr::cli {

namespace fs = std::filesystem;

namespace {

// Flag values; a flag only overrides the config when it was given.
struct Flags {
  std::string config_path;
  double weights[4] = {};
  int grpo_group_size = 0;
  double grpo_clip_epsilon = 0, grpo_kl_beta = 0, grpo_advantage_delta = 0, grpo_ema_decay = 0;
  std::string think_mode;
  bool think_require_order = true;
  bool mock = false;
  std::string scorer_url;
  int max_in_flight = 0;
  int raster_size = 0;
  double threshold = 0;
  int jobs = 0;
  std::string out_dir = ".";
  const CLI::App* active = nullptr;

  bool given(const char* name) const {
    const CLI::Option* o = active ? active->get_option_no_throw(name) : nullptr;
    return o && o->count() > 0;
  }
};

constexpr const char* kWeightFlags[4] = {"--weights-think", "--weights-render", "--weights-semantic",
                                         "--weights-aesthetic"};

void add_common(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config_path, "Config file with [weights] [grpo] [think] [scorer] [eval] sections");
  for (int i = 0; i < 4; ++i) app.add_option(kWeightFlags[i], f.weights[i], "Reward weight");
  app.add_option("--think-mode", f.think_mode, "binary or partial")->check(CLI::IsMember({"binary", "partial"}));
  app.add_option("--think-require-order", f.think_require_order, "Binary think reward needs order");
  app.add_flag("--mock", f.mock, "Use the in-process deterministic scorer");
  app.add_option("--scorer-url", f.scorer_url, "Scorer service base URL (implies remote mode)");
  app.add_option("--scorer-max-in-flight", f.max_in_flight, "Concurrent scorer requests");
  app.add_option("--raster-size", f.raster_size, "Raster width and height in pixels");
  app.add_option("--threshold", f.threshold, "Consistency threshold");
  app.add_option("--jobs", f.jobs, "Worker threads");
  app.add_option("--out-dir", f.out_dir, "Output directory");
}

void add_grpo_flags(CLI::App& app, Flags& f) {
  app.add_option("--grpo-group-size", f.grpo_group_size, "Expected group size G");
  app.add_option("--grpo-clip-epsilon", f.grpo_clip_epsilon, "Clip range epsilon");
  app.add_option("--grpo-kl-beta", f.grpo_kl_beta, "KL penalty beta");
  app.add_option("--grpo-advantage-delta", f.grpo_advantage_delta, "Advantage stabilizer delta");
  app.add_option("--grpo-ema-decay", f.grpo_ema_decay, "Reference EMA decay");
}

CliConfig resolve_config(const Flags& f) {
  CliConfig c;
  if (!f.config_path.empty()) load_config_file(f.config_path, c);
  if (const char* env = std::getenv(kScorerUrlEnv); env && *env) {
    c.scorer_url = env;
    c.scorer_mode = ScorerMode::kRemote;
  }

  double* weights[4] = {&c.weights.think, &c.weights.render, &c.weights.semantic, &c.weights.aesthetic};
  for (int i = 0; i < 4; ++i) {
    if (f.given(kWeightFlags[i])) *weights[i] = f.weights[i];
  }
  if (f.given("--grpo-group-size")) {
    c.grpo.group_size = f.grpo_group_size;
    c.group_size_pinned = true;
  }
  if (f.given("--grpo-clip-epsilon")) c.grpo.clip_epsilon = f.grpo_clip_epsilon;
  if (f.given("--grpo-kl-beta")) c.grpo.kl_beta = f.grpo_kl_beta;
  if (f.given("--grpo-advantage-delta")) c.grpo.advantage_delta = f.grpo_advantage_delta;
  if (f.given("--grpo-ema-decay")) c.grpo.ema_decay = f.grpo_ema_decay;
  if (f.given("--think-mode")) c.think.mode = f.think_mode == "partial" ? ThinkRewardMode::kPartial : ThinkRewardMode::kBinary;
  if (f.given("--think-require-order")) c.think.require_order = f.think_require_order;
  if (f.given("--scorer-url")) {
    c.scorer_url = f.scorer_url;
    c.scorer_mode = ScorerMode::kRemote;
  }
  if (f.mock) c.scorer_mode = ScorerMode::kMock;
  if (f.given("--scorer-max-in-flight")) c.scorer_max_in_flight = f.max_in_flight;
  if (f.given("--raster-size")) c.raster_size = f.raster_size;
  if (f.given("--threshold")) c.consistency_threshold = f.threshold;
  if (f.given("--jobs")) c.jobs = f.jobs;
  c.validate();
  return c;
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kInputError, "cannot create output directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

std::string jsonl(const std::vector<Json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += canonical_dump(r);
    out.push_back('\n');
  }
  return out;
}

std::vector<Json> read_records(const std::string& path) {
  auto rows = read_jsonl(path);
  if (rows.empty()) throw Error(ErrorCode::kInputError, path + ": no records");
  return rows;
}

template <typename T, typename F>
std::vector<T> parse_records(const std::string& path, const std::vector<Json>& rows, F&& parse) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      out.push_back(parse(rows[i]));
    } catch (const Error& e) {
      throw Error(ErrorCode::kInputError, path + ": record " + std::to_string(i + 1) + ": " +
                                              (e.code() == ErrorCode::kInputError ? e.detail() : e.what()));
    }
  }
  return out;
}

// --- eval ---

struct EvalOutcome {
  CandidateEvaluation evaluation;
  std::optional<RasterSimilarity> similarity;
};

int cmd_eval(const std::string& path, const std::string& features_a, const std::string& features_b, const Flags& f,
             std::ostream& out) {
  CliConfig config = resolve_config(f);
  if (features_a.empty() != features_b.empty()) {
    throw Error(ErrorCode::kInputError, "--features-a and --features-b must be given together");
  }
  const auto candidates = parse_records<CandidateInput>(path, read_records(path), candidate_from_json);
  std::optional<FeatureSet> fa, fb;
  if (!features_a.empty()) {
    fa = load_feature_set(features_a);
    fb = load_feature_set(features_b);
    if (fa->dim() != fb->dim()) throw Error(ErrorCode::kInputError, "feature sets have different dimensions");
  }
  const fs::path dir = prepare_out_dir(f.out_dir);
  auto scorer = make_scorer(config);

  CandidateConfig cand_config{config.think, config.raster_size};
  std::vector<EvalOutcome> outcomes(candidates.size());
  parallel_for(candidates.size(), config.jobs, [&](std::size_t i) {
    const auto& c = candidates[i];
    auto& o = outcomes[i];
    o.evaluation = score_candidate(c.prompt, c.response, config.weights, *scorer, cand_config);
    if (c.reference_svg && o.evaluation.verdict.renderable) {
      RenderVerdict ref = check_renderable(*c.reference_svg, config.raster_size);
      if (!ref.raster) {
        throw Error(ErrorCode::kInputError, "candidate " + c.id + ": reference_svg does not render (" +
                                                std::string(failure_stage_name(*ref.failure_stage)) + ")");
      }
      o.similarity = raster_similarity(*o.evaluation.verdict.raster, *ref.raster, scorer.get());
    }
  });

  std::vector<CandidateRecord> records;
  std::vector<Json> rows;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& ev = outcomes[i].evaluation;
    CandidateRecord rec = make_record(ev);
    rec.similarity = outcomes[i].similarity;
    records.push_back(rec);

    Json row = to_json(ev.breakdown);
    row["id"] = candidates[i].id;
    row["renderable"] = ev.verdict.renderable;
    row["failure_stage"] =
        ev.verdict.failure_stage ? Json(std::string(failure_stage_name(*ev.verdict.failure_stage))) : Json(nullptr);
    row["has_think_block"] = ev.parts.has_think_block();
    row["stage_count"] = ev.trace.stage_count;
    row["stages_ordered"] = ev.trace.ordered;
    row["structurally_valid"] = ev.structurally_valid;
    row["complexity"] = ev.complexity ? to_json(*ev.complexity) : Json(nullptr);
    row["dwt_tokens_approx"] = rec.dwt_tokens_approx;
    if (rec.similarity) row["raster_similarity"] = to_json(*rec.similarity);
    rows.push_back(std::move(row));
  }
  EvalReport report = aggregate_report(records, fa ? &*fa : nullptr, fb ? &*fb : nullptr);
  const std::string report_text = canonical_dump(to_json(report)) + "\n";
  write_text(dir / "report.json", report_text);
  write_text(dir / "breakdowns.jsonl", jsonl(rows));
  out << report_text;
  return kExitOk;
}

// --- grpo-sim ---

int cmd_grpo_sim(const std::string& path, const Flags& f, std::ostream& out) {
  CliConfig config = resolve_config(f);
  auto samples = parse_records<LoggedSample>(path, read_records(path), logged_sample_from_json);
  auto groups = group_samples(std::move(samples));

  std::vector<Json> rows;
  double objective_sum = 0.0;
  for (const auto& [id, group] : groups) {
    GrpoConfig gc = config.grpo;
    if (!config.group_size_pinned) gc.group_size = static_cast<int>(group.size());
    GrpoStepResult r;
    try {
      r = grpo_objective(group, gc);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInputError, "group " + id + ": " + e.what());
    }
    Json row = to_json(r);
    row["group_id"] = id;
    rows.push_back(std::move(row));
    objective_sum += r.objective;
  }
  Json summary = {{"n_groups", groups.size()}, {"mean_objective", objective_sum / static_cast<double>(groups.size())}};
  const std::string summary_text = canonical_dump(summary) + "\n";
  if (f.out_dir != ".") {
    const fs::path dir = prepare_out_dir(f.out_dir);
    write_text(dir / "grpo_groups.jsonl", jsonl(rows));
    write_text(dir / "grpo_summary.json", summary_text);
  }
  out << jsonl(rows) << summary_text;
  return kExitOk;
}

// --- filter / stats ---

std::vector<Triplet> load_triplets(const std::string& path) {
  return parse_records<Triplet>(path, read_records(path), triplet_from_json);
}

std::vector<FilterVerdict> run_filter(const std::vector<Triplet>& triplets, const CliConfig& config) {
  auto scorer = make_scorer(config);
  try {
    return filter_corpus(triplets, *scorer, FilterConfig{config.consistency_threshold, config.raster_size}, config.jobs);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw Error(ErrorCode::kInputError, e.what());
    throw;
  }
}

int cmd_filter(const std::string& path, const Flags& f, std::ostream& out) {
  CliConfig config = resolve_config(f);
  const auto triplets = load_triplets(path);
  const fs::path dir = prepare_out_dir(f.out_dir);
  const auto verdicts = run_filter(triplets, config);

  std::vector<Json> accepted, verdict_rows;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    if (verdicts[i].accepted) accepted.push_back(triplet_to_json(triplets[i]));
    verdict_rows.push_back(to_json(verdicts[i], triplets[i].id));
  }
  const std::string stats = canonical_dump(to_json(corpus_stats(triplets, verdicts))) + "\n";
  write_text(dir / "accepted.jsonl", jsonl(accepted));
  write_text(dir / "verdicts.jsonl", jsonl(verdict_rows));
  write_text(dir / "stats.json", stats);
  out << stats;
  return kExitOk;
}

FilterVerdict verdict_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("accepted") || !j["accepted"].is_boolean()) {
    throw Error(ErrorCode::kInputError, "verdict needs a boolean \"accepted\"");
  }
  FilterVerdict v;
  v.accepted = j["accepted"].get<bool>();
  if (j.contains("rejected_at") && j["rejected_at"].is_string()) {
    const auto s = j["rejected_at"].get<std::string>();
    for (auto stage : {RejectStage::kSyntaxStage, RejectStage::kRenderStage, RejectStage::kConsistencyStage}) {
      if (reject_stage_name(stage) == s) v.rejected_at = stage;
    }
    if (!v.rejected_at) throw Error(ErrorCode::kInputError, "unknown rejected_at \"" + s + "\"");
  }
  if (v.accepted == v.rejected_at.has_value()) {
    throw Error(ErrorCode::kInputError, "verdict must be accepted or carry rejected_at, not both");
  }
  return v;
}

int cmd_stats(const std::string& path, const std::string& verdicts_path, const Flags& f, std::ostream& out) {
  CliConfig config = resolve_config(f);
  const auto triplets = load_triplets(path);
  std::vector<FilterVerdict> verdicts;
  if (verdicts_path.empty()) {
    verdicts = run_filter(triplets, config);
  } else {
    verdicts = parse_records<FilterVerdict>(verdicts_path, read_records(verdicts_path), verdict_from_json);
    if (verdicts.size() != triplets.size()) {
      throw Error(ErrorCode::kInputError, std::to_string(triplets.size()) + " triplets but " +
                                              std::to_string(verdicts.size()) + " verdicts");
    }
  }
  out << canonical_dump(to_json(corpus_stats(triplets, verdicts))) << "\n";
  return kExitOk;
}

// --- render ---

int cmd_render(const std::string& path, const std::string& png_path, const Flags& f, std::ostream& out) {
  CliConfig config = resolve_config(f);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInputError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  RenderVerdict v = check_renderable(ss.str(), config.raster_size);
  Json j = {{"renderable", v.renderable},
            {"failure_stage", v.failure_stage ? Json(std::string(failure_stage_name(*v.failure_stage))) : Json(nullptr)},
            {"detail", v.detail}};
  if (!png_path.empty()) {
    std::optional<RasterImage> raster = v.raster;
    if (!raster && v.failure_stage == FailureStage::kEmptyCanvas) {
      raster = render_raster(parse_svg(ss.str()), config.raster_size, config.raster_size);
    }
    if (raster) {
      write_png(*raster, png_path);
      j["png"] = png_path;
    }
  }
  out << canonical_dump(j) << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reward, GRPO and evaluation tools for reasoning-driven SVG generation", "svgreward"};
  app.require_subcommand(1);
  Flags flags;

  std::string eval_path, features_a, features_b;
  auto* eval = app.add_subcommand("eval", "Score candidates and write report.json + breakdowns.jsonl");
  eval->add_option("candidates", eval_path, "Candidates JSONL {id, prompt, response, reference_svg?}")->required();
  eval->add_option("--features-a", features_a, "Feature set A for FID");
  eval->add_option("--features-b", features_b, "Feature set B for FID");
  add_common(*eval, flags);

  std::string groups_path;
  auto* grpo = app.add_subcommand("grpo-sim", "Evaluate the GRPO objective on logged groups");
  grpo->add_option("groups", groups_path, "Groups JSONL {group_id, reward, logp_new, logp_old, logp_ref}")->required();
  add_common(*grpo, flags);
  add_grpo_flags(*grpo, flags);

  std::string filter_path;
  auto* filter = app.add_subcommand("filter", "Run the render/verify filter over triplets");
  filter->add_option("triplets", filter_path, "Triplets JSONL {id, prompt, dwt, svg, domain?}")->required();
  add_common(*filter, flags);

  std::string stats_path, verdicts_path;
  auto* stats = app.add_subcommand("stats", "Corpus statistics for a triplet file");
  stats->add_option("triplets", stats_path, "Triplets JSONL")->required();
  stats->add_option("--verdicts", verdicts_path, "verdicts.jsonl from a previous filter run");
  add_common(*stats, flags);

  std::string svg_path, png_path;
  auto* render = app.add_subcommand("render", "Check one SVG file and optionally write its raster as PNG");
  render->add_option("svg", svg_path, "SVG file")->required();
  render->add_option("--png", png_path, "Output PNG path");
  add_common(*render, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "svgreward: " << e.what() << "\n";
    return kExitInput;
  }

  for (const auto* sub : {eval, grpo, filter, stats, render}) {
    if (*sub) flags.active = sub;
  }
  try {
    if (*eval) return cmd_eval(eval_path, features_a, features_b, flags, out);
    if (*grpo) return cmd_grpo_sim(groups_path, flags, out);
    if (*filter) return cmd_filter(filter_path, flags, out);
    if (*stats) return cmd_stats(stats_path, verdicts_path, flags, out);
    if (*render) return cmd_render(svg_path, png_path, flags, out);
  } catch (const Error& e) {
    err << "svgreward: " << e.what() << "\n";
    return e.code() == ErrorCode::kScorerUnavailable ? kExitScorer : kExitInput;
  } catch (const std::exception& e) {
    err << "svgreward: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace svgr::cli
