#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "svgr/complexity.h"
#include "svgr/dwt.h"
#include "svgr/error.h"
#include "svgr/grpo.h"
#include "svgr/metrics.h"
#include "svgr/png.h"
#include "svgr/raster.h"
#include "svgr/reward.h"
#include "svgr/scorer.h"
#include "svgr/svg_document.h"

namespace py = pybind11;
using namespace svgr;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

U8Array to_array(const RasterImage& img) {
  U8Array out({img.height(), img.width(), 4});
  std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
  return out;
}

RasterImage from_array(const U8Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 4) throw py::value_error("expected an (H, W, 4) uint8 array");
  std::vector<std::uint8_t> px(a.data(), a.data() + a.size());
  return RasterImage(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), std::move(px));
}

FeatureSet from_matrix(const F64Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected an (N, D) array");
  return FeatureSet(a.shape(0), a.shape(1), std::vector<double>(a.data(), a.data() + a.size()));
}

RewardWeights weights_from(const std::array<double, 4>& w) { return {w[0], w[1], w[2], w[3]}; }

ThinkRewardConfig think_config(const std::string& mode, bool require_order) {
  if (mode == "binary") return {ThinkRewardMode::kBinary, require_order};
  if (mode == "partial") return {ThinkRewardMode::kPartial, require_order};
  throw py::value_error("mode must be 'binary' or 'partial'");
}

py::dict breakdown_dict(const RewardBreakdown& b) {
  py::dict d;
  d["r_think"] = b.r_think;
  d["r_render"] = b.r_render;
  d["r_semantic"] = b.r_semantic;
  d["r_aesthetic"] = b.r_aesthetic;
  d["total"] = b.total;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Reward, GRPO and evaluation math for reasoning-driven SVG generation";

  py::register_exception<Error>(m, "SvgrError", PyExc_ValueError);

  m.def("fnv1a64", [](py::bytes data) { return fnv1a64(std::string_view(data)); }, py::arg("data"));
  m.def("mock_embedding", &mock_embedding, py::arg("hash"), py::arg("dim") = 64);
  m.def("mock_score", &mock_score, py::arg("hash"));
  m.def(
      "mock_embed_text",
      [](const std::string& text) { return MockScorer().embed_text(text).values(); }, py::arg("text"));

  m.def(
      "check_renderable",
      [](const std::string& text, int size) {
        auto v = check_renderable(text, size);
        py::dict d;
        d["renderable"] = v.renderable;
        d["failure_stage"] =
            v.failure_stage ? py::object(py::str(std::string(failure_stage_name(*v.failure_stage)))) : py::none();
        d["detail"] = v.detail;
        return d;
      },
      py::arg("svg"), py::arg("raster_size") = kDefaultRasterSize);
  m.def(
      "render",
      [](const std::string& text, int width, int height) { return to_array(render_raster(parse_svg(text), width, height)); },
      py::arg("svg"), py::arg("width") = kDefaultRasterSize, py::arg("height") = kDefaultRasterSize);
  m.def(
      "encode_png",
      [](const U8Array& rgba) {
        auto bytes = encode_png(from_array(rgba));
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("rgba"));
  m.def(
      "complexity",
      [](const std::string& text) {
        auto r = count_complexity(parse_svg(text));
        py::dict d;
        d["path_commands"] = r.path_command_count;
        d["primitives"] = r.primitive_count;
        d["malformed_paths"] = r.malformed_paths;
        d["total"] = r.total;
        return d;
      },
      py::arg("svg"));

  m.def(
      "parse_response",
      [](const std::string& response) {
        auto parts = split_response(response);
        auto trace = trace_of(parts);
        py::dict d;
        d["think_text"] = parts.think_text;
        d["svg_text"] = parts.svg_text;
        d["stage_count"] = trace.stage_count;
        d["ordered"] = trace.ordered;
        d["structurally_valid"] = structural_validity(parts, trace);
        return d;
      },
      py::arg("response"));
  m.def(
      "think_reward",
      [](const std::string& response, const std::string& mode, bool require_order) {
        auto parts = split_response(response);
        return think_reward(parts, trace_of(parts), think_config(mode, require_order));
      },
      py::arg("response"), py::arg("mode") = "binary", py::arg("require_order") = true);

  m.def(
      "hybrid_reward",
      [](const std::array<double, 4>& c, const std::array<double, 4>& w) {
        return breakdown_dict(hybrid_reward({c[0], c[1], c[2], c[3]}, weights_from(w)));
      },
      py::arg("components"), py::arg("weights") = std::array<double, 4>{0.1, 0.1, 0.6, 0.2});
  m.def(
      "evaluate_candidate",
      [](const std::string& prompt, const std::string& response, const std::array<double, 4>& w) {
        MockScorer scorer;
        return breakdown_dict(evaluate_candidate(prompt, response, weights_from(w), scorer));
      },
      py::arg("prompt"), py::arg("response"), py::arg("weights") = std::array<double, 4>{0.1, 0.1, 0.6, 0.2},
      "Scores a response with the in-process mock scorer.");

  m.def(
      "group_advantages", [](const std::vector<double>& r, double delta) { return group_advantages(r, delta); },
      py::arg("rewards"), py::arg("delta") = 1e-4);
  m.def("clipped_surrogate", py::overload_cast<double, double, double>(&clipped_surrogate), py::arg("ratio"),
        py::arg("advantage"), py::arg("epsilon") = 0.2);
  m.def(
      "kl_estimate",
      [](const std::vector<double>& logp_new, const std::vector<double>& logp_ref) {
        return kl_estimate(TokenLogProbs(logp_new), TokenLogProbs(logp_ref));
      },
      py::arg("logp_new"), py::arg("logp_ref"));
  m.def(
      "grpo_objective",
      [](const std::vector<double>& rewards, const std::vector<std::vector<double>>& logp_new,
         const std::vector<std::vector<double>>& logp_old, const std::vector<std::vector<double>>& logp_ref,
         double clip_epsilon, double kl_beta, double delta) {
        if (logp_new.size() != rewards.size() || logp_old.size() != rewards.size() || logp_ref.size() != rewards.size())
          throw py::value_error("one log-prob sequence per reward is required");
        std::vector<GroupSample> group;
        for (std::size_t i = 0; i < rewards.size(); ++i)
          group.push_back({rewards[i], TokenLogProbs(logp_new[i]), TokenLogProbs(logp_old[i]), TokenLogProbs(logp_ref[i])});
        GrpoConfig c;
        c.group_size = static_cast<int>(rewards.size());
        c.clip_epsilon = clip_epsilon;
        c.kl_beta = kl_beta;
        c.advantage_delta = delta;
        auto r = grpo_objective(group, c);
        py::dict d;
        d["advantages"] = r.advantages;
        d["mean_surrogate"] = r.mean_surrogate;
        d["mean_kl"] = r.mean_kl;
        d["objective"] = r.objective;
        return d;
      },
      py::arg("rewards"), py::arg("logp_new"), py::arg("logp_old"), py::arg("logp_ref"), py::arg("clip_epsilon") = 0.2,
      py::arg("kl_beta") = 0.01, py::arg("delta") = 1e-4);

  m.def(
      "fid", [](const F64Array& a, const F64Array& b) { return fid(from_matrix(a), from_matrix(b)); }, py::arg("a"),
      py::arg("b"));
  m.def(
      "mse", [](const U8Array& a, const U8Array& b) { return mse(from_array(a), from_array(b)); }, py::arg("a"),
      py::arg("b"));
  m.def("psnr_from_mse", &psnr_from_mse, py::arg("mse"));
  m.def(
      "ssim", [](const U8Array& a, const U8Array& b) { return ssim(from_array(a), from_array(b)); }, py::arg("a"),
      py::arg("b"));
}
