#include <httplib.h>

#include <cmath>
#include <json.hpp>

#include "svgr/error.h"
#include "svgr/png.h"
#include "svgr/scorer.h"

namespace svgr {

namespace {

[[noreturn]] void unavailable(const std::string& what) { throw Error(ErrorCode::kScorerUnavailable, what); }

nlohmann::json parse_response(const std::string& body) {
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    unavailable(std::string("malformed scorer response: ") + e.what());
  }
}

EmbeddingVector embedding_from(const nlohmann::json& j) {
  if (!j.contains("embedding") || !j["embedding"].is_array()) unavailable("scorer response lacks an embedding");
  std::vector<double> values;
  for (const auto& v : j["embedding"]) {
    if (!v.is_number()) unavailable("non-numeric embedding component");
    values.push_back(v.get<double>());
  }
  if (j.contains("dim") && j["dim"].is_number_integer() && j["dim"].get<std::size_t>() != values.size()) {
    unavailable("embedding length disagrees with dim");
  }
  try {
    return EmbeddingVector(std::move(values));
  } catch (const Error& e) {
    unavailable(e.what());
  }
}

double score_from(const nlohmann::json& j) {
  if (!j.contains("score") || !j["score"].is_number()) unavailable("scorer response lacks a score");
  double s = j["score"].get<double>();
  if (!std::isfinite(s) || s < 0.0 || s > 1.0) unavailable("score outside [0,1]");
  return s;
}

}  // namespace

RemoteScorer::RemoteScorer(std::string base_url, int max_in_flight, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds), in_flight_(std::max(1, max_in_flight)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.empty()) throw Error(ErrorCode::kInvalidArgument, "scorer URL is empty");
}

std::string RemoteScorer::post(const std::string& body) {
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{in_flight_};
  httplib::Client client(base_url_);
  if (!client.is_valid()) unavailable("invalid scorer URL '" + base_url_ + "'");
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  client.set_write_timeout(timeout_seconds_);
  auto res = client.Post("/v1/score", body, "application/json");
  if (!res) unavailable("POST " + base_url_ + "/v1/score failed: " + httplib::to_string(res.error()));
  if (res->status != 200) unavailable("scorer returned HTTP " + std::to_string(res->status) + ": " + res->body);
  return res->body;
}

EmbeddingVector RemoteScorer::embed_text(std::string_view text) {
  nlohmann::json req = {{"kind", "embed_text"}, {"text", std::string(text)}};
  return embedding_from(parse_response(post(req.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace))));
}

EmbeddingVector RemoteScorer::embed_image(const RasterImage& image) {
  nlohmann::json req = {{"kind", "embed_image"}, {"image_png_base64", base64_encode(encode_png(image))}};
  return embedding_from(parse_response(post(req.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace))));
}

double RemoteScorer::aesthetic(const RasterImage& image, std::string_view prompt) {
  nlohmann::json req = {{"kind", "aesthetic"},
                        {"image_png_base64", base64_encode(encode_png(image))},
                        {"text", std::string(prompt)}};
  return score_from(parse_response(post(req.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace))));
}

double RemoteScorer::consistency(const RasterImage& image, std::string_view prompt, std::string_view dwt_text) {
  nlohmann::json req = {{"kind", "consistency"},
                        {"image_png_base64", base64_encode(encode_png(image))},
                        {"text", std::string(prompt)},
                        {"dwt_text", std::string(dwt_text)}};
  return score_from(parse_response(post(req.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace))));
}

std::string RemoteScorer::health() {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  auto res = client.Get("/v1/health");
  if (!res) unavailable("GET " + base_url_ + "/v1/health failed: " + httplib::to_string(res.error()));
  if (res->status != 200) unavailable("health check returned HTTP " + std::to_string(res->status));
  auto j = parse_response(res->body);
  if (!j.contains("status") || j["status"] != "ok") unavailable("scorer not healthy");
  return j.value("mode", std::string("unknown"));
}

}  // namespace svgr
