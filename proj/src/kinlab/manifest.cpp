#include <algorithm>

#include <json.hpp>

#include "lift/common/error.hpp"
#include "lift/kinlab/kinlab.hpp"

namespace lift::kinlab {

using ordered_json = nlohmann::ordered_json;

void LiftTrialMeta::validate() const {
  auto bad = [&](const std::string& what) { throw_data("BadManifest", trial_id + ": " + what); };
  if (trial_id.empty()) throw_data("BadManifest", "trial without id");
  if (participant_id.empty()) bad("missing participant_id");
  if (box_mass_kg != 6 && box_mass_kg != 9 && box_mass_kg != 12) bad("box_mass_kg must be 6, 9 or 12");
  if (fps <= 0) bad("fps must be positive");
  if (frame_count <= 0) bad("frame_count must be positive");
  if (!(lift_start_frame < lift_end_frame)) bad("lift_start_frame must precede lift_end_frame");
  if (lift_start_frame < 0 || lift_end_frame >= frame_count) bad("lift event frames outside the trial");
  if (available_views.empty()) bad("no available views");
}

namespace {

ordered_json to_json(const LiftTrialMeta& m) {
  ordered_json views = ordered_json::array();
  for (ViewId v : m.available_views) views.push_back(std::string(to_string(v)));
  return ordered_json{{"participant_id", m.participant_id},
                      {"trial_id", m.trial_id},
                      {"lift_origin", std::string(to_string(m.lift_origin))},
                      {"hand_config", std::string(to_string(m.hand_config))},
                      {"box_mass_kg", m.box_mass_kg},
                      {"available_views", views},
                      {"fps", m.fps},
                      {"frame_count", m.frame_count},
                      {"lift_start_frame", m.lift_start_frame},
                      {"lift_end_frame", m.lift_end_frame}};
}

LiftTrialMeta meta_from_json(const ordered_json& j) {
  LiftTrialMeta m;
  try {
    m.participant_id = j.at("participant_id").get<std::string>();
    m.trial_id = j.at("trial_id").get<std::string>();
    const auto origin = j.at("lift_origin").get<std::string>();
    if (origin != "floor" && origin != "knee") throw_data("BadManifest", "lift_origin must be floor|knee");
    m.lift_origin = origin == "floor" ? LiftOrigin::Floor : LiftOrigin::Knee;
    const auto hands = j.at("hand_config").get<std::string>();
    if (hands != "broad" && hands != "narrow") throw_data("BadManifest", "hand_config must be broad|narrow");
    m.hand_config = hands == "broad" ? HandConfig::Broad : HandConfig::Narrow;
    m.box_mass_kg = j.at("box_mass_kg").get<int>();
    for (const auto& v : j.at("available_views")) m.available_views.push_back(parse_view(v.get<std::string>()));
    m.fps = j.value("fps", kVideoFps);
    m.frame_count = j.at("frame_count").get<int>();
    m.lift_start_frame = j.at("lift_start_frame").get<int>();
    m.lift_end_frame = j.at("lift_end_frame").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw_data("BadManifest", e.what());
  }
  m.validate();
  return m;
}

}  // namespace

std::string format_manifest(const Manifest& manifest) {
  ordered_json trials = ordered_json::array();
  for (const auto& t : manifest.trials) trials.push_back(to_json(t));
  ordered_json doc{{"schema", "lift-manifest/1"},
                   {"seed", manifest.seed},
                   {"config_digest", manifest.config_digest},
                   {"trials", trials}};
  return doc.dump(2) + "\n";
}

Manifest parse_manifest(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw_data("BadManifest", e.what());
  }
  if (doc.value("schema", "") != "lift-manifest/1") throw_data("BadManifest", "unknown manifest schema");
  Manifest m;
  m.seed = doc.value("seed", std::uint64_t{0});
  m.config_digest = doc.value("config_digest", "");
  for (const auto& t : doc.at("trials")) m.trials.push_back(meta_from_json(t));
  return m;
}

}  // namespace lift::kinlab
