#include <algorithm>
#include <type_traits>
#include <functional>
#include <variant>

#include <json.hpp>

#include "lift/cli/cli.hpp"
#include "lift/common/error.hpp"
#include "lift/common/seed.hpp"
#include "lift/common/textio.hpp"
#include "lift/evalharness/evalharness.hpp"

namespace lift::cli {

namespace {

using Json = nlohmann::ordered_json;
using Field = std::variant<double*, int*, std::int64_t*>;
using FieldTable = std::vector<std::pair<const char*, Field>>;

FieldTable scene_fields(simscene::SyntheticSceneConfig& s) {
  return {{"participant_count", &s.participant_count},
          {"trials_per_participant", &s.trials_per_participant},
          {"frame_count", &s.frame_count},
          {"sample_rate_hz", &s.sample_rate_hz},
          {"bbox_noise_px", &s.bbox_noise_px},
          {"detect_feature_sd", &s.detect_feature_sd},
          {"segment_feature_sd", &s.segment_feature_sd},
          {"base_dropout", &s.base_dropout},
          {"person_miss", &s.person_miss},
          {"mask_failure", &s.mask_failure},
          {"low_hand_oblique", &s.low_hand_oblique},
          {"low_hand_frontal", &s.low_hand_frontal},
          {"far_hand_oblique", &s.far_hand_oblique},
          {"oblique_deg", &s.rig.oblique_deg},
          {"standoff_m", &s.rig.standoff_m},
          {"camera_height_m", &s.rig.camera_height_m}};
}

FieldTable model_fields(seqreg::ModelConfig& m) {
  return {{"model_dim", &m.model_dim}, {"layers", &m.layers},           {"heads", &m.heads},
          {"ffn_dim", &m.ffn_dim},     {"head_hidden", &m.head_hidden}, {"dropout", &m.dropout}};
}

FieldTable training_fields(seqreg::TrainHyper& t) {
  return {{"lr", &t.lr},
          {"batch_size", &t.batch_size},
          {"max_epochs", &t.max_epochs},
          {"plateau_patience", &t.plateau_patience},
          {"plateau_factor", &t.plateau_factor},
          {"min_lr", &t.min_lr},
          {"early_stop_patience", &t.early_stop_patience},
          {"weight_decay", &t.adamw.weight_decay},
          {"max_steps", &t.max_steps}};
}

Json dump(const FieldTable& fields) {
  Json j = Json::object();
  for (const auto& [name, field] : fields) std::visit([&, n = name](auto* p) { j[n] = *p; }, field);
  return j;
}

void load(const Json& j, const FieldTable& fields, const std::string& section) {
  if (!j.is_object()) throw_config("BadConfig", "'" + section + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return key == f.first; });
    if (it == fields.end()) throw_config("BadConfig", "unknown key '" + section + "." + key + "'");
    if (!value.is_number()) throw_config("BadConfig", "'" + section + "." + key + "' must be a number");
    std::visit(
        [&](auto* p) {
          using V = std::remove_pointer_t<decltype(p)>;
          if constexpr (!std::is_same_v<V, double>) {
            if (!value.is_number_integer()) throw_config("BadConfig", "'" + section + "." + key + "' must be an integer");
          }
          *p = value.get<V>();
        },
        it->second);
  }
}

Json result_json(const RunConfig& c) {
  auto copy = c;
  Json j;
  j["seed"] = c.seed;
  j["scene"] = dump(scene_fields(copy.scene));
  j["model"] = dump(model_fields(copy.model));
  j["training"] = dump(training_fields(copy.training));
  j["cells"] = c.cells;
  j["inner_validation"] = c.inner_validation;
  return j;
}

}  // namespace

seqreg::ModelConfig desk_model() {
  seqreg::ModelConfig m;
  m.model_dim = 32;
  m.layers = 1;
  m.heads = 4;
  m.ffn_dim = 64;
  m.head_hidden = 32;
  return m;
}

seqreg::TrainHyper desk_training() {
  seqreg::TrainHyper t;
  t.lr = 1e-3;
  t.batch_size = 4;
  t.max_epochs = 20;
  return t;
}

RunConfig default_run_config() {
  RunConfig c;
  c.model = desk_model();
  c.training = desk_training();
  return c;
}

void RunConfig::validate() const {
  scene.validate();
  model.validate();
  if (training.lr <= 0.0) throw_config("BadConfig", "training.lr must be positive");
  if (training.batch_size < 1) throw_config("BadConfig", "training.batch_size must be at least 1");
  if (training.max_epochs < 1) throw_config("BadConfig", "training.max_epochs must be at least 1");
  if (workers < 0) throw_config("BadConfig", "workers must be >= 0");
  for (const auto& cell : cells) {
    try {
      evalharness::parse_cell(cell);
    } catch (const Error& e) {
      throw_config("BadConfig", e.what());
    }
  }
}

RunConfig parse_run_config(std::string_view json_text, RunConfig base) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw_config("BadConfig", std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw_config("BadConfig", "config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "data_root") base.data_root = value.get<std::string>();
      else if (key == "output_dir") base.output_dir = value.get<std::string>();
      else if (key == "seed") base.seed = value.get<std::uint64_t>();
      else if (key == "workers") base.workers = value.get<int>();
      else if (key == "deterministic") base.deterministic = value.get<bool>();
      else if (key == "inner_validation") base.inner_validation = value.get<bool>();
      else if (key == "cells") base.cells = value.get<std::vector<std::string>>();
      else if (key == "scene") load(value, scene_fields(base.scene), key);
      else if (key == "model") load(value, model_fields(base.model), key);
      else if (key == "training") load(value, training_fields(base.training), key);
      else throw_config("BadConfig", "unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw_config("BadConfig", std::string("ill-typed config value: ") + e.what());
  }
  base.validate();
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw_config("BadConfig", "config file not found: " + path.string());
  return parse_run_config(read_file(path));
}

std::string format_run_config(const RunConfig& config) {
  Json j;
  j["data_root"] = config.data_root.string();
  j["output_dir"] = config.output_dir.string();
  j["workers"] = config.workers;
  j["deterministic"] = config.deterministic;
  j.update(result_json(config));
  return j.dump(2) + "\n";
}

std::string config_digest(const RunConfig& config) { return digest_hex(result_json(config).dump()); }

}  // namespace lift::cli
