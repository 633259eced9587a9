#include "lift/common/error.hpp"
#include "lift/common/seed.hpp"
#include "lift/common/textio.hpp"
#include "lift/simscene/simscene.hpp"

namespace lift::simscene {

namespace {

constexpr std::array<Pipeline, 2> kPipelines{Pipeline::GdDv2, Pipeline::GdSamDv2};

roistore::DetectionHeader detection_header(const SyntheticSceneConfig& cfg, const std::string& trial_id,
                                           const std::string& digest) {
  roistore::DetectionHeader h;
  h.source = "simscene";
  h.trial_id = trial_id;
  h.seed = cfg.seed;
  h.config_digest = digest;
  return h;
}

}  // namespace

std::uint64_t trial_seed(const SyntheticSceneConfig& cfg, std::string_view trial_id) {
  return derive_seed(cfg.seed, {tag("trial"), tag(trial_id)});
}

SimulatedTrial simulate_trial(const SyntheticSceneConfig& cfg, const TrialSpec& spec, const std::string& config_digest) {
  SimulatedTrial out;
  const std::uint64_t seed = trial_seed(cfg, spec.trial_id);
  out.trial = generate_trial(cfg, spec, seed);
  const auto video_rate = kinlab::resample(out.trial.trajectory, kVideoFps);
  const auto cameras = default_cameras(cfg.rig);
  const FeatureEncoder encoder(derive_seed(cfg.seed, {tag("feature-map")}), cfg.detect_feature_sd,
                               cfg.segment_feature_sd);

  for (const auto& cam : cameras) {
    const auto v = static_cast<std::size_t>(cam.view);
    out.detections[v] = render_rois(video_rate, out.trial.meta, cam, cfg, derive_seed(seed, {tag("render"), v}));
    for (Pipeline p : kPipelines) {
      auto& store = out.features[v][static_cast<std::size_t>(p)];
      store.trial_id = spec.trial_id;
      store.view = cam.view;
      store.variant = std::string(variant_name(p));
      store.seed = cfg.seed;
      store.config_digest = config_digest;
      const auto& records = out.detections[v];
      for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.stage != 2 || (p == Pipeline::GdSamDv2 && !r.mask)) continue;
        const auto vec = encoder.encode(r, store.variant, derive_seed(seed, {tag("features"), v, static_cast<std::uint64_t>(p), i}));
        store.entries.push_back({r.frame_index, r.label});
        store.data.insert(store.data.end(), vec.begin(), vec.end());
      }
    }
  }
  return out;
}

featpipe::TrialRecord assemble_record(const kinlab::JointTrajectory& trajectory, const kinlab::LiftTrialMeta& meta,
                                      const std::array<roistore::DetectionSet, 3>& detections,
                                      const std::array<std::array<featpipe::FeatureStore, 2>, 3>& features) {
  meta.validate();
  featpipe::TrialRecord rec;
  rec.meta = meta;
  const auto video_rate = kinlab::resample(kinlab::lowpass_filter(trajectory), meta.fps);
  rec.labels = kinlab::label_frames(video_rate, meta);
  for (ViewId view : meta.available_views) {
    const auto v = static_cast<std::size_t>(view);
    for (Pipeline p : kPipelines)
      rec.views[{p, view}] = featpipe::build_view_frames(detections[v], view, features[v][static_cast<std::size_t>(p)],
                                                         p, meta.frame_count);
  }
  return rec;
}

std::vector<featpipe::TrialRecord> build_dataset(const SyntheticSceneConfig& cfg) {
  std::vector<featpipe::TrialRecord> out;
  for (const auto& spec : trial_plan(cfg)) {
    auto sim = simulate_trial(cfg, spec);
    std::array<roistore::DetectionSet, 3> sets;
    for (std::size_t v = 0; v < 3; ++v)
      sets[v] = roistore::make_detection_set(detection_header(cfg, spec.trial_id, {}), std::move(sim.detections[v]));
    out.push_back(assemble_record(sim.trial.trajectory, sim.trial.meta, sets, sim.features));
  }
  return out;
}

std::filesystem::path trajectory_path(const std::filesystem::path& root, std::string_view trial_id) {
  return root / "trajectories" / (std::string(trial_id) + ".csv");
}

std::filesystem::path detection_path(const std::filesystem::path& root, std::string_view trial_id, ViewId view) {
  return root / "detections" / (std::string(trial_id) + "_" + std::string(to_string(view)) + ".jsonl");
}

std::filesystem::path feature_path(const std::filesystem::path& root, std::string_view trial_id, ViewId view,
                                   Pipeline pipeline) {
  return root / "features" /
         (std::string(trial_id) + "_" + std::string(to_string(view)) + "_" + std::string(variant_name(pipeline)) + ".lft");
}

kinlab::Manifest write_dataset(const std::filesystem::path& root, const SyntheticSceneConfig& cfg,
                               const std::string& config_digest) {
  kinlab::Manifest manifest;
  manifest.seed = cfg.seed;
  manifest.config_digest = config_digest;
  for (const auto& spec : trial_plan(cfg)) {
    const auto sim = simulate_trial(cfg, spec, config_digest);
    const auto& meta = sim.trial.meta;
    // The rate comment must stay first; provenance goes on the next line.
    auto csv = kinlab::format_joint_trajectories(sim.trial.trajectory);
    csv.insert(csv.find('\n') + 1, "# seed=" + std::to_string(cfg.seed) + " config_digest=" + config_digest + "\n");
    write_file(trajectory_path(root, meta.trial_id), csv);
    for (ViewId view : meta.available_views) {
      const auto v = static_cast<std::size_t>(view);
      write_file(detection_path(root, meta.trial_id, view),
                 roistore::format_detection_records(detection_header(cfg, meta.trial_id, config_digest),
                                                    sim.detections[v]));
      for (Pipeline p : kPipelines)
        featpipe::save_feature_store(feature_path(root, meta.trial_id, view, p), sim.features[v][static_cast<std::size_t>(p)]);
    }
    manifest.trials.push_back(meta);
  }
  write_file(root / "manifest.json", kinlab::format_manifest(manifest));
  return manifest;
}

std::vector<featpipe::TrialRecord> load_dataset(const std::filesystem::path& root, kinlab::Manifest* manifest_out) {
  const auto manifest = kinlab::parse_manifest(read_file(root / "manifest.json"));
  std::vector<featpipe::TrialRecord> out;
  for (const auto& meta : manifest.trials) {
    const auto traj = kinlab::load_joint_trajectories(trajectory_path(root, meta.trial_id));
    std::array<roistore::DetectionSet, 3> sets;
    std::array<std::array<featpipe::FeatureStore, 2>, 3> stores;
    for (ViewId view : meta.available_views) {
      const auto v = static_cast<std::size_t>(view);
      sets[v] = roistore::load_detection_records(detection_path(root, meta.trial_id, view));
      for (Pipeline p : kPipelines)
        stores[v][static_cast<std::size_t>(p)] = featpipe::load_feature_store(feature_path(root, meta.trial_id, view, p));
    }
    out.push_back(assemble_record(traj, meta, sets, stores));
  }
  if (manifest_out != nullptr) *manifest_out = manifest;
  return out;
}

}  // namespace lift::simscene
