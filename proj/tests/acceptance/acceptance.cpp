// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lift/cli/cli.hpp"
#include "lift/common/error.hpp"
#include "lift/common/textio.hpp"
#include "lift/evalharness/evalharness.hpp"
#include "lift/featpipe/featpipe.hpp"
#include "lift/kinlab/kinlab.hpp"
#include "lift/rnle/rnle.hpp"
#include "lift/roistore/roistore.hpp"
#include "lift/seqreg/seqreg.hpp"
#include "lift/simscene/simscene.hpp"
#include "support/oracles.hpp"

using namespace lift;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Shared state: criteria 4 and 5 both look at the seed-1 dataset.
struct Shared {
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int workers = 1;
  fs::path scratch;
  std::map<std::uint64_t, std::vector<featpipe::TrialRecord>> datasets;

  simscene::SyntheticSceneConfig scene(std::uint64_t seed) const {
    simscene::SyntheticSceneConfig cfg;
    cfg.seed = seed;
    return cfg;
  }

  const std::vector<featpipe::TrialRecord>& dataset(std::uint64_t seed) {
    auto it = datasets.find(seed);
    if (it == datasets.end()) it = datasets.emplace(seed, simscene::build_dataset(scene(seed))).first;
    return it->second;
  }
};

// -- 1 ------------------------------------------------------------------------

seqreg::ModelConfig gradcheck_config() {
  seqreg::ModelConfig c;
  c.input_dim = 16;
  c.model_dim = 16;
  c.layers = 2;
  c.heads = 2;
  c.ffn_dim = 32;
  c.head_hidden = 16;
  c.max_seq = 8;
  return c;
}

Verdict gradient_fidelity(Shared&) {
  const auto t0 = Clock::now();
  const auto cfg = gradcheck_config();
  const auto params = seqreg::init_model<double>(cfg, 101);
  const auto batch = seqreg::random_check_batch(cfg, 3, 102);
  const auto analytic = seqreg::gradients(params, batch, false, 0);
  const auto devs = oracle::finite_difference_check(params, batch, analytic.grads, 1e-5);
  double worst = 0.0;
  std::string worst_name;
  for (const auto& d : devs)
    if (d.relative >= worst) {
      worst = d.relative;
      worst_name = d.name;
    }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-4 && elapsed < 60.0 && devs.size() == seqreg::parameter_layout(cfg).size(),
          std::to_string(devs.size()) + " tensors, max relative error " + fmt(worst, 3) + " (" + worst_name + "), " +
              fmt(elapsed, 3) + " s"};
}

// -- 2 ------------------------------------------------------------------------

featpipe::SequenceBatch perturb_padding(featpipe::SequenceBatch b, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<float> n(0.0f, 100.0f);
  for (std::size_t pos = 0; pos < b.positions(); ++pos) {
    if (b.mask[pos]) continue;
    for (int d = 0; d < b.dim; ++d) b.features[pos * static_cast<std::size_t>(b.dim) + d] = n(rng);
  }
  return b;
}

template <class T>
std::size_t isolation_mismatches(const seqreg::ModelConfig& cfg, unsigned seed) {
  const auto params = seqreg::init_model<T>(cfg, seed);
  auto clean = oracle::random_batch(5, cfg.max_seq, cfg.input_dim, seed + 1);
  clean.add_empty_window({"empty", "p", 0, featpipe::WindowKind::Train, -1});
  const auto noisy = perturb_padding(clean, seed + 2);
  std::size_t bad = 0;
  for (bool train_mode : {false, true}) {
    const auto ya = seqreg::forward(params, clean, train_mode, 7);
    const auto yb = seqreg::forward(params, noisy, train_mode, 7);
    for (std::size_t pos = 0; pos < clean.positions(); ++pos)
      if (clean.mask[pos])
        for (int o = 0; o < cfg.outputs; ++o) bad += ya[pos * cfg.outputs + o] != yb[pos * cfg.outputs + o];
    const auto ga = seqreg::gradients(params, clean, train_mode, 7);
    const auto gb = seqreg::gradients(params, noisy, train_mode, 7);
    bad += ga.loss != gb.loss;
    for (std::size_t i = 0; i < ga.grads.size(); ++i) bad += ga.grads[i] != gb.grads[i];
  }
  return bad;
}

Verdict masked_isolation(Shared&) {
  auto cfg = oracle::tiny_config();
  std::size_t bad = isolation_mismatches<double>(cfg, 11) + isolation_mismatches<float>(cfg, 12);
  // Also at the production window length and width.
  auto desk = cli::desk_model();
  desk.input_dim = 24;
  bad += isolation_mismatches<float>(desk, 13);
  return {bad == 0, std::to_string(bad) + " differing values across outputs, losses and gradients"};
}

// -- 3 ------------------------------------------------------------------------

Verdict overfit(Shared&) {
  simscene::SyntheticSceneConfig cfg;
  cfg.participant_count = 2;
  cfg.trials_per_participant = 2;
  cfg.seed = 5;
  const auto data = simscene::build_dataset(cfg);
  // Holding out P02 leaves P01's two trials as the training set.
  const auto fold = evalharness::make_loso_folds({"P01", "P02"})[1];
  const auto cell = evalharness::parse_cell("GD-SAM-Dv2_V1+V2+V3");
  const auto fd = evalharness::prepare_fold(data, cell, fold);

  auto model = cli::desk_model();
  model.dropout = 0.0;
  seqreg::TrainHyper h;
  h.lr = 1e-3;
  h.batch_size = 4;
  h.max_epochs = 2000;
  h.max_steps = 2000;
  h.plateau_patience = 50;
  h.early_stop_patience = 2000;
  h.adamw.weight_decay = 0.0;
  h.seed = 6;
  const auto trained = seqreg::train<float>(fd.train, fd.train, model, h, 7);

  const auto preds = seqreg::predict(trained.best, fd.train);
  double sum[2] = {0, 0};
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < fd.train.positions(); ++pos) {
    if (!fd.train.mask[pos]) continue;
    for (int o = 0; o < 2; ++o)
      sum[o] += std::abs(featpipe::denormalize_target(preds[2 * pos + o]) -
                         featpipe::denormalize_target(fd.train.targets[2 * pos + o]));
    ++n;
  }
  const double mae_h = sum[0] / static_cast<double>(n), mae_v = sum[1] / static_cast<double>(n);
  std::set<std::string> trials;
  for (const auto& i : fd.train.info) trials.insert(i.trial_id);
  return {trials.size() == 2 && trained.steps <= 2000 && mae_h < 10.0 && mae_v < 10.0,
          std::to_string(trials.size()) + " trials, " + std::to_string(trained.steps) + " steps, training MAE H " +
              fmt(mae_h) + " mm, V " + fmt(mae_v) + " mm"};
}

// -- 4 ------------------------------------------------------------------------

Verdict orderings(Shared& shared) {
  // Dataset builds happen in here too, so they count toward the runtime.
  const auto t0 = Clock::now();
  const auto grid = evalharness::full_grid();
  int seg_wins = 0, fusion_wins = 0;
  std::string detail;
  for (auto seed : shared.seeds) {
    const auto& data = shared.dataset(seed);
    evalharness::RunSettings st;
    st.model = cli::desk_model();
    st.hyper = cli::desk_training();
    st.seed = seed;
    st.workers = shared.workers;

    // Marginal means: pipeline over its seven view conditions, and view
    // condition over both pipelines.
    std::map<Pipeline, std::array<double, 2>> by_pipeline;
    std::map<std::string, std::array<double, 2>> by_views;
    for (const auto& cell : grid) {
      const auto r = evalharness::run_cell(cell, data, st);
      for (int t = 0; t < 2; ++t) {
        const double m = evalharness::mean_mae(r, static_cast<evalharness::Target>(t));
        by_pipeline[cell.pipeline][static_cast<std::size_t>(t)] += m / 7.0;
        by_views[cell.view_condition()][static_cast<std::size_t>(t)] += m / 2.0;
      }
      std::cout << "  seed " << seed << ' ' << cell.name() << " H " << fmt(evalharness::mean_mae(r, evalharness::Target::H))
                << " V " << fmt(evalharness::mean_mae(r, evalharness::Target::V)) << " mm\n"
                << std::flush;
    }
    const auto& seg = by_pipeline[Pipeline::GdSamDv2];
    const auto& det = by_pipeline[Pipeline::GdDv2];
    const bool a = seg[0] < det[0] && seg[1] < det[1];
    bool b = true;
    for (int t = 0; t < 2; ++t) {
      const double best_single = std::min({by_views["V1"][t], by_views["V2"][t], by_views["V3"][t]});
      b = b && by_views["V1+V2+V3"][t] <= best_single;
    }
    seg_wins += a;
    fusion_wins += b;
    detail += "seed " + std::to_string(seed) + ": segment H/V " + fmt(seg[0]) + "/" + fmt(seg[1]) + " vs detect " +
              fmt(det[0]) + "/" + fmt(det[1]) + ", V1+V2+V3 " + fmt(by_views["V1+V2+V3"][0]) + "/" +
              fmt(by_views["V1+V2+V3"][1]) + " vs single V1 " + fmt(by_views["V1"][0]) + "/" + fmt(by_views["V1"][1]) +
              " V2 " + fmt(by_views["V2"][0]) + "/" + fmt(by_views["V2"][1]) + " V3 " + fmt(by_views["V3"][0]) + "/" +
              fmt(by_views["V3"][1]) + "; ";
  }
  const double elapsed = seconds_since(t0);
  const auto seeds = std::to_string(shared.seeds.size());
  return {shared.seeds.size() >= 3 && seg_wins >= 2 && fusion_wins >= 2 && elapsed < 1800.0,
          detail + "(a) held in " + std::to_string(seg_wins) + "/" + seeds + " seeds, (b) in " +
              std::to_string(fusion_wins) + "/" + seeds + ", " + fmt(elapsed, 4) + " s"};
}

// -- 5 ------------------------------------------------------------------------

Vec3 lerp(const Vec3& a, const Vec3& b, double w) {
  return {a.x + (b.x - a.x) * w, a.y + (b.y - a.y) * w, a.z + (b.z - a.z) * w};
}

Verdict label_oracle(Shared& shared) {
  const auto cfg = shared.scene(shared.seeds.front());
  const auto& data = shared.dataset(cfg.seed);
  const auto plan = simscene::trial_plan(cfg);
  double worst_m = 0.0;
  std::size_t frames = 0, presence_mismatch = 0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto sim = simscene::generate_trial(cfg, plan[i], simscene::trial_seed(cfg, plan[i].trial_id));
    const auto filtered = kinlab::lowpass_filter(sim.trajectory);
    const auto& ts = filtered.timestamps;
    const auto& rec = data[i];
    for (int k = 0; k < rec.meta.frame_count; ++k) {
      const double t = static_cast<double>(k) / rec.meta.fps;
      const bool inside = t <= ts.back() + 1e-12;
      const auto& label = rec.labels.frames[static_cast<std::size_t>(k)];
      if (inside != label.has_value()) {
        ++presence_mismatch;
        continue;
      }
      if (!inside) continue;
      // Brute-force bracket search and interpolation at the frame time.
      std::size_t lo = 0;
      for (std::size_t j = 0; j + 1 < ts.size(); ++j)
        if (ts[j] <= t) lo = j;
      const std::size_t hi = std::min(lo + 1, ts.size() - 1);
      const double w = hi == lo ? 0.0 : (t - ts[lo]) / (ts[hi] - ts[lo]);
      auto at = [&](std::string_view name) {
        const auto& p = filtered.joint(name);
        return lerp(p[lo], p[hi], w);
      };
      const auto lh = at(kinlab::kLeftHandTip), rh = at(kinlab::kRightHandTip);
      const auto la = at(kinlab::kLeftMalleolus), ra = at(kinlab::kRightMalleolus);
      const double hx = (lh.x + rh.x) / 2 - (la.x + ra.x) / 2, hy = (lh.y + rh.y) / 2 - (la.y + ra.y) / 2;
      const double h_m = std::sqrt(hx * hx + hy * hy), v_m = (lh.z + rh.z) / 2;
      worst_m = std::max({worst_m, std::abs(label->h_mm / 1000.0 - h_m), std::abs(label->v_mm / 1000.0 - v_m)});
      ++frames;
    }
  }
  return {presence_mismatch == 0 && frames > 0 && worst_m <= 1e-9,
          std::to_string(plan.size()) + " trials, " + std::to_string(frames) + " labeled frames, max deviation " +
              fmt(worst_m, 3) + " m, " + std::to_string(presence_mismatch) + " presence mismatches"};
}

// -- 6 ------------------------------------------------------------------------

kinlab::JointTrajectory signal_trajectory(std::size_t n, const std::function<double(double)>& x_of_t) {
  kinlab::JointTrajectory t;
  t.trial_id = "signal";
  t.sample_rate_hz = 100.0;
  for (std::size_t i = 0; i < n; ++i) t.timestamps.push_back(static_cast<double>(i) / 100.0);
  for (auto name : kinlab::kRequiredLandmarks)
    for (double ts : t.timestamps) t.joints[std::string(name)].push_back({x_of_t(ts), -0.3, 1.25});
  return t;
}

Verdict filter_response(Shared&) {
  const auto constant = kinlab::lowpass_filter(signal_trajectory(500, [](double) { return 0.8; }));
  double worst_rel = 0.0;
  for (const auto& [name, pos] : constant.joints)
    for (const auto& p : pos)
      worst_rel = std::max({worst_rel, std::abs(p.x - 0.8) / 0.8, std::abs(p.y + 0.3) / 0.3, std::abs(p.z - 1.25) / 1.25});

  const auto sine = kinlab::lowpass_filter(
      signal_trajectory(1000, [](double t) { return std::sin(2.0 * std::numbers::pi * 20.0 * t); }));
  // Half a second of edge transient is excluded at each end.
  const auto& x = sine.joint(kinlab::kLeftHandTip);
  double amplitude = 0.0;
  for (std::size_t i = 50; i + 50 < x.size(); ++i) amplitude = std::max(amplitude, std::abs(x[i].x));
  // Forward-backward squares the bilinear Butterworth magnitude.
  const double ratio = std::tan(std::numbers::pi * 20.0 / 100.0) / std::tan(std::numbers::pi * 6.0 / 100.0);
  const double analytic = 1.0 / (1.0 + std::pow(ratio, 8));
  return {worst_rel <= 1e-6 && amplitude < 1e-3,
          "constant max relative change " + fmt(worst_rel, 3) + ", 20 Hz amplitude " + fmt(amplitude, 3) +
              " (analytic steady-state gain " + fmt(analytic, 3) + ")"};
}

// -- 7 ------------------------------------------------------------------------

Verdict metric_oracle(Shared&) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(0.0, 250.0);
  double worst = 0.0;
  int order_violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t len = 1 + rng() % 64;
    std::vector<double> p(len), t(len);
    for (std::size_t i = 0; i < len; ++i) {
      t[i] = 400.0 + n(rng);
      p[i] = t[i] + n(rng);
    }
    long double abs_sum = 0, sq_sum = 0, peak = 0;
    for (std::size_t i = 0; i < len; ++i) {
      const long double e = static_cast<long double>(p[i]) - t[i];
      abs_sum += std::fabs(e);
      sq_sum += e * e;
      peak = std::max(peak, std::fabs(e));
    }
    const double mae = static_cast<double>(abs_sum / len);
    const double rmse = static_cast<double>(std::sqrt(sq_sum / len));
    const double maxae = static_cast<double>(peak);
    const auto m = evalharness::compute_metrics(p, t);
    worst = std::max({worst, std::abs(m.mae_mm - mae) / std::max(1.0, mae), std::abs(m.rmse_mm - rmse) / std::max(1.0, rmse),
                      std::abs(m.maxae_mm - maxae) / std::max(1.0, maxae)});
    order_violations += !(m.mae_mm <= m.rmse_mm && m.rmse_mm <= m.maxae_mm);
  }
  return {worst <= 1e-12 && order_violations == 0,
          "1000 vectors, max relative deviation " + fmt(worst, 3) + ", " + std::to_string(order_violations) +
              " ordering violations"};
}

// -- 8 ------------------------------------------------------------------------

Verdict rnle_properties(Shared&) {
  using namespace rnle;
  const bool unit = compute_rwl(MultiplierSet{}) == kLoadConstantKg && compute_rwl(compute_multipliers(RnleTask{})) == 23.0;

  auto rwl = [](const RnleTask& t) { return compute_rwl(compute_multipliers(t)); };
  int violations = 0;
  std::size_t checked = 0;
  auto sweep = [&](RnleTask base, double RnleTask::*field, std::vector<double> values) {
    double prev = std::numeric_limits<double>::infinity();
    for (double v : values) {
      base.*field = v;
      const double r = rwl(base);
      violations += r > prev;
      prev = r;
      ++checked;
    }
  };
  auto range = [](double from, double to, double step) {
    std::vector<double> out;
    for (double v = from; v <= to + 1e-9; v += step) out.push_back(v);
    return out;
  };
  for (auto duration : {DurationClass::UpTo1h, DurationClass::UpTo2h, DurationClass::UpTo8h})
    for (auto coupling : {Coupling::Good, Coupling::Fair, Coupling::Poor})
      for (double v0 : {20.0, 75.0, 140.0}) {
        const RnleTask base{35, v0, 40, 30, 3.0, duration, coupling, 8.0};
        sweep(base, &RnleTask::h_cm, range(0, 70, 0.25));
        sweep(base, &RnleTask::a_deg, range(0, 135, 0.5));
        sweep(base, &RnleTask::f_lpm, range(0, 16, 0.02));
        auto up = range(75, 190, 0.25), down = range(0, 75, 0.25);
        std::reverse(down.begin(), down.end());
        sweep(base, &RnleTask::v_cm, up);
        sweep(base, &RnleTask::v_cm, down);
      }

  // H 40, V 30, D 45, A 30, 1 lift/min for <= 1 h, fair coupling, 10 kg:
  // 23 * 0.625 * 0.865 * 0.92 * 0.904 * 0.94 * 0.95 = 9.23489 kg, LI 1.08285.
  const RnleTask worked{40, 30, 45, 30, 1.0, DurationClass::UpTo1h, Coupling::Fair, 10.0};
  const double r = rwl(worked);
  const double li = compute_li(worked.load_kg, r);
  const bool example = std::abs(r - 9.23489) < 5e-5 && std::abs(li - 1.08285) < 5e-5;
  return {unit && violations == 0 && example,
          std::string("unit task RWL ") + (unit ? "= 23" : "!= 23") + ", " + std::to_string(checked) +
              " sweep points with " + std::to_string(violations) + " increases, worked example RWL " + fmt(r, 6) +
              " kg LI " + fmt(li, 6)};
}

// -- 9 ------------------------------------------------------------------------

int run_cli(std::vector<std::string> args, std::ostream& log) {
  args.insert(args.begin(), "liftcli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, log);
}

std::map<std::string, std::string> artifacts(const fs::path& runs) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(runs)) {
    if (!e.is_regular_file()) continue;
    const auto name = e.path().filename().string();
    if (name == "history.csv" || e.path().parent_path().filename() == "report")
      out[fs::relative(e.path(), runs).string()] = read_file(e.path());
  }
  return out;
}

Verdict determinism(Shared& shared) {
  const auto root = shared.scratch / "determinism";
  fs::remove_all(root);
  std::map<std::string, std::string> first;
  std::size_t differing = 0, compared = 0;
  int failures = 0;
  for (int round = 0; round < 2; ++round) {
    const auto dir = root / ("run" + std::to_string(round));
    cli::RunConfig c = cli::default_run_config();
    c.data_root = dir / "data";
    c.output_dir = dir / "runs";
    c.seed = 9;
    c.scene.participant_count = 3;
    c.scene.trials_per_participant = 2;
    c.training.max_epochs = 3;
    c.cells = {"GD-Dv2_V1", "GD-SAM-Dv2_V1+V2+V3"};
    // The second round also uses more workers; results must not notice.
    c.workers = round == 0 ? 1 : 2;
    fs::create_directories(dir);
    write_file(dir / "run.json", cli::format_run_config(c));
    std::ostringstream log;
    for (const char* cmd : {"simulate", "train", "evaluate", "report"})
      failures += run_cli({"--config", (dir / "run.json").string(), "--deterministic", cmd}, log) != 0;
    const auto files = artifacts(c.output_dir);
    if (round == 0) {
      first = files;
      continue;
    }
    for (const auto& [name, bytes] : first) {
      ++compared;
      auto it = files.find(name);
      differing += it == files.end() || it->second != bytes;
    }
    differing += files.size() != first.size();
  }
  fs::remove_all(root);
  return {failures == 0 && compared >= 4 + 4 && differing == 0,
          std::to_string(compared) + " history and report files compared, " + std::to_string(differing) +
              " differ, " + std::to_string(failures) + " failed commands"};
}

// -- 10 -----------------------------------------------------------------------

Verdict format_round_trips(Shared& shared) {
  auto cfg = shared.scene(shared.seeds.front());
  cfg.participant_count = 2;
  cfg.trials_per_participant = 6;
  std::size_t detection_files = 0, stores = 0, differing = 0;
  for (const auto& spec : simscene::trial_plan(cfg)) {
    const auto sim = simscene::simulate_trial(cfg, spec, "roundtrip");
    for (std::size_t v = 0; v < 3; ++v) {
      roistore::DetectionHeader header;
      header.source = "simscene";
      header.trial_id = spec.trial_id;
      header.seed = cfg.seed;
      header.config_digest = "roundtrip";
      const auto once = roistore::format_detection_records(header, sim.detections[v]);
      const auto parsed = roistore::parse_detection_records(once);
      differing += roistore::format_detection_records(parsed.header, parsed.records) != once;
      ++detection_files;
      for (const auto& store : sim.features[v]) {
        const auto bytes = featpipe::serialize_feature_store(store);
        differing += featpipe::serialize_feature_store(featpipe::deserialize_feature_store(bytes)) != bytes;
        ++stores;
      }
    }
  }
  // The same through the filesystem.
  const auto root = shared.scratch / "roundtrip";
  fs::remove_all(root);
  simscene::write_dataset(root, cfg, "roundtrip");
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto bytes = read_file(e.path());
    const auto ext = e.path().extension();
    if (ext == ".jsonl") {
      const auto set = roistore::load_detection_records(e.path());
      differing += roistore::format_detection_records(set.header, set.records) != bytes;
      ++detection_files;
    } else if (ext == ".lft") {
      const auto copy = root / "copy.lft";
      featpipe::save_feature_store(copy, featpipe::load_feature_store(e.path()));
      differing += read_file(copy) != bytes;
      fs::remove(copy);
      ++stores;
    }
  }
  fs::remove_all(root);
  return {differing == 0 && detection_files > 0 && stores > 0,
          std::to_string(detection_files) + " detection files and " + std::to_string(stores) + " feature stores, " +
              std::to_string(differing) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::vector<int> only;
  Shared shared;
  shared.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string scratch = (fs::temp_directory_path() / "lift_acceptance").string();
  app.add_option("--only", only, "criteria to run (default: all)")->check(CLI::Range(1, 10));
  app.add_option("--seeds", shared.seeds, "master seeds for the ordering criterion")->capture_default_str();
  app.add_option("--workers", shared.workers, "fold threads")->capture_default_str();
  app.add_option("--scratch", scratch, "scratch directory")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  shared.scratch = scratch;
  fs::create_directories(shared.scratch);

  const std::vector<std::pair<std::string, std::function<Verdict(Shared&)>>> criteria{
      {"gradient fidelity", gradient_fidelity},
      {"masked-frame isolation", masked_isolation},
      {"overfit capability", overfit},
      {"synthetic orderings", orderings},
      {"label oracle", label_oracle},
      {"filter response", filter_response},
      {"metric oracle", metric_oracle},
      {"RNLE properties", rnle_properties},
      {"determinism", determinism},
      {"format round-trips", format_round_trips},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Verdict v;
    const auto t0 = Clock::now();
    try {
      v = criteria[i].second(shared);
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << ' ' << id << ' ' << criteria[i].first << ": " << v.detail << " ["
              << fmt(seconds_since(t0), 4) << " s]" << std::endl;
  }
  fs::remove_all(shared.scratch);
  return failed == 0 ? 0 : 1;
}
