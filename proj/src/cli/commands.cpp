#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "lift/cli/cli.hpp"
#include "lift/common/error.hpp"
#include "lift/common/textio.hpp"
#include "lift/evalharness/evalharness.hpp"
#include "lift/kinlab/kinlab.hpp"
#include "lift/rnle/rnle.hpp"
#include "lift/simscene/simscene.hpp"

namespace lift::cli {

namespace fs = std::filesystem;
using evalharness::ConditionCell;

namespace {

struct Context {
  RunConfig config;
  std::string digest;
  std::ostream& out;
  std::ostream& log;

  std::string provenance() const { return "seed=" + std::to_string(config.seed) + " config_digest=" + digest; }

  /// One JSON object per line on the log stream, always carrying the seed.
  void event(const std::string& name, nlohmann::ordered_json fields = nlohmann::ordered_json::object()) const {
    nlohmann::ordered_json j{{"event", name}, {"seed", config.seed}};
    j.update(fields);
    static std::mutex mu;
    std::lock_guard lock(mu);
    log << j.dump() << '\n';
  }

  int workers() const {
    if (config.deterministic) return 1;
    if (config.workers > 0) return config.workers;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }

  std::vector<ConditionCell> cells() const {
    if (config.cells.empty()) return evalharness::full_grid();
    std::vector<ConditionCell> out;
    for (const auto& name : config.cells) out.push_back(evalharness::parse_cell(name));
    return out;
  }

  fs::path fold_dir(const ConditionCell& cell, int fold_id) const {
    return config.output_dir / cell.name() / ("fold_" + std::to_string(fold_id));
  }

  evalharness::RunSettings settings() const {
    return {config.model, config.training, config.seed, workers(), config.inner_validation};
  }
};

void require_data_root(const Context& ctx) {
  if (!fs::exists(ctx.config.data_root / "manifest.json"))
    throw_data("MissingArtifact", "no dataset at " + ctx.config.data_root.string() + "; run `liftcli simulate` first");
}

std::vector<featpipe::TrialRecord> load_data(const Context& ctx) {
  require_data_root(ctx);
  auto data = simscene::load_dataset(ctx.config.data_root);
  ctx.event("dataset.loaded", {{"root", ctx.config.data_root.string()}, {"trials", data.size()}});
  return data;
}

std::vector<evalharness::Fold> folds_of(std::span<const featpipe::TrialRecord> data) {
  std::vector<std::string> participants;
  for (const auto& t : data) participants.push_back(t.meta.participant_id);
  return evalharness::make_loso_folds(participants);
}

/// Runs fn(0..n-1) on up to `workers` threads; the first failure is rethrown.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min<std::size_t>(static_cast<std::size_t>(workers), n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void cmd_simulate(const Context& ctx) {
  const auto manifest = simscene::write_dataset(ctx.config.data_root, ctx.config.scene, ctx.digest);
  ctx.event("simulate.done", {{"root", ctx.config.data_root.string()}, {"trials", manifest.trials.size()}});
  ctx.out << (ctx.config.data_root / "manifest.json").string() << '\n';
}

void cmd_label(const Context& ctx) {
  require_data_root(ctx);
  const auto manifest = kinlab::parse_manifest(read_file(ctx.config.data_root / "manifest.json"));
  for (const auto& meta : manifest.trials) {
    const auto traj = kinlab::load_joint_trajectories(simscene::trajectory_path(ctx.config.data_root, meta.trial_id));
    const auto labels = kinlab::label_frames(kinlab::resample(kinlab::lowpass_filter(traj), kVideoFps), meta);
    const auto path = ctx.config.output_dir / "labels" / (meta.trial_id + ".csv");
    write_file(path, "# " + ctx.provenance() + "\n" + kinlab::format_labels(labels));
    ctx.out << path.string() << '\n';
  }
  ctx.event("label.done", {{"trials", manifest.trials.size()}});
}

void cmd_ingest(const Context& ctx) {
  const auto data = load_data(ctx);
  std::string csv = "# " + ctx.provenance() + "\ntrial_id,pipeline,view,frames,valid,partial,labeled\n";
  for (const auto& t : data)
    for (const auto& [key, frames] : t.views) {
      const auto valid = std::count_if(frames.begin(), frames.end(), [](const auto& f) { return f.valid; });
      const auto partial = std::count_if(frames.begin(), frames.end(), [](const auto& f) { return f.partial; });
      csv += t.meta.trial_id + ',' + std::string(to_string(key.first)) + ',' + std::string(to_string(key.second)) + ',' +
             std::to_string(frames.size()) + ',' + std::to_string(valid) + ',' + std::to_string(partial) + ',' +
             std::to_string(t.labels.present_count()) + '\n';
    }
  const auto path = ctx.config.output_dir / "ingest.csv";
  write_file(path, csv);
  ctx.out << path.string() << '\n';
}

void cmd_train(const Context& ctx) {
  const auto data = load_data(ctx);
  const auto folds = folds_of(data);
  for (const auto& cell : ctx.cells()) {
    parallel_for(folds.size(), ctx.workers(), [&](std::size_t i) {
      const auto fold_data = evalharness::prepare_fold(data, cell, folds[i]);
      const auto trained = evalharness::train_fold(fold_data, ctx.settings());
      const nlohmann::ordered_json prov{{"seed", ctx.config.seed},          {"config_digest", ctx.digest},
                                        {"cell", cell.name()},              {"fold", folds[i].fold_id},
                                        {"held_out", folds[i].held_out},    {"best_epoch", trained.best_epoch}};
      const auto dir = ctx.fold_dir(cell, folds[i].fold_id);
      write_file(dir / "model.lck", seqreg::serialize_checkpoint(trained.best, prov.dump()));
      write_file(dir / "history.csv", seqreg::format_history(trained.history, ctx.provenance()));
      ctx.event("train.fold", {{"cell", cell.name()},
                               {"fold", folds[i].fold_id},
                               {"held_out", folds[i].held_out},
                               {"epochs", trained.history.size()},
                               {"best_epoch", trained.best_epoch},
                               {"best_val_loss", trained.best_val_loss}});
    });
    ctx.out << (ctx.config.output_dir / cell.name()).string() << '\n';
  }
}

void cmd_evaluate(const Context& ctx) {
  const auto data = load_data(ctx);
  const auto folds = folds_of(data);
  const auto cells = ctx.cells();
  // Check every checkpoint up front so a half-trained grid fails before any work.
  for (const auto& cell : cells)
    for (const auto& fold : folds)
      if (!fs::exists(ctx.fold_dir(cell, fold.fold_id) / "model.lck"))
        throw_data("MissingArtifact", "no checkpoint for " + cell.name() + " fold " + std::to_string(fold.fold_id) +
                                          " under " + ctx.config.output_dir.string() + "; run `liftcli train` first");
  for (const auto& cell : cells) {
    parallel_for(folds.size(), ctx.workers(), [&](std::size_t i) {
      const auto dir = ctx.fold_dir(cell, folds[i].fold_id);
      const auto model = seqreg::deserialize_checkpoint<float>(read_file(dir / "model.lck"));
      const auto result = evalharness::evaluate_fold(evalharness::prepare_fold(data, cell, folds[i]), model);
      write_file(dir / "samples.csv", "# " + ctx.provenance() + "\n" + evalharness::format_samples(result.samples));
      ctx.event("evaluate.fold", {{"cell", cell.name()}, {"fold", folds[i].fold_id}, {"samples", result.samples.size()}});
    });
    ctx.out << (ctx.config.output_dir / cell.name()).string() << '\n';
  }
}

void cmd_report(const Context& ctx) {
  std::vector<evalharness::CellResult> results;
  for (const auto& cell : ctx.cells()) {
    const auto cell_dir = ctx.config.output_dir / cell.name();
    if (!fs::exists(cell_dir)) continue;
    evalharness::CellResult cr{cell, {}};
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(cell_dir))
      if (entry.is_directory() && entry.path().filename().string().starts_with("fold_")) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end(), [](const fs::path& a, const fs::path& b) {
      return parse_int(a.filename().string().substr(5)) < parse_int(b.filename().string().substr(5));
    });
    for (const auto& dir : dirs) {
      if (!fs::exists(dir / "samples.csv"))
        throw_data("MissingArtifact", "no samples in " + dir.string() + "; run `liftcli evaluate` first");
      evalharness::FoldResult fr;
      fr.fold.fold_id = static_cast<int>(parse_int(dir.filename().string().substr(5)));
      fr.samples = evalharness::parse_samples(read_file(dir / "samples.csv"));
      if (!fr.samples.empty()) fr.fold.held_out = fr.samples.front().participant_id;
      fr.metrics = evalharness::sample_metrics(fr.samples);
      cr.folds.push_back(std::move(fr));
    }
    if (!cr.folds.empty()) results.push_back(std::move(cr));
  }
  if (results.empty())
    throw_data("MissingArtifact", "no evaluated cells under " + ctx.config.output_dir.string() +
                                      "; run `liftcli evaluate` first");
  const auto report = evalharness::aggregate_report(results);
  for (const auto& w : report.warnings) ctx.event("report.warning", {{"message", w}});
  const auto dir = ctx.config.output_dir / "report";
  const std::string head = "# " + ctx.provenance() + "\n";
  for (const auto& [name, body] : {std::pair{"summary.csv", &report.summary_csv}, std::pair{"folds.csv", &report.folds_csv},
                                   std::pair{"pairwise.csv", &report.pairwise_csv},
                                   std::pair{"participants.csv", &report.participants_csv}}) {
    write_file(dir / name, head + *body);
    ctx.out << (dir / name).string() << '\n';
  }
}

void cmd_gradcheck(const Context& ctx, double step, double tolerance) {
  seqreg::ModelConfig tiny;
  tiny.input_dim = 16;
  tiny.model_dim = 16;
  tiny.layers = 2;
  tiny.heads = 2;
  tiny.ffn_dim = 32;
  tiny.head_hidden = 16;
  tiny.max_seq = 8;
  const auto entries = seqreg::gradient_check(tiny, ctx.config.seed, step);
  double worst = 0.0;
  ctx.out << "tensor,max_abs_error,relative\n";
  for (const auto& e : entries) {
    ctx.out << e.tensor << ',' << format_double(e.max_abs_error) << ',' << format_double(e.relative) << '\n';
    worst = std::max(worst, e.relative);
  }
  ctx.event("gradcheck.done", {{"max_relative", worst}, {"tolerance", tolerance}});
  if (!(worst <= tolerance))
    throw_numeric("GradientMismatch", "max relative error " + format_double(worst) + " exceeds " + format_double(tolerance));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& log) {
  CLI::App app{"Estimate lifting-equation hand distances from multi-view video features."};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool deterministic = false;
  std::vector<std::string> cells;
  std::string out_dir;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "worker threads (0 = all cores)");
  app.add_flag("--deterministic", deterministic, "single-threaded numeric paths");
  app.add_option("--cell", cells, "condition cell, e.g. GD-SAM-Dv2_V1+V2+V3 (repeatable)");
  app.add_option("--out", out_dir, "output directory (dataset root for simulate)");

  auto* simulate = app.add_subcommand("simulate", "write a synthetic dataset");
  auto* label = app.add_subcommand("label", "filter, resample and label trajectories");
  auto* ingest = app.add_subcommand("ingest", "validate detections and features, summarize frames");
  auto* train = app.add_subcommand("train", "train every LOSO fold of the selected cells");
  auto* evaluate = app.add_subcommand("evaluate", "predict held-out start/end frames");
  auto* report = app.add_subcommand("report", "aggregate evaluated cells into CSV reports");
  auto* rnle_cmd = app.add_subcommand("rnle", "recommended weight limit and lifting index");
  rnle_cmd->set_help_flag("--help", "print this help message and exit");
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of the backward pass");

  rnle::RnleTask task;
  std::string duration = "1h", coupling = "good";
  rnle_cmd->add_option("--h", task.h_cm, "horizontal distance, cm")->capture_default_str();
  rnle_cmd->add_option("--v", task.v_cm, "vertical hand height, cm")->capture_default_str();
  rnle_cmd->add_option("--d", task.d_cm, "vertical travel distance, cm")->capture_default_str();
  rnle_cmd->add_option("--a", task.a_deg, "asymmetry angle, degrees")->capture_default_str();
  rnle_cmd->add_option("--f", task.f_lpm, "lifts per minute")->capture_default_str();
  rnle_cmd->add_option("--duration", duration, "1h, 2h or 8h")->capture_default_str();
  rnle_cmd->add_option("--coupling", coupling, "good, fair or poor")->capture_default_str();
  rnle_cmd->add_option("--load", task.load_kg, "object mass, kg")->capture_default_str();

  double gc_step = 1e-5, gc_tol = 1e-4;
  gradcheck->add_option("--step", gc_step)->capture_default_str();
  gradcheck->add_option("--tolerance", gc_tol)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, log);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config = config_path.empty() ? default_run_config() : load_run_config(config_path);
    if (seed) config.seed = *seed;
    if (workers) config.workers = *workers;
    if (deterministic) config.deterministic = true;
    if (!cells.empty()) config.cells = cells;
    if (!out_dir.empty()) {
      if (simulate->parsed()) config.data_root = out_dir;
      else config.output_dir = out_dir;
    }
    config.scene.seed = config.seed;
    config.validate();
    Context ctx{config, config_digest(config), out, log};
    ctx.event("start", {{"command", app.get_subcommands().front()->get_name()}, {"config_digest", ctx.digest}});

    if (simulate->parsed()) cmd_simulate(ctx);
    else if (label->parsed()) cmd_label(ctx);
    else if (ingest->parsed()) cmd_ingest(ctx);
    else if (train->parsed()) cmd_train(ctx);
    else if (evaluate->parsed()) cmd_evaluate(ctx);
    else if (report->parsed()) cmd_report(ctx);
    else if (gradcheck->parsed()) cmd_gradcheck(ctx, gc_step, gc_tol);
    else if (rnle_cmd->parsed()) {
      task.duration = rnle::parse_duration(duration);
      task.coupling = rnle::parse_coupling(coupling);
      const auto m = rnle::compute_multipliers(task);
      const double rwl = rnle::compute_rwl(m);
      const double li = rnle::compute_li(task.load_kg, rwl);
      out << "lc_kg,hm,vm,dm,am,fm,cm,rwl_kg,load_kg,li\n";
      out << format_double(m.lc_kg) << ',' << format_double(m.hm) << ',' << format_double(m.vm) << ','
          << format_double(m.dm) << ',' << format_double(m.am) << ',' << format_double(m.fm) << ','
          << format_double(m.cm) << ',' << format_double(rwl) << ',' << format_double(task.load_kg) << ','
          << format_double(li) << '\n';
    }
    ctx.event("done");
    return 0;
  } catch (const Error& e) {
    log << nlohmann::ordered_json{{"event", "error"}, {"kind", e.kind()}, {"message", e.what()}}.dump() << '\n';
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    log << nlohmann::ordered_json{{"event", "error"}, {"kind", "Internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
}

}  // namespace lift::cli
