#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "lift/common/error.hpp"
#include "lift/common/seed.hpp"
#include "lift/evalharness/evalharness.hpp"

namespace lift::evalharness {

std::vector<Fold> make_loso_folds(std::vector<std::string> participants) {
  std::sort(participants.begin(), participants.end());
  participants.erase(std::unique(participants.begin(), participants.end()), participants.end());
  if (participants.size() < 2)
    throw_data("TooFewParticipants", "leave-one-subject-out needs at least two participants, got " +
                                         std::to_string(participants.size()));
  std::vector<Fold> folds;
  for (std::size_t i = 0; i < participants.size(); ++i) {
    Fold f{static_cast<int>(i), participants[i], {}};
    for (std::size_t j = 0; j < participants.size(); ++j)
      if (j != i) f.training.push_back(participants[j]);
    folds.push_back(std::move(f));
  }
  return folds;
}

std::string ConditionCell::view_condition() const {
  std::string out;
  for (ViewId v : views) {
    if (!out.empty()) out += '+';
    out += to_string(v);
  }
  return out;
}

std::string ConditionCell::name() const { return std::string(to_string(pipeline)) + "_" + view_condition(); }

std::vector<ConditionCell> full_grid() {
  using enum ViewId;
  const std::vector<std::vector<ViewId>> conditions{{V1}, {V2}, {V3}, {V1, V2}, {V1, V3}, {V2, V3}, {V1, V2, V3}};
  std::vector<ConditionCell> grid;
  for (Pipeline p : {Pipeline::GdDv2, Pipeline::GdSamDv2})
    for (const auto& views : conditions) grid.push_back({p, views});
  return grid;
}

ConditionCell parse_cell(std::string_view text) {
  const auto sep = text.rfind('_');
  if (sep == std::string_view::npos) throw_config("BadCell", "cell must look like GD-SAM-Dv2_V1+V3");
  ConditionCell cell;
  try {
    cell.pipeline = parse_pipeline(text.substr(0, sep));
    std::string_view rest = text.substr(sep + 1);
    while (!rest.empty()) {
      const auto plus = rest.find('+');
      cell.views.push_back(parse_view(rest.substr(0, plus)));
      rest = plus == std::string_view::npos ? std::string_view{} : rest.substr(plus + 1);
    }
  } catch (const Error& e) {
    throw_config("BadCell", "cannot parse cell '" + std::string(text) + "': " + e.what());
  }
  std::sort(cell.views.begin(), cell.views.end());
  if (cell.views.empty() || std::adjacent_find(cell.views.begin(), cell.views.end()) != cell.views.end())
    throw_config("BadCell", "cell '" + std::string(text) + "' needs distinct views");
  return cell;
}

std::vector<featpipe::FrameVector> cell_frames(const featpipe::TrialRecord& trial, const ConditionCell& cell) {
  std::vector<const std::vector<featpipe::FrameVector>*> per_view;
  for (ViewId v : cell.views) {
    auto it = trial.views.find({cell.pipeline, v});
    if (it == trial.views.end())
      throw_data("MissingViewData", trial.meta.trial_id + " has no " + std::string(variant_name(cell.pipeline)) +
                                        " features for " + std::string(to_string(v)));
    per_view.push_back(&it->second);
  }
  if (per_view.size() == 1) return *per_view.front();
  const std::size_t n = per_view.front()->size();
  std::vector<featpipe::FrameVector> out;
  out.reserve(n);
  std::vector<featpipe::FrameVector> slice(per_view.size());
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t v = 0; v < per_view.size(); ++v) {
      if (per_view[v]->size() != n) throw_data("FrameIndexMismatch", trial.meta.trial_id + ": views differ in length");
      slice[v] = (*per_view[v])[f];
    }
    out.push_back(featpipe::fuse_views(slice));
  }
  return out;
}

FoldData prepare_fold(std::span<const featpipe::TrialRecord> dataset, const ConditionCell& cell, const Fold& fold) {
  FoldData data{fold, featpipe::SequenceBatch(featpipe::kWindowLength, featpipe::kFrameDim),
                featpipe::SequenceBatch(featpipe::kWindowLength, featpipe::kFrameDim), {}};
  const std::set<std::string, std::less<>> training(fold.training.begin(), fold.training.end());
  for (const auto& trial : dataset) {
    const auto& pid = trial.meta.participant_id;
    if (pid == fold.held_out) {
      const auto frames = cell_frames(trial, cell);
      const auto windows = featpipe::extract_eval_sequences(frames, trial.labels, trial.meta);
      for (const auto& info : windows.info) {
        const int event = info.start_frame + info.event_offset;
        const auto& label = trial.labels.frames.at(static_cast<std::size_t>(event));
        if (!label) throw_data("MissingLabel", trial.meta.trial_id + ": no ground truth at event frame " + std::to_string(event));
        data.eval_truth.push_back(label->h_mm);
        data.eval_truth.push_back(label->v_mm);
      }
      data.eval.append(windows);
    } else if (training.contains(pid)) {
      const auto frames = cell_frames(trial, cell);
      data.train.append(featpipe::make_windows(frames, trial.labels, {trial.meta.trial_id, pid}));
    }
  }
  for (const auto& info : data.train.info)
    if (info.participant_id == fold.held_out || !training.contains(info.participant_id))
      throw_data("Leakage", "fold " + std::to_string(fold.fold_id) + ": window of " + info.participant_id +
                                " reached the training set");
  for (const auto& info : data.eval.info)
    if (info.participant_id != fold.held_out) throw_data("Leakage", "evaluation window from a training participant");
  if (data.eval.count == 0) throw_data("Empty", "held-out participant " + fold.held_out + " has no trials");
  return data;
}

std::uint64_t fold_init_seed(std::uint64_t master, int fold_id) {
  return derive_seed(master, {tag("init"), static_cast<std::uint64_t>(fold_id)});
}

std::uint64_t fold_train_seed(std::uint64_t master, int fold_id) {
  return derive_seed(master, {tag("train"), static_cast<std::uint64_t>(fold_id)});
}

std::pair<featpipe::SequenceBatch, featpipe::SequenceBatch> inner_split(const featpipe::SequenceBatch& windows,
                                                                        double fraction, std::uint64_t seed) {
  if (windows.count < 2) throw_data("Empty", "an inner validation split needs at least two training windows");
  if (!(fraction > 0.0 && fraction < 1.0)) throw_config("BadConfig", "validation fraction must lie in (0, 1)");
  std::vector<std::size_t> order(windows.count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), Rng(seed));
  const auto n_val = std::min(windows.count - 1,
                              static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(windows.count))));
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(val.begin(), val.end());
  std::sort(train.begin(), train.end());
  return {windows.subset(train), windows.subset(val)};
}

seqreg::TrainResult<float> train_fold(const FoldData& data, const RunSettings& settings) {
  auto hyper = settings.hyper;
  const int id = data.fold.fold_id;
  hyper.seed = fold_train_seed(settings.seed, id);
  if (settings.inner_validation) {
    const auto [train, val] =
        inner_split(data.train, 0.10, derive_seed(settings.seed, {tag("inner-validation"), static_cast<std::uint64_t>(id)}));
    return seqreg::train<float>(train, val, settings.model, hyper, fold_init_seed(settings.seed, id));
  }
  return seqreg::train<float>(data.train, data.eval, settings.model, hyper, fold_init_seed(settings.seed, id));
}

FoldResult evaluate_fold(const FoldData& data, const seqreg::ModelParams<float>& model) {
  FoldResult result;
  result.fold = data.fold;
  const auto preds = seqreg::predict(model, data.eval);
  const auto L = static_cast<std::size_t>(data.eval.length);
  const auto outputs = static_cast<std::size_t>(model.config.outputs);
  for (std::size_t w = 0; w < data.eval.count; ++w) {
    const auto& info = data.eval.info[w];
    const std::size_t pos = w * L + static_cast<std::size_t>(info.event_offset);
    EvalSample s;
    s.trial_id = info.trial_id;
    s.participant_id = info.participant_id;
    s.phase = info.kind == featpipe::WindowKind::LiftStart ? Phase::Start : Phase::End;
    s.event_frame = info.start_frame + info.event_offset;
    s.pred_h_mm = featpipe::denormalize_target(preds[pos * outputs]);
    s.pred_v_mm = featpipe::denormalize_target(preds[pos * outputs + 1]);
    s.true_h_mm = data.eval_truth[2 * w];
    s.true_v_mm = data.eval_truth[2 * w + 1];
    result.samples.push_back(std::move(s));
  }
  result.metrics = sample_metrics(result.samples);
  return result;
}

std::vector<MetricSet> sample_metrics(std::span<const EvalSample> samples) {
  std::vector<double> p[2][2], t[2][2];
  for (const auto& s : samples) {
    const auto ph = static_cast<std::size_t>(s.phase);
    p[ph][0].push_back(s.pred_h_mm);
    t[ph][0].push_back(s.true_h_mm);
    p[ph][1].push_back(s.pred_v_mm);
    t[ph][1].push_back(s.true_v_mm);
  }
  std::vector<MetricSet> out;
  for (Phase ph : {Phase::Start, Phase::End})
    for (Target tg : {Target::H, Target::V}) {
      const auto i = static_cast<std::size_t>(ph), j = static_cast<std::size_t>(tg);
      out.push_back(compute_metrics(p[i][j], t[i][j], ph, tg));
    }
  return out;
}

CellResult run_cell(const ConditionCell& cell, std::span<const featpipe::TrialRecord> dataset, const RunSettings& settings,
                    const std::function<void(const FoldResult&)>& on_fold) {
  std::vector<std::string> participants;
  for (const auto& t : dataset) participants.push_back(t.meta.participant_id);
  const auto folds = make_loso_folds(participants);

  CellResult result{cell, std::vector<FoldResult>(folds.size())};
  auto run_one = [&](std::size_t i) {
    const auto data = prepare_fold(dataset, cell, folds[i]);
    const auto trained = train_fold(data, settings);
    auto fr = evaluate_fold(data, trained.best);
    fr.history = trained.history;
    fr.best_epoch = trained.best_epoch;
    result.folds[i] = std::move(fr);
  };

  const auto workers = static_cast<std::size_t>(std::max(1, settings.workers));
  if (workers == 1) {
    for (std::size_t i = 0; i < folds.size(); ++i) {
      run_one(i);
      if (on_fold) on_fold(result.folds[i]);
    }
    return result;
  }

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, folds.size()); ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < folds.size();) {
        try {
          run_one(i);
          std::lock_guard lock(mu);
          if (on_fold) on_fold(result.folds[i]);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return result;
}

}  // namespace lift::evalharness
