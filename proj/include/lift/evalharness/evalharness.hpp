#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lift/featpipe/featpipe.hpp"
#include "lift/seqreg/seqreg.hpp"

namespace lift::evalharness {

// -- folds -------------------------------------------------------------------

struct Fold {
  int fold_id = 0;
  std::string held_out;
  std::vector<std::string> training;
};

/// One fold per distinct participant, in sorted participant order.
/// Throws TooFewParticipants below two participants.
std::vector<Fold> make_loso_folds(std::vector<std::string> participants);

// -- metrics -----------------------------------------------------------------

enum class Phase : std::uint8_t { Start, End };
enum class Target : std::uint8_t { H, V };

std::string_view to_string(Phase p) noexcept;
std::string_view to_string(Target t) noexcept;

struct MetricSet {
  Phase phase = Phase::Start;
  Target target = Target::H;
  double mae_mm = 0.0;
  double rmse_mm = 0.0;
  double maxae_mm = 0.0;
  std::size_t n = 0;
};

/// MAE, RMSE and MaxAE of denormalized predictions. Throws Empty and
/// LengthMismatch.
MetricSet compute_metrics(std::span<const double> preds_mm, std::span<const double> truths_mm, Phase phase = Phase::Start,
                          Target target = Target::H);

// -- condition grid ------------------------------------------------------------

struct ConditionCell {
  Pipeline pipeline = Pipeline::GdSamDv2;
  std::vector<ViewId> views;  ///< ascending, non-empty

  /// e.g. "GD-SAM-Dv2_V1+V3".
  std::string name() const;
  std::string view_condition() const;
  friend bool operator==(const ConditionCell&, const ConditionCell&) = default;
};

/// Both pipelines crossed with the seven view conditions (14 cells).
std::vector<ConditionCell> full_grid();

/// Accepts the name() form. Throws BadCell.
ConditionCell parse_cell(std::string_view text);

/// Per-frame vectors of a trial fused across the cell's views. Throws
/// MissingViewData when the trial lacks one of them.
std::vector<featpipe::FrameVector> cell_frames(const featpipe::TrialRecord& trial, const ConditionCell& cell);

// -- fold execution ----------------------------------------------------------

struct FoldData {
  Fold fold;
  featpipe::SequenceBatch train;
  /// Start/end windows of the held-out participant; also the validation set.
  featpipe::SequenceBatch eval;
  /// Ground truth at each eval window's event frame, mm (H, V interleaved).
  std::vector<double> eval_truth;
};

/// Training windows from the fold's training participants and evaluation
/// windows from the held-out one. Throws MissingViewData, and Leakage if a
/// held-out window would reach the training set.
FoldData prepare_fold(std::span<const featpipe::TrialRecord> dataset, const ConditionCell& cell, const Fold& fold);

struct EvalSample {
  std::string trial_id;
  std::string participant_id;
  Phase phase = Phase::Start;
  int event_frame = 0;
  double pred_h_mm = 0.0, pred_v_mm = 0.0;
  double true_h_mm = 0.0, true_v_mm = 0.0;
};

struct FoldResult {
  Fold fold;
  std::vector<MetricSet> metrics;  ///< (start, H), (start, V), (end, H), (end, V)
  std::vector<EvalSample> samples;
  std::vector<seqreg::EpochRecord> history;
  int best_epoch = 0;
};

struct RunSettings {
  seqreg::ModelConfig model;
  seqreg::TrainHyper hyper;
  std::uint64_t seed = 0;
  int workers = 1;
  /// Early-stop on a seeded 10% of the training windows instead of the
  /// held-out participant, so model selection never sees the test fold.
  bool inner_validation = false;
};

/// Seeds of one fold. They depend on (master seed, fold) only, so every
/// cell starts from the same initialization and minibatch order.
std::uint64_t fold_init_seed(std::uint64_t master, int fold_id);
std::uint64_t fold_train_seed(std::uint64_t master, int fold_id);

seqreg::TrainResult<float> train_fold(const FoldData& data, const RunSettings& settings);

/// Splits training windows into (train, validation) with ceil(fraction * n)
/// validation windows chosen by seed. Needs at least two windows.
std::pair<featpipe::SequenceBatch, featpipe::SequenceBatch> inner_split(const featpipe::SequenceBatch& windows,
                                                                        double fraction, std::uint64_t seed);

/// Predictions at each evaluation window's event frame, denormalized.
FoldResult evaluate_fold(const FoldData& data, const seqreg::ModelParams<float>& model);

/// (start, H), (start, V), (end, H), (end, V) over the samples. Throws Empty
/// when a phase has no sample.
std::vector<MetricSet> sample_metrics(std::span<const EvalSample> samples);

struct CellResult {
  ConditionCell cell;
  std::vector<FoldResult> folds;
};

/// Trains and evaluates every LOSO fold of one cell. Folds run on up to
/// settings.workers threads; results do not depend on the worker count.
CellResult run_cell(const ConditionCell& cell, std::span<const featpipe::TrialRecord> dataset, const RunSettings& settings,
                    const std::function<void(const FoldResult&)>& on_fold = {});

// -- reports -------------------------------------------------------------------

struct Report {
  std::string summary_csv;      ///< cell, phase, target, metric, mean, sd, n
  std::string folds_csv;        ///< per-fold long format
  std::string pairwise_csv;     ///< cell-pair mean differences
  std::string participants_csv; ///< per-participant mean absolute errors
  std::vector<std::string> warnings;
};

/// Aggregates fold metrics across cells. A grid short of the 14 cells adds
/// an IncompleteGrid warning and still reports what is present.
Report aggregate_report(std::span<const CellResult> cells);

/// Mean fold MAE of one cell for a target, over both phases.
double mean_mae(const CellResult& cell, Target target);

/// CSV of evaluation samples; lines starting with '#' are comments.
std::string format_samples(std::span<const EvalSample> samples);
/// Throws SchemaViolation.
std::vector<EvalSample> parse_samples(std::string_view text);

}  // namespace lift::evalharness
