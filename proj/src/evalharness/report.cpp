#include <cmath>
#include <map>

#include "lift/common/error.hpp"
#include "lift/common/textio.hpp"
#include "lift/evalharness/evalharness.hpp"

namespace lift::evalharness {

namespace {

constexpr std::array<std::string_view, 3> kMetricNames{"mae", "rmse", "maxae"};

double metric_value(const MetricSet& m, std::size_t which) {
  return which == 0 ? m.mae_mm : which == 1 ? m.rmse_mm : m.maxae_mm;
}

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

/// Mean and sample SD (n - 1); a single value has SD 0.
Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

std::vector<double> fold_values(const CellResult& cell, Phase phase, Target target, std::size_t metric) {
  std::vector<double> xs;
  for (const auto& f : cell.folds)
    for (const auto& m : f.metrics)
      if (m.phase == phase && m.target == target) xs.push_back(metric_value(m, metric));
  return xs;
}

}  // namespace

double mean_mae(const CellResult& cell, Target target) {
  std::vector<double> xs;
  for (Phase ph : {Phase::Start, Phase::End}) {
    auto part = fold_values(cell, ph, target, 0);
    xs.insert(xs.end(), part.begin(), part.end());
  }
  return summarize(xs).mean;
}

Report aggregate_report(std::span<const CellResult> cells) {
  Report r;
  const auto grid = full_grid();
  std::vector<std::string> missing;
  for (const auto& g : grid) {
    bool found = false;
    for (const auto& c : cells) found = found || c.cell == g;
    if (!found) missing.push_back(g.name());
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    r.warnings.push_back("IncompleteGrid: " + std::to_string(missing.size()) + " of 14 cells missing (" + list + ")");
  }

  r.summary_csv = "cell,pipeline,view_condition,phase,target,metric,mean,sd,n\n";
  r.folds_csv = "cell,fold,held_out,phase,target,metric,value,n\n";
  r.participants_csv = "cell,pipeline,view_condition,participant,phase,target,mean_abs_error_mm,n\n";
  r.pairwise_csv = "cell_a,cell_b,phase,target,metric,mean_a,mean_b,diff\n";

  std::vector<std::map<std::string, double>> means(cells.size());
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const auto& cell = cells[ci];
    const std::string prefix = cell.cell.name() + ',' + std::string(to_string(cell.cell.pipeline)) + ',' +
                               cell.cell.view_condition() + ',';
    for (Phase ph : {Phase::Start, Phase::End})
      for (Target tg : {Target::H, Target::V})
        for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
          const auto s = summarize(fold_values(cell, ph, tg, m));
          const std::string key = std::string(to_string(ph)) + ',' + std::string(to_string(tg)) + ',' +
                                  std::string(kMetricNames[m]);
          means[ci][key] = s.mean;
          r.summary_csv += prefix + key + ',' + format_double(s.mean) + ',' + format_double(s.sd) + ',' +
                           std::to_string(s.n) + '\n';
        }

    for (const auto& f : cell.folds) {
      for (const auto& ms : f.metrics)
        for (std::size_t m = 0; m < kMetricNames.size(); ++m)
          r.folds_csv += cell.cell.name() + ',' + std::to_string(f.fold.fold_id) + ',' + f.fold.held_out + ',' +
                         std::string(to_string(ms.phase)) + ',' + std::string(to_string(ms.target)) + ',' +
                         std::string(kMetricNames[m]) + ',' + format_double(metric_value(ms, m)) + ',' +
                         std::to_string(ms.n) + '\n';

      // participant -> phase/target -> (sum of |error|, count)
      std::map<std::string, std::array<std::pair<double, std::size_t>, 4>> per;
      for (const auto& s : f.samples) {
        auto& slot = per[s.participant_id];
        const auto base = static_cast<std::size_t>(s.phase) * 2;
        slot[base].first += std::abs(s.pred_h_mm - s.true_h_mm);
        ++slot[base].second;
        slot[base + 1].first += std::abs(s.pred_v_mm - s.true_v_mm);
        ++slot[base + 1].second;
      }
      for (const auto& [pid, slots] : per)
        for (std::size_t k = 0; k < 4; ++k) {
          if (slots[k].second == 0) continue;
          r.participants_csv += prefix + pid + ',' + std::string(to_string(static_cast<Phase>(k / 2))) + ',' +
                                std::string(to_string(static_cast<Target>(k % 2))) + ',' +
                                format_double(slots[k].first / static_cast<double>(slots[k].second)) + ',' +
                                std::to_string(slots[k].second) + '\n';
        }
    }
  }

  for (std::size_t a = 0; a < cells.size(); ++a)
    for (std::size_t b = a + 1; b < cells.size(); ++b)
      for (const auto& [key, ma] : means[a]) {
        const double mb = means[b].at(key);
        r.pairwise_csv += cells[a].cell.name() + ',' + cells[b].cell.name() + ',' + key + ',' + format_double(ma) + ',' +
                          format_double(mb) + ',' + format_double(ma - mb) + '\n';
      }
  return r;
}

std::string format_samples(std::span<const EvalSample> samples) {
  std::string out = "trial_id,participant_id,phase,event_frame,pred_h_mm,true_h_mm,pred_v_mm,true_v_mm\n";
  for (const auto& s : samples)
    out += s.trial_id + ',' + s.participant_id + ',' + std::string(to_string(s.phase)) + ',' +
           std::to_string(s.event_frame) + ',' + format_double(s.pred_h_mm) + ',' + format_double(s.true_h_mm) + ',' +
           format_double(s.pred_v_mm) + ',' + format_double(s.true_v_mm) + '\n';
  return out;
}

std::vector<EvalSample> parse_samples(std::string_view text) {
  std::vector<EvalSample> out;
  bool header = true;
  for (auto raw : split(text, '\n')) {
    const auto line = trim(raw);
    if (line.empty() || line.starts_with('#')) continue;
    if (header) {
      if (line != "trial_id,participant_id,phase,event_frame,pred_h_mm,true_h_mm,pred_v_mm,true_v_mm")
        throw_data("SchemaViolation", "unexpected samples header");
      header = false;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 8) throw_data("SchemaViolation", "sample row needs 8 cells");
    EvalSample s;
    s.trial_id = std::string(cells[0]);
    s.participant_id = std::string(cells[1]);
    if (cells[2] == "start") s.phase = Phase::Start;
    else if (cells[2] == "end") s.phase = Phase::End;
    else throw_data("SchemaViolation", "unknown phase '" + std::string(cells[2]) + "'");
    s.event_frame = static_cast<int>(parse_int(cells[3]));
    s.pred_h_mm = parse_double(cells[4]);
    s.true_h_mm = parse_double(cells[5]);
    s.pred_v_mm = parse_double(cells[6]);
    s.true_v_mm = parse_double(cells[7]);
    out.push_back(std::move(s));
  }
  if (header) throw_data("SchemaViolation", "samples file has no header");
  return out;
}

}  // namespace lift::evalharness
