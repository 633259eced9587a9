#include "lift/rnle/rnle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "lift/common/error.hpp"

namespace lift::rnle {

namespace {

struct FrequencyRow {
  double f_lpm;
  // {<=1h V<75, <=1h V>=75, <=2h V<75, <=2h V>=75, <=8h V<75, <=8h V>=75}
  std::array<double, 6> fm;
};

// Frequency multiplier table of the revised lifting equation.
constexpr std::array<FrequencyRow, 17> kFrequencyTable{{
    {0.2, {1.00, 1.00, 0.95, 0.95, 0.85, 0.85}},
    {0.5, {0.97, 0.97, 0.92, 0.92, 0.81, 0.81}},
    {1, {0.94, 0.94, 0.88, 0.88, 0.75, 0.75}},
    {2, {0.91, 0.91, 0.84, 0.84, 0.65, 0.65}},
    {3, {0.88, 0.88, 0.79, 0.79, 0.55, 0.55}},
    {4, {0.84, 0.84, 0.72, 0.72, 0.45, 0.45}},
    {5, {0.80, 0.80, 0.60, 0.60, 0.35, 0.35}},
    {6, {0.75, 0.75, 0.50, 0.50, 0.27, 0.27}},
    {7, {0.70, 0.70, 0.42, 0.42, 0.22, 0.22}},
    {8, {0.60, 0.60, 0.35, 0.35, 0.18, 0.18}},
    {9, {0.52, 0.52, 0.30, 0.30, 0.00, 0.15}},
    {10, {0.45, 0.45, 0.26, 0.26, 0.00, 0.13}},
    {11, {0.41, 0.41, 0.00, 0.23, 0.00, 0.00}},
    {12, {0.37, 0.37, 0.00, 0.21, 0.00, 0.00}},
    {13, {0.00, 0.34, 0.00, 0.00, 0.00, 0.00}},
    {14, {0.00, 0.31, 0.00, 0.00, 0.00, 0.00}},
    {15, {0.00, 0.28, 0.00, 0.00, 0.00, 0.00}},
}};

}  // namespace

DurationClass parse_duration(std::string_view text) {
  if (text == "1h" || text == "<=1h") return DurationClass::UpTo1h;
  if (text == "2h" || text == "<=2h") return DurationClass::UpTo2h;
  if (text == "8h" || text == "<=8h") return DurationClass::UpTo8h;
  throw_config("BadTask", "duration must be 1h, 2h or 8h");
}

Coupling parse_coupling(std::string_view text) {
  if (text == "good") return Coupling::Good;
  if (text == "fair") return Coupling::Fair;
  if (text == "poor") return Coupling::Poor;
  throw_config("BadTask", "coupling must be good, fair or poor");
}

double frequency_multiplier(double f_lpm, double v_cm, DurationClass duration) {
  const std::size_t column = 2 * static_cast<std::size_t>(duration) + (v_cm >= 75.0 ? 1 : 0);
  if (f_lpm <= kFrequencyTable.front().f_lpm) return kFrequencyTable.front().fm[column];
  if (f_lpm > 15.0) return 0.0;
  for (std::size_t i = 1; i < kFrequencyTable.size(); ++i) {
    const auto& hi = kFrequencyTable[i];
    if (f_lpm <= hi.f_lpm) {
      const auto& lo = kFrequencyTable[i - 1];
      const double w = (f_lpm - lo.f_lpm) / (hi.f_lpm - lo.f_lpm);
      return lo.fm[column] + w * (hi.fm[column] - lo.fm[column]);
    }
  }
  return 0.0;
}

double coupling_multiplier(Coupling coupling, double v_cm) {
  switch (coupling) {
    case Coupling::Good: return 1.00;
    case Coupling::Fair: return v_cm < 75.0 ? 0.95 : 1.00;
    case Coupling::Poor: return 0.90;
  }
  return 0.0;
}

MultiplierSet compute_multipliers(const RnleTask& task) {
  if (!(task.h_cm >= 0.0) || !(task.v_cm >= 0.0) || !(task.d_cm >= 0.0))
    throw_config("BadTask", "distances must be non-negative");
  if (!(task.a_deg >= 0.0 && task.a_deg <= 135.0)) throw_config("BadTask", "asymmetry angle must lie in [0, 135]");
  if (!(task.f_lpm >= 0.0)) throw_config("BadTask", "lift frequency must be non-negative");

  MultiplierSet m;
  m.hm = task.h_cm > 63.0 ? 0.0 : 25.0 / std::max(task.h_cm, 25.0);
  m.vm = task.v_cm > 175.0 ? 0.0 : 1.0 - 0.003 * std::abs(task.v_cm - 75.0);
  m.dm = task.d_cm > 175.0 ? 0.0 : std::min(1.0, 0.82 + 4.5 / std::max(task.d_cm, 25.0));
  m.am = task.a_deg > 135.0 ? 0.0 : 1.0 - 0.0032 * task.a_deg;
  m.fm = frequency_multiplier(task.f_lpm, task.v_cm, task.duration);
  m.cm = coupling_multiplier(task.coupling, task.v_cm);
  return m;
}

double compute_rwl(const MultiplierSet& m) { return m.lc_kg * m.hm * m.vm * m.dm * m.am * m.fm * m.cm; }

double compute_li(double load_kg, double rwl_kg) {
  if (!(load_kg > 0.0)) throw_config("NonPositiveLoad", "load must be positive");
  if (rwl_kg == 0.0) return std::numeric_limits<double>::infinity();
  return load_kg / rwl_kg;
}

}  // namespace lift::rnle
