#pragma once

#include <string_view>

namespace lift::rnle {

/// Load constant of the metric equation, kg.
inline constexpr double kLoadConstantKg = 23.0;

enum class DurationClass { UpTo1h, UpTo2h, UpTo8h };
enum class Coupling { Good, Fair, Poor };

DurationClass parse_duration(std::string_view text);
Coupling parse_coupling(std::string_view text);

/// Task geometry in centimeters and degrees.
struct RnleTask {
  double h_cm = 25.0;
  double v_cm = 75.0;
  double d_cm = 25.0;
  double a_deg = 0.0;
  double f_lpm = 0.2;
  DurationClass duration = DurationClass::UpTo1h;
  Coupling coupling = Coupling::Good;
  double load_kg = 1.0;
};

struct MultiplierSet {
  double hm = 1.0, vm = 1.0, dm = 1.0, am = 1.0, fm = 1.0, cm = 1.0;
  double lc_kg = kLoadConstantKg;
};

/// Standard multiplier closed forms plus the frequency and coupling tables.
/// Out-of-range inputs yield a multiplier of 0; throws BadTask when the task
/// violates its own invariants (negative distances, A outside [0, 135]...).
MultiplierSet compute_multipliers(const RnleTask& task);

/// Frequency multiplier by linear interpolation between tabulated
/// frequencies; F below 0.2 uses the 0.2 row, F above 15 yields 0.
double frequency_multiplier(double f_lpm, double v_cm, DurationClass duration);
double coupling_multiplier(Coupling coupling, double v_cm);

double compute_rwl(const MultiplierSet& m);

/// load / RWL, or +infinity when RWL is 0. Throws NonPositiveLoad.
double compute_li(double load_kg, double rwl_kg);

}  // namespace lift::rnle
