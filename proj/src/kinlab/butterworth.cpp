#include "lift/kinlab/butterworth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lift/common/error.hpp"
#include "lift/kinlab/kinlab.hpp"

namespace lift::kinlab {

std::vector<Biquad> design_butterworth_lowpass(int order, double cutoff_hz, double sample_rate_hz) {
  if (order < 1) throw_config("BadFilterOrder", "order must be >= 1");
  if (!(sample_rate_hz > 2.0 * cutoff_hz) || !(cutoff_hz > 0.0))
    throw_data("NyquistViolation", "cutoff " + std::to_string(cutoff_hz) + " Hz not below Nyquist of " +
                                         std::to_string(sample_rate_hz) + " Hz");

  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
  const double k2 = k * k;
  std::vector<Biquad> sections;
  for (int i = 1; i <= order / 2; ++i) {
    // Conjugate pole pair of the analog prototype: s^2 + 2*zeta*s + 1.
    const double zeta = std::sin(std::numbers::pi * (2.0 * i - 1.0) / (2.0 * order));
    const double a0 = 1.0 + 2.0 * zeta * k + k2;
    sections.push_back({k2 / a0, 2.0 * k2 / a0, k2 / a0, 2.0 * (k2 - 1.0) / a0,
                        (1.0 - 2.0 * zeta * k + k2) / a0});
  }
  if (order % 2 == 1) {
    const double a0 = 1.0 + k;
    sections.push_back({k / a0, k / a0, 0.0, (k - 1.0) / a0, 0.0});
  }
  return sections;
}

namespace {

// Runs every section in cascade; each section starts in the steady state for
// a constant input equal to x[0] (unit DC gain makes that state input-scaled).
void cascade(std::span<const Biquad> sections, std::vector<double>& x) {
  for (const Biquad& s : sections) {
    const double x0 = x.front();
    double z2 = (s.b2 - s.a2) * x0;
    double z1 = (s.b1 - s.a1) * x0 + z2;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

}  // namespace

std::vector<double> filtfilt(std::span<const Biquad> sections, std::span<const double> x,
                             std::size_t pad) {
  const std::size_t n = x.size();
  if (n <= pad) throw_data("TooShort", std::to_string(n) + " samples cannot host padding of " + std::to_string(pad));

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  cascade(sections, ext);
  std::reverse(ext.begin(), ext.end());
  cascade(sections, ext);
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

JointTrajectory lowpass_filter(const JointTrajectory& traj, double cutoff_hz, int order) {
  traj.validate();
  const auto sections = design_butterworth_lowpass(order, cutoff_hz, traj.sample_rate_hz);
  const std::size_t pad = 3 * static_cast<std::size_t>(order + 1);
  if (traj.size() <= pad)
    throw_data("TooShort", "trajectory " + traj.trial_id + " has " + std::to_string(traj.size()) +
                               " samples; need more than " + std::to_string(pad));

  JointTrajectory out = traj;
  std::vector<double> channel(traj.size());
  for (auto& [name, positions] : out.joints) {
    for (double Vec3::*axis : {&Vec3::x, &Vec3::y, &Vec3::z}) {
      for (std::size_t i = 0; i < positions.size(); ++i) channel[i] = positions[i].*axis;
      const auto filtered = filtfilt(sections, channel, pad);
      for (std::size_t i = 0; i < positions.size(); ++i) positions[i].*axis = filtered[i];
    }
  }
  return out;
}

}  // namespace lift::kinlab
