#pragma once

#include <span>
#include <vector>

namespace lift::kinlab {

/// One second-order section, transposed direct form II, a0 normalized to 1.
struct Biquad {
  double b0, b1, b2, a1, a2;
};

/// Digital Butterworth low-pass of `order`, bilinear transform with
/// frequency prewarping so the -3 dB point lands exactly on `cutoff_hz`.
/// Odd orders end with a first-order section stored as a biquad (b2 = a2 = 0).
std::vector<Biquad> design_butterworth_lowpass(int order, double cutoff_hz, double sample_rate_hz);

/// Forward-backward filtering with odd-reflection padding of `pad` samples
/// and steady-state section initial conditions. Requires x.size() > pad.
std::vector<double> filtfilt(std::span<const Biquad> sections, std::span<const double> x,
                             std::size_t pad);

}  // namespace lift::kinlab
