#include <algorithm>
#include <cmath>
#include <optional>

#include "lift/common/error.hpp"
#include "lift/common/textio.hpp"
#include "lift/kinlab/kinlab.hpp"

namespace lift::kinlab {

const std::vector<Vec3>& JointTrajectory::joint(std::string_view name) const {
  auto it = joints.find(name);
  if (it == joints.end()) throw_data("MissingLandmark", "trajectory " + trial_id + " lacks " + std::string(name));
  return it->second;
}

void JointTrajectory::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
    throw_data("BadRate", "sample rate must be positive for " + trial_id);
  std::string missing;
  for (auto name : kRequiredLandmarks) {
    if (!joints.contains(name)) missing += (missing.empty() ? "" : ", ") + std::string(name);
  }
  if (!missing.empty()) throw_data("MissingLandmark", trial_id + ": " + missing);
  for (const auto& [name, positions] : joints) {
    if (positions.size() != timestamps.size())
      throw_data("LengthMismatch", trial_id + ": " + name + " has " + std::to_string(positions.size()) +
                                       " samples, expected " + std::to_string(timestamps.size()));
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (!(timestamps[i] > timestamps[i - 1]))
      throw_data("NonMonotonicTime", trial_id + ": timestamp " + std::to_string(i) + " does not increase");
  }
}

JointTrajectory parse_joint_trajectories(std::string_view text, std::string trial_id) {
  JointTrajectory traj;
  traj.trial_id = std::move(trial_id);

  auto lines = split(text, '\n');
  std::size_t li = 0;
  auto next_line = [&]() -> std::optional<std::string_view> {
    while (li < lines.size()) {
      auto line = trim(lines[li++]);
      if (!line.empty()) return line;
    }
    return std::nullopt;
  };

  auto first = next_line();
  if (!first || !first->starts_with("#")) throw_data("SchemaViolation", "missing '# rate_hz=' comment");
  {
    auto body = trim(first->substr(1));
    if (!body.starts_with("rate_hz=")) throw_data("SchemaViolation", "first comment must be rate_hz=<value>");
    traj.sample_rate_hz = parse_double(body.substr(8));
  }

  // Further comments (provenance and the like) are allowed before the header.
  auto header_line = next_line();
  while (header_line && header_line->starts_with("#")) header_line = next_line();
  if (!header_line) throw_data("SchemaViolation", "missing header row");
  auto header = split(*header_line, ',');
  if (header.empty() || trim(header[0]) != "t") throw_data("SchemaViolation", "header must start with 't'");
  if ((header.size() - 1) % 3 != 0) throw_data("SchemaViolation", "landmark columns must come in x,y,z triples");

  std::vector<std::vector<Vec3>*> columns;
  for (std::size_t c = 1; c < header.size(); c += 3) {
    auto col = trim(header[c]);
    if (!col.ends_with(".x")) throw_data("SchemaViolation", "expected '<name>.x', got '" + std::string(col) + "'");
    std::string name(col.substr(0, col.size() - 2));
    if (trim(header[c + 1]) != name + ".y" || trim(header[c + 2]) != name + ".z")
      throw_data("SchemaViolation", "columns for " + name + " must be .x,.y,.z in order");
    auto [it, inserted] = traj.joints.try_emplace(name);
    if (!inserted) throw_data("SchemaViolation", "duplicate landmark " + name);
    columns.push_back(&it->second);
  }

  while (auto line = next_line()) {
    if (line->starts_with("#")) continue;
    auto cells = split(*line, ',');
    if (cells.size() != header.size())
      throw_data("LengthMismatch", "row has " + std::to_string(cells.size()) + " cells, header has " +
                                       std::to_string(header.size()));
    traj.timestamps.push_back(parse_double(cells[0]));
    for (std::size_t j = 0; j < columns.size(); ++j) {
      columns[j]->push_back(
          {parse_double(cells[1 + 3 * j]), parse_double(cells[2 + 3 * j]), parse_double(cells[3 + 3 * j])});
    }
  }
  traj.validate();
  return traj;
}

JointTrajectory load_joint_trajectories(const std::filesystem::path& path) {
  return parse_joint_trajectories(read_file(path), path.stem().string());
}

std::string format_joint_trajectories(const JointTrajectory& traj) {
  std::string out = "# rate_hz=" + format_double(traj.sample_rate_hz) + "\nt";
  for (const auto& [name, _] : traj.joints) out += "," + name + ".x," + name + ".y," + name + ".z";
  out += '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out += format_double(traj.timestamps[i]);
    for (const auto& [_, positions] : traj.joints) {
      const Vec3& p = positions[i];
      out += ',' + format_double(p.x) + ',' + format_double(p.y) + ',' + format_double(p.z);
    }
    out += '\n';
  }
  return out;
}

JointTrajectory resample(const JointTrajectory& traj, double target_hz) {
  traj.validate();
  if (!(target_hz > 0.0)) throw_config("BadRate", "target rate must be positive");
  if (target_hz > traj.sample_rate_hz * (1.0 + 1e-12))
    throw_data("Upsample", "target " + format_double(target_hz) + " Hz exceeds source " +
                               format_double(traj.sample_rate_hz) + " Hz");

  JointTrajectory out;
  out.trial_id = traj.trial_id;
  out.sample_rate_hz = target_hz;
  if (traj.size() == 0) return out;
  const double t0 = traj.timestamps.front();
  const double ratio = traj.sample_rate_hz / target_hz;
  const double step = std::round(ratio);

  if (std::abs(ratio - step) < 1e-9) {
    const auto stride = static_cast<std::size_t>(step);
    for (std::size_t i = 0, k = 0; i < traj.size(); i += stride, ++k) {
      out.timestamps.push_back(t0 + static_cast<double>(k) / target_hz);
      for (const auto& [name, positions] : traj.joints) out.joints[name].push_back(positions[i]);
    }
    if (stride == 1) out.timestamps = traj.timestamps;
    return out;
  }

  const double t_end = traj.timestamps.back();
  if (traj.size() == 1) {
    out.timestamps = traj.timestamps;
    out.joints = traj.joints;
    return out;
  }
  for (std::size_t k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) / target_hz;
    if (t > t_end + 1e-12) break;
    // First sample strictly after t, clamped so [hi-1, hi] brackets t.
    auto hi_it = std::upper_bound(traj.timestamps.begin(), traj.timestamps.end(), t);
    std::size_t hi = static_cast<std::size_t>(hi_it - traj.timestamps.begin());
    hi = std::clamp<std::size_t>(hi, 1, traj.size() - 1);
    const std::size_t lo = hi - 1;
    const double ta = traj.timestamps[lo];
    const double tb = traj.timestamps[hi];
    const double w = std::clamp((t - ta) / (tb - ta), 0.0, 1.0);
    out.timestamps.push_back(t);
    for (const auto& [name, positions] : traj.joints) {
      const Vec3& a = positions[lo];
      const Vec3& b = positions[hi];
      out.joints[name].push_back({a.x + w * (b.x - a.x), a.y + w * (b.y - a.y), a.z + w * (b.z - a.z)});
    }
  }
  return out;
}

}  // namespace lift::kinlab
