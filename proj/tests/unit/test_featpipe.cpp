#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "lift/common/error.hpp"
#include "lift/featpipe/featpipe.hpp"

using namespace lift;
using namespace lift::featpipe;

namespace {

void expect_kind(const std::function<void()>& fn, const char* kind) {
  try {
    fn();
    FAIL("expected " << kind);
  } catch (const Error& e) {
    CHECK(e.kind() == kind);
  }
}

FeatureStore random_store(std::size_t entries, unsigned seed) {
  FeatureStore s;
  s.trial_id = "P01_T03";
  s.view = ViewId::V2;
  s.variant = "segment";
  s.seed = 77;
  s.config_digest = "feedfacecafebeef";
  std::mt19937 rng(seed);
  std::normal_distribution<float> n;
  for (std::size_t e = 0; e < entries; ++e) {
    s.entries.push_back({static_cast<int>(e / 3), e % 3 == 2 ? "wooden box" : "hand"});
    for (int d = 0; d < kRoiDim; ++d) s.data.push_back(n(rng));
  }
  return s;
}

FrameVector frame(int index, float fill, bool valid, double score = -1.0) {
  FrameVector f;
  f.frame_index = index;
  std::fill(f.values.begin(), f.values.end(), fill);
  f.valid = valid;
  f.handled_score = score;
  return f;
}

kinlab::LabelTrack labels(int n, int gap_at = -1) {
  kinlab::LabelTrack t;
  for (int k = 0; k < n; ++k) {
    if (k == gap_at) t.frames.emplace_back(std::nullopt);
    else t.frames.push_back(kinlab::FrameLabel{k, 300.0 + k, 500.0 + 2 * k});
  }
  return t;
}

}  // namespace

TEST_CASE("feature stores survive write, read, write byte-identically") {
  const auto store = random_store(10, 1);
  const auto bytes = serialize_feature_store(store);
  CHECK(bytes.substr(0, 4) == "LFT1");
  const auto back = deserialize_feature_store(bytes);
  CHECK(back.entries == store.entries);
  CHECK(back.data == store.data);
  CHECK(back.trial_id == store.trial_id);
  CHECK(back.view == store.view);
  CHECK(back.seed == 77);
  CHECK(serialize_feature_store(back) == bytes);

  const auto empty = random_store(0, 2);
  CHECK(serialize_feature_store(deserialize_feature_store(serialize_feature_store(empty))) ==
        serialize_feature_store(empty));
}

TEST_CASE("corrupt feature stores are rejected") {
  const auto bytes = serialize_feature_store(random_store(2, 3));
  CHECK_THROWS_AS(deserialize_feature_store(bytes.substr(0, bytes.size() - 1)), Error);
  CHECK_THROWS_AS(deserialize_feature_store("LFT2" + bytes.substr(4)), Error);
  CHECK_THROWS_AS(deserialize_feature_store(bytes + "x"), Error);
}

TEST_CASE("pooling is the element-wise mean") {
  std::vector<float> a(kRoiDim, 1.0f), b(kRoiDim, 4.0f);
  a[5] = -2.0f;
  const std::vector<std::span<const float>> rois{a, b};
  const auto p = pool_frame_features(rois);
  CHECK(p.valid);
  CHECK(p.values[0] == 2.5f);
  CHECK(p.values[5] == 1.0f);
  CHECK_FALSE(pool_frame_features({}).valid);
  std::vector<float> short_vec(10);
  const std::vector<std::span<const float>> bad{short_vec};
  expect_kind([&] { pool_frame_features(bad); }, "DimMismatch");
}

TEST_CASE("view fusion averages valid views and takes geometry from the best handled object") {
  auto v1 = frame(4, 1.0f, true, 0.5);
  auto v2 = frame(4, 3.0f, true, 0.9);
  auto v3 = frame(4, 100.0f, false, 0.99);
  v2.values[kRoiDim] = 0.25f;
  const std::vector<FrameVector> views{v1, v2, v3};
  const auto f = fuse_views(views);
  CHECK(f.valid);
  CHECK(f.values[0] == 2.0f);
  CHECK(f.values[kRoiDim] == 0.25f);
  CHECK(f.values[kRoiDim + 1] == 3.0f);
  CHECK(f.handled_score == 0.9);

  auto tie = v1;
  tie.handled_score = 0.9;
  tie.values[kRoiDim] = 0.75f;
  const std::vector<FrameVector> tied{tie, v2};
  CHECK(fuse_views(tied).values[kRoiDim] == 0.5f);

  const std::vector<FrameVector> none{v3};
  CHECK_FALSE(fuse_views(none).valid);
  const std::vector<FrameVector> mismatch{v1, frame(5, 0, true)};
  expect_kind([&] { fuse_views(mismatch); }, "FrameIndexMismatch");
}

TEST_CASE("geometric features") {
  const auto g = geometric_features({100, 200, 420, 380}, 1280, 720);
  CHECK(g[0] == doctest::Approx(0.25));
  CHECK(g[1] == doctest::Approx(0.25));
  CHECK(g[2] == 0.26);
  CHECK(g[3] == 0.41);
  CHECK(g[4] == 0.235);
  expect_kind([] { geometric_features({1, 1, 1, 5}, 1280, 720); }, "DegenerateBox");
}

TEST_CASE("sliding windows") {
  std::vector<FrameVector> frames;
  for (int k = 0; k < 230; ++k) frames.push_back(frame(k, static_cast<float>(k), k != 7));
  const auto b = make_windows(frames, labels(230, 9), {"T", "P"});
  // Starts 0, 50, 100, 150; the last reaches frame 229 and is padded.
  REQUIRE(b.count == 4);
  CHECK(b.info[3].start_frame == 150);
  CHECK(b.frame_index[3 * 100 + 79] == 229);
  CHECK(b.frame_index[3 * 100 + 80] == -1);
  CHECK(b.mask[3 * 100 + 80] == 0);
  CHECK(b.mask[7] == 0);   // invalid frame
  CHECK(b.mask[9] == 0);   // unlabeled frame
  CHECK(b.mask[8] == 1);
  CHECK(b.features[8 * kFrameDim] == 8.0f);
  CHECK(b.features[7 * kFrameDim] == 0.0f);
  CHECK(b.targets[2 * 8] == static_cast<float>(308.0 / 2000.0));
  // Frames 7 and 9 lie only in the first window.
  CHECK(b.unmasked() == 100 + 100 + 100 + 80 - 2);
}

TEST_CASE("evaluation windows center on the events") {
  std::vector<FrameVector> frames;
  for (int k = 0; k < 240; ++k) frames.push_back(frame(k, 1.0f, true));
  kinlab::LiftTrialMeta meta;
  meta.trial_id = "T";
  meta.participant_id = "P";
  meta.frame_count = 240;
  meta.lift_start_frame = 30;
  meta.lift_end_frame = 170;
  const auto b = extract_eval_sequences(frames, labels(240), meta);
  REQUIRE(b.count == 2);
  CHECK(b.info[0].kind == WindowKind::LiftStart);
  CHECK(b.info[0].start_frame == 0);
  CHECK(b.info[0].event_offset == 30);
  CHECK(b.info[1].start_frame == 120);
  CHECK(b.info[1].event_offset == 50);

  // A trial shorter than the window is padded past its end.
  frames.resize(90);
  meta.frame_count = 90;
  meta.lift_end_frame = 60;
  const auto s = extract_eval_sequences(frames, labels(90), meta);
  CHECK(s.info[1].start_frame == 0);
  CHECK(s.info[1].event_offset == 60);
  CHECK(s.mask[1 * 100 + 95] == 0);
  meta.lift_end_frame = 95;
  expect_kind([&] { extract_eval_sequences(frames, labels(90), meta); }, "EventOutOfRange");
}

TEST_CASE("batch subset and append") {
  std::vector<FrameVector> frames;
  for (int k = 0; k < 150; ++k) frames.push_back(frame(k, static_cast<float>(k), true));
  auto b = make_windows(frames, labels(150), {"T", "P"});
  const std::vector<std::size_t> pick{1};
  const auto s = b.subset(pick);
  CHECK(s.count == 1);
  CHECK(s.frame_index[0] == 50);
  b.append(s);
  CHECK(b.count == 3);
  CHECK(b.features.size() == 3u * 100 * kFrameDim);
  CHECK(b.info[2].start_frame == 50);
}

TEST_CASE("target normalization") {
  CHECK(normalize_target(500.0) == 0.25);
  CHECK(denormalize_target(normalize_target(1234.5)) == doctest::Approx(1234.5).epsilon(1e-15));
  CHECK_THROWS_AS(normalize_target(NAN), Error);
}
