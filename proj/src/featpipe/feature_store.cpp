#include <bit>
#include <cstring>

#include <json.hpp>

#include "lift/common/error.hpp"
#include "lift/common/textio.hpp"
#include "lift/featpipe/featpipe.hpp"

namespace lift::featpipe {

namespace {

constexpr char kMagic[4] = {'L', 'F', 'T', '1'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

}  // namespace

std::string serialize_feature_store(const FeatureStore& store) {
  if (store.data.size() != store.entries.size() * static_cast<std::size_t>(store.dim))
    throw_data("DimMismatch", "feature data does not match entries x dim");
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto& e : store.entries) entries.push_back(nlohmann::ordered_json::array({e.frame_index, e.roi_label}));
  nlohmann::ordered_json header{{"dim", store.dim},
                                {"trial_id", store.trial_id},
                                {"view_id", std::string(to_string(store.view))},
                                {"variant", store.variant},
                                {"seed", store.seed},
                                {"config_digest", store.config_digest},
                                {"entries", entries}};
  const std::string header_text = header.dump();

  std::string out(kMagic, 4);
  put_u16(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out += header_text;
  out.reserve(out.size() + 4 * store.data.size());
  for (float f : store.data) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

FeatureStore deserialize_feature_store(std::string_view bytes) {
  if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw_data("SchemaViolation", "not a feature store (bad magic)");
  const auto version = static_cast<std::uint16_t>(static_cast<unsigned char>(bytes[4]) |
                                                  (static_cast<unsigned char>(bytes[5]) << 8));
  if (version != kVersion) throw_data("SchemaViolation", "unsupported feature store version " + std::to_string(version));
  const std::uint32_t header_len = get_u32(bytes, 6);
  if (bytes.size() < 10 + static_cast<std::size_t>(header_len)) throw_data("SchemaViolation", "truncated header");

  FeatureStore store;
  try {
    auto header = nlohmann::ordered_json::parse(bytes.substr(10, header_len));
    store.dim = header.at("dim").get<int>();
    store.trial_id = header.value("trial_id", "");
    store.view = parse_view(header.value("view_id", "V1"));
    store.variant = header.value("variant", "detect");
    store.seed = header.value("seed", std::uint64_t{0});
    store.config_digest = header.value("config_digest", "");
    for (const auto& e : header.at("entries")) {
      if (!e.is_array() || e.size() != 2) throw_data("SchemaViolation", "entry must be [frame_index, roi_label]");
      store.entries.push_back({e[0].get<int>(), e[1].get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw_data("SchemaViolation", std::string("feature store header: ") + e.what());
  }
  if (store.dim <= 0) throw_data("SchemaViolation", "dim must be positive");

  const std::size_t payload = bytes.size() - 10 - header_len;
  const std::size_t expected = 4 * store.entries.size() * static_cast<std::size_t>(store.dim);
  if (payload != expected)
    throw_data("SchemaViolation", "payload holds " + std::to_string(payload) + " bytes, expected " + std::to_string(expected));
  store.data.resize(store.entries.size() * static_cast<std::size_t>(store.dim));
  for (std::size_t i = 0; i < store.data.size(); ++i) store.data[i] = std::bit_cast<float>(get_u32(bytes, 10 + header_len + 4 * i));
  return store;
}

FeatureStore load_feature_store(const std::filesystem::path& path) { return deserialize_feature_store(read_file(path)); }

void save_feature_store(const std::filesystem::path& path, const FeatureStore& store) {
  write_file(path, serialize_feature_store(store));
}

}  // namespace lift::featpipe
