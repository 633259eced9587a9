#include <bit>
#include <cstring>

#include <json.hpp>

#include "lift/common/error.hpp"
#include "lift/seqreg/seqreg.hpp"

namespace lift::seqreg {

namespace {

constexpr char kMagic[4] = {'L', 'C', 'K', '1'};
constexpr std::uint16_t kVersion = 1;

void put(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  bool done() const { return pos_ == bytes_.size(); }

private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw_data("BadCheckpoint", "truncated checkpoint");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

nlohmann::ordered_json config_json(const ModelConfig& c) {
  return {{"input_dim", c.input_dim}, {"model_dim", c.model_dim}, {"layers", c.layers},
          {"heads", c.heads},         {"ffn_dim", c.ffn_dim},     {"dropout", c.dropout},
          {"head_hidden", c.head_hidden}, {"outputs", c.outputs}, {"max_seq", c.max_seq}};
}

}  // namespace

template <class T>
std::string serialize_checkpoint(const ModelParams<T>& params, std::string_view provenance_json) {
  nlohmann::ordered_json header{{"config", config_json(params.config)},
                                {"scalar_bytes", sizeof(T)},
                                {"provenance", nlohmann::ordered_json::parse(provenance_json)}};
  const std::string text = header.dump();
  std::string out(kMagic, 4);
  put(out, kVersion, 2);
  put(out, text.size(), 4);
  out += text;
  put(out, params.layout.size(), 4);
  for (const auto& s : params.layout) {
    put(out, s.name.size(), 2);
    out += s.name;
    put(out, static_cast<std::uint64_t>(s.rows), 4);
    put(out, static_cast<std::uint64_t>(s.cols), 4);
    put(out, sizeof(T), 1);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if constexpr (sizeof(T) == 4) put(out, std::bit_cast<std::uint32_t>(params.values[s.offset + i]), 4);
      else put(out, std::bit_cast<std::uint64_t>(params.values[s.offset + i]), 8);
    }
  }
  return out;
}

template <class T>
ModelParams<T> deserialize_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(4) != std::string_view(kMagic, 4)) throw_data("BadCheckpoint", "bad checkpoint magic");
  if (r.get(2) != kVersion) throw_data("BadCheckpoint", "unsupported checkpoint version");
  ModelConfig config;
  try {
    const auto header = nlohmann::ordered_json::parse(r.take(r.get(4)));
    const auto& c = header.at("config");
    config.input_dim = c.at("input_dim").get<int>();
    config.model_dim = c.at("model_dim").get<int>();
    config.layers = c.at("layers").get<int>();
    config.heads = c.at("heads").get<int>();
    config.ffn_dim = c.at("ffn_dim").get<int>();
    config.dropout = c.at("dropout").get<double>();
    config.head_hidden = c.at("head_hidden").get<int>();
    config.outputs = c.at("outputs").get<int>();
    config.max_seq = c.at("max_seq").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw_data("BadCheckpoint", e.what());
  }
  ModelParams<T> params{config, parameter_layout(config), {}};
  params.values.assign(params.layout.back().offset + params.layout.back().size(), T(0));
  if (r.get(4) != params.layout.size()) throw_data("BadCheckpoint", "tensor count does not match the config");
  for (const auto& s : params.layout) {
    const auto name = r.take(r.get(2));
    const auto rows = r.get(4), cols = r.get(4), width = r.get(1);
    if (name != s.name || rows != static_cast<std::uint64_t>(s.rows) || cols != static_cast<std::uint64_t>(s.cols))
      throw_data("BadCheckpoint", "tensor " + std::string(name) + " does not match the layout");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (width == 4) params.values[s.offset + i] = static_cast<T>(std::bit_cast<float>(static_cast<std::uint32_t>(r.get(4))));
      else if (width == 8) params.values[s.offset + i] = static_cast<T>(std::bit_cast<double>(r.get(8)));
      else throw_data("BadCheckpoint", "unsupported scalar width");
    }
  }
  if (!r.done()) throw_data("BadCheckpoint", "trailing bytes after tensors");
  return params;
}

template std::string serialize_checkpoint<float>(const ModelParams<float>&, std::string_view);
template std::string serialize_checkpoint<double>(const ModelParams<double>&, std::string_view);
template ModelParams<float> deserialize_checkpoint<float>(std::string_view);
template ModelParams<double> deserialize_checkpoint<double>(std::string_view);

}  // namespace lift::seqreg
