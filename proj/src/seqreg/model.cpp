#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <type_traits>

#include <Eigen/Dense>
#include <unsupported/Eigen/SpecialFunctions>

#include "lift/common/error.hpp"
#include "lift/common/seed.hpp"
#include "lift/seqreg/seqreg.hpp"

namespace lift::seqreg {

void ModelConfig::validate() const {
  if (input_dim <= 0 || model_dim <= 0 || layers <= 0 || heads <= 0 || ffn_dim <= 0 || head_hidden <= 0 ||
      outputs <= 0 || max_seq <= 0)
    throw_config("BadConfig", "all model dimensions must be positive");
  if (model_dim % heads != 0)
    throw_config("BadConfig", "model_dim " + std::to_string(model_dim) + " not divisible by " + std::to_string(heads) +
                                  " heads");
  if (model_dim % 2 != 0) throw_config("BadConfig", "model_dim must be even for sinusoidal positions");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw_config("BadConfig", "dropout must lie in [0, 1)");
}

std::vector<TensorSpec> parameter_layout(const ModelConfig& c) {
  c.validate();
  std::vector<TensorSpec> out;
  std::size_t offset = 0;
  auto add = [&](std::string name, int rows, int cols) {
    out.push_back({std::move(name), rows, cols, offset});
    offset += out.back().size();
  };
  const int D = c.model_dim;
  add("embed.weight", c.input_dim, D);
  add("embed.bias", 1, D);
  for (int l = 0; l < c.layers; ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    for (const char* proj : {"q", "k", "v", "o"}) {
      add(p + "attn.w" + proj, D, D);
      add(p + "attn.b" + proj, 1, D);
    }
    add(p + "norm1.gamma", 1, D);
    add(p + "norm1.beta", 1, D);
    add(p + "ffn.w1", D, c.ffn_dim);
    add(p + "ffn.b1", 1, c.ffn_dim);
    add(p + "ffn.w2", c.ffn_dim, D);
    add(p + "ffn.b2", 1, D);
    add(p + "norm2.gamma", 1, D);
    add(p + "norm2.beta", 1, D);
  }
  add("head.w1", D, c.head_hidden);
  add("head.b1", 1, c.head_hidden);
  add("head.w2", c.head_hidden, c.outputs);
  add("head.b2", 1, c.outputs);
  return out;
}

template <class T>
const TensorSpec& ModelParams<T>::spec(std::string_view name) const {
  for (const auto& s : layout)
    if (s.name == name) return s;
  throw_config("UnknownTensor", "no tensor named " + std::string(name));
}

template <class T>
std::span<T> ModelParams<T>::tensor(std::string_view name) {
  const auto& s = spec(name);
  return {values.data() + s.offset, s.size()};
}

template <class T>
std::span<const T> ModelParams<T>::tensor(std::string_view name) const {
  const auto& s = spec(name);
  return {values.data() + s.offset, s.size()};
}

template <class T>
ModelParams<T> init_model(const ModelConfig& config, std::uint64_t seed) {
  ModelParams<T> p{config, parameter_layout(config), {}};
  const auto& last = p.layout.back();
  p.values.assign(last.offset + last.size(), T(0));
  Rng rng(seed);
  for (const auto& s : p.layout) {
    const bool is_gamma = s.name.ends_with(".gamma");
    if (is_gamma) {
      std::fill_n(p.values.begin() + static_cast<std::ptrdiff_t>(s.offset), s.size(), T(1));
    } else if (s.rows > 1) {
      const double a = std::sqrt(6.0 / (s.rows + s.cols));
      std::uniform_real_distribution<double> dist(-a, a);
      for (std::size_t i = 0; i < s.size(); ++i) p.values[s.offset + i] = static_cast<T>(dist(rng));
    }
  }
  return p;
}

std::vector<double> positional_encoding(int seq_len, int dim) {
  if (seq_len <= 0 || dim <= 0) throw_config("BadConfig", "positional encoding sizes must be positive");
  if (dim % 2 != 0) throw_config("OddDim", "positional encoding dimension must be even");
  std::vector<double> pe(static_cast<std::size_t>(seq_len) * dim);
  for (int pos = 0; pos < seq_len; ++pos) {
    for (int i = 0; i < dim / 2; ++i) {
      const double angle = pos / std::pow(10000.0, 2.0 * i / dim);
      pe[static_cast<std::size_t>(pos) * dim + 2 * i] = std::sin(angle);
      pe[static_cast<std::size_t>(pos) * dim + 2 * i + 1] = std::cos(angle);
    }
  }
  return pe;
}

namespace {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;
template <class T>
using CMap = Eigen::Map<const Mat<T>>;
template <class T>
using MMap = Eigen::Map<Mat<T>>;

constexpr double kNormEps = 1e-5;

template <class T>
Mat<T> gelu(const Mat<T>& u) {
  return (T(0.5) * u.array() * (T(1) + (u.array() * T(0.5 * std::numbers::sqrt2)).erf())).matrix();
}

template <class T>
Mat<T> gelu_grad(const Mat<T>& u) {
  const auto a = u.array();
  const auto cdf = T(0.5) * (T(1) + (a * T(0.5 * std::numbers::sqrt2)).erf());
  const auto pdf = (T(-0.5) * a.square()).exp() * T(0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
  return (cdf + a * pdf).matrix();
}

template <class T>
struct NormCache {
  Mat<T> xhat;
  std::vector<T> rstd;
};

template <class T>
struct LayerCache {
  Mat<T> in, q, k, v, ctx, attn;
  AlignedVec<T> probs;  // count*heads*L*L
  Mat<T> drop_attn;
  NormCache<T> norm1;
  Mat<T> h1, u, act, drop_hidden, drop_out;
  NormCache<T> norm2;
};

template <class T>
struct Cache {
  Mat<T> x_cast;  // only filled when T is not float
  const T* x = nullptr;
  Mat<T> drop_in;
  std::vector<LayerCache<T>> layers;
  Mat<T> top, zpre, z, drop_head, y;
};

/// Weights of one tensor as an Eigen map.
template <class T>
struct Tensors {
  const ModelParams<T>& p;
  CMap<T> m(const std::string& name) const {
    const auto& s = p.spec(name);
    return CMap<T>(p.values.data() + s.offset, s.rows, s.cols);
  }
  Eigen::Map<const RowVec<T>> v(const std::string& name) const {
    const auto& s = p.spec(name);
    return Eigen::Map<const RowVec<T>>(p.values.data() + s.offset, s.cols);
  }
};

template <class T>
struct GradTensors {
  const ModelParams<T>& p;
  AlignedVec<T>& g;
  MMap<T> m(const std::string& name) const {
    const auto& s = p.spec(name);
    return MMap<T>(g.data() + s.offset, s.rows, s.cols);
  }
  Eigen::Map<RowVec<T>> v(const std::string& name) const {
    const auto& s = p.spec(name);
    return Eigen::Map<RowVec<T>>(g.data() + s.offset, s.cols);
  }
};

/// Inverted-dropout mask. Each 64-bit draw yields four 16-bit uniforms, so
/// the drop probability is quantized to 1/65536.
template <class T>
Mat<T> dropout_mask(Rng& rng, Eigen::Index rows, Eigen::Index cols, double rate) {
  Mat<T> mask(rows, cols);
  const auto threshold = static_cast<std::uint64_t>(std::llround(rate * 65536.0));
  const T keep_scale = T(1.0 / (1.0 - rate));
  T* out = mask.data();
  const Eigen::Index n = mask.size();
  for (Eigen::Index i = 0; i < n; i += 4) {
    std::uint64_t bits = rng();
    for (Eigen::Index k = i; k < std::min(n, i + 4); ++k, bits >>= 16) out[k] = (bits & 0xffff) < threshold ? T(0) : keep_scale;
  }
  return mask;
}

template <class T>
Mat<T> layer_norm(const Mat<T>& x, const Eigen::Map<const RowVec<T>>& gamma, const Eigen::Map<const RowVec<T>>& beta,
                  NormCache<T>& cache) {
  const Eigen::Index n = x.rows(), d = x.cols();
  cache.xhat.resize(n, d);
  cache.rstd.resize(static_cast<std::size_t>(n));
  Mat<T> y(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    const T mean = x.row(r).mean();
    const T var = (x.row(r).array() - mean).square().mean();
    const T rstd = T(1) / std::sqrt(var + T(kNormEps));
    cache.rstd[static_cast<std::size_t>(r)] = rstd;
    cache.xhat.row(r) = (x.row(r).array() - mean) * rstd;
    y.row(r) = cache.xhat.row(r).cwiseProduct(gamma) + beta;
  }
  return y;
}

template <class T>
Mat<T> layer_norm_backward(const Mat<T>& dy, const NormCache<T>& cache, const Eigen::Map<const RowVec<T>>& gamma,
                           Eigen::Map<RowVec<T>> dgamma, Eigen::Map<RowVec<T>> dbeta) {
  const Eigen::Index n = dy.rows(), d = dy.cols();
  dgamma += dy.cwiseProduct(cache.xhat).colwise().sum();
  dbeta += dy.colwise().sum();
  Mat<T> dx(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    const RowVec<T> dxhat = dy.row(r).cwiseProduct(gamma);
    const T sum = dxhat.sum();
    const T dot = dxhat.dot(cache.xhat.row(r));
    dx.row(r) = (cache.rstd[static_cast<std::size_t>(r)] / T(d)) *
                (T(d) * dxhat.array() - sum - cache.xhat.row(r).array() * dot).matrix();
  }
  return dx;
}

template <class T>
class Network {
public:
  Network(const ModelParams<T>& params, const featpipe::SequenceBatch& batch)
      : p_(params), c_(params.config), w_{params}, batch_(batch) {
    if (batch.dim != c_.input_dim)
      throw_data("ShapeMismatch", "batch feature dim " + std::to_string(batch.dim) + " != model input_dim " +
                                      std::to_string(c_.input_dim));
    if (batch.length > c_.max_seq) throw_data("ShapeMismatch", "window longer than max_seq");
    if (batch.features.size() != batch.positions() * static_cast<std::size_t>(batch.dim) ||
        batch.mask.size() != batch.positions())
      throw_data("ShapeMismatch", "batch buffers inconsistent with count x length");
    const auto pe = positional_encoding(batch.length, c_.model_dim);
    pe_.resize(batch.length, c_.model_dim);
    for (Eigen::Index i = 0; i < pe_.size(); ++i) pe_.data()[i] = static_cast<T>(pe[static_cast<std::size_t>(i)]);
  }

  Mat<T> forward(Cache<T>& cache, bool train_mode, std::uint64_t seed) {
    const Eigen::Index N = static_cast<Eigen::Index>(batch_.positions());
    const Eigen::Index L = batch_.length;
    Rng rng(seed);
    const bool drop = train_mode && c_.dropout > 0.0;

    // Always copied, so the input sits in aligned storage.
    cache.x_cast = Eigen::Map<const Mat<float>>(batch_.features.data(), N, batch_.dim).template cast<T>();
    cache.x = cache.x_cast.data();
    Mat<T> h = CMap<T>(cache.x, N, batch_.dim) * w_.m("embed.weight");
    h.rowwise() += w_.v("embed.bias");
    for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(batch_.count); ++b) h.middleRows(b * L, L) += pe_;
    if (drop) {
      cache.drop_in = dropout_mask<T>(rng, N, c_.model_dim, c_.dropout);
      h = h.cwiseProduct(cache.drop_in);
    }

    cache.layers.resize(static_cast<std::size_t>(c_.layers));
    for (int l = 0; l < c_.layers; ++l) h = layer_forward(l, h, cache.layers[static_cast<std::size_t>(l)], rng, drop);

    cache.top = h;
    cache.zpre = h * w_.m("head.w1");
    cache.zpre.rowwise() += w_.v("head.b1");
    cache.z = gelu(cache.zpre);
    Mat<T> zd = cache.z;
    if (drop) {
      cache.drop_head = dropout_mask<T>(rng, N, c_.head_hidden, c_.dropout);
      zd = zd.cwiseProduct(cache.drop_head);
    }
    cache.y = zd * w_.m("head.w2");
    cache.y.rowwise() += w_.v("head.b2");
    if (!cache.y.allFinite()) throw_numeric("NonFiniteActivation", "forward pass produced non-finite outputs");
    return cache.y;
  }

  void backward(const Cache<T>& cache, const Mat<T>& dy, AlignedVec<T>& grads, bool train_mode) {
    const bool drop = train_mode && c_.dropout > 0.0;
    GradTensors<T> g{p_, grads};

    Mat<T> zd = cache.z;
    if (drop) zd = zd.cwiseProduct(cache.drop_head);
    g.m("head.w2").noalias() += zd.transpose() * dy;
    g.v("head.b2") += dy.colwise().sum();
    Mat<T> dz = dy * w_.m("head.w2").transpose();
    if (drop) dz = dz.cwiseProduct(cache.drop_head);
    dz = dz.cwiseProduct(gelu_grad(cache.zpre));
    g.m("head.w1").noalias() += cache.top.transpose() * dz;
    g.v("head.b1") += dz.colwise().sum();
    Mat<T> dh = dz * w_.m("head.w1").transpose();

    for (int l = c_.layers - 1; l >= 0; --l) dh = layer_backward(l, cache.layers[static_cast<std::size_t>(l)], dh, g, drop);

    if (drop) dh = dh.cwiseProduct(cache.drop_in);
    g.m("embed.weight").noalias() += CMap<T>(cache.x, dh.rows(), batch_.dim).transpose() * dh;
    g.v("embed.bias") += dh.colwise().sum();
  }

private:
  std::string name(int l, const char* suffix) const { return "layer" + std::to_string(l) + "." + suffix; }

  Mat<T> layer_forward(int l, const Mat<T>& in, LayerCache<T>& lc, Rng& rng, bool drop) {
    const Eigen::Index N = in.rows();
    lc.in = in;
    lc.q = in * w_.m(name(l, "attn.wq"));
    lc.q.rowwise() += w_.v(name(l, "attn.bq"));
    lc.k = in * w_.m(name(l, "attn.wk"));
    lc.k.rowwise() += w_.v(name(l, "attn.bk"));
    lc.v = in * w_.m(name(l, "attn.wv"));
    lc.v.rowwise() += w_.v(name(l, "attn.bv"));
    attention_forward(lc);
    lc.attn = lc.ctx * w_.m(name(l, "attn.wo"));
    lc.attn.rowwise() += w_.v(name(l, "attn.bo"));

    Mat<T> r1 = in;
    if (drop) {
      lc.drop_attn = dropout_mask<T>(rng, N, c_.model_dim, c_.dropout);
      r1 += lc.attn.cwiseProduct(lc.drop_attn);
    } else {
      r1 += lc.attn;
    }
    lc.h1 = layer_norm(r1, w_.v(name(l, "norm1.gamma")), w_.v(name(l, "norm1.beta")), lc.norm1);

    lc.u = lc.h1 * w_.m(name(l, "ffn.w1"));
    lc.u.rowwise() += w_.v(name(l, "ffn.b1"));
    lc.act = gelu(lc.u);
    Mat<T> hidden = lc.act;
    if (drop) {
      lc.drop_hidden = dropout_mask<T>(rng, N, c_.ffn_dim, c_.dropout);
      hidden = hidden.cwiseProduct(lc.drop_hidden);
    }
    Mat<T> out = hidden * w_.m(name(l, "ffn.w2"));
    out.rowwise() += w_.v(name(l, "ffn.b2"));
    if (drop) {
      lc.drop_out = dropout_mask<T>(rng, N, c_.model_dim, c_.dropout);
      out = out.cwiseProduct(lc.drop_out);
    }
    Mat<T> r2 = lc.h1 + out;
    return layer_norm(r2, w_.v(name(l, "norm2.gamma")), w_.v(name(l, "norm2.beta")), lc.norm2);
  }

  Mat<T> layer_backward(int l, const LayerCache<T>& lc, const Mat<T>& dout, GradTensors<T>& g, bool drop) {
    Mat<T> dr2 = layer_norm_backward(dout, lc.norm2, w_.v(name(l, "norm2.gamma")), g.v(name(l, "norm2.gamma")),
                                     g.v(name(l, "norm2.beta")));
    Mat<T> dffn = dr2;
    if (drop) dffn = dffn.cwiseProduct(lc.drop_out);
    Mat<T> hidden = lc.act;
    if (drop) hidden = hidden.cwiseProduct(lc.drop_hidden);
    g.m(name(l, "ffn.w2")).noalias() += hidden.transpose() * dffn;
    g.v(name(l, "ffn.b2")) += dffn.colwise().sum();
    Mat<T> dhidden = dffn * w_.m(name(l, "ffn.w2")).transpose();
    if (drop) dhidden = dhidden.cwiseProduct(lc.drop_hidden);
    Mat<T> du = dhidden.cwiseProduct(gelu_grad(lc.u));
    g.m(name(l, "ffn.w1")).noalias() += lc.h1.transpose() * du;
    g.v(name(l, "ffn.b1")) += du.colwise().sum();
    Mat<T> dh1 = dr2 + du * w_.m(name(l, "ffn.w1")).transpose();

    Mat<T> dr1 = layer_norm_backward(dh1, lc.norm1, w_.v(name(l, "norm1.gamma")), g.v(name(l, "norm1.gamma")),
                                     g.v(name(l, "norm1.beta")));
    Mat<T> dattn = dr1;
    if (drop) dattn = dattn.cwiseProduct(lc.drop_attn);
    g.m(name(l, "attn.wo")).noalias() += lc.ctx.transpose() * dattn;
    g.v(name(l, "attn.bo")) += dattn.colwise().sum();
    Mat<T> dctx = dattn * w_.m(name(l, "attn.wo")).transpose();

    Mat<T> dq, dk, dv;
    attention_backward(lc, dctx, dq, dk, dv);

    Mat<T> din = dr1;
    for (auto [proj, d] : {std::pair{"q", &dq}, std::pair{"k", &dk}, std::pair{"v", &dv}}) {
      const std::string w = std::string("attn.w") + proj;
      const std::string b = std::string("attn.b") + proj;
      g.m(name(l, w.c_str())).noalias() += lc.in.transpose() * (*d);
      g.v(name(l, b.c_str())) += d->colwise().sum();
      din.noalias() += (*d) * w_.m(name(l, w.c_str())).transpose();
    }
    return din;
  }

  void attention_forward(LayerCache<T>& lc) {
    const Eigen::Index L = batch_.length, dh = c_.head_dim(), H = c_.heads;
    const T scale = T(1) / std::sqrt(T(dh));
    const auto B = static_cast<Eigen::Index>(batch_.count);
    lc.ctx.setZero(B * L, c_.model_dim);
    lc.probs.assign(static_cast<std::size_t>(B * H * L * L), T(0));
    RowVec<T> bias(L), keep(L);
    for (Eigen::Index b = 0; b < B; ++b) {
      bool any = false;
      for (Eigen::Index j = 0; j < L; ++j) {
        const bool k = batch_.mask[static_cast<std::size_t>(b * L + j)] != 0;
        any = any || k;
        bias[j] = k ? T(0) : -std::numeric_limits<T>::infinity();
        keep[j] = k ? T(1) : T(0);
      }
      // A window without a single real frame attends to nothing.
      if (!any) continue;
      for (Eigen::Index h = 0; h < H; ++h) {
        MMap<T> P(lc.probs.data() + ((b * H + h) * L * L), L, L);
        P.noalias() = lc.q.block(b * L, h * dh, L, dh) * lc.k.block(b * L, h * dh, L, dh).transpose();
        P *= scale;
        P.rowwise() += bias;
        const Eigen::Matrix<T, Eigen::Dynamic, 1> peak = P.rowwise().maxCoeff();
        P.colwise() -= peak;
        P.array() = P.array().exp();
        // The vectorized exp flushes -inf to a tiny positive value, so padded
        // keys are zeroed explicitly to keep their weight exactly zero.
        P.array().rowwise() *= keep.array();
        P.array().colwise() /= P.rowwise().sum().array();
        lc.ctx.block(b * L, h * dh, L, dh).noalias() = P * lc.v.block(b * L, h * dh, L, dh);
      }
    }
  }

  void attention_backward(const LayerCache<T>& lc, const Mat<T>& dctx, Mat<T>& dq, Mat<T>& dk, Mat<T>& dv) {
    const Eigen::Index L = batch_.length, dh = c_.head_dim(), H = c_.heads;
    const T scale = T(1) / std::sqrt(T(dh));
    const auto B = static_cast<Eigen::Index>(batch_.count);
    dq.setZero(B * L, c_.model_dim);
    dk.setZero(B * L, c_.model_dim);
    dv.setZero(B * L, c_.model_dim);
    Mat<T> dP(L, L);
    Eigen::Matrix<T, Eigen::Dynamic, 1> dot(L);
    for (Eigen::Index b = 0; b < B; ++b) {
      for (Eigen::Index h = 0; h < H; ++h) {
        CMap<T> P(lc.probs.data() + ((b * H + h) * L * L), L, L);
        const auto dc = dctx.block(b * L, h * dh, L, dh);
        dP.noalias() = dc * lc.v.block(b * L, h * dh, L, dh).transpose();
        dv.block(b * L, h * dh, L, dh).noalias() = P.transpose() * dc;
        // Softmax Jacobian, already folded with the score scale.
        dot.noalias() = P.cwiseProduct(dP).rowwise().sum();
        dP.colwise() -= dot;
        dP.array() *= P.array() * scale;
        dq.block(b * L, h * dh, L, dh).noalias() = dP * lc.k.block(b * L, h * dh, L, dh);
        dk.block(b * L, h * dh, L, dh).noalias() = dP.transpose() * lc.q.block(b * L, h * dh, L, dh);
      }
    }
  }

  const ModelParams<T>& p_;
  const ModelConfig& c_;
  Tensors<T> w_;
  const featpipe::SequenceBatch& batch_;
  Mat<T> pe_;
};

template <class T>
Mat<T> loss_gradient(const Mat<T>& y, const featpipe::SequenceBatch& batch, double& loss) {
  const int outputs = static_cast<int>(y.cols());
  loss = masked_mse_loss<T>(std::span<const T>(y.data(), static_cast<std::size_t>(y.size())), batch.targets, batch.mask,
                            outputs);
  const std::size_t n = batch.unmasked() * static_cast<std::size_t>(outputs);
  Mat<T> dy = Mat<T>::Zero(y.rows(), y.cols());
  const T factor = T(2.0 / static_cast<double>(n));
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    if (!batch.mask[static_cast<std::size_t>(r)]) continue;
    for (int o = 0; o < outputs; ++o)
      dy(r, o) = factor * (y(r, o) - static_cast<T>(batch.targets[static_cast<std::size_t>(r) * outputs + o]));
  }
  return dy;
}

}  // namespace

template <class T>
std::vector<T> forward(const ModelParams<T>& params, const featpipe::SequenceBatch& batch, bool train_mode,
                       std::uint64_t seed) {
  Network<T> net(params, batch);
  Cache<T> cache;
  const Mat<T> y = net.forward(cache, train_mode, seed);
  return {y.data(), y.data() + y.size()};
}

template <class T>
double masked_mse_loss(std::span<const T> preds, std::span<const float> targets, std::span<const std::uint8_t> mask,
                       int outputs) {
  if (preds.size() != targets.size() || preds.size() != mask.size() * static_cast<std::size_t>(outputs))
    throw_data("ShapeMismatch", "predictions, targets and mask disagree in size");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < mask.size(); ++pos) {
    if (!mask[pos]) continue;
    for (int o = 0; o < outputs; ++o) {
      const std::size_t i = pos * static_cast<std::size_t>(outputs) + static_cast<std::size_t>(o);
      const double e = static_cast<double>(preds[i]) - static_cast<double>(targets[i]);
      sum += e * e;
      ++n;
    }
  }
  if (n == 0) throw_data("AllMasked", "loss needs at least one unmasked position");
  return sum / static_cast<double>(n);
}

template <class T>
LossGradient<T> gradients(const ModelParams<T>& params, const featpipe::SequenceBatch& batch, bool train_mode,
                          std::uint64_t seed) {
  Network<T> net(params, batch);
  Cache<T> cache;
  const Mat<T> y = net.forward(cache, train_mode, seed);
  LossGradient<T> out;
  const Mat<T> dy = loss_gradient(y, batch, out.loss);
  out.grads.assign(params.values.size(), T(0));
  net.backward(cache, dy, out.grads, train_mode);
  for (T g : out.grads)
    if (!std::isfinite(g)) throw_numeric("NonFiniteGradient", "gradient contains non-finite values");
  return out;
}

template struct ModelParams<float>;
template struct ModelParams<double>;
template ModelParams<float> init_model<float>(const ModelConfig&, std::uint64_t);
template ModelParams<double> init_model<double>(const ModelConfig&, std::uint64_t);
template std::vector<float> forward<float>(const ModelParams<float>&, const featpipe::SequenceBatch&, bool, std::uint64_t);
template std::vector<double> forward<double>(const ModelParams<double>&, const featpipe::SequenceBatch&, bool,
                                             std::uint64_t);
template double masked_mse_loss<float>(std::span<const float>, std::span<const float>, std::span<const std::uint8_t>, int);
template double masked_mse_loss<double>(std::span<const double>, std::span<const float>, std::span<const std::uint8_t>,
                                        int);
template LossGradient<float> gradients<float>(const ModelParams<float>&, const featpipe::SequenceBatch&, bool,
                                              std::uint64_t);
template LossGradient<double> gradients<double>(const ModelParams<double>&, const featpipe::SequenceBatch&, bool,
                                                std::uint64_t);

}  // namespace lift::seqreg
