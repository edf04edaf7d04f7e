// Copyright 2026 The gqe-pdpo Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "seq_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "errors.hpp"

namespace gqe::model {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVec = Eigen::RowVectorXd;
using ConstMatMap = Eigen::Map<const RowMat>;
using MatMap = Eigen::Map<RowMat>;
using ConstVecMap = Eigen::Map<const RowVec>;
using VecMap = Eigen::Map<RowVec>;

constexpr double kLayerNormEps = 1e-5;
constexpr double kInitStd = 0.02;
constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();

struct LayerOffsets {
    std::size_t ln1_g, ln1_b, w_qkv, b_qkv, w_out, b_out;
    std::size_t ln2_g, ln2_b, w_fc, b_fc, w_proj, b_proj;
};

struct Layout {
    std::size_t wte, wpe, lnf_g, lnf_b, head_w, head_b;
    std::vector<LayerOffsets> layers;
};

std::string layer_name(int l, const char *suffix) { return "h" + std::to_string(l) + "." + suffix; }

Layout make_layout(const ModelParams &p) {
    const bool bias = p.config().use_bias;
    auto at = [&](const std::string &name) { return p.info(name).offset; };
    auto opt = [&](const std::string &name) { return bias ? p.info(name).offset : kAbsent; };
    Layout out{at("wte"), at("wpe"), at("lnf.g"), opt("lnf.b"), at("head.w"), opt("head.b"), {}};
    for (int l = 0; l < p.config().n_layers; ++l) {
        out.layers.push_back({at(layer_name(l, "ln1.g")), opt(layer_name(l, "ln1.b")),
                              at(layer_name(l, "attn.w_qkv")), opt(layer_name(l, "attn.b_qkv")),
                              at(layer_name(l, "attn.w_out")), opt(layer_name(l, "attn.b_out")),
                              at(layer_name(l, "ln2.g")), opt(layer_name(l, "ln2.b")),
                              at(layer_name(l, "mlp.w_fc")), opt(layer_name(l, "mlp.b_fc")),
                              at(layer_name(l, "mlp.w_proj")), opt(layer_name(l, "mlp.b_proj"))});
    }
    return out;
}

// Read-only and writable views of one tensor inside a flat buffer.
struct View {
    const double *base;
    ConstMatMap mat(std::size_t off, int rows, int cols) const { return {base + off, rows, cols}; }
    ConstVecMap vec(std::size_t off, int n) const { return {base + off, n}; }
};
struct GradView {
    double *base;
    MatMap mat(std::size_t off, int rows, int cols) const { return {base + off, rows, cols}; }
    VecMap vec(std::size_t off, int n) const { return {base + off, n}; }
};

struct LnCache {
    RowMat xhat;
    Eigen::VectorXd rstd;
};

RowMat layer_norm(const RowMat &x, const ConstVecMap &gain, const double *offset, LnCache &cache) {
    const auto cols = x.cols();
    cache.xhat.resize(x.rows(), cols);
    cache.rstd.resize(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double mean = x.row(r).mean();
        const RowVec centered = x.row(r).array() - mean;
        const double var = centered.squaredNorm() / static_cast<double>(cols);
        const double rstd = 1.0 / std::sqrt(var + kLayerNormEps);
        cache.rstd(r) = rstd;
        cache.xhat.row(r) = centered * rstd;
    }
    RowMat y = cache.xhat.array().rowwise() * gain.array();
    if (offset)
        y.rowwise() += ConstVecMap(offset, cols);
    return y;
}

// Returns dx; accumulates into the gain/offset gradients.
RowMat layer_norm_backward(const RowMat &dy, const LnCache &cache, const ConstVecMap &gain,
                           VecMap dgain, double *doffset) {
    const auto cols = dy.cols();
    dgain += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
    if (doffset)
        VecMap(doffset, cols) += dy.colwise().sum();
    RowMat dxhat = dy.array().rowwise() * gain.array();
    RowMat dx(dy.rows(), cols);
    for (Eigen::Index r = 0; r < dy.rows(); ++r) {
        const double mean_d = dxhat.row(r).mean();
        const double mean_dx = dxhat.row(r).dot(cache.xhat.row(r)) / static_cast<double>(cols);
        dx.row(r) = cache.rstd(r) *
                    (dxhat.row(r).array() - mean_d - cache.xhat.row(r).array() * mean_dx).matrix();
    }
    return dx;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }
double gelu_grad(double x) {
    const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
    const double pdf = std::exp(-0.5 * x * x) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
    return cdf + x * pdf;
}

RowMat dropout_mask(Rng *rng, double rate, Eigen::Index rows, Eigen::Index cols) {
    if (!rng || rate <= 0.0)
        return {};
    RowMat mask(rows, cols);
    const double keep = 1.0 / (1.0 - rate);
    for (Eigen::Index i = 0; i < mask.size(); ++i)
        mask.data()[i] = uniform01(*rng) < rate ? 0.0 : keep;
    return mask;
}

void apply_mask(RowMat &x, const RowMat &mask) {
    if (mask.size())
        x.array() *= mask.array();
}

struct BlockCache {
    RowMat x_in;
    LnCache ln1;
    RowMat a;
    RowMat qkv;
    std::vector<RowMat> probs;
    RowMat y;
    RowMat mask_attn;
    LnCache ln2;
    RowMat m;
    RowMat h;
    RowMat g;
    RowMat mask_mlp;
};

struct ForwardCache {
    std::vector<int> inputs;
    RowMat mask_emb;
    std::vector<BlockCache> blocks;
    LnCache lnf;
    RowMat f;
    RowMat logits;
};

const double *maybe(const double *base, std::size_t off) { return off == kAbsent ? nullptr : base + off; }
double *maybe(double *base, std::size_t off) { return off == kAbsent ? nullptr : base + off; }

// Runs the decoder over `positions` inputs: BOS followed by tokens[0..positions-2].
ForwardCache forward(const ModelParams &params, std::span<const Token> tokens, int positions,
                     Rng *dropout_rng) {
    const auto &cfg = params.config();
    const Layout lay = make_layout(params);
    const View w{params.values().data()};
    const int T = positions, C = cfg.embed_dim, F = cfg.ff_dim, H = cfg.n_heads, V = cfg.vocab_size;
    const int hd = C / H;
    const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

    ForwardCache cache;
    cache.inputs.resize(T);
    cache.inputs[0] = V; // BOS row
    for (int t = 1; t < T; ++t)
        cache.inputs[t] = tokens[t - 1];

    const auto wte = w.mat(lay.wte, V + 1, C);
    const auto wpe = w.mat(lay.wpe, cfg.max_len, C);
    RowMat x(T, C);
    for (int t = 0; t < T; ++t)
        x.row(t) = wte.row(cache.inputs[t]) + wpe.row(t);
    cache.mask_emb = dropout_mask(dropout_rng, cfg.dropout, T, C);
    apply_mask(x, cache.mask_emb);

    cache.blocks.resize(cfg.n_layers);
    for (int l = 0; l < cfg.n_layers; ++l) {
        const auto &o = lay.layers[l];
        auto &b = cache.blocks[l];
        b.x_in = x;
        b.a = layer_norm(x, w.vec(o.ln1_g, C), maybe(w.base, o.ln1_b), b.ln1);
        b.qkv = b.a * w.mat(o.w_qkv, C, 3 * C);
        if (o.b_qkv != kAbsent)
            b.qkv.rowwise() += w.vec(o.b_qkv, 3 * C);
        b.y.resize(T, C);
        b.probs.resize(H);
        for (int h = 0; h < H; ++h) {
            const auto q = b.qkv.middleCols(h * hd, hd);
            const auto k = b.qkv.middleCols(C + h * hd, hd);
            const auto v = b.qkv.middleCols(2 * C + h * hd, hd);
            RowMat s = (q * k.transpose()) * scale;
            for (int i = 0; i < T; ++i) {
                const double mx = s.row(i).head(i + 1).maxCoeff();
                double z = 0.0;
                for (int j = 0; j <= i; ++j) {
                    s(i, j) = std::exp(s(i, j) - mx);
                    z += s(i, j);
                }
                for (int j = 0; j <= i; ++j)
                    s(i, j) /= z;
                for (int j = i + 1; j < T; ++j)
                    s(i, j) = 0.0;
            }
            b.y.middleCols(h * hd, hd) = s * v;
            b.probs[h] = std::move(s);
        }
        RowMat attn = b.y * w.mat(o.w_out, C, C);
        if (o.b_out != kAbsent)
            attn.rowwise() += w.vec(o.b_out, C);
        b.mask_attn = dropout_mask(dropout_rng, cfg.dropout, T, C);
        apply_mask(attn, b.mask_attn);
        x += attn;

        b.m = layer_norm(x, w.vec(o.ln2_g, C), maybe(w.base, o.ln2_b), b.ln2);
        b.h = b.m * w.mat(o.w_fc, C, F);
        if (o.b_fc != kAbsent)
            b.h.rowwise() += w.vec(o.b_fc, F);
        b.g = b.h.unaryExpr(&gelu);
        RowMat mlp = b.g * w.mat(o.w_proj, F, C);
        if (o.b_proj != kAbsent)
            mlp.rowwise() += w.vec(o.b_proj, C);
        b.mask_mlp = dropout_mask(dropout_rng, cfg.dropout, T, C);
        apply_mask(mlp, b.mask_mlp);
        x += mlp;
    }
    cache.f = layer_norm(x, w.vec(lay.lnf_g, C), maybe(w.base, lay.lnf_b), cache.lnf);
    cache.logits = cache.f * w.mat(lay.head_w, C, V);
    if (lay.head_b != kAbsent)
        cache.logits.rowwise() += w.vec(lay.head_b, V);
    return cache;
}

void backward(const ModelParams &params, const ForwardCache &cache, const RowMat &dlogits,
              std::span<double> grad) {
    const auto &cfg = params.config();
    const Layout lay = make_layout(params);
    const View w{params.values().data()};
    const GradView dw{grad.data()};
    const int T = static_cast<int>(cache.inputs.size()), C = cfg.embed_dim, F = cfg.ff_dim,
              H = cfg.n_heads, V = cfg.vocab_size;
    const int hd = C / H;
    const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

    dw.mat(lay.head_w, C, V).noalias() += cache.f.transpose() * dlogits;
    if (lay.head_b != kAbsent)
        dw.vec(lay.head_b, V) += dlogits.colwise().sum();
    RowMat df = dlogits * w.mat(lay.head_w, C, V).transpose();
    RowMat dx = layer_norm_backward(df, cache.lnf, w.vec(lay.lnf_g, C), dw.vec(lay.lnf_g, C),
                                    maybe(dw.base, lay.lnf_b));

    for (int l = cfg.n_layers - 1; l >= 0; --l) {
        const auto &o = lay.layers[l];
        const auto &b = cache.blocks[l];

        RowMat dmlp = dx;
        apply_mask(dmlp, b.mask_mlp);
        if (o.b_proj != kAbsent)
            dw.vec(o.b_proj, C) += dmlp.colwise().sum();
        dw.mat(o.w_proj, F, C).noalias() += b.g.transpose() * dmlp;
        RowMat dh = dmlp * w.mat(o.w_proj, F, C).transpose();
        dh.array() *= b.h.unaryExpr(&gelu_grad).array();
        if (o.b_fc != kAbsent)
            dw.vec(o.b_fc, F) += dh.colwise().sum();
        dw.mat(o.w_fc, C, F).noalias() += b.m.transpose() * dh;
        RowMat dm = dh * w.mat(o.w_fc, C, F).transpose();
        dx += layer_norm_backward(dm, b.ln2, w.vec(o.ln2_g, C), dw.vec(o.ln2_g, C),
                                  maybe(dw.base, o.ln2_b));

        RowMat dattn = dx;
        apply_mask(dattn, b.mask_attn);
        if (o.b_out != kAbsent)
            dw.vec(o.b_out, C) += dattn.colwise().sum();
        dw.mat(o.w_out, C, C).noalias() += b.y.transpose() * dattn;
        const RowMat dy = dattn * w.mat(o.w_out, C, C).transpose();

        RowMat dqkv(T, 3 * C);
        for (int h = 0; h < H; ++h) {
            const auto q = b.qkv.middleCols(h * hd, hd);
            const auto k = b.qkv.middleCols(C + h * hd, hd);
            const auto v = b.qkv.middleCols(2 * C + h * hd, hd);
            const RowMat &p = b.probs[h];
            const auto dyh = dy.middleCols(h * hd, hd);
            const RowMat dp = dyh * v.transpose();
            dqkv.middleCols(2 * C + h * hd, hd) = p.transpose() * dyh;
            RowMat ds(T, T);
            for (int i = 0; i < T; ++i) {
                const double inner = p.row(i).dot(dp.row(i));
                ds.row(i) = p.row(i).array() * (dp.row(i).array() - inner);
            }
            ds *= scale;
            dqkv.middleCols(h * hd, hd) = ds * k;
            dqkv.middleCols(C + h * hd, hd) = ds.transpose() * q;
        }
        if (o.b_qkv != kAbsent)
            dw.vec(o.b_qkv, 3 * C) += dqkv.colwise().sum();
        dw.mat(o.w_qkv, C, 3 * C).noalias() += b.a.transpose() * dqkv;
        const RowMat da = dqkv * w.mat(o.w_qkv, C, 3 * C).transpose();
        dx += layer_norm_backward(da, b.ln1, w.vec(o.ln1_g, C), dw.vec(o.ln1_g, C),
                                  maybe(dw.base, o.ln1_b));
    }

    apply_mask(dx, cache.mask_emb);
    auto dwte = dw.mat(lay.wte, V + 1, C);
    auto dwpe = dw.mat(lay.wpe, cfg.max_len, C);
    for (int t = 0; t < T; ++t) {
        dwte.row(cache.inputs[t]) += dx.row(t);
        dwpe.row(t) += dx.row(t);
    }
}

void check_sequence(const ModelParams &params, std::span<const Token> seq) {
    const auto &cfg = params.config();
    if (static_cast<int>(seq.size()) != cfg.max_len)
        throw InputError("sequence length " + std::to_string(seq.size()) +
                         " differs from model max_len " + std::to_string(cfg.max_len));
    for (Token t : seq)
        if (t < 0 || t >= cfg.vocab_size)
            throw InputError("token " + std::to_string(t) + " outside vocabulary of size " +
                             std::to_string(cfg.vocab_size));
}

LogProbResult log_probs_of(const ForwardCache &cache, std::span<const Token> seq) {
    LogProbResult out;
    out.per_token.resize(seq.size());
    for (std::size_t t = 0; t < seq.size(); ++t) {
        const auto row = cache.logits.row(static_cast<Eigen::Index>(t));
        const double lse = log_sum_exp({row.data(), static_cast<std::size_t>(row.size())});
        out.per_token[t] = row(seq[t]) - lse;
        out.total += out.per_token[t];
    }
    return out;
}

} // namespace

void ModelConfig::validate() const {
    auto fail = [](const std::string &m) { throw InputError("model config: " + m); };
    if (vocab_size < 1)
        fail("vocab_size must be >= 1");
    if (max_len < 1)
        fail("max_len must be >= 1");
    if (embed_dim < 1 || ff_dim < 1 || n_heads < 1 || n_layers < 0)
        fail("dimensions must be positive");
    if (embed_dim % n_heads != 0)
        fail("embed_dim " + std::to_string(embed_dim) + " is not divisible by n_heads " +
             std::to_string(n_heads));
    if (!(dropout >= 0.0 && dropout < 1.0))
        fail("dropout must lie in [0, 1)");
}

ModelParams::ModelParams(ModelConfig config) : config_(config) {
    config_.validate();
    const int C = config_.embed_dim, F = config_.ff_dim, V = config_.vocab_size;
    std::size_t offset = 0;
    auto add = [&](std::string name, std::vector<int> shape) {
        std::size_t n = 1;
        for (int d : shape)
            n *= static_cast<std::size_t>(d);
        tensors_.push_back({std::move(name), std::move(shape), offset, n});
        offset += n;
    };
    const bool bias = config_.use_bias;
    add("wte", {V + 1, C});
    add("wpe", {config_.max_len, C});
    for (int l = 0; l < config_.n_layers; ++l) {
        add(layer_name(l, "ln1.g"), {C});
        if (bias)
            add(layer_name(l, "ln1.b"), {C});
        add(layer_name(l, "attn.w_qkv"), {C, 3 * C});
        if (bias)
            add(layer_name(l, "attn.b_qkv"), {3 * C});
        add(layer_name(l, "attn.w_out"), {C, C});
        if (bias)
            add(layer_name(l, "attn.b_out"), {C});
        add(layer_name(l, "ln2.g"), {C});
        if (bias)
            add(layer_name(l, "ln2.b"), {C});
        add(layer_name(l, "mlp.w_fc"), {C, F});
        if (bias)
            add(layer_name(l, "mlp.b_fc"), {F});
        add(layer_name(l, "mlp.w_proj"), {F, C});
        if (bias)
            add(layer_name(l, "mlp.b_proj"), {C});
    }
    add("lnf.g", {C});
    if (bias)
        add("lnf.b", {C});
    add("head.w", {C, V});
    if (bias)
        add("head.b", {V});
    values_.assign(offset, 0.0);
}

const TensorInfo &ModelParams::info(std::string_view name) const {
    for (const auto &t : tensors_)
        if (t.name == name)
            return t;
    throw InputError("no tensor named '" + std::string(name) + "'");
}

std::span<double> ModelParams::tensor(std::string_view name) {
    const auto &t = info(name);
    return std::span(values_).subspan(t.offset, t.size);
}

std::span<const double> ModelParams::tensor(std::string_view name) const {
    const auto &t = info(name);
    return std::span(values_).subspan(t.offset, t.size);
}

ModelParams init_model(const ModelConfig &config, std::uint64_t seed) {
    ModelParams params(config);
    Rng rng = make_stream(seed, Stream::ModelInit);
    std::normal_distribution<double> normal(0.0, kInitStd);
    for (const auto &t : params.tensors()) {
        auto span = params.values().subspan(t.offset, t.size);
        const bool is_gain = t.name.ends_with(".g");
        const bool is_offset = t.shape.size() == 1 && !is_gain;
        if (is_gain)
            std::fill(span.begin(), span.end(), 1.0);
        else if (is_offset)
            std::fill(span.begin(), span.end(), 0.0);
        else
            for (auto &v : span)
                v = normal(rng);
    }
    return params;
}

double log_sum_exp(std::span<const double> v) {
    const double mx = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(mx))
        return mx;
    double s = 0.0;
    for (double x : v)
        s += std::exp(x - mx);
    return mx + std::log(s);
}

std::vector<double> softmax(std::span<const double> v, double temperature) {
    if (!(temperature > 0.0))
        throw InputError("temperature must be > 0");
    std::vector<double> out(v.begin(), v.end());
    for (auto &x : out)
        x /= temperature;
    const double lse = log_sum_exp(out);
    for (auto &x : out)
        x = std::exp(x - lse);
    return out;
}

std::vector<double> next_token_logits(const ModelParams &params, std::span<const Token> prefix) {
    const auto &cfg = params.config();
    if (static_cast<int>(prefix.size()) >= cfg.max_len)
        throw InputError("prefix length " + std::to_string(prefix.size()) +
                         " must be below max_len " + std::to_string(cfg.max_len));
    for (Token t : prefix)
        if (t < 0 || t >= cfg.vocab_size)
            throw InputError("token " + std::to_string(t) + " outside vocabulary");
    const int positions = static_cast<int>(prefix.size()) + 1;
    const auto cache = forward(params, prefix, positions, nullptr);
    const auto last = cache.logits.row(positions - 1);
    return {last.data(), last.data() + last.size()};
}

std::vector<CircuitSequence> sample_sequences(const ModelParams &params, int count,
                                              double temperature, Rng &rng) {
    if (!(temperature > 0.0))
        throw InputError("temperature must be > 0");
    if (count < 0)
        throw InputError("sample count must be non-negative");
    const int n = params.config().max_len;
    std::vector<CircuitSequence> out(count);
    for (auto &seq : out) {
        seq.reserve(n);
        for (int i = 0; i < n; ++i) {
            const auto probs = softmax(next_token_logits(params, seq), temperature);
            const double u = uniform01(rng);
            double acc = 0.0;
            Token pick = static_cast<Token>(probs.size()) - 1;
            for (std::size_t k = 0; k < probs.size(); ++k) {
                acc += probs[k];
                if (u < acc) {
                    pick = static_cast<Token>(k);
                    break;
                }
            }
            seq.push_back(pick);
        }
    }
    return out;
}

LogProbResult sequence_log_prob(const ModelParams &params, std::span<const Token> seq) {
    check_sequence(params, seq);
    const auto cache = forward(params, seq, static_cast<int>(seq.size()), nullptr);
    return log_probs_of(cache, seq);
}

struct LogProbTape::Impl {
    const ModelParams *params;
    std::vector<Token> seq;
    ForwardCache cache;
    LogProbResult result;
};

LogProbTape::LogProbTape(const ModelParams &params, std::span<const Token> seq, Rng *dropout_rng) {
    check_sequence(params, seq);
    auto cache = forward(params, seq, static_cast<int>(seq.size()), dropout_rng);
    auto result = log_probs_of(cache, seq);
    impl_ = std::make_unique<Impl>(
        Impl{&params, {seq.begin(), seq.end()}, std::move(cache), std::move(result)});
}

LogProbTape::~LogProbTape() = default;
LogProbTape::LogProbTape(LogProbTape &&) noexcept = default;
LogProbTape &LogProbTape::operator=(LogProbTape &&) noexcept = default;

const LogProbResult &LogProbTape::result() const { return impl_->result; }

void LogProbTape::backward(double weight, std::span<double> grad) const {
    const auto &params = *impl_->params;
    if (grad.size() != params.size())
        throw InputError("gradient buffer size does not match the parameter count");
    const auto &logits = impl_->cache.logits;
    const int T = static_cast<int>(impl_->seq.size());
    // d/dlogits of sum_t log softmax(logits_t)[seq_t] is onehot - softmax.
    RowMat dlogits(T, params.config().vocab_size);
    for (int t = 0; t < T; ++t) {
        const auto row = logits.row(t);
        const double lse = log_sum_exp({row.data(), static_cast<std::size_t>(row.size())});
        dlogits.row(t) = -(row.array() - lse).exp() * weight;
        dlogits(t, impl_->seq[t]) += weight;
    }
    model::backward(params, impl_->cache, dlogits, grad);
}

LogProbResult sequence_log_prob_backward(const ModelParams &params, std::span<const Token> seq,
                                         double weight, std::span<double> grad, Rng *dropout_rng) {
    LogProbTape tape(params, seq, dropout_rng);
    tape.backward(weight, grad);
    return tape.result();
}

namespace {

constexpr char kMagic[8] = {'G', 'Q', 'E', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T> void put(std::ostream &out, const T &v) {
    out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}
template <typename T> T get(std::istream &in) {
    T v{};
    in.read(reinterpret_cast<char *>(&v), sizeof(T));
    if (!in)
        throw InputError("checkpoint is truncated");
    return v;
}

} // namespace

void save_checkpoint(const ModelParams &params, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write checkpoint '" + path + "'");
    const auto &c = params.config();
    out.write(kMagic, sizeof kMagic);
    put(out, kCheckpointVersion);
    for (int v : {c.vocab_size, c.max_len, c.embed_dim, c.ff_dim, c.n_heads, c.n_layers})
        put<std::int32_t>(out, v);
    put<std::uint8_t>(out, c.use_bias ? 1 : 0);
    put(out, c.dropout);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(params.tensors().size()));
    for (const auto &t : params.tensors()) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
        out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
        for (int d : t.shape)
            put<std::int32_t>(out, d);
        out.write(reinterpret_cast<const char *>(params.values().data() + t.offset),
                  static_cast<std::streamsize>(t.size * sizeof(double)));
    }
    if (!out)
        throw IoError("failed writing checkpoint '" + path + "'");
}

ModelParams load_checkpoint(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open checkpoint '" + path + "'");
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw InputError("'" + path + "' is not a checkpoint");
    if (get<std::uint32_t>(in) != kCheckpointVersion)
        throw InputError("unsupported checkpoint version");
    ModelConfig c;
    c.vocab_size = get<std::int32_t>(in);
    c.max_len = get<std::int32_t>(in);
    c.embed_dim = get<std::int32_t>(in);
    c.ff_dim = get<std::int32_t>(in);
    c.n_heads = get<std::int32_t>(in);
    c.n_layers = get<std::int32_t>(in);
    c.use_bias = get<std::uint8_t>(in) != 0;
    c.dropout = get<double>(in);
    ModelParams params(c);
    if (get<std::uint32_t>(in) != params.tensors().size())
        throw InputError("checkpoint tensor count does not match its config");
    for (const auto &t : params.tensors()) {
        std::string name(get<std::uint32_t>(in), '\0');
        in.read(name.data(), static_cast<std::streamsize>(name.size()));
        if (name != t.name)
            throw InputError("checkpoint tensor '" + name + "' where '" + t.name + "' expected");
        std::vector<int> shape(get<std::uint32_t>(in));
        for (auto &d : shape)
            d = get<std::int32_t>(in);
        if (shape != t.shape)
            throw InputError("checkpoint tensor '" + name + "' has the wrong shape");
        in.read(reinterpret_cast<char *>(params.values().data() + t.offset),
                static_cast<std::streamsize>(t.size * sizeof(double)));
        if (!in)
            throw InputError("checkpoint is truncated");
    }
    return params;
}

} // namespace gqe::model
