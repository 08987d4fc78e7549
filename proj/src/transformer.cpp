#include "pgt/transformer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

namespace pgt {

void TransformerConfig::validate() const {
    if (vocab_size < 2) {
        throw std::invalid_argument("TransformerConfig: vocab_size must be >= 2");
    }
    if (embed_dim <= 0 || n_heads <= 0) {
        throw std::invalid_argument("TransformerConfig: embed_dim and n_heads must be positive");
    }
    if (embed_dim % n_heads != 0) {
        throw std::invalid_argument("TransformerConfig: embed_dim must be divisible by n_heads");
    }
    if (max_seq_len < 1) {
        throw std::invalid_argument("TransformerConfig: max_seq_len must be >= 1");
    }
    if (encoder_layers != 1 || decoder_layers != 1) {
        throw std::invalid_argument("TransformerConfig: only single-layer stacks are supported");
    }
    if (reservoir_in <= 0 || reservoir_out <= 0) {
        throw std::invalid_argument("TransformerConfig: reservoir dims must be positive");
    }
}

Eigen::MatrixXd sinusoidal_position_encoding(Eigen::Index max_len, Eigen::Index dim) {
    if (max_len <= 0 || dim <= 0) {
        throw std::invalid_argument("sinusoidal_position_encoding: dims must be positive");
    }
    Eigen::MatrixXd table(max_len, dim);
    for (Eigen::Index pos = 0; pos < max_len; ++pos) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double exponent = static_cast<double>(2 * (i / 2)) / static_cast<double>(dim);
            const double angle =
                static_cast<double>(pos) / std::pow(10000.0, exponent);
            table(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    }
    return table;
}

namespace {

/// Row-softmax of Q K^T / sqrt(d); causal hides keys j > i from query i.
Eigen::MatrixXd masked_softmax_scores(const Eigen::MatrixXd& q, const Eigen::MatrixXd& k,
                                      bool causal) {
    if (q.cols() != k.cols()) {
        throw std::invalid_argument("attention: query/key width mismatch");
    }
    Eigen::MatrixXd scores =
        q * k.transpose() / std::sqrt(static_cast<double>(q.cols()));
    if (causal) {
        if (scores.rows() != scores.cols()) {
            throw std::invalid_argument("attention: causal mask needs a square score matrix");
        }
        for (Eigen::Index i = 0; i < scores.rows(); ++i) {
            for (Eigen::Index j = i + 1; j < scores.cols(); ++j) {
                scores(i, j) = -std::numeric_limits<double>::infinity();
            }
        }
    }
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const double m = scores.row(i).maxCoeff();
        Eigen::ArrayXd e = (scores.row(i).transpose().array() - m).exp();
        scores.row(i) = (e / e.sum()).transpose();
    }
    return scores;
}

struct MhaCache {
    Eigen::MatrixXd xq, xkv, q, k, v, concat;
    std::vector<Eigen::MatrixXd> attn;
};

Eigen::MatrixXd mha_forward(const AttentionParams& p, int heads, bool causal,
                            const Eigen::MatrixXd& xq, const Eigen::MatrixXd& xkv,
                            MhaCache* cache) {
    const Eigen::Index d = p.wq.rows();
    const Eigen::Index dh = d / heads;
    Eigen::MatrixXd q = (xq * p.wq.transpose()).rowwise() + p.bq.transpose();
    Eigen::MatrixXd k = (xkv * p.wk.transpose()).rowwise() + p.bk.transpose();
    Eigen::MatrixXd v = (xkv * p.wv.transpose()).rowwise() + p.bv.transpose();
    Eigen::MatrixXd concat(xq.rows(), d);
    std::vector<Eigen::MatrixXd> attn(static_cast<std::size_t>(heads));
    for (int h = 0; h < heads; ++h) {
        const Eigen::Index c0 = h * dh;
        const Eigen::MatrixXd a =
            masked_softmax_scores(q.middleCols(c0, dh), k.middleCols(c0, dh), causal);
        concat.middleCols(c0, dh) = a * v.middleCols(c0, dh);
        attn[static_cast<std::size_t>(h)] = a;
    }
    Eigen::MatrixXd out = (concat * p.wo.transpose()).rowwise() + p.bo.transpose();
    if (cache != nullptr) {
        cache->xq = xq;
        cache->xkv = xkv;
        cache->q = std::move(q);
        cache->k = std::move(k);
        cache->v = std::move(v);
        cache->concat = std::move(concat);
        cache->attn = std::move(attn);
    }
    return out;
}

/// Sets d_xq / d_xkv; accumulates parameter gradients into `g`.
void mha_backward(const AttentionParams& p, int heads, const MhaCache& c,
                  const Eigen::MatrixXd& d_out, AttentionParams& g, Eigen::MatrixXd& d_xq,
                  Eigen::MatrixXd& d_xkv) {
    const Eigen::Index d = p.wq.rows();
    const Eigen::Index dh = d / heads;
    g.wo += d_out.transpose() * c.concat;
    g.bo += d_out.colwise().sum().transpose();
    const Eigen::MatrixXd d_concat = d_out * p.wo;

    Eigen::MatrixXd dq(c.q.rows(), d), dk(c.k.rows(), d), dv(c.v.rows(), d);
    for (int h = 0; h < heads; ++h) {
        const Eigen::Index c0 = h * dh;
        const Eigen::MatrixXd& a = c.attn[static_cast<std::size_t>(h)];
        const auto d_ch = d_concat.middleCols(c0, dh);
        dv.middleCols(c0, dh) = a.transpose() * d_ch;
        const Eigen::MatrixXd d_a = d_ch * c.v.middleCols(c0, dh).transpose();
        const Eigen::ArrayXd row_dot = (d_a.array() * a.array()).rowwise().sum();
        const Eigen::MatrixXd d_s =
            (a.array() * (d_a.array().colwise() - row_dot)).matrix();
        const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
        dq.middleCols(c0, dh) = d_s * c.k.middleCols(c0, dh) * scale;
        dk.middleCols(c0, dh) = d_s.transpose() * c.q.middleCols(c0, dh) * scale;
    }

    g.wq += dq.transpose() * c.xq;
    g.bq += dq.colwise().sum().transpose();
    g.wk += dk.transpose() * c.xkv;
    g.bk += dk.colwise().sum().transpose();
    g.wv += dv.transpose() * c.xkv;
    g.bv += dv.colwise().sum().transpose();
    d_xq = dq * p.wq;
    d_xkv = dk * p.wk + dv * p.wv;
}

struct FfnCache {
    Eigen::MatrixXd input, down, res;
};

/// Tokens go through the reservoir strictly one at a time, in order.
Eigen::MatrixXd ffn_forward(const FfnParams& p, Reservoir& res, bool residual,
                            const Eigen::MatrixXd& x, FfnCache* cache) {
    if (res.stateful()) {
        res.reset_state();
    }
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd down(n, p.down_w.rows());
    Eigen::MatrixXd rout(n, p.up_w.cols());
    Eigen::MatrixXd out(n, x.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd d_i = p.down_w * x.row(i).transpose() + p.down_b;
        const Eigen::VectorXd r_i = res.forward(d_i);
        const Eigen::VectorXd u_i = p.up_w * r_i + p.up_b;
        out.row(i) = u_i.transpose();
        if (residual) {
            out.row(i) += x.row(i);
        }
        down.row(i) = d_i.transpose();
        rout.row(i) = r_i.transpose();
    }
    if (cache != nullptr) {
        cache->input = x;
        cache->down = std::move(down);
        cache->res = std::move(rout);
    }
    return out;
}

Eigen::MatrixXd ffn_backward(const FfnParams& p, Reservoir& res, bool residual,
                             const FfnCache& c, const Eigen::MatrixXd& d_out, FfnParams& g) {
    Eigen::MatrixXd d_x(c.input.rows(), c.input.cols());
    for (Eigen::Index i = 0; i < c.input.rows(); ++i) {
        const Eigen::VectorXd gu = d_out.row(i).transpose();
        g.up_w += gu * c.res.row(i);
        g.up_b += gu;
        const Eigen::VectorXd gr = p.up_w.transpose() * gu;
        const Eigen::VectorXd gd = res.backward(c.down.row(i).transpose(), gr);
        g.down_w += gd * c.input.row(i);
        g.down_b += gd;
        d_x.row(i) = (p.down_w.transpose() * gd).transpose();
        if (residual) {
            d_x.row(i) += d_out.row(i);
        }
    }
    return d_x;
}

AttentionParams attention_zeros(Eigen::Index d) {
    AttentionParams p;
    p.wq = Eigen::MatrixXd::Zero(d, d);
    p.wk = Eigen::MatrixXd::Zero(d, d);
    p.wv = Eigen::MatrixXd::Zero(d, d);
    p.wo = Eigen::MatrixXd::Zero(d, d);
    p.bq = Eigen::VectorXd::Zero(d);
    p.bk = Eigen::VectorXd::Zero(d);
    p.bv = Eigen::VectorXd::Zero(d);
    p.bo = Eigen::VectorXd::Zero(d);
    return p;
}

FfnParams ffn_zeros(Eigen::Index d, Eigen::Index res_in, Eigen::Index res_out) {
    FfnParams p;
    p.down_w = Eigen::MatrixXd::Zero(res_in, d);
    p.down_b = Eigen::VectorXd::Zero(res_in);
    p.up_w = Eigen::MatrixXd::Zero(d, res_out);
    p.up_b = Eigen::VectorXd::Zero(d);
    return p;
}

TransformerParams params_zeros(const TransformerConfig& cfg) {
    TransformerParams p;
    p.embedding = Eigen::MatrixXd::Zero(cfg.vocab_size, cfg.embed_dim);
    p.enc_self = attention_zeros(cfg.embed_dim);
    p.dec_self = attention_zeros(cfg.embed_dim);
    p.dec_cross = attention_zeros(cfg.embed_dim);
    p.enc_ffn = ffn_zeros(cfg.embed_dim, cfg.reservoir_in, cfg.reservoir_out);
    p.dec_ffn = ffn_zeros(cfg.embed_dim, cfg.reservoir_in, cfg.reservoir_out);
    return p;
}

void fill_uniform(Eigen::MatrixXd& m, double bound, Rng& rng) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    m = Eigen::MatrixXd::NullaryExpr(m.rows(), m.cols(), [&] { return dist(rng); });
}

template <typename T>
void write_pod(std::ostream& os, const T& value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::istream& is, T& value) {
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
}

constexpr char kCheckpointMagic[8] = {'P', 'G', 'T', 'C', 'K', 'P', 'T', '1'};

}  // namespace

Eigen::MatrixXd attention(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& keys,
                          const Eigen::MatrixXd& values, bool causal) {
    if (keys.rows() != values.rows()) {
        throw std::invalid_argument("attention: key/value row mismatch");
    }
    return masked_softmax_scores(queries, keys, causal) * values;
}

ReservoirTransformer::ReservoirTransformer(const TransformerConfig& config,
                                           std::shared_ptr<Reservoir> encoder_res,
                                           std::shared_ptr<Reservoir> decoder_res)
    : config_(config), enc_res_(std::move(encoder_res)), dec_res_(std::move(decoder_res)) {
    config_.validate();
    for (const auto& [res, side] :
         {std::pair<Reservoir*, const char*>{enc_res_.get(), "encoder"},
          std::pair<Reservoir*, const char*>{dec_res_.get(), "decoder"}}) {
        if (res == nullptr) {
            throw std::invalid_argument(std::string("ReservoirTransformer: ") + side +
                                        " reservoir must not be null");
        }
        if (res->input_dim() != config_.reservoir_in ||
            res->output_dim() != config_.reservoir_out) {
            throw std::invalid_argument(std::string("ReservoirTransformer: ") + side +
                                        " reservoir dims do not match the config");
        }
    }

    params_ = params_zeros(config_);
    Rng rng(config_.init_seed);
    const double embed_bound = 1.0 / std::sqrt(static_cast<double>(config_.embed_dim));
    fill_uniform(params_.embedding, embed_bound, rng);
    for (AttentionParams* attn : {&params_.enc_self, &params_.dec_self, &params_.dec_cross}) {
        fill_uniform(attn->wq, embed_bound, rng);
        fill_uniform(attn->wk, embed_bound, rng);
        fill_uniform(attn->wv, embed_bound, rng);
        fill_uniform(attn->wo, embed_bound, rng);
    }
    const double up_bound = 1.0 / std::sqrt(static_cast<double>(config_.reservoir_out));
    for (FfnParams* ffn : {&params_.enc_ffn, &params_.dec_ffn}) {
        fill_uniform(ffn->down_w, embed_bound, rng);
        fill_uniform(ffn->up_w, up_bound, rng);
    }

    pos_ = sinusoidal_position_encoding(config_.max_seq_len, config_.embed_dim);
    for (const ParamRef& ref : enumerate(params_, config_)) {
        layout_.add(ref.name, ref.rows, ref.cols);
    }
}

std::vector<ReservoirTransformer::ParamRef> ReservoirTransformer::enumerate(
    TransformerParams& p, const TransformerConfig& cfg) {
    std::vector<ParamRef> refs;
    auto add_m = [&](const std::string& name, Eigen::MatrixXd& m) {
        refs.push_back({name, m.data(), m.rows(), m.cols()});
    };
    auto add_v = [&](const std::string& name, Eigen::VectorXd& v) {
        refs.push_back({name, v.data(), v.size(), 1});
    };
    auto add_attn = [&](const std::string& prefix, AttentionParams& a) {
        add_m(prefix + ".wq", a.wq);
        add_v(prefix + ".bq", a.bq);
        add_m(prefix + ".wk", a.wk);
        add_v(prefix + ".bk", a.bk);
        add_m(prefix + ".wv", a.wv);
        add_v(prefix + ".bv", a.bv);
        add_m(prefix + ".wo", a.wo);
        add_v(prefix + ".bo", a.bo);
    };
    auto add_ffn = [&](const std::string& prefix, FfnParams& f) {
        add_m(prefix + ".down_w", f.down_w);
        add_v(prefix + ".down_b", f.down_b);
        add_m(prefix + ".up_w", f.up_w);
        add_v(prefix + ".up_b", f.up_b);
    };
    (void)cfg;
    add_m("embedding", p.embedding);
    add_attn("enc.self", p.enc_self);
    add_ffn("enc.ffn", p.enc_ffn);
    add_attn("dec.self", p.dec_self);
    add_attn("dec.cross", p.dec_cross);
    add_ffn("dec.ffn", p.dec_ffn);
    return refs;
}

Eigen::VectorXd ReservoirTransformer::parameters() const {
    Eigen::VectorXd flat(layout_.total_size());
    Eigen::Index offset = 0;
    for (const ParamRef& ref :
         enumerate(const_cast<TransformerParams&>(params_), config_)) {
        const Eigen::Index n = ref.rows * ref.cols;
        flat.segment(offset, n) = Eigen::Map<const Eigen::VectorXd>(ref.data, n);
        offset += n;
    }
    return flat;
}

void ReservoirTransformer::set_parameters(const Eigen::VectorXd& theta) {
    if (theta.size() != layout_.total_size()) {
        throw std::invalid_argument("ReservoirTransformer::set_parameters: expected " +
                                    std::to_string(layout_.total_size()) + " values, got " +
                                    std::to_string(theta.size()));
    }
    Eigen::Index offset = 0;
    for (const ParamRef& ref : enumerate(params_, config_)) {
        const Eigen::Index n = ref.rows * ref.cols;
        Eigen::Map<Eigen::VectorXd>(ref.data, n) = theta.segment(offset, n);
        offset += n;
    }
}

void ReservoirTransformer::check_tokens(const std::vector<int>& ids, const char* side) const {
    if (ids.empty()) {
        throw std::invalid_argument(std::string("ReservoirTransformer: empty ") + side +
                                    " sequence");
    }
    if (ids.size() > static_cast<std::size_t>(config_.max_seq_len)) {
        throw std::invalid_argument(std::string("ReservoirTransformer: ") + side +
                                    " sequence longer than max_seq_len");
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= config_.vocab_size) {
            throw std::invalid_argument(std::string("ReservoirTransformer: ") + side +
                                        " token " + std::to_string(i) + " has id " +
                                        std::to_string(ids[i]) + " outside the vocabulary");
        }
    }
}

namespace {

struct TransformerCaches {
    MhaCache enc_self, dec_self, dec_cross;
    FfnCache enc_ffn, dec_ffn;
    Eigen::MatrixXd x, y, h1, h, d1, d2;
    std::vector<int> dec_in;
};

}  // namespace

Eigen::MatrixXd ReservoirTransformer::forward(const std::vector<int>& src,
                                              const std::vector<int>& tgt) const {
    check_tokens(src, "source");
    check_tokens(tgt, "target");

    const auto m = static_cast<Eigen::Index>(src.size());
    const auto L = static_cast<Eigen::Index>(tgt.size());
    Eigen::MatrixXd x(m, config_.embed_dim);
    for (Eigen::Index i = 0; i < m; ++i) {
        x.row(i) = params_.embedding.row(src[static_cast<std::size_t>(i)]) + pos_.row(i);
    }
    const Eigen::MatrixXd h1 =
        x + mha_forward(params_.enc_self, config_.n_heads, false, x, x, nullptr);
    const Eigen::MatrixXd h =
        ffn_forward(params_.enc_ffn, *enc_res_, config_.residual, h1, nullptr);

    std::vector<int> dec_in(tgt.size());
    dec_in[0] = kStartToken;
    for (std::size_t i = 1; i < tgt.size(); ++i) {
        dec_in[i] = tgt[i - 1];
    }
    Eigen::MatrixXd y(L, config_.embed_dim);
    for (Eigen::Index i = 0; i < L; ++i) {
        y.row(i) = params_.embedding.row(dec_in[static_cast<std::size_t>(i)]) + pos_.row(i);
    }
    const Eigen::MatrixXd d1 =
        y + mha_forward(params_.dec_self, config_.n_heads, true, y, y, nullptr);
    const Eigen::MatrixXd d2 =
        d1 + mha_forward(params_.dec_cross, config_.n_heads, false, d1, h, nullptr);
    return ffn_forward(params_.dec_ffn, *dec_res_, config_.residual, d2, nullptr);
}

double ReservoirTransformer::loss(const std::vector<int>& src, const std::vector<int>& tgt) const {
    const Eigen::MatrixXd out = forward(src, tgt);
    double total = 0.0;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        total +=
            (out.row(i) - params_.embedding.row(tgt[static_cast<std::size_t>(i)])).squaredNorm();
    }
    return total;
}

double ReservoirTransformer::loss_and_gradient(const std::vector<int>& src,
                                               const std::vector<int>& tgt,
                                               Eigen::VectorXd& grad) const {
    check_tokens(src, "source");
    check_tokens(tgt, "target");
    if (!enc_res_->gradient_available() || !dec_res_->gradient_available()) {
        throw std::logic_error(
            "ReservoirTransformer::loss_and_gradient: gradient unavailable through an opaque "
            "reservoir");
    }

    TransformerCaches c;
    const auto m = static_cast<Eigen::Index>(src.size());
    const auto L = static_cast<Eigen::Index>(tgt.size());
    c.x.resize(m, config_.embed_dim);
    for (Eigen::Index i = 0; i < m; ++i) {
        c.x.row(i) = params_.embedding.row(src[static_cast<std::size_t>(i)]) + pos_.row(i);
    }
    c.h1 = c.x + mha_forward(params_.enc_self, config_.n_heads, false, c.x, c.x, &c.enc_self);
    c.h = ffn_forward(params_.enc_ffn, *enc_res_, config_.residual, c.h1, &c.enc_ffn);

    c.dec_in.assign(tgt.size(), kStartToken);
    for (std::size_t i = 1; i < tgt.size(); ++i) {
        c.dec_in[i] = tgt[i - 1];
    }
    c.y.resize(L, config_.embed_dim);
    for (Eigen::Index i = 0; i < L; ++i) {
        c.y.row(i) = params_.embedding.row(c.dec_in[static_cast<std::size_t>(i)]) + pos_.row(i);
    }
    c.d1 = c.y + mha_forward(params_.dec_self, config_.n_heads, true, c.y, c.y, &c.dec_self);
    c.d2 = c.d1 +
           mha_forward(params_.dec_cross, config_.n_heads, false, c.d1, c.h, &c.dec_cross);
    const Eigen::MatrixXd out =
        ffn_forward(params_.dec_ffn, *dec_res_, config_.residual, c.d2, &c.dec_ffn);

    double total = 0.0;
    Eigen::MatrixXd g_out(L, config_.embed_dim);
    for (Eigen::Index i = 0; i < L; ++i) {
        const auto diff =
            out.row(i) - params_.embedding.row(tgt[static_cast<std::size_t>(i)]);
        total += diff.squaredNorm();
        g_out.row(i) = 2.0 * diff;
    }

    TransformerParams g = params_zeros(config_);
    for (Eigen::Index i = 0; i < L; ++i) {
        g.embedding.row(tgt[static_cast<std::size_t>(i)]) -= g_out.row(i);
    }

    const Eigen::MatrixXd g_d2 =
        ffn_backward(params_.dec_ffn, *dec_res_, config_.residual, c.dec_ffn, g_out, g.dec_ffn);
    Eigen::MatrixXd d_d1_attn, d_h;
    mha_backward(params_.dec_cross, config_.n_heads, c.dec_cross, g_d2, g.dec_cross, d_d1_attn,
                 d_h);
    const Eigen::MatrixXd g_d1 = g_d2 + d_d1_attn;
    Eigen::MatrixXd d_yq, d_ykv;
    mha_backward(params_.dec_self, config_.n_heads, c.dec_self, g_d1, g.dec_self, d_yq, d_ykv);
    const Eigen::MatrixXd g_y = g_d1 + d_yq + d_ykv;
    for (Eigen::Index i = 0; i < L; ++i) {
        g.embedding.row(c.dec_in[static_cast<std::size_t>(i)]) += g_y.row(i);
    }

    const Eigen::MatrixXd g_h1 =
        ffn_backward(params_.enc_ffn, *enc_res_, config_.residual, c.enc_ffn, d_h, g.enc_ffn);
    Eigen::MatrixXd d_xq, d_xkv;
    mha_backward(params_.enc_self, config_.n_heads, c.enc_self, g_h1, g.enc_self, d_xq, d_xkv);
    const Eigen::MatrixXd g_x = g_h1 + d_xq + d_xkv;
    for (Eigen::Index i = 0; i < m; ++i) {
        g.embedding.row(src[static_cast<std::size_t>(i)]) += g_x.row(i);
    }

    grad.resize(layout_.total_size());
    Eigen::Index offset = 0;
    for (const ParamRef& ref : enumerate(g, config_)) {
        const Eigen::Index n = ref.rows * ref.cols;
        grad.segment(offset, n) = Eigen::Map<const Eigen::VectorXd>(ref.data, n);
        offset += n;
    }
    return total;
}

void ReservoirTransformer::save_checkpoint(const std::string& path,
                                           std::uint64_t extra_seed) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("save_checkpoint: cannot open " + path);
    }
    os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    write_pod(os, std::int32_t{config_.vocab_size});
    write_pod(os, std::int32_t{config_.embed_dim});
    write_pod(os, std::int32_t{config_.n_heads});
    write_pod(os, std::int32_t{config_.max_seq_len});
    write_pod(os, std::int32_t{config_.encoder_layers});
    write_pod(os, std::int32_t{config_.decoder_layers});
    write_pod(os, static_cast<std::int64_t>(config_.reservoir_in));
    write_pod(os, static_cast<std::int64_t>(config_.reservoir_out));
    write_pod(os, static_cast<std::uint8_t>(config_.residual ? 1 : 0));
    write_pod(os, std::uint64_t{config_.init_seed});
    write_pod(os, extra_seed);
    const Eigen::VectorXd flat = parameters();
    write_pod(os, static_cast<std::uint64_t>(flat.size()));
    os.write(reinterpret_cast<const char*>(flat.data()),
             static_cast<std::streamsize>(sizeof(double)) * flat.size());
    if (!os) {
        throw std::runtime_error("save_checkpoint: write failed for " + path);
    }
}

ReservoirTransformer::CheckpointBlob ReservoirTransformer::read_checkpoint(
    const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("read_checkpoint: cannot open " + path);
    }
    char magic[sizeof(kCheckpointMagic)] = {};
    is.read(magic, sizeof(magic));
    if (!is || std::string(magic, sizeof(magic)) !=
                   std::string(kCheckpointMagic, sizeof(kCheckpointMagic))) {
        throw std::runtime_error("read_checkpoint: " + path + " is not a checkpoint file");
    }
    CheckpointBlob blob;
    std::int32_t vocab = 0, embed = 0, heads = 0, max_seq = 0, enc_layers = 0, dec_layers = 0;
    std::int64_t res_in = 0, res_out = 0;
    std::uint8_t residual = 0;
    read_pod(is, vocab);
    read_pod(is, embed);
    read_pod(is, heads);
    read_pod(is, max_seq);
    read_pod(is, enc_layers);
    read_pod(is, dec_layers);
    read_pod(is, res_in);
    read_pod(is, res_out);
    read_pod(is, residual);
    read_pod(is, blob.config.init_seed);
    read_pod(is, blob.extra_seed);
    std::uint64_t count = 0;
    read_pod(is, count);
    if (!is) {
        throw std::runtime_error("read_checkpoint: truncated header in " + path);
    }
    blob.config.vocab_size = vocab;
    blob.config.embed_dim = embed;
    blob.config.n_heads = heads;
    blob.config.max_seq_len = max_seq;
    blob.config.encoder_layers = enc_layers;
    blob.config.decoder_layers = dec_layers;
    blob.config.reservoir_in = res_in;
    blob.config.reservoir_out = res_out;
    blob.config.residual = residual != 0;
    blob.config.validate();

    blob.params.resize(static_cast<Eigen::Index>(count));
    is.read(reinterpret_cast<char*>(blob.params.data()),
            static_cast<std::streamsize>(sizeof(double) * count));
    if (!is) {
        throw std::runtime_error("read_checkpoint: truncated parameters in " + path);
    }
    is.peek();
    if (!is.eof()) {
        throw std::runtime_error("read_checkpoint: trailing bytes in " + path);
    }
    return blob;
}

ReservoirTransformer ReservoirTransformer::from_checkpoint(
    const CheckpointBlob& blob, std::shared_ptr<Reservoir> encoder_res,
    std::shared_ptr<Reservoir> decoder_res) {
    ReservoirTransformer model(blob.config, std::move(encoder_res), std::move(decoder_res));
    model.set_parameters(blob.params);
    return model;
}

}  // namespace pgt
