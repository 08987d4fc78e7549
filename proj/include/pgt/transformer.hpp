#pragma once

#include "pgt/param_space.hpp"
#include "pgt/reservoir.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace pgt {

struct TransformerConfig {
    int vocab_size = 16;
    int embed_dim = 32;
    int n_heads = 4;
    int max_seq_len = 16;
    int encoder_layers = 1;
    int decoder_layers = 1;
    /// Width of the feed-forward down-projection feeding the reservoir, and
    /// of the reservoir output consumed by the up-projection.
    Eigen::Index reservoir_in = 5;
    Eigen::Index reservoir_out = 100;
    /// Residual connection around the reservoir feed-forward block.
    bool residual = true;
    std::uint64_t init_seed = 11;

    void validate() const;
};

/// Fixed sinusoidal table, rows are positions. Not trainable.
Eigen::MatrixXd sinusoidal_position_encoding(Eigen::Index max_len, Eigen::Index dim);

/// Scaled dot-product attention on row-per-position matrices:
/// softmax(Q K^T / sqrt(d)) V, with an optional causal mask that hides
/// positions j > i from query i (square score matrix required).
Eigen::MatrixXd attention(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& keys,
                          const Eigen::MatrixXd& values, bool causal);

struct AttentionParams {
    Eigen::MatrixXd wq, wk, wv, wo;  // embed x embed
    Eigen::VectorXd bq, bk, bv, bo;
};

struct FfnParams {
    Eigen::MatrixXd down_w;  // reservoir_in x embed
    Eigen::VectorXd down_b;
    Eigen::MatrixXd up_w;  // embed x reservoir_out
    Eigen::VectorXd up_b;
};

struct TransformerParams {
    Eigen::MatrixXd embedding;  // vocab x embed, shared by both sides and the targets
    AttentionParams enc_self, dec_self, dec_cross;
    FfnParams enc_ffn, dec_ffn;
};

/// Single-layer encoder-decoder whose feed-forward blocks route each token,
/// one at a time, through a reservoir sandwiched between trainable
/// projections. Reservoir coefficients never enter the parameter vector.
class ReservoirTransformer {
  public:
    ReservoirTransformer(const TransformerConfig& config, std::shared_ptr<Reservoir> encoder_res,
                         std::shared_ptr<Reservoir> decoder_res);

    const TransformerConfig& config() const { return config_; }
    const ParameterLayout& layout() const { return layout_; }
    Eigen::Index parameter_count() const { return layout_.total_size(); }
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& theta);

    const Eigen::MatrixXd& position_encoding() const { return pos_; }
    const TransformerParams& params() const { return params_; }

    /// Teacher-forced pass: the decoder consumes the start token followed by
    /// target ids shifted right, and emits one output embedding per target
    /// position (rows).
    Eigen::MatrixXd forward(const std::vector<int>& src, const std::vector<int>& tgt) const;

    /// Sum of squared differences between the output embeddings and the
    /// embedding rows of the target ids.
    double loss(const std::vector<int>& src, const std::vector<int>& tgt) const;

    /// Exact gradient of loss() with respect to the flat parameter vector,
    /// including the embedding's role as target. Requires reservoirs with
    /// gradients.
    double loss_and_gradient(const std::vector<int>& src, const std::vector<int>& tgt,
                             Eigen::VectorXd& grad) const;

    static constexpr int kStartToken = 0;

    struct CheckpointBlob {
        TransformerConfig config;
        Eigen::VectorXd params;
        std::uint64_t extra_seed = 0;
    };
    void save_checkpoint(const std::string& path, std::uint64_t extra_seed) const;
    static CheckpointBlob read_checkpoint(const std::string& path);
    static ReservoirTransformer from_checkpoint(const CheckpointBlob& blob,
                                                std::shared_ptr<Reservoir> encoder_res,
                                                std::shared_ptr<Reservoir> decoder_res);

  private:
    struct ParamRef {
        std::string name;
        double* data;
        Eigen::Index rows, cols;
    };
    static std::vector<ParamRef> enumerate(TransformerParams& p, const TransformerConfig& cfg);

    void check_tokens(const std::vector<int>& ids, const char* side) const;

    TransformerConfig config_;
    std::shared_ptr<Reservoir> enc_res_;
    std::shared_ptr<Reservoir> dec_res_;
    TransformerParams params_;
    Eigen::MatrixXd pos_;
    ParameterLayout layout_;
};

}  // namespace pgt
