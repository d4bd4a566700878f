#pragma once

#include "mabsa/aed.hpp"
#include "mabsa/autodiff.hpp"
#include "mabsa/datamodel.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace mabsa::model {

/// Which text tokens count as aspects when building the association matrix.
enum class AspectSource { Gold, Nouns };

struct ModelConfig {
    std::size_t hidden = 32;
    std::size_t encoder_layers = 1;
    std::size_t decoder_layers = 1;
    std::size_t gcn_layers = 2;
    double fusion_aed = 0.5; // weight of the attention output in the fused states
    double fusion_gcn = 0.5; // weight of the graph output
    double learning_rate = 0.05;
    std::size_t batch_size = 8;
    std::size_t epochs = 40;
    std::uint64_t seed = 1;
    std::size_t max_aspects = 8;
    std::size_t max_tokens = 64;
    int association_threshold = 2;
    // Replace attention + lexicon enhancement with identity pass-through.
    bool bypass_aesa = false;
    // Global gradient-norm clip applied before each update; 0 disables.
    double grad_clip = 10.0;
    AspectSource train_aspects = AspectSource::Gold;

    void validate() const;
    std::size_t max_steps() const { return 3 * max_aspects + 1; }
};

class Vocabulary {
public:
    static constexpr std::size_t kUnk = 0;

    Vocabulary();
    explicit Vocabulary(std::vector<std::string> words);
    /// Every token of `d` in first-seen order, after the reserved UNK entry.
    static Vocabulary build(const Dataset& d);

    std::size_t id(const std::string& token) const;
    std::size_t size() const noexcept { return words_.size(); }
    const std::vector<std::string>& words() const noexcept { return words_; }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct AttentionParams {
    num::Parameter query, key, value, output;
};

struct NormParams {
    num::Parameter gain, bias;
};

struct FeedForwardParams {
    num::Parameter in_weight, in_bias, out_weight, out_bias;
};

struct EncoderLayerParams {
    AttentionParams attention;
    NormParams norm1;
    FeedForwardParams ff;
    NormParams norm2;
};

struct DecoderLayerParams {
    AttentionParams self_attention;
    NormParams norm1;
    AttentionParams cross_attention;
    NormParams norm2;
    FeedForwardParams ff;
    NormParams norm3;
};

struct ParamGroup {
    std::string name;
    std::vector<num::Parameter*> params;
};

struct ModelParameters {
    num::Parameter token_embed;    // vocab x h, also the static half of candidate rows
    num::Parameter position_embed; // max_tokens x h
    num::Parameter modality_embed; // 2 x h: image, text
    num::Parameter image_proj;     // d_img x h
    num::Parameter image_bias;     // 1 x h
    std::vector<EncoderLayerParams> encoder;

    aed::A3MParams a3m;
    aed::SenticParams sentic;
    std::vector<aed::GcnLayerParams> gcn;

    num::Parameter bos_embed;  // 1 x h
    num::Parameter step_embed; // max_steps x h
    std::vector<DecoderLayerParams> decoder;
    num::Parameter out_proj; // h x h
    num::Parameter out_bias; // 1 x h
    num::Parameter class_embed; // 3 x h, one row per polarity
    num::Parameter eos_embed;   // 1 x h

    static ModelParameters init(const ModelConfig& cfg, std::size_t vocab_size,
                                std::size_t image_dim);

    /// Stable order; used for serialization and updates.
    std::vector<num::Parameter*> all();
    /// embedding, encoder, a3m, sentic, gcn, decoder, classes
    std::vector<ParamGroup> groups();
    void zero_grad();
};

/// Intermediate states of one forward pass over a sample.
struct ForwardPass {
    num::Var encoded;         // (m+n) x h
    num::Var token_embedding; // n x h static rows
    num::Var denoised;        // attention output, (m+n) x h
    num::Var attention;       // (m+n) x k, invalid when bypassed
    num::Var gates;           // (m+n) x 1, invalid when bypassed
    num::Var enhanced;        // after lexicon enhancement
    num::Var adjacency;       // association matrix
    num::Var refined;         // graph output
    num::Var fused;
    num::Var candidates;      // (n+4) x h output candidates
    std::size_t image_count = 0;
    std::size_t text_count = 0;
};

/// alpha_aed * denoised + alpha_gcn * refined
num::Var fuse(num::Var denoised, num::Var refined, double alpha_aed, double alpha_gcn);

class Model {
public:
    Model(ModelConfig cfg, Vocabulary vocab, std::size_t image_dim);
    Model(ModelConfig cfg, Vocabulary vocab, std::size_t image_dim, ModelParameters params);

    const ModelConfig& config() const noexcept { return config_; }
    ModelConfig& config() noexcept { return config_; }
    const Vocabulary& vocab() const noexcept { return vocab_; }
    std::size_t image_dim() const noexcept { return image_dim_; }
    ModelParameters& params() noexcept { return params_; }

    /// (m+n) x h encoder states: projected image blocks followed by token states.
    num::Var encode(num::Graph& g, const MultimodalSample& s);

    ForwardPass forward(num::Graph& g, const MultimodalSample& s, AspectSource source);

    /// Decoder hidden states for inputs [BOS, y_0, ..., y_{k-1}]; (k+1) x h.
    num::Var decode(num::Graph& g, const ForwardPass& f, std::span<const std::size_t> prefix);
    /// (k+1) x (n+4) candidate scores.
    num::Var logits(num::Graph& g, const ForwardPass& f, std::span<const std::size_t> prefix);

    /// P(y_t | prefix) over the n+4 output candidates.
    std::vector<double> decoder_distribution(const MultimodalSample& s,
                                             std::span<const std::size_t> prefix);

    /// Teacher-forced -sum log P(y_t | y_<t) of the gold target sequence.
    num::Var sequence_loss(num::Graph& g, const MultimodalSample& s);
    double sequence_loss(const MultimodalSample& s);

    /// Greedy masked decoding; the result always satisfies check_aspects.
    std::vector<AspectAnnotation> predict(const MultimodalSample& s);
    /// Gold spans are given; only each polarity is predicted.
    std::vector<AspectAnnotation> predict_polarities(const MultimodalSample& s);

    /// value -= lr * scale * grad for every trainable parameter (after clipping).
    void sgd_step(double scale);

private:
    num::Var attend(num::Graph& g, num::Var queries, num::Var keys, AttentionParams& p,
                    bool causal);
    num::Var norm(num::Graph& g, num::Var x, NormParams& p);
    num::Var feed_forward(num::Graph& g, num::Var x, FeedForwardParams& p);
    std::vector<std::size_t> token_ids(const MultimodalSample& s) const;
    std::size_t argmax_logit(const num::Matrix& logits, std::size_t row,
                             const std::vector<bool>& allowed) const;

    ModelConfig config_;
    Vocabulary vocab_;
    std::size_t image_dim_;
    ModelParameters params_;
};

} // namespace mabsa::model
