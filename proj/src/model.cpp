#include "mabsa/model.hpp"

#include "mabsa/errors.hpp"
#include "mabsa/rng.hpp"

#include <cmath>

namespace mabsa::model {

using num::Matrix;
using num::Parameter;
using num::Var;

void ModelConfig::validate() const
{
    if (hidden < 1 || encoder_layers < 1 || decoder_layers < 1 || gcn_layers < 1) {
        throw ContractError("model dimensions and layer counts must be at least 1");
    }
    if (!(fusion_aed >= 0.0 && fusion_gcn >= 0.0 && fusion_aed + fusion_gcn > 0.0)) {
        throw ContractError("fusion weights must be non-negative with a positive sum");
    }
    if (!(learning_rate > 0.0)) {
        throw ContractError("learning rate must be positive");
    }
    if (batch_size < 1 || max_aspects < 1 || max_tokens < 1) {
        throw ContractError("batch_size, max_aspects and max_tokens must be at least 1");
    }
    if (association_threshold < 0) {
        throw ContractError("association threshold must be non-negative");
    }
    if (grad_clip < 0.0) {
        throw ContractError("grad_clip must be non-negative");
    }
}

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{"<unk>"}) { }

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words))
{
    if (words_.empty()) {
        throw ContractError("vocabulary needs the reserved UNK entry");
    }
    for (std::size_t i = 0; i < words_.size(); ++i) {
        index_.emplace(words_[i], i);
    }
}

Vocabulary Vocabulary::build(const Dataset& d)
{
    std::vector<std::string> words{"<unk>"};
    std::unordered_map<std::string, std::size_t> seen{{"<unk>", 0}};
    for (const auto& s : d.samples) {
        for (const auto& t : s.tokens) {
            if (seen.emplace(t, words.size()).second) {
                words.push_back(t);
            }
        }
    }
    return Vocabulary(std::move(words));
}

std::size_t Vocabulary::id(const std::string& token) const
{
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
}

namespace {

AttentionParams init_attention(const std::string& prefix, std::size_t h, Rng& rng)
{
    return {num::uniform_parameter(prefix + ".query", h, h, h, rng),
            num::uniform_parameter(prefix + ".key", h, h, h, rng),
            num::uniform_parameter(prefix + ".value", h, h, h, rng),
            num::uniform_parameter(prefix + ".output", h, h, h, rng)};
}

NormParams init_norm(const std::string& prefix, std::size_t h)
{
    return {Parameter(prefix + ".gain", Matrix(1, h, 1.0)), Parameter(prefix + ".bias", Matrix(1, h))};
}

FeedForwardParams init_ff(const std::string& prefix, std::size_t h, Rng& rng)
{
    const std::size_t inner = 2 * h;
    return {num::uniform_parameter(prefix + ".in_weight", h, inner, h, rng),
            Parameter(prefix + ".in_bias", Matrix(1, inner)),
            num::uniform_parameter(prefix + ".out_weight", inner, h, inner, rng),
            Parameter(prefix + ".out_bias", Matrix(1, h))};
}

void append(std::vector<Parameter*>& out, AttentionParams& a)
{
    out.insert(out.end(), {&a.query, &a.key, &a.value, &a.output});
}

void append(std::vector<Parameter*>& out, NormParams& n)
{
    out.insert(out.end(), {&n.gain, &n.bias});
}

void append(std::vector<Parameter*>& out, FeedForwardParams& f)
{
    out.insert(out.end(), {&f.in_weight, &f.in_bias, &f.out_weight, &f.out_bias});
}

} // namespace

ModelParameters ModelParameters::init(const ModelConfig& cfg, std::size_t vocab_size,
                                      std::size_t image_dim)
{
    cfg.validate();
    if (image_dim < 1 || vocab_size < 1) {
        throw ContractError("image dimension and vocabulary size must be at least 1");
    }
    Rng rng(cfg.seed);
    const std::size_t h = cfg.hidden;
    ModelParameters p;
    p.token_embed = num::uniform_parameter("token_embed", vocab_size, h, h, rng);
    p.position_embed = num::uniform_parameter("position_embed", cfg.max_tokens, h, h, rng);
    p.modality_embed = num::uniform_parameter("modality_embed", 2, h, h, rng);
    p.image_proj = num::uniform_parameter("image_proj", image_dim, h, image_dim, rng);
    p.image_bias = Parameter("image_bias", Matrix(1, h));
    for (std::size_t l = 0; l < cfg.encoder_layers; ++l) {
        const std::string prefix = "encoder" + std::to_string(l);
        EncoderLayerParams layer;
        layer.attention = init_attention(prefix + ".attention", h, rng);
        layer.norm1 = init_norm(prefix + ".norm1", h);
        layer.ff = init_ff(prefix + ".ff", h, rng);
        layer.norm2 = init_norm(prefix + ".norm2", h);
        p.encoder.push_back(std::move(layer));
    }
    p.a3m = aed::A3MParams::init(h, rng);
    p.sentic = aed::SenticParams::init(h, rng);
    for (std::size_t l = 0; l < cfg.gcn_layers; ++l) {
        p.gcn.push_back(aed::GcnLayerParams::init(h, l, rng));
    }
    p.bos_embed = num::uniform_parameter("bos_embed", 1, h, h, rng);
    p.step_embed = num::uniform_parameter("step_embed", cfg.max_steps(), h, h, rng);
    for (std::size_t l = 0; l < cfg.decoder_layers; ++l) {
        const std::string prefix = "decoder" + std::to_string(l);
        DecoderLayerParams layer;
        layer.self_attention = init_attention(prefix + ".self_attention", h, rng);
        layer.norm1 = init_norm(prefix + ".norm1", h);
        layer.cross_attention = init_attention(prefix + ".cross_attention", h, rng);
        layer.norm2 = init_norm(prefix + ".norm2", h);
        layer.ff = init_ff(prefix + ".ff", h, rng);
        layer.norm3 = init_norm(prefix + ".norm3", h);
        p.decoder.push_back(std::move(layer));
    }
    p.out_proj = num::uniform_parameter("out_proj", h, h, h, rng);
    p.out_bias = Parameter("out_bias", Matrix(1, h));
    p.class_embed = num::uniform_parameter("class_embed", kPolarityCount, h, h, rng);
    p.eos_embed = num::uniform_parameter("eos_embed", 1, h, h, rng);
    return p;
}

std::vector<ParamGroup> ModelParameters::groups()
{
    std::vector<ParamGroup> out;

    ParamGroup emb{"embedding", {&token_embed, &position_embed, &modality_embed, &image_proj, &image_bias}};
    out.push_back(std::move(emb));

    ParamGroup enc{"encoder", {}};
    for (auto& l : encoder) {
        append(enc.params, l.attention);
        append(enc.params, l.norm1);
        append(enc.params, l.ff);
        append(enc.params, l.norm2);
    }
    out.push_back(std::move(enc));

    out.push_back({"a3m", a3m.all()});
    out.push_back({"sentic", sentic.all()});

    ParamGroup graph{"gcn", {}};
    for (auto& l : gcn) {
        graph.params.insert(graph.params.end(), {&l.weight, &l.bias});
    }
    out.push_back(std::move(graph));

    ParamGroup dec{"decoder", {&bos_embed, &step_embed}};
    for (auto& l : decoder) {
        append(dec.params, l.self_attention);
        append(dec.params, l.norm1);
        append(dec.params, l.cross_attention);
        append(dec.params, l.norm2);
        append(dec.params, l.ff);
        append(dec.params, l.norm3);
    }
    dec.params.insert(dec.params.end(), {&out_proj, &out_bias});
    out.push_back(std::move(dec));

    out.push_back({"classes", {&class_embed, &eos_embed}});
    return out;
}

std::vector<Parameter*> ModelParameters::all()
{
    std::vector<Parameter*> out;
    for (auto& group : groups()) {
        out.insert(out.end(), group.params.begin(), group.params.end());
    }
    return out;
}

void ModelParameters::zero_grad()
{
    for (Parameter* p : all()) {
        p->zero_grad();
    }
}

Var fuse(Var denoised, Var refined, double alpha_aed, double alpha_gcn)
{
    if (denoised.rows() != refined.rows() || denoised.cols() != refined.cols()) {
        throw ContractError("fuse: shape " + denoised.value().shape_string() + " vs " +
                            refined.value().shape_string());
    }
    return add(affine(denoised, alpha_aed, 0.0), affine(refined, alpha_gcn, 0.0));
}

Model::Model(ModelConfig cfg, Vocabulary vocab, std::size_t image_dim)
  : Model(cfg, std::move(vocab), image_dim, ModelParameters{})
{
    params_ = ModelParameters::init(config_, vocab_.size(), image_dim_);
}

Model::Model(ModelConfig cfg, Vocabulary vocab, std::size_t image_dim, ModelParameters params)
  : config_(cfg), vocab_(std::move(vocab)), image_dim_(image_dim), params_(std::move(params))
{
    config_.validate();
}

std::vector<std::size_t> Model::token_ids(const MultimodalSample& s) const
{
    std::vector<std::size_t> ids(s.tokens.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ids[i] = vocab_.id(s.tokens[i]);
    }
    return ids;
}

Var Model::attend(num::Graph& g, Var queries, Var keys, AttentionParams& p, bool causal)
{
    Var q = matmul(queries, g.param(p.query));
    Var k = matmul(keys, g.param(p.key));
    Var v = matmul(keys, g.param(p.value));
    Var scores = affine(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(config_.hidden)), 0.0);
    if (causal) {
        Matrix mask(scores.rows(), scores.cols());
        for (std::size_t r = 0; r < mask.rows(); ++r) {
            for (std::size_t c = r + 1; c < mask.cols(); ++c) {
                mask(r, c) = -1e9;
            }
        }
        scores = add(scores, g.constant(std::move(mask)));
    }
    return matmul(matmul(softmax_rows(scores), v), g.param(p.output));
}

Var Model::norm(num::Graph& g, Var x, NormParams& p)
{
    return add_row(mul_row(layer_norm_rows(x), g.param(p.gain)), g.param(p.bias));
}

Var Model::feed_forward(num::Graph& g, Var x, FeedForwardParams& p)
{
    Var inner = activation(add_row(matmul(x, g.param(p.in_weight)), g.param(p.in_bias)),
                           num::Activation::Relu);
    return add_row(matmul(inner, g.param(p.out_weight)), g.param(p.out_bias));
}

Var Model::encode(num::Graph& g, const MultimodalSample& s)
{
    const std::size_t m = s.block_count();
    const std::size_t n = s.token_count();
    if (m == 0 || n == 0) {
        throw ContractError("encode: sample '" + s.id + "' needs tokens and image blocks");
    }
    if (n > config_.max_tokens) {
        throw ContractError("encode: sample '" + s.id + "' has " + std::to_string(n) +
                            " tokens, limit is " + std::to_string(config_.max_tokens));
    }
    Matrix blocks(m, image_dim_);
    for (std::size_t b = 0; b < m; ++b) {
        if (s.image_blocks[b].size() != image_dim_) {
            throw DimensionError("encode: image block of dimension " +
                                 std::to_string(s.image_blocks[b].size()) + ", model expects " +
                                 std::to_string(image_dim_));
        }
        std::copy(s.image_blocks[b].begin(), s.image_blocks[b].end(), blocks.row(b).begin());
    }
    Var modality = g.param(params_.modality_embed);
    Var image = add_row(add_row(matmul(g.constant(std::move(blocks)), g.param(params_.image_proj)),
                                g.param(params_.image_bias)),
                        slice_rows(modality, 0, 1));

    const auto ids = token_ids(s);
    std::vector<std::size_t> positions(n);
    for (std::size_t i = 0; i < n; ++i) {
        positions[i] = i;
    }
    Var text = add_row(add(g.embedding(params_.token_embed, ids),
                           g.embedding(params_.position_embed, positions)),
                       slice_rows(modality, 1, 1));

    const Var parts[] = {image, text};
    Var x = concat_rows(parts);
    for (auto& layer : params_.encoder) {
        x = norm(g, add(x, attend(g, x, x, layer.attention, false)), layer.norm1);
        x = norm(g, add(x, feed_forward(g, x, layer.ff)), layer.norm2);
    }
    return x;
}

ForwardPass Model::forward(num::Graph& g, const MultimodalSample& s, AspectSource source)
{
    ForwardPass f;
    f.image_count = s.block_count();
    f.text_count = s.token_count();
    const std::size_t m = f.image_count;
    const std::size_t n = f.text_count;

    f.encoded = encode(g, s);
    const auto ids = token_ids(s);
    f.token_embedding = g.embedding(params_.token_embed, ids);

    if (config_.bypass_aesa) {
        f.denoised = f.encoded;
        f.enhanced = f.encoded;
    } else {
        std::vector<std::size_t> candidates;
        for (std::size_t k : noun_token_indices(s)) {
            candidates.push_back(m + k);
        }
        auto a3m = aed::a3m_attend(f.encoded, candidates, params_.a3m);
        f.denoised = a3m.states;
        f.attention = a3m.attention;
        f.gates = a3m.gates;
        f.enhanced = aed::sentic_enhance(f.denoised, s.sentic, m, params_.sentic);
    }

    const auto aspect_tokens =
        source == AspectSource::Gold ? aspect_token_indices(s) : noun_token_indices(s);
    f.adjacency = aed::build_association_matrix(f.denoised, s.dep_dist, aspect_tokens, m, n,
                                                config_.association_threshold);
    f.refined = aed::gcn_forward(f.adjacency, f.enhanced, params_.gcn);
    f.fused = fuse(f.denoised, f.refined, config_.fusion_aed, config_.fusion_gcn);

    Var text_states = slice_rows(f.fused, m, n);
    Var text_candidates = affine(add(f.token_embedding, text_states), 0.5, 0.0);
    const Var rows[] = {text_candidates, g.param(params_.class_embed), g.param(params_.eos_embed)};
    f.candidates = concat_rows(rows);
    return f;
}

Var Model::decode(num::Graph& g, const ForwardPass& f, std::span<const std::size_t> prefix)
{
    const OutputVocab vocab{f.text_count};
    if (prefix.size() + 1 > config_.max_steps()) {
        throw ContractError("decode: prefix of " + std::to_string(prefix.size()) +
                            " exceeds the step limit " + std::to_string(config_.max_steps()));
    }
    for (std::size_t y : prefix) {
        if (y >= vocab.size()) {
            throw ContractError("decode: prefix index " + std::to_string(y) + " outside vocabulary of " +
                                std::to_string(vocab.size()));
        }
        if (y == vocab.eos()) {
            throw ContractError("decode: prefix contains EOS");
        }
    }
    Var inputs = g.param(params_.bos_embed);
    if (!prefix.empty()) {
        const Var parts[] = {inputs, gather_rows(f.candidates, prefix)};
        inputs = concat_rows(parts);
    }
    std::vector<std::size_t> steps(prefix.size() + 1);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        steps[i] = i;
    }
    Var x = add(inputs, g.embedding(params_.step_embed, steps));
    for (auto& layer : params_.decoder) {
        x = norm(g, add(x, attend(g, x, x, layer.self_attention, true)), layer.norm1);
        x = norm(g, add(x, attend(g, x, f.fused, layer.cross_attention, false)), layer.norm2);
        x = norm(g, add(x, feed_forward(g, x, layer.ff)), layer.norm3);
    }
    return add_row(matmul(x, g.param(params_.out_proj)), g.param(params_.out_bias));
}

Var Model::logits(num::Graph& g, const ForwardPass& f, std::span<const std::size_t> prefix)
{
    return matmul(decode(g, f, prefix), transpose(f.candidates));
}

std::vector<double> Model::decoder_distribution(const MultimodalSample& s,
                                                std::span<const std::size_t> prefix)
{
    num::Graph g;
    ForwardPass f = forward(g, s, config_.train_aspects);
    Var scores = logits(g, f, prefix);
    Var last = slice_rows(scores, scores.rows() - 1, 1);
    return softmax_rows(last.value()).data();
}

Var Model::sequence_loss(num::Graph& g, const MultimodalSample& s)
{
    if (s.aspects.size() > config_.max_aspects) {
        throw ContractError("sample '" + s.id + "' has " + std::to_string(s.aspects.size()) +
                            " aspects, limit is " + std::to_string(config_.max_aspects));
    }
    const TargetSequence target = encode_target(s.aspects, s.token_count());
    ForwardPass f = forward(g, s, config_.train_aspects);
    std::span<const std::size_t> inputs(target.indices.data(), target.indices.size() - 1);
    Var logp = log_softmax_rows(logits(g, f, inputs));
    return affine(sum(pick_per_row(logp, target.indices)), -1.0, 0.0);
}

double Model::sequence_loss(const MultimodalSample& s)
{
    num::Graph g;
    return sequence_loss(g, s).scalar();
}

std::size_t Model::argmax_logit(const Matrix& scores, std::size_t row,
                                const std::vector<bool>& allowed) const
{
    std::size_t best = allowed.size();
    for (std::size_t c = 0; c < allowed.size(); ++c) {
        if (allowed[c] && (best == allowed.size() || scores(row, c) > scores(row, best))) {
            best = c;
        }
    }
    if (best == allowed.size()) {
        throw ContractError("argmax over an empty candidate mask");
    }
    return best;
}

std::vector<AspectAnnotation> Model::predict(const MultimodalSample& s)
{
    num::Graph g;
    ForwardPass f = forward(g, s, AspectSource::Nouns);
    const std::size_t n = s.token_count();
    const OutputVocab vocab{n};

    std::vector<std::size_t> seq;
    std::vector<AspectAnnotation> out;
    std::size_t next_free = 0; // first position a new span may start at
    while (true) {
        const std::size_t slot = seq.size() % 3;
        std::vector<bool> allowed(vocab.size(), false);
        if (slot == 0) {
            allowed[vocab.eos()] = true;
            if (out.size() < config_.max_aspects) {
                for (std::size_t p = next_free; p < n; ++p) {
                    allowed[p] = true;
                }
            }
        } else if (slot == 1) {
            for (std::size_t p = seq.back(); p < n; ++p) {
                allowed[p] = true;
            }
        } else {
            for (std::size_t c = 0; c < kPolarityCount; ++c) {
                allowed[vocab.polarity_index(static_cast<Polarity>(c))] = true;
            }
        }

        const bool only_eos = slot == 0 && (out.size() >= config_.max_aspects || next_free >= n);
        std::size_t choice = vocab.eos();
        if (!only_eos) {
            Var scores = logits(g, f, seq);
            choice = argmax_logit(scores.value(), scores.rows() - 1, allowed);
        }
        if (choice == vocab.eos()) {
            break;
        }
        seq.push_back(choice);
        if (slot == 2) {
            const std::size_t b = seq[seq.size() - 3];
            const std::size_t e = seq[seq.size() - 2];
            out.push_back({b, e, static_cast<Polarity>(choice - n)});
            next_free = e + 1;
        }
    }
    return out;
}

std::vector<AspectAnnotation> Model::predict_polarities(const MultimodalSample& s)
{
    if (s.aspects.empty()) {
        return {};
    }
    if (s.aspects.size() > config_.max_aspects) {
        throw ContractError("sample '" + s.id + "' exceeds the aspect limit");
    }
    num::Graph g;
    ForwardPass f = forward(g, s, AspectSource::Gold);
    const std::size_t n = s.token_count();
    const OutputVocab vocab{n};
    std::vector<bool> allowed(vocab.size(), false);
    for (std::size_t c = 0; c < kPolarityCount; ++c) {
        allowed[vocab.polarity_index(static_cast<Polarity>(c))] = true;
    }

    std::vector<std::size_t> seq;
    std::vector<AspectAnnotation> out;
    for (const auto& a : s.aspects) {
        seq.push_back(a.begin);
        seq.push_back(a.end);
        Var scores = logits(g, f, seq);
        const std::size_t choice = argmax_logit(scores.value(), scores.rows() - 1, allowed);
        seq.push_back(choice);
        out.push_back({a.begin, a.end, static_cast<Polarity>(choice - n)});
    }
    return out;
}

void Model::sgd_step(double scale)
{
    auto params = params_.all();
    double factor = scale;
    if (config_.grad_clip > 0.0) {
        double sq = 0.0;
        for (Parameter* p : params) {
            if (p->trainable) {
                for (double v : p->grad.data()) {
                    sq += v * v;
                }
            }
        }
        const double norm = std::sqrt(sq) * scale;
        if (norm > config_.grad_clip) {
            factor *= config_.grad_clip / norm;
        }
    }
    const double step = config_.learning_rate * factor;
    for (Parameter* p : params) {
        if (!p->trainable) {
            continue;
        }
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            p->value[i] -= step * p->grad[i];
        }
    }
}

} // namespace mabsa::model
