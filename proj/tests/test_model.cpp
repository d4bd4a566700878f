#include "mabsa/config.hpp"
#include "mabsa/errors.hpp"
#include "mabsa/gradcheck.hpp"
#include "mabsa/model.hpp"
#include "mabsa/rng.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace mabsa;
using namespace mabsa::model;
using num::Graph;
using num::Matrix;
using testing_support::make_sample;

namespace {

ModelConfig small_config(std::uint64_t seed = 1)
{
    ModelConfig c;
    c.hidden = 8;
    c.max_tokens = 12;
    c.max_aspects = 3;
    c.seed = seed;
    return c;
}

Vocabulary vocab_for(const MultimodalSample& s)
{
    Dataset d;
    d.samples.push_back(s);
    return Vocabulary::build(d);
}

MultimodalSample annotated_sample(std::uint64_t seed = 3)
{
    auto s = make_sample("a", 6, 3, seed);
    s.aspects = {{1, 1, Polarity::Positive}, {3, 4, Polarity::Negative}};
    s.noun_flags[4] = true;
    return s;
}

// Three tokens, two blocks: the smallest sample that touches every group.
MultimodalSample tiny_sample(std::uint64_t seed)
{
    Rng rng(seed);
    MultimodalSample s;
    s.id = "g";
    s.tokens = {"the", "screen", "glows"};
    s.noun_flags = {false, true, false};
    s.image_blocks.assign(2, std::vector<double>(4));
    for (auto& b : s.image_blocks) {
        for (double& x : b) {
            x = rng.normal();
        }
    }
    s.text_embed = {1, 0, 0, 0};
    s.image_embed = {1, 1, 0, 0};
    s.dep_dist = {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
    s.sentic = {0.1, 0.6, -0.3};
    s.aspects = {{1, 1, Polarity::Positive}};
    return s;
}

double sum_of(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0);
}

} // namespace

TEST(Model, EncodeShapeAndDeterminism)
{
    const auto s = make_sample("x", 3, 2, 1);
    Model a(small_config(), vocab_for(s), 4);
    Model b(small_config(), vocab_for(s), 4);
    Graph g1, g2;
    const auto h1 = a.encode(g1, s).value();
    const auto h2 = b.encode(g2, s).value();
    EXPECT_EQ(h1.rows(), 5u);
    EXPECT_EQ(h1.cols(), 8u);
    EXPECT_EQ(h1, h2);
}

TEST(Model, EncodeGradientWrtEmbeddingTable)
{
    const auto s = make_sample("x", 4, 2, 2);
    Model model(small_config(), vocab_for(s), 4);
    Rng rng(5);
    Matrix w(6, 8);
    for (double& v : w.data()) {
        v = rng.uniform(-1.0, 1.0);
    }
    num::Parameter* ps[] = {&model.params().token_embed};
    const double err = num::finite_diff_check(
        [&](Graph& g) { return num::sum(num::mul(model.encode(g, s), g.constant(w))); }, ps);
    EXPECT_LT(err, 1e-4);
}

TEST(Model, UnknownTokensShareTheReservedRow)
{
    auto s = make_sample("x", 3, 2, 4);
    Model model(small_config(), vocab_for(s), 4);
    EXPECT_EQ(model.vocab().id("never-seen"), Vocabulary::kUnk);
    EXPECT_EQ(model.vocab().words()[0], "<unk>");

    auto u1 = s, u2 = s;
    u1.tokens[0] = "zzz";
    u2.tokens[0] = "qqq";
    Graph g;
    EXPECT_EQ(model.encode(g, u1).value(), model.encode(g, u2).value());
    EXPECT_NE(model.encode(g, u1).value(), model.encode(g, s).value());
}

TEST(Model, EncodeRejectsBadSamples)
{
    const auto s = make_sample("x", 3, 2, 1);
    Model model(small_config(), vocab_for(s), 4);
    Graph g;
    EXPECT_THROW(model.encode(g, make_sample("y", 3, 2, 1, 5)), DimensionError);
    EXPECT_THROW(model.encode(g, make_sample("y", 13, 2, 1)), ContractError);
}

TEST(Fuse, Examples)
{
    Graph g;
    auto a = g.constant(Matrix{{2.0, -1.0}});
    auto b = g.constant(Matrix{{4.0, 3.0}});
    EXPECT_EQ(fuse(a, b, 0.5, 0.5).value(), (Matrix{{3.0, 1.0}}));
    EXPECT_EQ(fuse(a, b, 1.0, 0.0).value(), a.value());
    EXPECT_EQ(fuse(a, b, 0.0, 1.0).value(), b.value());
    EXPECT_THROW(fuse(a, g.constant(Matrix(2, 2)), 0.5, 0.5), ContractError);
}

TEST(Decoder, DistributionIsNormalizedOverEveryReachablePrefix)
{
    const auto s = annotated_sample();
    Model model(small_config(), vocab_for(s), 4);
    const auto target = encode_target(s.aspects, s.token_count());
    for (std::size_t t = 0; t < target.indices.size(); ++t) {
        const std::span<const std::size_t> prefix(target.indices.data(), t);
        const auto p = model.decoder_distribution(s, prefix);
        ASSERT_EQ(p.size(), s.token_count() + 4);
        EXPECT_NEAR(sum_of(p), 1.0, 1e-12);
        for (double v : p) {
            EXPECT_GT(v, 0.0);
        }
    }
}

TEST(Decoder, ZeroOutputLayerGivesUniformDistribution)
{
    const auto s = annotated_sample();
    Model model(small_config(), vocab_for(s), 4);
    model.params().out_proj.value.fill(0.0);
    model.params().out_bias.value.fill(0.0);
    const std::size_t prefix[] = {1, 1};
    for (double v : model.decoder_distribution(s, prefix)) {
        EXPECT_NEAR(v, 1.0 / 10.0, 1e-15);
    }
}

TEST(Decoder, PrefixErrors)
{
    const auto s = annotated_sample();
    Model model(small_config(), vocab_for(s), 4);
    const std::size_t with_eos[] = {1, 1, 6, 9, 2};
    EXPECT_THROW(model.decoder_distribution(s, with_eos), ContractError);
    const std::size_t out_of_range[] = {10};
    EXPECT_THROW(model.decoder_distribution(s, out_of_range), ContractError);
}

TEST(Loss, TeacherForcedSumMatchesSequenceLoss)
{
    const auto s = annotated_sample();
    Model model(small_config(), vocab_for(s), 4);
    const auto target = encode_target(s.aspects, s.token_count());
    double total = 0.0;
    for (std::size_t t = 0; t < target.indices.size(); ++t) {
        const std::span<const std::size_t> prefix(target.indices.data(), t);
        total -= std::log(model.decoder_distribution(s, prefix)[target.indices[t]]);
    }
    const double loss = model.sequence_loss(s);
    EXPECT_GT(loss, 0.0);
    EXPECT_NEAR(total, loss, 1e-12);
}

TEST(Loss, BatchMeanOfSampleLosses)
{
    std::vector<MultimodalSample> batch{annotated_sample(3), annotated_sample(4), annotated_sample(5)};
    Dataset d{batch};
    Model model(small_config(), Vocabulary::build(d), 4);
    Graph g;
    std::vector<num::Var> losses;
    double mean = 0.0;
    for (const auto& s : batch) {
        losses.push_back(model.sequence_loss(g, s));
        mean += model.sequence_loss(s) / 3.0;
    }
    const auto batch_loss = num::affine(num::sum(num::concat_rows(losses)), 1.0 / 3.0, 0.0);
    EXPECT_NEAR(batch_loss.scalar(), mean, 1e-12);
}

TEST(Loss, EmptyAnnotationStillPositive)
{
    auto s = annotated_sample();
    s.aspects.clear();
    Model model(small_config(), vocab_for(s), 4);
    EXPECT_GT(model.sequence_loss(s), 0.0);
}

TEST(Loss, NoiseFlagIsNotAnInput)
{
    auto s = annotated_sample();
    Model model(small_config(), vocab_for(s), 4);
    s.noise_flag = false;
    const double clean = model.sequence_loss(s);
    s.noise_flag = true;
    EXPECT_EQ(model.sequence_loss(s), clean);
    s.noise_flag.reset();
    EXPECT_EQ(model.sequence_loss(s), clean);
}

TEST(Loss, GraphBranchIsInertWithoutItsFusionWeight)
{
    const auto s = annotated_sample();
    auto cfg = small_config();
    cfg.fusion_gcn = 0.0;
    cfg.fusion_aed = 1.0;
    Model model(cfg, vocab_for(s), 4);
    const double before = model.sequence_loss(s);
    Graph g;
    model.params().zero_grad();
    g.backward(model.sequence_loss(g, s));
    for (auto& layer : model.params().gcn) {
        for (double v : layer.weight.grad.data()) {
            EXPECT_EQ(v, 0.0);
        }
        for (double v : layer.bias.grad.data()) {
            EXPECT_EQ(v, 0.0);
        }
        for (double& v : layer.weight.value.data()) {
            v *= -3.0;
        }
    }
    EXPECT_EQ(model.sequence_loss(s), before);
}

ModelConfig gradcheck_config(std::uint64_t seed)
{
    auto cfg = small_config(seed);
    cfg.max_tokens = 4;
    cfg.max_aspects = 2;
    return cfg;
}

TEST(Loss, FullPipelineGradientCheck)
{
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto s = tiny_sample(seed);
        Model model(gradcheck_config(seed), vocab_for(s), 4);
        for (const auto& group : model.params().groups()) {
            const auto report = num::finite_diff_report(
                [&](Graph& g) { return model.sequence_loss(g, s); }, group.params);
            for (const auto& e : report.per_parameter) {
                EXPECT_LT(e.max_rel_error, 1e-4)
                    << e.name << " seed " << seed << " index " << e.worst_index << ": analytic "
                    << e.analytic << " numeric " << e.numeric;
            }
        }
    }
}

// Coordinates with |g| near 1e-7 sit at the roundoff floor of central
// differences (about eps * loss / step), so other seeds use an absolute slack.
TEST(Loss, GradientCheckAcrossSeedsWithRoundoffSlack)
{
    for (std::uint64_t seed = 4; seed <= 10; ++seed) {
        const auto s = tiny_sample(seed);
        Model model(gradcheck_config(seed), vocab_for(s), 4);
        const double loss = model.sequence_loss(s);
        const double slack = 100.0 * 2.2e-16 * loss / 1e-5;
        const auto params = model.params().all();
        model.params().zero_grad();
        {
            Graph g;
            g.backward(model.sequence_loss(g, s));
        }
        for (num::Parameter* p : params) {
            const auto analytic = p->grad;
            for (std::size_t i = 0; i < p->value.size(); ++i) {
                const double saved = p->value[i];
                p->value[i] = saved + 1e-5;
                const double up = model.sequence_loss(s);
                p->value[i] = saved - 1e-5;
                const double down = model.sequence_loss(s);
                p->value[i] = saved;
                const double numeric = (up - down) / 2e-5;
                const double bound = 1e-4 * std::max(std::abs(analytic[i]), std::abs(numeric)) + slack;
                ASSERT_LE(std::abs(analytic[i] - numeric), bound) << p->name << "[" << i << "] seed " << seed;
            }
        }
    }
}

TEST(Loss, OverfitsOneSample)
{
    const auto s = annotated_sample();
    auto cfg = small_config(3);
    cfg.hidden = 16;
    cfg.learning_rate = 0.2;
    cfg.grad_clip = 1.0;
    Model model(cfg, vocab_for(s), 4);
    double previous = model.sequence_loss(s);
    for (int step = 0; step < 50; ++step) {
        Graph g;
        model.params().zero_grad();
        g.backward(model.sequence_loss(g, s));
        model.sgd_step(1.0);
        const double loss = model.sequence_loss(s);
        EXPECT_LT(loss, previous) << "step " << step;
        previous = loss;
    }
    EXPECT_LT(previous, 0.1);
    for (int step = 0; step < 200 && previous >= 0.01; ++step) {
        Graph g;
        model.params().zero_grad();
        g.backward(model.sequence_loss(g, s));
        model.sgd_step(1.0);
        previous = model.sequence_loss(s);
    }
    ASSERT_LT(previous, 0.01);
    EXPECT_EQ(model.predict(s), s.aspects);
    EXPECT_EQ(model.predict_polarities(s), s.aspects);
}

TEST(Predict, AlwaysWellFormedUnderRandomParameters)
{
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Rng rng(seed);
        const auto n = static_cast<std::size_t>(rng.integer(2, 10));
        const auto s = make_sample("r", n, static_cast<std::size_t>(rng.integer(1, 4)), seed);
        Model model(small_config(seed), vocab_for(s), 4);
        const auto out = model.predict(s);
        EXPECT_LE(out.size(), 3u);
        for (const auto& a : out) {
            EXPECT_LE(a.begin, a.end);
            EXPECT_LT(a.end, n);
        }
        EXPECT_NO_THROW(check_aspects(out, n));
        EXPECT_NO_THROW(decode_target(encode_target(out, n), n));
    }
}

TEST(Predict, EndOfSequenceFirstGivesNoAspects)
{
    const auto s = annotated_sample();
    Model model(small_config(), vocab_for(s), 4);
    auto& p = model.params();
    p.out_proj.value.fill(0.0);
    p.out_bias.value.fill(30.0);
    p.eos_embed.value.fill(30.0);
    EXPECT_TRUE(model.predict(s).empty());
}

TEST(Predict, PolaritiesKeepGoldSpans)
{
    const auto s = annotated_sample();
    Model model(small_config(), vocab_for(s), 4);
    const auto out = model.predict_polarities(s);
    ASSERT_EQ(out.size(), s.aspects.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        EXPECT_EQ(out[i].begin, s.aspects[i].begin);
        EXPECT_EQ(out[i].end, s.aspects[i].end);
    }
}

TEST(ModelConfig, Validation)
{
    auto c = small_config();
    c.hidden = 0;
    EXPECT_THROW(c.validate(), ContractError);
    c = small_config();
    c.fusion_aed = 0.0;
    c.fusion_gcn = 0.0;
    EXPECT_THROW(c.validate(), ContractError);
    c = small_config();
    c.learning_rate = 0.0;
    EXPECT_THROW(c.validate(), ContractError);
    EXPECT_EQ(small_config().max_steps(), 10u);
}

TEST(ModelFile, RoundTrip)
{
    const auto s = annotated_sample();
    Model model(small_config(9), vocab_for(s), 4);
    const auto path = testing_support::scratch_dir("model_file") / "params.json";
    config::save_model(model, path);
    Model loaded = config::load_model(path);
    EXPECT_EQ(loaded.vocab().words(), model.vocab().words());
    EXPECT_EQ(loaded.image_dim(), 4u);
    auto a = model.params().all();
    auto b = loaded.params().all();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i]->name, b[i]->name);
        EXPECT_EQ(a[i]->value, b[i]->value) << a[i]->name;
    }
    EXPECT_EQ(loaded.sequence_loss(s), model.sequence_loss(s));
}
