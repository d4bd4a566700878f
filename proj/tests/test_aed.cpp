#include "mabsa/aed.hpp"
#include "mabsa/errors.hpp"
#include "mabsa/gradcheck.hpp"
#include "mabsa/rng.hpp"
#include "mabsa/synth.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace mabsa;
using namespace mabsa::aed;
using num::Graph;
using num::Matrix;
using num::Parameter;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng)
{
    Matrix m(r, c);
    for (double& v : m.data()) {
        v = rng.uniform(-1.0, 1.0);
    }
    return m;
}

void randomize(A3MParams& p, Rng& rng)
{
    for (Parameter* q : p.all()) {
        q->value = random_matrix(q->value.rows(), q->value.cols(), rng);
    }
}

// Row vector times matrix, plain loops.
std::vector<double> vecmat(std::span<const double> v, const Matrix& m)
{
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            out[j] += v[k] * m(k, j);
        }
    }
    return out;
}

struct A3MOracle {
    Matrix attention, gates, states;
};

// Element-by-element evaluation of the attention, pooling and gate formulas.
A3MOracle a3m_oracle(const Matrix& H, const std::vector<std::size_t>& cand, const A3MParams& p)
{
    const std::size_t L = H.rows(), h = H.cols(), k = cand.size();
    A3MOracle o{Matrix(L, k), Matrix(L, 1), Matrix(L, h)};
    for (std::size_t t = 0; t < L; ++t) {
        auto q = vecmat(H.row(t), p.state_proj.value);
        std::vector<double> scores(k);
        for (std::size_t i = 0; i < k; ++i) {
            auto pc = vecmat(H.row(cand[i]), p.candidate_proj.value);
            double s = p.score_bias.value[0];
            for (std::size_t d = 0; d < h; ++d) {
                const double z = std::tanh(pc[d] + p.candidate_bias.value[d] + q[d] + p.state_bias.value[d]);
                s += z * p.score_weight.value[d];
            }
            scores[i] = s;
        }
        const double mx = *std::max_element(scores.begin(), scores.end());
        double z = 0.0;
        for (double s : scores) {
            z += std::exp(s - mx);
        }
        std::vector<double> pooled(h, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            o.attention(t, i) = std::exp(scores[i] - mx) / z;
            for (std::size_t d = 0; d < h; ++d) {
                pooled[d] += o.attention(t, i) * H(cand[i], d);
            }
        }
        const auto g1 = vecmat(H.row(t), p.gate_state_proj.value);
        const auto g2 = vecmat(pooled, p.gate_aspect_proj.value);
        double logit = p.gate_bias.value[0];
        for (std::size_t d = 0; d < h; ++d) {
            logit += g1[d] * p.gate_weight.value[d] + g2[d] * p.gate_weight.value[h + d];
        }
        const double beta = 1.0 / (1.0 + std::exp(-logit));
        o.gates(t, 0) = beta;
        for (std::size_t d = 0; d < h; ++d) {
            o.states(t, d) = beta * H(t, d) + (1.0 - beta) * pooled[d];
        }
    }
    return o;
}

A3MParams make_a3m(std::size_t h, std::uint64_t seed)
{
    Rng rng(seed);
    auto p = A3MParams::init(h, rng);
    randomize(p, rng);
    return p;
}

std::vector<std::vector<int>> path_distances(std::size_t n)
{
    std::vector<std::vector<int>> d(n, std::vector<int>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            d[i][j] = static_cast<int>(i > j ? i - j : j - i);
        }
    }
    return d;
}

} // namespace

TEST(A3M, MatchesLiteralPerPositionOracle)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed * 31);
        const std::size_t h = 5, L = 7;
        const Matrix H = random_matrix(L, h, rng);
        const std::vector<std::size_t> cand{4, 1, 6};
        auto p = make_a3m(h, seed);
        const auto expected = a3m_oracle(H, cand, p);

        Graph g;
        const auto out = a3m_attend(g.constant(H), cand, p);
        for (std::size_t i = 0; i < expected.attention.size(); ++i) {
            EXPECT_NEAR(out.attention.value()[i], expected.attention[i], 1e-12);
        }
        for (std::size_t i = 0; i < L; ++i) {
            EXPECT_NEAR(out.gates.value()[i], expected.gates[i], 1e-12);
        }
        for (std::size_t i = 0; i < expected.states.size(); ++i) {
            EXPECT_NEAR(out.states.value()[i], expected.states[i], 1e-12);
        }
    }
}

TEST(A3M, SingleCandidate)
{
    Rng rng(2);
    const Matrix H = random_matrix(4, 3, rng);
    auto p = make_a3m(3, 2);
    Graph g;
    const std::size_t cand[] = {2};
    const auto out = a3m_attend(g.constant(H), cand, p);
    for (std::size_t t = 0; t < 4; ++t) {
        EXPECT_EQ(out.attention.value()(t, 0), 1.0);
        const double beta = out.gates.value()(t, 0);
        for (std::size_t d = 0; d < 3; ++d) {
            EXPECT_NEAR(out.states.value()(t, d), beta * H(t, d) + (1 - beta) * H(2, d), 1e-12);
        }
    }
}

TEST(A3M, ZeroScorerGivesUniformAttention)
{
    Rng rng(3);
    const Matrix H = random_matrix(5, 4, rng);
    auto p = make_a3m(4, 3);
    p.score_weight.value.fill(0.0);
    p.score_bias.value.fill(0.0);
    Graph g;
    const std::size_t cand[] = {0, 2, 3, 4};
    const auto out = a3m_attend(g.constant(H), cand, p);
    for (double a : out.attention.value().data()) {
        EXPECT_NEAR(a, 0.25, 1e-15);
    }
}

TEST(A3M, ZeroGateIsEvenMix)
{
    Rng rng(4);
    const Matrix H = random_matrix(3, 4, rng);
    auto p = make_a3m(4, 4);
    for (Parameter* q : {&p.gate_weight, &p.gate_state_proj, &p.gate_aspect_proj, &p.gate_bias}) {
        q->value.fill(0.0);
    }
    Graph g;
    const std::size_t cand[] = {0, 1};
    const auto out = a3m_attend(g.constant(H), cand, p);
    const Matrix pooled = num::matmul(out.attention.value(), Matrix{{H(0, 0), H(0, 1), H(0, 2), H(0, 3)},
                                                                    {H(1, 0), H(1, 1), H(1, 2), H(1, 3)}});
    for (std::size_t t = 0; t < 3; ++t) {
        EXPECT_EQ(out.gates.value()(t, 0), 0.5);
        for (std::size_t d = 0; d < 4; ++d) {
            EXPECT_NEAR(out.states.value()(t, d), 0.5 * (H(t, d) + pooled(t, d)), 1e-12);
        }
    }
}

TEST(A3M, InvariantsOnRandomInputs)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        const Matrix H = random_matrix(6, 4, rng);
        auto p = make_a3m(4, seed + 100);
        std::vector<std::size_t> cand{0, 3, 5};
        Graph g;
        const auto out = a3m_attend(g.constant(H), cand, p);
        for (std::size_t t = 0; t < 6; ++t) {
            double total = 0.0;
            for (double a : out.attention.value().row(t)) {
                total += a;
            }
            EXPECT_NEAR(total, 1.0, 1e-12);
            const double beta = out.gates.value()(t, 0);
            EXPECT_GT(beta, 0.0);
            EXPECT_LT(beta, 1.0);
            for (std::size_t d = 0; d < 4; ++d) {
                double hA = 0.0;
                for (std::size_t i = 0; i < cand.size(); ++i) {
                    hA += out.attention.value()(t, i) * H(cand[i], d);
                }
                const double v = out.states.value()(t, d);
                EXPECT_GE(v, std::min(H(t, d), hA) - 1e-12);
                EXPECT_LE(v, std::max(H(t, d), hA) + 1e-12);
            }
        }

        // permuting the candidates permutes attention columns and keeps the output
        std::vector<std::size_t> perm{5, 0, 3};
        Graph g2;
        const auto out2 = a3m_attend(g2.constant(H), perm, p);
        for (std::size_t t = 0; t < 6; ++t) {
            EXPECT_NEAR(out2.attention.value()(t, 0), out.attention.value()(t, 2), 1e-12);
            EXPECT_NEAR(out2.attention.value()(t, 1), out.attention.value()(t, 0), 1e-12);
            EXPECT_NEAR(out2.attention.value()(t, 2), out.attention.value()(t, 1), 1e-12);
        }
        for (std::size_t i = 0; i < out.states.value().size(); ++i) {
            EXPECT_NEAR(out2.states.value()[i], out.states.value()[i], 1e-12);
        }
    }
}

TEST(A3M, Errors)
{
    Rng rng(1);
    auto p = make_a3m(3, 1);
    Graph g;
    auto H = g.constant(random_matrix(3, 3, rng));
    EXPECT_THROW(a3m_attend(H, std::vector<std::size_t>{}, p), ContractError);
    EXPECT_THROW(a3m_attend(H, std::vector<std::size_t>{3}, p), ContractError);
}

TEST(A3M, GradientsMatchFiniteDifferences)
{
    Rng rng(9);
    auto p = make_a3m(4, 9);
    Parameter H("H", random_matrix(5, 4, rng));
    const Matrix w = random_matrix(5, 4, rng);
    auto ps = p.all();
    ps.push_back(&H);
    const std::size_t cand[] = {1, 3, 4};
    const double err = num::finite_diff_check(
        [&](Graph& g) { return num::sum(num::mul(a3m_attend(g.param(H), cand, p).states, g.constant(w))); },
        ps);
    EXPECT_LT(err, 1e-4);
}

TEST(Sentic, Examples)
{
    Rng rng(1);
    auto p = SenticParams::init(2, rng);
    p.weight.value = Matrix{{0.5, -0.5}};
    p.bias.value = Matrix{{0.0, 0.0}};
    Graph g;
    const double sentic[] = {0.8};
    // one image row then one text row
    auto out = sentic_enhance(g.constant(Matrix{{3, 4}, {1, 1}}), sentic, 1, p);
    EXPECT_EQ(out.value(), (Matrix{{3, 4}, {1.4, 0.6}}));

    p.weight.value.fill(0.0);
    p.bias.value = Matrix{{0.25, -1.0}};
    const double two[] = {0.3, -0.9};
    auto shifted = sentic_enhance(g.constant(Matrix{{1, 2}, {3, 4}, {5, 6}}), two, 1, p);
    EXPECT_EQ(shifted.value(), (Matrix{{1, 2}, {3.25, 3}, {5.25, 5}}));

    p.bias.value.fill(0.0);
    p.weight.value = Matrix{{7, 7}};
    const double zeros[] = {0.0, 0.0};
    const Matrix H{{1, 2}, {3, 4}, {5, 6}};
    EXPECT_EQ(sentic_enhance(g.constant(H), zeros, 1, p).value(), H);
    EXPECT_THROW(sentic_enhance(g.constant(H), sentic, 1, p), DimensionError);
}

TEST(Association, NoAspectsDistantTokens)
{
    // 2 images, 3 tokens with pairwise distance 3
    const std::vector<std::vector<int>> dist{{0, 3, 3}, {3, 0, 3}, {3, 3, 0}};
    Rng rng(5);
    Graph g;
    const auto A = build_association_matrix(g.constant(random_matrix(5, 4, rng)), dist, {}, 2, 3, 2).value();
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            const double expected = i == j ? 1.0 : 0.0;
            EXPECT_NEAR(A(i, j), expected, 1e-15) << i << "," << j;
        }
    }
}

TEST(Association, TextImageEntryIsCosine)
{
    const Matrix H{{1.0, 0.0}, {3.0, 4.0}, {0.0, 2.0}}; // image, text0, text1
    const std::vector<std::vector<int>> dist{{0, 5}, {5, 0}};
    Graph g;
    const std::size_t aspect[] = {0};
    const auto A = build_association_matrix(g.constant(H), dist, aspect, 1, 2, 2).value();
    EXPECT_NEAR(A(1, 0), 0.6, 1e-15);
    EXPECT_NEAR(A(0, 1), 0.6, 1e-15);
    EXPECT_EQ(A(2, 0), 0.0);
    EXPECT_EQ(A(1, 2), 0.0);
}

TEST(Association, ImageBlockIsIdentity)
{
    Rng rng(6);
    Graph g;
    const auto A = build_association_matrix(g.constant(random_matrix(5, 3, rng)), path_distances(2),
                                            std::vector<std::size_t>{0, 1}, 3, 2, 2)
                       .value();
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_EQ(A(i, j), i == j ? 1.0 : 0.0);
        }
    }
}

TEST(Association, Errors)
{
    Rng rng(7);
    Graph g;
    auto H = g.constant(random_matrix(4, 3, rng));
    EXPECT_THROW(build_association_matrix(H, path_distances(3), std::vector<std::size_t>{3}, 1, 3, 2),
                 ContractError);
    EXPECT_THROW(build_association_matrix(H, path_distances(3), {}, 2, 3, 2), DimensionError);
    EXPECT_THROW(build_association_matrix(H, path_distances(3), {}, 1, 3, -1), ContractError);
}

// The structural properties on random tree-structured samples.
TEST(Association, PropertiesOnRandomSamples)
{
    Rng rng(2718);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(rng.integer(1, 12));
        const auto m = static_cast<std::size_t>(rng.integer(1, 4));
        const auto tree = synth::build_dependency_tree(n, rng);
        std::vector<std::size_t> aspects;
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.bernoulli(0.3)) {
                aspects.push_back(i);
            }
        }
        const Matrix H = random_matrix(m + n, 6, rng);
        Graph g;
        const auto A = build_association_matrix(g.constant(H), tree.dist, aspects, m, n, 2).value();
        auto is_aspect = [&](std::size_t i) {
            return std::find(aspects.begin(), aspects.end(), i) != aspects.end();
        };
        for (std::size_t i = 0; i < m + n; ++i) {
            for (std::size_t j = 0; j < m + n; ++j) {
                ASSERT_NEAR(A(i, j), A(j, i), 1e-12);
                ASSERT_GE(A(i, j), -1.0);
                ASSERT_LE(A(i, j), 1.0);
                if (i < m && j < m) {
                    ASSERT_EQ(A(i, j), i == j ? 1.0 : 0.0);
                }
                if (i >= m && j >= m) {
                    const std::size_t a = i - m, b = j - m;
                    if (tree.dist[a][b] > 2) {
                        ASSERT_EQ(A(i, j), 0.0);
                    } else {
                        ASSERT_NE(A(i, j), 0.0);
                    }
                }
                if (i >= m && j < m) {
                    ASSERT_EQ(A(i, j) != 0.0, is_aspect(i - m));
                }
            }
        }
    }
}

TEST(Association, DistantPairUnaffectedByTheirStates)
{
    const std::vector<std::vector<int>> dist{{0, 4, 1}, {4, 0, 3}, {1, 3, 0}};
    Rng rng(8);
    Matrix H = random_matrix(4, 3, rng);
    Graph g;
    const auto before = build_association_matrix(g.constant(H), dist, {}, 1, 3, 2).value();
    for (std::size_t d = 0; d < 3; ++d) {
        H(1, d) = rng.normal();
        H(2, d) = rng.normal();
    }
    const auto after = build_association_matrix(g.constant(H), dist, {}, 1, 3, 2).value();
    EXPECT_EQ(before(1, 2), 0.0);
    EXPECT_EQ(after(1, 2), 0.0);
}

TEST(Association, GradientFlowsThroughCosines)
{
    Rng rng(10);
    Parameter H("H", random_matrix(5, 3, rng));
    const Matrix w = random_matrix(5, 5, rng);
    const std::size_t aspect[] = {1};
    Parameter* ps[] = {&H};
    const double err = num::finite_diff_check(
        [&](Graph& g) {
            return num::sum(num::mul(build_association_matrix(g.param(H), path_distances(3), aspect, 2, 3, 2),
                                     g.constant(w)));
        },
        ps);
    EXPECT_LT(err, 1e-4);
}

TEST(Gcn, IdentityFixedPoint)
{
    Rng rng(1);
    std::vector<GcnLayerParams> layers{GcnLayerParams::init(3, 0, rng)};
    layers[0].weight.value = Matrix::identity(3);
    layers[0].bias.value.fill(0.0);
    const Matrix H{{0.5, 1.0, 0.0}, {2.0, 0.1, 3.0}};
    Graph g;
    EXPECT_EQ(gcn_forward(g.constant(Matrix::identity(2)), g.constant(H), layers).value(), H);
}

TEST(Gcn, EmptyNeighbourhoodGivesReluOfBias)
{
    Rng rng(2);
    std::vector<GcnLayerParams> layers{GcnLayerParams::init(3, 0, rng)};
    layers[0].bias.value = Matrix{{0.5, -1.0, 2.0}};
    Graph g;
    const auto out = gcn_forward(g.constant(Matrix(2, 2)), g.constant(random_matrix(2, 3, rng)), layers).value();
    EXPECT_EQ(out, (Matrix{{0.5, 0.0, 2.0}, {0.5, 0.0, 2.0}}));
}

TEST(Gcn, TwoNodeHandArithmetic)
{
    Rng rng(3);
    std::vector<GcnLayerParams> layers{GcnLayerParams::init(1, 0, rng)};
    layers[0].weight.value = Matrix{{1.0}};
    layers[0].bias.value = Matrix{{0.0}};
    Graph g;
    const auto out = gcn_forward(g.constant(Matrix{{1, 0.5}, {0.5, 1}}), g.constant(Matrix{{1}, {2}}), layers);
    EXPECT_EQ(out.value(), (Matrix{{2}, {2.5}}));
}

TEST(Gcn, GradientsMatchFiniteDifferences)
{
    Rng rng(4);
    std::vector<GcnLayerParams> layers{GcnLayerParams::init(4, 0, rng), GcnLayerParams::init(4, 1, rng)};
    for (auto& l : layers) {
        l.bias.value = random_matrix(1, 4, rng);
    }
    Parameter H("H", random_matrix(5, 4, rng));
    Parameter A("A", random_matrix(5, 5, rng));
    const Matrix w = random_matrix(5, 4, rng);
    std::vector<Parameter*> ps{&H, &A};
    for (auto& l : layers) {
        ps.push_back(&l.weight);
        ps.push_back(&l.bias);
    }
    const double err = num::finite_diff_check(
        [&](Graph& g) { return num::sum(num::mul(gcn_forward(g.param(A), g.param(H), layers), g.constant(w))); },
        ps);
    EXPECT_LT(err, 1e-4);
}

TEST(Gcn, ShapeMismatch)
{
    Rng rng(5);
    std::vector<GcnLayerParams> layers{GcnLayerParams::init(2, 0, rng)};
    Graph g;
    EXPECT_THROW(gcn_forward(g.constant(Matrix(3, 3)), g.constant(Matrix(2, 2)), layers), DimensionError);
}
