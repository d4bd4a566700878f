#include "mabsa/aed.hpp"

#include "mabsa/errors.hpp"
#include "mabsa/rng.hpp"

namespace mabsa::aed {

using num::Matrix;
using num::Parameter;
using num::Var;

A3MParams A3MParams::init(std::size_t h, Rng& rng)
{
    A3MParams p;
    p.candidate_proj = num::uniform_parameter("a3m.candidate_proj", h, h, h, rng);
    p.candidate_bias = num::uniform_parameter("a3m.candidate_bias", 1, h, h, rng);
    p.state_proj = num::uniform_parameter("a3m.state_proj", h, h, h, rng);
    p.state_bias = num::uniform_parameter("a3m.state_bias", 1, h, h, rng);
    p.score_weight = num::uniform_parameter("a3m.score_weight", h, 1, h, rng);
    p.score_bias = Parameter("a3m.score_bias", Matrix(1, 1), false);
    p.gate_weight = num::uniform_parameter("a3m.gate_weight", 2 * h, 1, 2 * h, rng);
    p.gate_state_proj = num::uniform_parameter("a3m.gate_state_proj", h, h, h, rng);
    p.gate_aspect_proj = num::uniform_parameter("a3m.gate_aspect_proj", h, h, h, rng);
    p.gate_bias = Parameter("a3m.gate_bias", Matrix(1, 1));
    return p;
}

std::vector<Parameter*> A3MParams::all()
{
    return {&candidate_proj, &candidate_bias, &state_proj,      &state_bias,
            &score_weight,   &score_bias,     &gate_weight,     &gate_state_proj,
            &gate_aspect_proj, &gate_bias};
}

SenticParams SenticParams::init(std::size_t h, Rng& rng)
{
    SenticParams p;
    p.weight = num::uniform_parameter("sentic.weight", 1, h, 1, rng);
    p.bias = Parameter("sentic.bias", Matrix(1, h));
    return p;
}

std::vector<Parameter*> SenticParams::all()
{
    return {&weight, &bias};
}

GcnLayerParams GcnLayerParams::init(std::size_t h, std::size_t layer, Rng& rng)
{
    const std::string prefix = "gcn" + std::to_string(layer);
    GcnLayerParams p;
    p.weight = num::uniform_parameter(prefix + ".weight", h, h, h, rng);
    p.bias = Parameter(prefix + ".bias", Matrix(1, h));
    return p;
}

namespace {

// L x 1 column of ones times a 1x1 parameter: broadcasts a scalar bias.
Var broadcast_scalar(num::Graph& g, Var scalar, std::size_t rows)
{
    return matmul(g.constant(Matrix(rows, 1, 1.0)), scalar);
}

} // namespace

A3MOutput a3m_attend(Var states, std::span<const std::size_t> candidate_indices, A3MParams& p)
{
    if (candidate_indices.empty()) {
        throw ContractError("a3m_attend: candidate list is empty");
    }
    for (std::size_t c : candidate_indices) {
        if (c >= states.rows()) {
            throw ContractError("a3m_attend: candidate index " + std::to_string(c) +
                                " outside " + std::to_string(states.rows()) + " states");
        }
    }
    num::Graph& g = *states.graph();
    const std::size_t L = states.rows();

    Var candidates = gather_rows(states, candidate_indices);
    Var cand_feat = add_row(matmul(candidates, g.param(p.candidate_proj)), g.param(p.candidate_bias));
    Var state_feat = add_row(matmul(states, g.param(p.state_proj)), g.param(p.state_bias));
    Var score_w = g.param(p.score_weight);

    Var scores;
    for (std::size_t i = 0; i < candidate_indices.size(); ++i) {
        Var z = activation(add_row(state_feat, slice_rows(cand_feat, i, 1)), num::Activation::Tanh);
        Var s = matmul(z, score_w);
        scores = i == 0 ? s : concat_cols(scores, s);
    }
    scores = add_col(scores, broadcast_scalar(g, g.param(p.score_bias), L));
    Var attention = softmax_rows(scores);
    Var aspect_states = matmul(attention, candidates);

    Var gate_in = concat_cols(matmul(states, g.param(p.gate_state_proj)),
                              matmul(aspect_states, g.param(p.gate_aspect_proj)));
    Var gates = activation(add(matmul(gate_in, g.param(p.gate_weight)),
                               broadcast_scalar(g, g.param(p.gate_bias), L)),
                           num::Activation::Sigmoid);
    Var mixed = add(mul_col(states, gates), mul_col(aspect_states, affine(gates, -1.0, 1.0)));
    return {mixed, attention, gates};
}

Var sentic_enhance(Var states, std::span<const double> sentic, std::size_t image_count,
                   SenticParams& p)
{
    const std::size_t L = states.rows();
    if (image_count + sentic.size() != L) {
        throw DimensionError("sentic_enhance: " + std::to_string(image_count) + " image + " +
                             std::to_string(sentic.size()) + " text positions vs " +
                             std::to_string(L) + " states");
    }
    num::Graph& g = *states.graph();
    Matrix values(L, 1);
    Matrix text_mask(L, 1);
    for (std::size_t i = 0; i < sentic.size(); ++i) {
        values[image_count + i] = sentic[i];
        text_mask[image_count + i] = 1.0;
    }
    Var shift = add(matmul(g.constant(std::move(values)), g.param(p.weight)),
                    matmul(g.constant(std::move(text_mask)), g.param(p.bias)));
    return add(states, shift);
}

AssociationLayout association_layout(std::span<const std::vector<int>> dep_dist,
                                     std::span<const std::size_t> aspect_tokens,
                                     std::size_t m, std::size_t n, int threshold)
{
    if (threshold < 0) {
        throw ContractError("association threshold must be non-negative");
    }
    if (dep_dist.size() != n) {
        throw DimensionError("dep_dist has " + std::to_string(dep_dist.size()) + " rows for " +
                             std::to_string(n) + " tokens");
    }
    const std::size_t L = m + n;
    AssociationLayout layout{Matrix(L, L), Matrix(L, L)};
    for (std::size_t i = 0; i < m; ++i) {
        layout.constant(i, i) = 1.0;
    }
    for (std::size_t a : aspect_tokens) {
        if (a >= n) {
            throw ContractError("aspect token " + std::to_string(a) + " outside " +
                                std::to_string(n) + " text positions");
        }
        for (std::size_t k = 0; k < m; ++k) {
            layout.cosine_mask(m + a, k) = 1.0;
            layout.cosine_mask(k, m + a) = 1.0;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (dep_dist[i].size() != n) {
            throw DimensionError("dep_dist row " + std::to_string(i) + " has " +
                                 std::to_string(dep_dist[i].size()) + " entries");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (dep_dist[i][j] <= threshold) {
                layout.cosine_mask(m + i, m + j) = 1.0;
            }
        }
    }
    return layout;
}

Var build_association_matrix(Var states, std::span<const std::vector<int>> dep_dist,
                             std::span<const std::size_t> aspect_tokens, std::size_t m,
                             std::size_t n, int threshold)
{
    if (states.rows() != m + n) {
        throw DimensionError("association matrix over " + std::to_string(states.rows()) +
                             " states, expected " + std::to_string(m + n));
    }
    AssociationLayout layout = association_layout(dep_dist, aspect_tokens, m, n, threshold);
    num::Graph& g = *states.graph();
    Var unit = normalize_rows(states);
    Var cosines = clamp(matmul(unit, transpose(unit)), -1.0, 1.0);
    return add(mul(cosines, g.constant(std::move(layout.cosine_mask))),
               g.constant(std::move(layout.constant)));
}

Var gcn_forward(Var adjacency, Var states, std::span<GcnLayerParams> layers)
{
    if (adjacency.rows() != states.rows() || adjacency.cols() != states.rows()) {
        throw DimensionError("gcn_forward: adjacency " + adjacency.value().shape_string() +
                             " for " + std::to_string(states.rows()) + " states");
    }
    num::Graph& g = *states.graph();
    Var h = states;
    for (auto& layer : layers) {
        h = activation(add_row(matmul(adjacency, matmul(h, g.param(layer.weight))),
                               g.param(layer.bias)),
                       num::Activation::Relu);
    }
    return h;
}

} // namespace mabsa::aed
