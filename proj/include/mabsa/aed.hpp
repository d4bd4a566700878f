#pragma once

#include "mabsa/autodiff.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mabsa {
class Rng;
}

namespace mabsa::aed {

/// Aspect-guided attention over candidate aspect states, followed by a scalar
/// gate mixing each state with its aspect summary.
struct A3MParams {
    num::Parameter candidate_proj;  // h x h
    num::Parameter candidate_bias;  // 1 x h
    num::Parameter state_proj;      // h x h
    num::Parameter state_bias;      // 1 x h
    num::Parameter score_weight;    // h x 1
    num::Parameter score_bias;      // 1 x 1, softmax-invariant so never trained
    num::Parameter gate_weight;     // 2h x 1
    num::Parameter gate_state_proj; // h x h
    num::Parameter gate_aspect_proj; // h x h
    num::Parameter gate_bias;       // 1 x 1

    static A3MParams init(std::size_t hidden, Rng& rng);
    std::vector<num::Parameter*> all();
};

struct SenticParams {
    num::Parameter weight; // 1 x h, scaled by the lexicon value
    num::Parameter bias;   // 1 x h

    static SenticParams init(std::size_t hidden, Rng& rng);
    std::vector<num::Parameter*> all();
};

struct GcnLayerParams {
    num::Parameter weight; // h x h
    num::Parameter bias;   // 1 x h

    static GcnLayerParams init(std::size_t hidden, std::size_t layer, Rng& rng);
};

struct A3MOutput {
    num::Var states;    // L x h
    num::Var attention; // L x k, rows sum to one
    num::Var gates;     // L x 1, in (0, 1)
};

/// For each state h_t: score candidate i by w . tanh(P_i + Q_t) + b, softmax over
/// candidates, pool the candidate states, then gate h_t against the pooled state.
A3MOutput a3m_attend(num::Var states, std::span<const std::size_t> candidate_indices,
                     A3MParams& params);

/// Adds weight * sentic[i] + bias to text row m + i; image rows pass through.
num::Var sentic_enhance(num::Var states, std::span<const double> sentic, std::size_t image_count,
                        SenticParams& params);

/// 0/1 mask of the cosine-weighted entries and the constant image-image identity.
struct AssociationLayout {
    num::Matrix cosine_mask;
    num::Matrix constant;
};

AssociationLayout association_layout(std::span<const std::vector<int>> dep_dist,
                                     std::span<const std::size_t> aspect_tokens,
                                     std::size_t image_count, std::size_t text_count,
                                     int threshold);

/// (m+n) x (m+n) symmetric matrix: identity over image-image, cosine between each
/// aspect token and every image block, cosine between text tokens whose
/// dependency distance is within `threshold`, zero elsewhere.
num::Var build_association_matrix(num::Var states, std::span<const std::vector<int>> dep_dist,
                                  std::span<const std::size_t> aspect_tokens,
                                  std::size_t image_count, std::size_t text_count,
                                  int threshold = 2);

/// h_l = ReLU(A h_{l-1} W_l + b_l) for each layer in order.
num::Var gcn_forward(num::Var adjacency, num::Var states, std::span<GcnLayerParams> layers);

} // namespace mabsa::aed
