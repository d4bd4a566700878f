#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mabsa::hcd {

/// Per-sample curriculum difficulties, all in [0, 1].
struct DifficultyRecord {
    std::string sample_id;
    double d_s = 0.0; // static, from text/image embedding similarity
    double d_l = 0.0; // dynamic, from the current model loss
    double d_c = 0.0; // alpha * d_l + (1 - alpha) * d_s
};

struct CompetenceSchedule {
    double lambda_init = 0.1;
    std::size_t T = 1;

    void validate() const;
};

/// Cosine similarities are clamped into [kSimilarityFloor, 1] before normalisation.
inline constexpr double kSimilarityFloor = 1e-6;

/// d_s,i = 1 - S_i / max_k S_k. `ids` (optional) name samples in error messages.
std::vector<double> similarity_difficulty(std::span<const std::vector<double>> text_embeds,
                                          std::span<const std::vector<double>> image_embeds,
                                          std::span<const std::string> ids = {});

/// d_l,i = L_i / max_j L_j, or all zeros when every loss is zero.
std::vector<double> loss_difficulty(std::span<const double> losses);

std::vector<double> composite_difficulty(std::span<const double> d_l, std::span<const double> d_s,
                                         double alpha);

std::vector<DifficultyRecord> make_records(std::span<const std::string> ids,
                                           std::span<const double> d_s,
                                           std::span<const double> d_l, double alpha);

/// Square-root competence curve rising from lambda_init at t = 0 to 1 at t = T.
double competence(double t, const CompetenceSchedule& sched);

/// Indices with d_c < p in ascending order. Falls back to the `min_size` easiest
/// samples (ties by sample id) when too few qualify; p >= 1 selects everything.
std::vector<std::size_t> select_training_subset(std::span<const DifficultyRecord> records, double p,
                                                std::size_t min_size);

/// Hardest-first mirror: d_c > 1 - p, with the `min_size` hardest as fallback.
std::vector<std::size_t> select_anti_curriculum(std::span<const DifficultyRecord> records, double p,
                                                std::size_t min_size);

} // namespace mabsa::hcd
