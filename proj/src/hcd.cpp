#include "mabsa/hcd.hpp"

#include "mabsa/errors.hpp"
#include "mabsa/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mabsa::hcd {

void CompetenceSchedule::validate() const
{
    if (!(lambda_init > 0.0 && lambda_init <= 1.0)) {
        throw ContractError("lambda_init must lie in (0, 1]");
    }
    if (T < 1) {
        throw ContractError("competence duration T must be at least 1");
    }
}

std::vector<double> similarity_difficulty(std::span<const std::vector<double>> text_embeds,
                                          std::span<const std::vector<double>> image_embeds,
                                          std::span<const std::string> ids)
{
    if (text_embeds.empty() || text_embeds.size() != image_embeds.size()) {
        throw ContractError("similarity_difficulty needs equal-length nonempty embedding lists");
    }
    std::vector<double> sim(text_embeds.size());
    for (std::size_t i = 0; i < sim.size(); ++i) {
        try {
            sim[i] = num::cosine(text_embeds[i], image_embeds[i]);
        } catch (const DegenerateInputError&) {
            const std::string who = i < ids.size() ? "'" + ids[i] + "'" : std::to_string(i);
            throw DegenerateInputError("zero-norm embedding in sample " + who);
        }
        sim[i] = std::clamp(sim[i], kSimilarityFloor, 1.0);
    }
    const double best = *std::max_element(sim.begin(), sim.end());
    std::vector<double> d(sim.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = sim[i] == best ? 0.0 : 1.0 - sim[i] / best;
    }
    return d;
}

std::vector<double> loss_difficulty(std::span<const double> losses)
{
    for (double l : losses) {
        if (!(l >= 0.0)) {
            throw ContractError("loss_difficulty: losses must be non-negative");
        }
    }
    std::vector<double> d(losses.size(), 0.0);
    if (losses.empty()) {
        return d;
    }
    const double worst = *std::max_element(losses.begin(), losses.end());
    if (worst == 0.0) {
        return d;
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = losses[i] == worst ? 1.0 : losses[i] / worst;
    }
    return d;
}

std::vector<double> composite_difficulty(std::span<const double> d_l, std::span<const double> d_s,
                                         double alpha)
{
    if (d_l.size() != d_s.size()) {
        throw ContractError("composite_difficulty: " + std::to_string(d_l.size()) +
                            " loss difficulties vs " + std::to_string(d_s.size()) +
                            " similarity difficulties");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ContractError("composite_difficulty: alpha must lie in [0, 1]");
    }
    std::vector<double> d(d_l.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = alpha * d_l[i] + (1.0 - alpha) * d_s[i];
    }
    return d;
}

std::vector<DifficultyRecord> make_records(std::span<const std::string> ids,
                                           std::span<const double> d_s,
                                           std::span<const double> d_l, double alpha)
{
    if (ids.size() != d_s.size()) {
        throw ContractError("make_records: id count does not match difficulty count");
    }
    const auto d_c = composite_difficulty(d_l, d_s, alpha);
    std::vector<DifficultyRecord> out(ids.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = {ids[i], d_s[i], d_l[i], d_c[i]};
    }
    return out;
}

double competence(double t, const CompetenceSchedule& sched)
{
    sched.validate();
    if (t < 0.0) {
        throw ContractError("competence: negative epoch");
    }
    const double T = static_cast<double>(sched.T);
    if (t > T) {
        return 1.0;
    }
    const double l2 = sched.lambda_init * sched.lambda_init;
    return std::min(1.0, std::sqrt(t / T * (1.0 - l2) + l2));
}

namespace {

std::vector<std::size_t> select_with_fallback(std::span<const DifficultyRecord> records,
                                              std::size_t min_size, bool easiest_first,
                                              auto admit)
{
    if (records.empty()) {
        throw ContractError("selection over an empty record list");
    }
    if (min_size < 1 || min_size > records.size()) {
        throw ContractError("min_size must lie in [1, " + std::to_string(records.size()) + "]");
    }
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (admit(records[i].d_c)) {
            chosen.push_back(i);
        }
    }
    if (chosen.size() >= min_size) {
        return chosen;
    }
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double da = records[a].d_c;
        const double db = records[b].d_c;
        if (da != db) {
            return easiest_first ? da < db : da > db;
        }
        return records[a].sample_id < records[b].sample_id;
    });
    order.resize(min_size);
    std::sort(order.begin(), order.end());
    return order;
}

} // namespace

std::vector<std::size_t> select_training_subset(std::span<const DifficultyRecord> records, double p,
                                                std::size_t min_size)
{
    if (!(p > 0.0)) {
        throw ContractError("select_training_subset: competence must be positive");
    }
    if (p >= 1.0) {
        if (records.empty()) {
            throw ContractError("selection over an empty record list");
        }
        std::vector<std::size_t> all(records.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }
    return select_with_fallback(records, min_size, true, [p](double d) { return d < p; });
}

std::vector<std::size_t> select_anti_curriculum(std::span<const DifficultyRecord> records, double p,
                                                std::size_t min_size)
{
    if (!(p > 0.0)) {
        throw ContractError("select_anti_curriculum: competence must be positive");
    }
    if (p >= 1.0) {
        std::vector<std::size_t> all(records.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }
    const double floor = 1.0 - p;
    return select_with_fallback(records, min_size, false, [floor](double d) { return d > floor; });
}

} // namespace mabsa::hcd
