#include "mabsa/metrics.hpp"

#include "mabsa/errors.hpp"

#include <array>

namespace mabsa::metrics {

std::string_view to_string(Task t)
{
    switch (t) {
    case Task::JMASA:
        return "JMASA";
    case Task::MATE:
        return "MATE";
    case Task::MASC:
        return "MASC";
    }
    return "?";
}

Task task_from_string(std::string_view name)
{
    if (name == "JMASA") {
        return Task::JMASA;
    }
    if (name == "MATE") {
        return Task::MATE;
    }
    if (name == "MASC") {
        return Task::MASC;
    }
    throw ContractError("unknown task '" + std::string(name) + "' (expected JMASA, MATE or MASC)");
}

namespace {

double ratio(std::size_t num, std::size_t den)
{
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r)
{
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

const AspectAnnotation* find_span(const std::vector<AspectAnnotation>& list, const AspectAnnotation& a)
{
    for (const auto& x : list) {
        if (x.begin == a.begin && x.end == a.end) {
            return &x;
        }
    }
    return nullptr;
}

} // namespace

MetricsReport evaluate(const Dataset& gold, std::span<const Prediction> predicted, Task task)
{
    if (predicted.size() != gold.size()) {
        throw ContractError("evaluate: " + std::to_string(predicted.size()) + " predictions for " +
                            std::to_string(gold.size()) + " samples");
    }
    MetricsReport r;
    r.task = task;

    std::array<std::size_t, kPolarityCount> tp{}, pred_count{}, gold_count{};
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto& g = gold.samples[i];
        const auto& p = predicted[i];
        if (g.id != p.sample_id) {
            throw ContractError("evaluate: prediction '" + p.sample_id + "' misaligned with sample '" +
                                g.id + "' at position " + std::to_string(i));
        }
        if (task == Task::MASC) {
            for (const auto& a : g.aspects) {
                const auto gc = static_cast<std::size_t>(a.polarity);
                ++r.gold;
                ++gold_count[gc];
                if (const AspectAnnotation* hit = find_span(p.aspects, a)) {
                    const auto pc = static_cast<std::size_t>(hit->polarity);
                    ++r.predicted;
                    ++pred_count[pc];
                    if (pc == gc) {
                        ++r.matched;
                        ++tp[gc];
                    }
                }
            }
            continue;
        }
        r.gold += g.aspects.size();
        r.predicted += p.aspects.size();
        for (const auto& a : p.aspects) {
            const AspectAnnotation* hit = find_span(g.aspects, a);
            if (hit && (task == Task::MATE || hit->polarity == a.polarity)) {
                ++r.matched;
            }
        }
    }

    if (task != Task::MASC) {
        r.precision = ratio(r.matched, r.predicted);
        r.recall = ratio(r.matched, r.gold);
        r.f1 = r.matched == 0 ? 0.0 : harmonic(r.precision, r.recall);
        return r;
    }

    r.accuracy = ratio(r.matched, r.gold);
    double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
    std::size_t classes = 0;
    for (std::size_t c = 0; c < kPolarityCount; ++c) {
        if (gold_count[c] == 0 && pred_count[c] == 0) {
            continue;
        }
        ++classes;
        const double pc = ratio(tp[c], pred_count[c]);
        const double rc = ratio(tp[c], gold_count[c]);
        p_sum += pc;
        r_sum += rc;
        f_sum += harmonic(pc, rc);
    }
    if (classes > 0) {
        r.precision = p_sum / static_cast<double>(classes);
        r.recall = r_sum / static_cast<double>(classes);
        r.f1 = f_sum / static_cast<double>(classes);
    }
    return r;
}

} // namespace mabsa::metrics
