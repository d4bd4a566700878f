#include "mabsa/pipeline.hpp"

#include "mabsa/errors.hpp"
#include "mabsa/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>

namespace mabsa::pipeline {

using metrics::Task;
using model::Model;

namespace {

constexpr std::uint64_t kShuffleStream = 1000;

// Shortest text that reads back to the same double.
std::string fmt(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double mean_over(std::span<const double> values, std::span<const std::size_t> idx)
{
    if (idx.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t i : idx) {
        total += values[i];
    }
    return total / static_cast<double>(idx.size());
}

} // namespace

std::string_view to_string(CurriculumMode m)
{
    switch (m) {
    case CurriculumMode::Hcd: return "hcd";
    case CurriculumMode::None: return "none";
    case CurriculumMode::AntiHcd: return "antihcd";
    case CurriculumMode::StaticOnly: return "static-d_s-only";
    case CurriculumMode::DynamicOnly: return "dynamic-d_l-only";
    }
    return "?";
}

CurriculumMode mode_from_string(std::string_view name)
{
    for (auto m : {CurriculumMode::Hcd, CurriculumMode::None, CurriculumMode::AntiHcd,
                   CurriculumMode::StaticOnly, CurriculumMode::DynamicOnly}) {
        if (name == to_string(m)) {
            return m;
        }
    }
    throw ValidationError("unknown curriculum mode '" + std::string(name) +
                          "' (expected hcd, none, antihcd, static-d_s-only or dynamic-d_l-only)");
}

void RunConfig::validate() const
{
    model.validate();
    effective_schedule().validate();
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ContractError("alpha must lie in [0, 1]");
    }
    if (recompute_every < 1) {
        throw ContractError("recompute_every must be at least 1");
    }
    if (eval_tasks.empty()) {
        throw ContractError("at least one evaluation task is required");
    }
}

void RunConfig::validate_paths() const
{
    validate();
    if (data_dir.empty() || out_dir.empty()) {
        throw ContractError("data and output paths must both be set");
    }
}

hcd::CompetenceSchedule RunConfig::effective_schedule() const
{
    hcd::CompetenceSchedule s = schedule;
    if (s.T == 0) {
        s.T = std::max<std::size_t>(1, model.epochs / 2);
    }
    return s;
}

std::size_t RunConfig::effective_min_selection() const
{
    return min_selection == 0 ? model.batch_size : min_selection;
}

double RunConfig::effective_alpha() const
{
    switch (mode) {
    case CurriculumMode::StaticOnly: return 0.0;
    case CurriculumMode::DynamicOnly: return 1.0;
    default: return alpha;
    }
}

std::vector<double> sample_losses(Model& m, const Dataset& d)
{
    std::vector<double> losses;
    losses.reserve(d.size());
    for (const auto& s : d.samples) {
        losses.push_back(m.sequence_loss(s));
    }
    return losses;
}

std::vector<hcd::DifficultyRecord> compute_epoch_difficulties(Model& m, const Dataset& d,
                                                              std::span<const double> d_s,
                                                              double alpha)
{
    if (d_s.size() != d.size()) {
        throw DimensionError("compute_epoch_difficulties: " + std::to_string(d_s.size()) +
                             " d_s values for " + std::to_string(d.size()) + " samples");
    }
    const auto losses = sample_losses(m, d);
    const auto d_l = hcd::loss_difficulty(losses);
    std::vector<std::string> ids;
    for (const auto& s : d.samples) {
        ids.push_back(s.id);
    }
    return hcd::make_records(ids, d_s, d_l, alpha);
}

std::vector<metrics::Prediction> predict_all(Model& m, const Dataset& d, Task task)
{
    std::vector<metrics::Prediction> out;
    out.reserve(d.size());
    for (const auto& s : d.samples) {
        out.push_back({s.id, task == Task::MASC ? m.predict_polarities(s) : m.predict(s)});
    }
    return out;
}

metrics::MetricsReport evaluate_model(Model& m, const Dataset& d, Task task)
{
    const auto preds = predict_all(m, d, task);
    return metrics::evaluate(d, preds, task);
}

TrainingResult run_training(const RunConfig& cfg, const synth::Splits& data)
{
    cfg.validate();
    const Dataset& train = data.train;
    if (train.size() == 0) {
        throw ContractError("run_training: training set is empty");
    }
    if (train.samples[0].image_blocks.empty()) {
        throw ContractError("run_training: sample '" + train.samples[0].id + "' has no image blocks");
    }
    const std::size_t image_dim = train.samples[0].image_blocks[0].size();
    TrainingResult result{Model(cfg.model, model::Vocabulary::build(train), image_dim), {}, {}, {}, 0.0};
    Model& m = result.model;

    std::vector<std::string> ids;
    std::vector<std::vector<double>> texts, images;
    for (const auto& s : train.samples) {
        ids.push_back(s.id);
        texts.push_back(s.text_embed);
        images.push_back(s.image_embed);
    }
    result.train_d_s = hcd::similarity_difficulty(texts, images, ids);
    const auto& d_s = result.train_d_s;
    result.mean_d_s = std::accumulate(d_s.begin(), d_s.end(), 0.0) / static_cast<double>(d_s.size());

    const auto sched = cfg.effective_schedule();
    const double alpha = cfg.effective_alpha();
    const std::size_t min_size = std::min(cfg.effective_min_selection(), train.size());
    const bool uses_loss = cfg.mode != CurriculumMode::None && alpha > 0.0;
    std::vector<double> d_l(train.size(), 0.0);

    for (std::size_t epoch = 0; epoch < cfg.model.epochs; ++epoch) {
        if (uses_loss && epoch % cfg.recompute_every == 0) {
            d_l = hcd::loss_difficulty(sample_losses(m, train));
        }
        const auto records = hcd::make_records(ids, d_s, d_l, alpha);
        std::vector<double> d_c;
        for (const auto& r : records) {
            d_c.push_back(r.d_c);
        }

        double p = 1.0;
        std::vector<std::size_t> selected;
        switch (cfg.mode) {
        case CurriculumMode::None:
            selected.resize(train.size());
            std::iota(selected.begin(), selected.end(), std::size_t{0});
            break;
        case CurriculumMode::AntiHcd:
            p = hcd::competence(static_cast<double>(epoch), sched);
            selected = hcd::select_anti_curriculum(records, p, min_size);
            break;
        default:
            p = hcd::competence(static_cast<double>(epoch), sched);
            selected = hcd::select_training_subset(records, p, min_size);
            break;
        }

        EpochTrace row;
        row.epoch = epoch;
        row.p = p;
        row.selected = selected.size();
        row.mean_ds_selected = mean_over(d_s, selected);
        row.mean_dc_selected = mean_over(d_c, selected);

        std::vector<std::size_t> order = selected;
        Rng rng = Rng::derived(cfg.model.seed, kShuffleStream + epoch);
        rng.shuffle(order);
        double loss_total = 0.0;
        const std::size_t bs = cfg.model.batch_size;
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const std::size_t stop = std::min(order.size(), start + bs);
            m.params().zero_grad();
            for (std::size_t k = start; k < stop; ++k) {
                num::Graph g;
                num::Var loss = m.sequence_loss(g, train.samples[order[k]]);
                loss_total += loss.scalar();
                g.backward(loss);
            }
            m.sgd_step(1.0 / static_cast<double>(stop - start));
        }
        row.train_loss = loss_total / static_cast<double>(order.size());
        row.dev_f1 = data.dev.size() > 0 ? evaluate_model(m, data.dev, Task::JMASA).f1 : 0.0;
        result.trace.push_back(row);
    }

    for (const auto& [name, split] : {std::pair<std::string, const Dataset*>{"dev", &data.dev},
                                      std::pair<std::string, const Dataset*>{"test", &data.test}}) {
        if (split->size() == 0) {
            continue;
        }
        for (Task t : cfg.eval_tasks) {
            result.metrics.push_back({name, evaluate_model(m, *split, t)});
        }
    }
    return result;
}

bool clean_first_ordering(const TrainingResult& r, const hcd::CompetenceSchedule& sched)
{
    const std::size_t span = (sched.T + 3) / 4;
    if (r.trace.size() < span) {
        return false;
    }
    for (std::size_t e = 0; e < span; ++e) {
        if (!(r.trace[e].mean_ds_selected < r.mean_d_s)) {
            return false;
        }
    }
    return true;
}

std::vector<AblationRow> run_alpha_ablation(const RunConfig& base, const synth::Splits& data,
                                            std::span<const double> alphas,
                                            std::span<const std::uint64_t> seeds)
{
    for (double a : alphas) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw ContractError("ablation alpha " + fmt(a) + " outside [0, 1]");
        }
    }
    std::vector<AblationRow> rows;
    for (double a : alphas) {
        for (std::uint64_t seed : seeds) {
            RunConfig cfg = base;
            cfg.alpha = a;
            cfg.model.seed = seed;
            cfg.eval_tasks = {Task::JMASA};
            const auto r = run_training(cfg, data);
            rows.push_back({a, seed, r.trace.empty() ? 0.0 : r.trace.back().dev_f1});
        }
    }
    return rows;
}

std::string trace_csv(std::span<const EpochTrace> trace)
{
    std::string out(kTraceHeader);
    out += '\n';
    for (const auto& t : trace) {
        out += std::to_string(t.epoch) + ',' + fmt(t.p) + ',' + std::to_string(t.selected) + ',' +
               fmt(t.mean_ds_selected) + ',' + fmt(t.mean_dc_selected) + ',' + fmt(t.train_loss) +
               ',' + fmt(t.dev_f1) + '\n';
    }
    return out;
}

std::string trace_jsonl(std::span<const EpochTrace> trace)
{
    std::string out;
    for (const auto& t : trace) {
        nlohmann::ordered_json j = {{"epoch", t.epoch},
                                    {"p", t.p},
                                    {"selected", t.selected},
                                    {"mean_ds_selected", t.mean_ds_selected},
                                    {"mean_dc_selected", t.mean_dc_selected},
                                    {"train_loss", t.train_loss},
                                    {"dev_f1", t.dev_f1}};
        out += j.dump() + '\n';
    }
    return out;
}

std::vector<EpochTrace> parse_trace_jsonl(std::istream& in)
{
    std::vector<EpochTrace> trace;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            EpochTrace t;
            t.epoch = j.at("epoch").get<std::size_t>();
            t.p = j.at("p").get<double>();
            t.selected = j.at("selected").get<std::size_t>();
            t.mean_ds_selected = j.at("mean_ds_selected").get<double>();
            t.mean_dc_selected = j.at("mean_dc_selected").get<double>();
            t.train_loss = j.at("train_loss").get<double>();
            t.dev_f1 = j.at("dev_f1").get<double>();
            trace.push_back(t);
        } catch (const nlohmann::json::exception& e) {
            throw IoError("trace line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return trace;
}

std::string metrics_json(const metrics::MetricsReport& r, std::string_view split)
{
    nlohmann::ordered_json j = {{"split", split},
                                {"task", metrics::to_string(r.task)},
                                {"precision", r.precision},
                                {"recall", r.recall},
                                {"f1", r.f1}};
    if (r.task == Task::MASC) {
        j["accuracy"] = r.accuracy;
    }
    j["gold"] = r.gold;
    j["predicted"] = r.predicted;
    j["matched"] = r.matched;
    return j.dump();
}

std::string metrics_jsonl(std::span<const SplitMetrics> metrics)
{
    std::string out;
    for (const auto& m : metrics) {
        out += metrics_json(m.report, m.split) + '\n';
    }
    return out;
}

std::string ablation_csv(std::span<const AblationRow> rows)
{
    std::string out =
        "# alpha ablation: composite difficulty weight vs final dev JMASA F1\n"
        "# reference claim (Twitter-2015, alpha = 0.8): \"achieves the highest F1-score of 67.1\"\n"
        "# documentation only; not asserted at this scale\n"
        "alpha,seed,dev_f1\n";
    for (const auto& r : rows) {
        out += fmt(r.alpha) + ',' + std::to_string(r.seed) + ',' + fmt(r.dev_f1) + '\n';
    }
    return out;
}

} // namespace mabsa::pipeline
