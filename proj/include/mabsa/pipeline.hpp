#pragma once

#include "mabsa/hcd.hpp"
#include "mabsa/metrics.hpp"
#include "mabsa/model.hpp"
#include "mabsa/synth.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mabsa::pipeline {

enum class CurriculumMode { Hcd, None, AntiHcd, StaticOnly, DynamicOnly };

std::string_view to_string(CurriculumMode m);
/// hcd | none | antihcd | static-d_s-only | dynamic-d_l-only
CurriculumMode mode_from_string(std::string_view name);

struct RunConfig {
    model::ModelConfig model;
    // T = 0 means half the epoch budget.
    hcd::CompetenceSchedule schedule{0.1, 0};
    double alpha = 0.8;
    CurriculumMode mode = CurriculumMode::Hcd;
    // 0 means one minibatch.
    std::size_t min_selection = 0;
    std::size_t recompute_every = 1;
    std::string data_dir;
    std::string out_dir;
    std::vector<metrics::Task> eval_tasks{metrics::Task::JMASA, metrics::Task::MATE,
                                          metrics::Task::MASC};

    void validate() const;
    /// Also requires both paths to be set.
    void validate_paths() const;
    hcd::CompetenceSchedule effective_schedule() const;
    std::size_t effective_min_selection() const;
    /// Weight on d_l actually used by the mode.
    double effective_alpha() const;
};

struct EpochTrace {
    std::size_t epoch = 0;
    double p = 0.0;
    std::size_t selected = 0;
    double mean_ds_selected = 0.0;
    double mean_dc_selected = 0.0;
    double train_loss = 0.0; // mean pre-update loss over the selected samples
    double dev_f1 = 0.0;     // JMASA
};

struct SplitMetrics {
    std::string split;
    metrics::MetricsReport report;
};

struct TrainingResult {
    model::Model model;
    std::vector<EpochTrace> trace;
    std::vector<SplitMetrics> metrics;
    std::vector<double> train_d_s;
    double mean_d_s = 0.0;
};

/// Per-sample sequence losses without touching any gradient.
std::vector<double> sample_losses(model::Model& m, const Dataset& d);

std::vector<hcd::DifficultyRecord> compute_epoch_difficulties(model::Model& m, const Dataset& d,
                                                              std::span<const double> d_s,
                                                              double alpha);

std::vector<metrics::Prediction> predict_all(model::Model& m, const Dataset& d, metrics::Task task);
metrics::MetricsReport evaluate_model(model::Model& m, const Dataset& d, metrics::Task task);

TrainingResult run_training(const RunConfig& cfg, const synth::Splits& data);

/// True when each of the first ceil(T/4) epochs selected samples with mean d_s
/// strictly below the train-set mean.
bool clean_first_ordering(const TrainingResult& r, const hcd::CompetenceSchedule& sched);

struct AblationRow {
    double alpha = 0.0;
    std::uint64_t seed = 0;
    double dev_f1 = 0.0;
};

std::vector<AblationRow> run_alpha_ablation(const RunConfig& base, const synth::Splits& data,
                                            std::span<const double> alphas,
                                            std::span<const std::uint64_t> seeds);

inline constexpr std::string_view kTraceHeader =
    "epoch,p,selected,mean_ds_selected,mean_dc_selected,train_loss,dev_f1";

std::string trace_csv(std::span<const EpochTrace> trace);
std::string trace_jsonl(std::span<const EpochTrace> trace);
std::vector<EpochTrace> parse_trace_jsonl(std::istream& in);
std::string metrics_jsonl(std::span<const SplitMetrics> metrics);
std::string metrics_json(const metrics::MetricsReport& r, std::string_view split);
std::string ablation_csv(std::span<const AblationRow> rows);

} // namespace mabsa::pipeline
