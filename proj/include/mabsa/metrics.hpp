#pragma once

#include "mabsa/datamodel.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mabsa::metrics {

enum class Task { JMASA, MATE, MASC };

std::string_view to_string(Task t);
Task task_from_string(std::string_view name);

struct MetricsReport {
    Task task = Task::JMASA;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0; // MASC only
    std::size_t gold = 0;
    std::size_t predicted = 0;
    std::size_t matched = 0;
};

struct Prediction {
    std::string sample_id;
    std::vector<AspectAnnotation> aspects;
};

/// Micro-averaged span metrics for JMASA (span + polarity) and MATE (span only).
/// MASC scores polarity over gold spans: accuracy plus macro-F1 over the classes
/// that occur in the gold or predicted labels. Predictions must line up with
/// `gold` sample by sample.
MetricsReport evaluate(const Dataset& gold, std::span<const Prediction> predicted, Task task);

} // namespace mabsa::metrics
