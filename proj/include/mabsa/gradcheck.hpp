#pragma once

#include "mabsa/autodiff.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mabsa::num {

/// Builds a scalar loss on the given graph from the current parameter values.
using ScalarFunction = std::function<Var(Graph&)>;

/// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

struct GradCheckEntry {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::vector<GradCheckEntry> per_parameter;
};

/// Central differences against backward() for every coordinate of `params`.
/// Parameter values are restored afterwards; gradients are left holding the
/// analytic result.
GradCheckReport finite_diff_report(const ScalarFunction& f, std::span<Parameter* const> params,
                                   double step = 1e-5);

double finite_diff_check(const ScalarFunction& f, std::span<Parameter* const> params,
                         double step = 1e-5);

} // namespace mabsa::num
