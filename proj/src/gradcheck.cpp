#include "mabsa/gradcheck.hpp"

#include "mabsa/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mabsa::num {

double relative_error(double analytic, double numeric)
{
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    return std::abs(analytic - numeric) / denom;
}

GradCheckReport finite_diff_report(const ScalarFunction& f, std::span<Parameter* const> params,
                                   double step)
{
    if (!(step > 0.0)) {
        throw ContractError("finite difference step must be positive");
    }
    for (Parameter* p : params) {
        p->zero_grad();
    }
    {
        Graph g;
        g.backward(f(g));
    }

    auto evaluate = [&f] {
        Graph g;
        return f(g).scalar();
    };

    GradCheckReport report;
    for (Parameter* p : params) {
        GradCheckEntry entry;
        entry.name = p->name;
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const double saved = p->value[i];
            p->value[i] = saved + step;
            const double up = evaluate();
            p->value[i] = saved - step;
            const double down = evaluate();
            p->value[i] = saved;

            const double numeric = (up - down) / (2.0 * step);
            const double analytic = p->grad[i];
            const double err = relative_error(analytic, numeric);
            if (i == 0 || err > entry.max_rel_error) {
                entry.max_rel_error = err;
                entry.worst_index = i;
                entry.analytic = analytic;
                entry.numeric = numeric;
            }
        }
        report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
        report.per_parameter.push_back(std::move(entry));
    }
    return report;
}

double finite_diff_check(const ScalarFunction& f, std::span<Parameter* const> params, double step)
{
    return finite_diff_report(f, params, step).max_rel_error;
}

} // namespace mabsa::num
