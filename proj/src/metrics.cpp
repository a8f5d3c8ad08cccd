#include "fairpost/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fairpost/errors.hpp"
#include "fairpost/numeric.hpp"

namespace fairpost {

double EmpiricalCdf::at(double z) const {
    auto it = std::upper_bound(sorted_values.begin(), sorted_values.end(), z);
    return static_cast<double>(it - sorted_values.begin()) / static_cast<double>(n());
}

double EmpiricalCdf::below(double z) const {
    auto it = std::lower_bound(sorted_values.begin(), sorted_values.end(), z);
    return static_cast<double>(it - sorted_values.begin()) / static_cast<double>(n());
}

EmpiricalCdf empirical_cdf(std::span<const double> values) {
    if (values.empty()) throw ValidationError("empirical_cdf: empty input");
    EmpiricalCdf cdf;
    cdf.sorted_values.assign(values.begin(), values.end());
    std::sort(cdf.sorted_values.begin(), cdf.sorted_values.end());
    return cdf;
}

double dp_disparity(std::span<const double> predictions, const std::vector<bool>& sensitive) {
    if (predictions.size() != sensitive.size()) {
        throw ValidationError("dp_disparity: predictions and sensitive lengths differ");
    }
    if (predictions.empty()) throw ValidationError("dp_disparity: empty input");

    std::vector<double> group_true, group_false;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        (sensitive[i] ? group_true : group_false).push_back(predictions[i]);
    }
    if (group_true.empty() || group_false.empty()) {
        throw ValidationError("dp_disparity: one sensitive group is empty");
    }

    EmpiricalCdf all = empirical_cdf(predictions);
    EmpiricalCdf grp[2] = {empirical_cdf(group_true), empirical_cdf(group_false)};

    double disp = 0.0;
    for (std::size_t i = 0; i < all.sorted_values.size(); ++i) {
        double z = all.sorted_values[i];
        if (i > 0 && z == all.sorted_values[i - 1]) continue;
        double all_at = all.at(z);
        double all_below = all.below(z);
        for (const auto& g : grp) {
            disp = std::max(disp, std::fabs(g.at(z) - all_at));
            disp = std::max(disp, std::fabs(g.below(z) - all_below));
        }
    }
    return disp;
}

double standard_loss(std::span<const double> predictions, std::span<const double> targets,
                     TaskKind kind) {
    if (predictions.size() != targets.size()) {
        throw ValidationError("standard_loss: predictions and targets lengths differ");
    }
    if (predictions.empty()) throw ValidationError("standard_loss: empty input");

    std::vector<double> terms(predictions.size());
    if (kind == TaskKind::square_loss) {
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            double e = predictions[i] - targets[i];
            terms[i] = e * e;
        }
    } else {
        constexpr double eps = 1e-12;
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            double p = std::min(std::max(predictions[i], eps), 1.0 - eps);
            terms[i] = -(targets[i] * std::log(p) + (1.0 - targets[i]) * std::log(1.0 - p));
        }
    }
    return mean(terms);
}

MetricsRow evaluate(std::span<const double> predictions, std::span<const double> targets,
                    const std::vector<bool>& sensitive, TaskKind kind) {
    MetricsRow row;
    row.loss_std = standard_loss(predictions, targets, kind);
    row.dp_disp = dp_disparity(predictions, sensitive);
    return row;
}

}  // namespace fairpost
