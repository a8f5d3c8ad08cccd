#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fairpost {

enum class TaskKind { square_loss, logistic_loss };

// Empirical distribution of a prediction sample.
// Evaluation convention: CDF(z) = #{values <= z} / n.
struct EmpiricalCdf {
    std::vector<double> sorted_values;

    std::size_t n() const { return sorted_values.size(); }
    double at(double z) const;        // P[X <= z]
    double below(double z) const;     // left limit P[X < z]
};

EmpiricalCdf empirical_cdf(std::span<const double> values);

// Demographic-parity disparity: max over the two sensitive groups of the
// l-infinity distance between the group-conditional CDF and the marginal CDF.
// Step functions only jump at sample values, so evaluating both one-sided
// discrepancies at every distinct prediction value is exact.
double dp_disparity(std::span<const double> predictions, const std::vector<bool>& sensitive);

// Mean of the task's native loss: squared error or log-loss with predictions
// clamped to [1e-12, 1 - 1e-12].
double standard_loss(std::span<const double> predictions, std::span<const double> targets,
                     TaskKind kind);

struct MetricsRow {
    double loss_std = 0.0;  // mean standard loss, >= 0
    double dp_disp = 0.0;   // in [0, 1]
};

MetricsRow evaluate(std::span<const double> predictions, std::span<const double> targets,
                    const std::vector<bool>& sensitive, TaskKind kind);

}  // namespace fairpost
