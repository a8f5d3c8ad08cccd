#pragma once

#include <span>
#include <string>
#include <vector>

namespace fairpost {

// Monotone piecewise-linear map from prediction values to ranks in [0,1].
// Values are strictly increasing; duplicates in the training sample are
// collapsed to their mid-rank so the map stays strictly monotone.
struct RankMap {
    std::vector<double> values;
    std::vector<double> ranks;
};

// Group-conditional distribution repair. Each group's predictions are ranked
// within the group and mapped to the pooled empirical quantile at that rank;
// lambda interpolates between the original prediction (0) and the fully
// repaired one (1).
struct RepairModel {
    RankMap group_true;
    RankMap group_false;
    std::vector<double> pooled_ranks;   // strictly increasing, spanning [0,1]
    std::vector<double> pooled_values;  // non-decreasing, same length
    double lambda = 0.0;
    double epsilon_target = 1.0;
};

// Builds the quantile maps from training predictions and picks the smallest
// lambda on the 1/64 grid whose repaired training disparity is at most
// epsilon_target (lambda=1 when none qualifies).
RepairModel fit_repair(std::span<const double> base_predictions,
                       const std::vector<bool>& sensitive, double epsilon_target);

std::vector<double> apply_repair(const RepairModel& m,
                                 std::span<const double> base_predictions,
                                 const std::vector<bool>& sensitive);

// Linear interpolation through (xs[i], ys[i]) with constant extrapolation
// outside xs; xs must be strictly increasing and non-empty.
double interp_monotone(const std::vector<double>& xs, const std::vector<double>& ys,
                       double x);

std::string repair_to_json(const RepairModel& m);
RepairModel repair_from_json(const std::string& text);
void save_repair(const std::string& path, const RepairModel& m);
RepairModel load_repair(const std::string& path);

}  // namespace fairpost
