#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fairpost {

// Aligned outputs of the unconstrained and the fair model for the same
// points, plus group membership and ground truth. All four sequences have
// equal length >= 1; row_ids, when present, index the source dataset file.
struct PredictionPair {
    std::vector<double> baseline;
    std::vector<double> fair;
    std::vector<bool> sensitive;
    std::vector<double> targets;
    std::vector<std::size_t> row_ids;

    std::size_t size() const { return baseline.size(); }
};

void validate(const PredictionPair& pair);

// Per-point differences fair - baseline with their extremes and mean.
struct DiffDistribution {
    std::vector<double> diffs;
    double max_increase = 0.0;
    double max_decrease = 0.0;
    double mean_diff = 0.0;
};

DiffDistribution diff_distribution(const PredictionPair& pair);

// Desired difference range [a, b] and cap threshold used by the
// normalization and cap operations.
struct RangeParams {
    double a = 0.0;
    double b = 0.0;
    double theta = 0.0;
};

// The five post-processing transforms. None of them re-clamps the outputs to
// [0,1]: translation can leave the prediction range, and clamping would break
// the exact budget-neutrality and shift-invariance contracts. Callers that
// need bounded outputs apply clamp01 themselves.

// Cap each fair output at baseline + theta. theta may be negative, which
// forces a strict decrease everywhere.
std::vector<double> cap(const PredictionPair& pair, double theta);

// Shift all fair outputs down by the largest recorded difference, so the
// most-increased point lands exactly on its baseline: max(Y - B) == 0.
std::vector<double> translate_nonpositive(const PredictionPair& pair);

// Min-max rescale of the differences onto [a, b]. Degenerate input
// (max == min) maps everything to b, which turns both normalize+translate
// transforms into the identity on the baseline.
std::vector<double> normalize_diffs(const DiffDistribution& d, double a, double b);

// Normalize differences onto [a, b], rebuild outputs, then shift down by the
// largest remaining difference. Final differences span [a - b, 0].
std::vector<double> normalize_translate_nonpositive(const PredictionPair& pair, double a,
                                                    double b);

// Shift all fair outputs by the mean difference: mean(Y - B) == 0.
std::vector<double> translate_budget_neutral(const PredictionPair& pair);

// Normalize differences onto [a, b], rebuild outputs, then remove the mean:
// mean(Y - B) == 0 and the difference range keeps width b - a.
std::vector<double> normalize_translate_budget_neutral(const PredictionPair& pair, double a,
                                                       double b);

// Names accepted by the CLI and experiment configs.
enum class PostprocAlgo {
    cap,
    translate_nonpos,
    norm_nonpos,
    translate_budget,
    norm_budget,
};

PostprocAlgo parse_postproc_algo(const std::string& name);
std::string postproc_algo_name(PostprocAlgo algo);
std::vector<double> apply_postproc(PostprocAlgo algo, const PredictionPair& pair,
                                   const RangeParams& params);

// Pair file round-trip: CSV `row_id,baseline,fair,postprocessed,sensitive,target`.
// The postprocessed column is empty until a transform ran.
void write_pair_csv(std::ostream& out, const PredictionPair& pair,
                    const std::vector<double>& postprocessed);
PredictionPair read_pair_csv(std::istream& in, std::vector<double>* postprocessed);
void write_pair_csv_file(const std::string& path, const PredictionPair& pair,
                         const std::vector<double>& postprocessed);
PredictionPair read_pair_csv_file(const std::string& path, std::vector<double>* postprocessed);

}  // namespace fairpost
