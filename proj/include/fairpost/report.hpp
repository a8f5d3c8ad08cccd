#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairpost/kvconfig.hpp"
#include "fairpost/learners.hpp"
#include "fairpost/postproc.hpp"

namespace fairpost {

// One result row: baseline vs fair predictions on the comparison sample,
// their losses and disparities, the difference extremes, and (optionally)
// the same metrics after a post-processing transform.
struct ExperimentReport {
    std::string baseline_learner;
    double baseline_loss = 0.0;
    double baseline_dp = 0.0;
    std::optional<double> epsilon;  // absent for externally supplied fair files
    std::string fair_learner;
    double fair_loss = 0.0;
    double fair_dp = 0.0;
    double max_increase = 0.0;
    double max_decrease = 0.0;
    double avg_difference = 0.0;
    std::optional<std::string> postproc_name;
    std::optional<double> postproc_loss;
    std::optional<double> postproc_dp;
};

struct Histogram {
    std::vector<double> bin_edges;     // strictly increasing, counts size + 1
    std::vector<std::size_t> counts;
};

// Equal-width bins over [min, max]; left-closed right-open, last bin closed.
// A single distinct value yields one bin of width 1e-9 centered on it.
Histogram histogram(std::span<const double> diffs, std::size_t bin_count);

// Experiment descriptor, read from a plain-text key=value file. Required:
// dataset, schema, baseline (ols|logistic), fair (repair|file) plus epsilon
// or fair_file. Optional: seed, train_fraction, comparison_sample_size,
// postproc + its parameters (theta, range_a, range_b), bins.
struct ExperimentConfig {
    std::string dataset;
    std::string schema;
    std::uint64_t seed = 0;
    double train_fraction = 0.5;
    std::size_t comparison_sample_size = 1000;
    LearnerKind baseline = LearnerKind::ols;
    std::optional<double> epsilon;  // set when fair = repair
    std::string fair_file;          // set when fair = file
    std::optional<PostprocAlgo> postproc;
    RangeParams params;
    std::size_t bins = 50;

    static ExperimentConfig from_config(const KvConfig& cfg);
    static ExperimentConfig load(const std::string& path);
};

struct RunResult {
    ExperimentReport report;
    Histogram diff_histogram;
    PredictionPair pair;                  // the comparison sample
    std::vector<double> postprocessed;    // empty when no postproc configured
};

// load -> split -> fit baseline -> produce fair predictions -> compare ->
// optional post-process. Deterministic for a fixed config.
RunResult run_experiment(const ExperimentConfig& config);

enum class ReportFormat { csv, text, svg };
ReportFormat parse_report_format(const std::string& name);

extern const char* const kReportCsvHeader;

// csv: one header plus one data row; text: aligned block with an ASCII
// histogram; svg: bar chart of the histogram. Values render with 3 decimal
// places unless full_precision is set.
std::string render_report(const ExperimentReport& r, const Histogram& h,
                          ReportFormat format, bool full_precision = false);

}  // namespace fairpost
