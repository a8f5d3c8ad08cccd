#include "fairpost/postproc.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "fairpost/csv.hpp"
#include "fairpost/errors.hpp"
#include "fairpost/numeric.hpp"

namespace fairpost {

void validate(const PredictionPair& pair) {
    if (pair.baseline.empty()) throw ValidationError("prediction pair: empty");
    if (pair.fair.size() != pair.baseline.size() ||
        pair.sensitive.size() != pair.baseline.size() ||
        pair.targets.size() != pair.baseline.size()) {
        throw ValidationError("prediction pair: sequence lengths differ");
    }
    if (!pair.row_ids.empty() && pair.row_ids.size() != pair.baseline.size()) {
        throw ValidationError("prediction pair: row_ids length differs");
    }
}

DiffDistribution diff_distribution(const PredictionPair& pair) {
    validate(pair);
    DiffDistribution d;
    d.diffs.resize(pair.size());
    for (std::size_t i = 0; i < pair.size(); ++i) {
        d.diffs[i] = pair.fair[i] - pair.baseline[i];
    }
    d.max_increase = *std::max_element(d.diffs.begin(), d.diffs.end());
    d.max_decrease = *std::min_element(d.diffs.begin(), d.diffs.end());
    d.mean_diff = mean(d.diffs);
    return d;
}

std::vector<double> cap(const PredictionPair& pair, double theta) {
    validate(pair);
    std::vector<double> out(pair.size());
    for (std::size_t i = 0; i < pair.size(); ++i) {
        out[i] = std::min(pair.fair[i], pair.baseline[i] + theta);
    }
    return out;
}

std::vector<double> translate_nonpositive(const PredictionPair& pair) {
    DiffDistribution d = diff_distribution(pair);
    std::vector<double> out(pair.size());
    for (std::size_t i = 0; i < pair.size(); ++i) {
        out[i] = pair.fair[i] - d.max_increase;
    }
    return out;
}

std::vector<double> normalize_diffs(const DiffDistribution& d, double a, double b) {
    if (a > b) throw ValidationError("normalize_diffs: range minimum exceeds maximum");
    double lo = *std::min_element(d.diffs.begin(), d.diffs.end());
    double hi = *std::max_element(d.diffs.begin(), d.diffs.end());
    std::vector<double> out(d.diffs.size());
    if (hi == lo) {
        std::fill(out.begin(), out.end(), b);
        return out;
    }
    double scale = (b - a) / (hi - lo);
    for (std::size_t i = 0; i < d.diffs.size(); ++i) {
        out[i] = a + (d.diffs[i] - lo) * scale;
    }
    return out;
}

std::vector<double> normalize_translate_nonpositive(const PredictionPair& pair, double a,
                                                    double b) {
    DiffDistribution d = diff_distribution(pair);
    std::vector<double> nd = normalize_diffs(d, a, b);
    double gamma = *std::max_element(nd.begin(), nd.end());
    std::vector<double> out(pair.size());
    for (std::size_t i = 0; i < pair.size(); ++i) {
        // Grouped so the shifted diff cancels exactly at the maximum and in
        // the degenerate all-equal case.
        out[i] = pair.baseline[i] + (nd[i] - gamma);
    }
    return out;
}

std::vector<double> translate_budget_neutral(const PredictionPair& pair) {
    DiffDistribution d = diff_distribution(pair);
    std::vector<double> out(pair.size());
    for (std::size_t i = 0; i < pair.size(); ++i) {
        out[i] = pair.fair[i] - d.mean_diff;
    }
    return out;
}

std::vector<double> normalize_translate_budget_neutral(const PredictionPair& pair, double a,
                                                       double b) {
    DiffDistribution d = diff_distribution(pair);
    std::vector<double> nd = normalize_diffs(d, a, b);
    double shift = mean(nd);
    std::vector<double> out(pair.size());
    for (std::size_t i = 0; i < pair.size(); ++i) {
        out[i] = pair.baseline[i] + (nd[i] - shift);
    }
    return out;
}

PostprocAlgo parse_postproc_algo(const std::string& name) {
    if (name == "cap") return PostprocAlgo::cap;
    if (name == "translate-nonpos") return PostprocAlgo::translate_nonpos;
    if (name == "norm-nonpos") return PostprocAlgo::norm_nonpos;
    if (name == "translate-budget") return PostprocAlgo::translate_budget;
    if (name == "norm-budget") return PostprocAlgo::norm_budget;
    throw ValidationError("unknown post-processing algorithm: '" + name + "'");
}

std::string postproc_algo_name(PostprocAlgo algo) {
    switch (algo) {
        case PostprocAlgo::cap: return "cap";
        case PostprocAlgo::translate_nonpos: return "translate-nonpos";
        case PostprocAlgo::norm_nonpos: return "norm-nonpos";
        case PostprocAlgo::translate_budget: return "translate-budget";
        case PostprocAlgo::norm_budget: return "norm-budget";
    }
    throw ValidationError("unknown post-processing algorithm");
}

std::vector<double> apply_postproc(PostprocAlgo algo, const PredictionPair& pair,
                                   const RangeParams& params) {
    switch (algo) {
        case PostprocAlgo::cap: return cap(pair, params.theta);
        case PostprocAlgo::translate_nonpos: return translate_nonpositive(pair);
        case PostprocAlgo::norm_nonpos:
            return normalize_translate_nonpositive(pair, params.a, params.b);
        case PostprocAlgo::translate_budget: return translate_budget_neutral(pair);
        case PostprocAlgo::norm_budget:
            return normalize_translate_budget_neutral(pair, params.a, params.b);
    }
    throw ValidationError("unknown post-processing algorithm");
}

void write_pair_csv(std::ostream& out, const PredictionPair& pair,
                    const std::vector<double>& postprocessed) {
    validate(pair);
    if (!postprocessed.empty() && postprocessed.size() != pair.size()) {
        throw ValidationError("pair csv: postprocessed length differs");
    }
    write_csv_row(out, {"row_id", "baseline", "fair", "postprocessed", "sensitive", "target"});
    for (std::size_t i = 0; i < pair.size(); ++i) {
        std::size_t row_id = pair.row_ids.empty() ? i : pair.row_ids[i];
        write_csv_row(out, {std::to_string(row_id), format_double(pair.baseline[i]),
                            format_double(pair.fair[i]),
                            postprocessed.empty() ? "" : format_double(postprocessed[i]),
                            pair.sensitive[i] ? "1" : "0", format_double(pair.targets[i])});
    }
}

PredictionPair read_pair_csv(std::istream& in, std::vector<double>* postprocessed) {
    CsvTable table = read_csv(in);
    const std::vector<std::string> expected = {"row_id",        "baseline",  "fair",
                                               "postprocessed", "sensitive", "target"};
    if (table.header != expected) throw DataError("pair csv: unexpected header");
    PredictionPair pair;
    if (postprocessed) postprocessed->clear();
    bool any_post = false;
    for (const auto& row : table.rows) {
        double b, f, y;
        if (!parse_double(row[1], b) || !parse_double(row[2], f) || !parse_double(row[5], y)) {
            throw DataError("pair csv: non-numeric cell in row " + row[0]);
        }
        if (row[4] != "0" && row[4] != "1") {
            throw DataError("pair csv: sensitive cell must be 0 or 1 in row " + row[0]);
        }
        pair.row_ids.push_back(std::stoull(row[0]));
        pair.baseline.push_back(b);
        pair.fair.push_back(f);
        pair.sensitive.push_back(row[4] == "1");
        pair.targets.push_back(y);
        if (postprocessed) {
            double p = 0.0;
            if (!row[3].empty()) {
                if (!parse_double(row[3], p)) {
                    throw DataError("pair csv: non-numeric postprocessed cell in row " + row[0]);
                }
                any_post = true;
            }
            postprocessed->push_back(p);
        }
    }
    if (postprocessed && !any_post) postprocessed->clear();
    validate(pair);
    return pair;
}

void write_pair_csv_file(const std::string& path, const PredictionPair& pair,
                         const std::vector<double>& postprocessed) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    write_pair_csv(out, pair, postprocessed);
}

PredictionPair read_pair_csv_file(const std::string& path, std::vector<double>* postprocessed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    return read_pair_csv(in, postprocessed);
}

}  // namespace fairpost
