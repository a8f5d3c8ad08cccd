#include "fairpost/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "fairpost/csv.hpp"
#include "fairpost/dataset.hpp"
#include "fairpost/errors.hpp"
#include "fairpost/metrics.hpp"
#include "fairpost/numeric.hpp"
#include "fairpost/repair.hpp"

namespace fairpost {

Histogram histogram(std::span<const double> diffs, std::size_t bin_count) {
    if (diffs.empty()) throw ValidationError("histogram: empty input");
    if (bin_count == 0) throw ValidationError("histogram: bin_count must be positive");
    const auto [lo_it, hi_it] = std::minmax_element(diffs.begin(), diffs.end());
    const double lo = *lo_it;
    const double hi = *hi_it;

    Histogram h;
    if (lo == hi) {
        h.bin_edges = {lo - 5e-10, lo + 5e-10};
        h.counts = {diffs.size()};
        return h;
    }
    h.bin_edges.resize(bin_count + 1);
    for (std::size_t i = 0; i <= bin_count; ++i)
        h.bin_edges[i] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bin_count);
    h.counts.assign(bin_count, 0);
    for (double x : diffs) {
        double scaled = (x - lo) / (hi - lo) * static_cast<double>(bin_count);
        std::size_t j = scaled <= 0.0 ? 0
                                      : std::min(bin_count - 1,
                                                 static_cast<std::size_t>(scaled));
        // The floor estimate can land one bin off; settle against the stored
        // edges so membership is exact (left-closed, last bin closed).
        while (j > 0 && x < h.bin_edges[j]) --j;
        while (j + 1 < bin_count && x >= h.bin_edges[j + 1]) ++j;
        ++h.counts[j];
    }
    return h;
}

ExperimentConfig ExperimentConfig::from_config(const KvConfig& cfg) {
    static const std::set<std::string> known = {
        "dataset", "schema",  "seed",    "train_fraction",
        "comparison_sample_size", "baseline", "fair",    "epsilon",
        "fair_file", "postproc", "theta", "range_a", "range_b", "bins"};
    for (const auto& [key, value] : cfg.entries())
        if (!known.count(key)) throw ValidationError("config: unknown key '" + key + "'");

    ExperimentConfig c;
    c.dataset = cfg.get("dataset");
    c.schema = cfg.get("schema");
    c.seed = cfg.get_u64_or("seed", 0);
    c.train_fraction = cfg.get_double_or("train_fraction", 0.5);
    c.comparison_sample_size = cfg.get_u64_or("comparison_sample_size", 1000);
    c.baseline = parse_learner_kind(cfg.get("baseline"));
    c.bins = cfg.get_u64_or("bins", 50);

    const std::string fair = cfg.get("fair");
    if (fair == "repair") {
        c.epsilon = cfg.get_double("epsilon");
        if (!(*c.epsilon >= 0.0 && *c.epsilon <= 1.0))
            throw ValidationError("config: epsilon must be in [0,1]");
        if (cfg.has("fair_file"))
            throw ValidationError("config: fair_file conflicts with fair = repair");
    } else if (fair == "file") {
        c.fair_file = cfg.get("fair_file");
        if (cfg.has("epsilon"))
            throw ValidationError("config: epsilon conflicts with fair = file");
    } else {
        throw ValidationError("config: fair must be 'repair' or 'file', got '" + fair + "'");
    }

    if (cfg.has("postproc")) {
        c.postproc = parse_postproc_algo(cfg.get("postproc"));
        const bool needs_theta = *c.postproc == PostprocAlgo::cap;
        const bool needs_range = *c.postproc == PostprocAlgo::norm_nonpos ||
                                 *c.postproc == PostprocAlgo::norm_budget;
        if (needs_theta)
            c.params.theta = cfg.get_double("theta");
        else if (cfg.has("theta"))
            throw ValidationError("config: theta only applies to postproc = cap");
        if (needs_range) {
            c.params.a = cfg.get_double("range_a");
            c.params.b = cfg.get_double("range_b");
        } else if (cfg.has("range_a") || cfg.has("range_b")) {
            throw ValidationError("config: range_a/range_b only apply to norm-* postproc");
        }
    } else {
        for (const char* key : {"theta", "range_a", "range_b"})
            if (cfg.has(key))
                throw ValidationError(std::string("config: '") + key +
                                      "' requires a postproc");
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    return from_config(KvConfig::load(path));
}

namespace {

std::vector<double> fair_from_file(const std::string& path,
                                   const std::vector<std::size_t>& row_ids) {
    auto file = read_predictions_file(path);
    std::map<std::size_t, double> by_id;
    for (std::size_t i = 0; i < file.row_ids.size(); ++i)
        by_id[file.row_ids[i]] = file.values[i];
    std::vector<double> fair(row_ids.size());
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
        auto it = by_id.find(row_ids[i]);
        if (it == by_id.end())
            throw DataError("fair file lacks row_id " + std::to_string(row_ids[i]));
        fair[i] = it->second;
    }
    return fair;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
    auto schema = DatasetSchema::from_config(KvConfig::load(config.schema));
    auto ds = load_dataset(config.dataset, schema);
    auto parts = split(ds, SplitSpec{config.train_fraction,
                                     config.comparison_sample_size, config.seed});

    Predictor model;
    if (config.baseline == LearnerKind::ols)
        model = fit_ols(parts.train).first;
    else
        model = fit_logistic(parts.train).first;

    auto test_preds = predict(model, parts.test.features);
    RunResult result;
    PredictionPair& pair = result.pair;
    for (std::size_t idx : parts.comparison_indices) {
        pair.baseline.push_back(test_preds[idx]);
        pair.sensitive.push_back(parts.test.sensitive[idx]);
        pair.targets.push_back(parts.test.target[idx]);
        pair.row_ids.push_back(parts.test.row_ids[idx]);
    }

    ExperimentReport& report = result.report;
    report.baseline_learner = learner_kind_name(config.baseline);
    if (config.epsilon) {
        auto train_preds = predict(model, parts.train.features);
        auto repair = fit_repair(train_preds, parts.train.sensitive, *config.epsilon);
        pair.fair = apply_repair(repair, pair.baseline, pair.sensitive);
        report.fair_learner = "repair";
        report.epsilon = *config.epsilon;
    } else {
        pair.fair = fair_from_file(config.fair_file, pair.row_ids);
        report.fair_learner = "external";
    }
    validate(pair);

    const TaskKind task = ds.task_kind;
    report.baseline_loss = standard_loss(pair.baseline, pair.targets, task);
    report.baseline_dp = dp_disparity(pair.baseline, pair.sensitive);
    report.fair_loss = standard_loss(pair.fair, pair.targets, task);
    report.fair_dp = dp_disparity(pair.fair, pair.sensitive);

    auto diffs = diff_distribution(pair);
    report.max_increase = diffs.max_increase;
    report.max_decrease = diffs.max_decrease;
    report.avg_difference = diffs.mean_diff;
    result.diff_histogram = histogram(diffs.diffs, config.bins);

    if (config.postproc) {
        result.postprocessed = apply_postproc(*config.postproc, pair, config.params);
        report.postproc_name = postproc_algo_name(*config.postproc);
        report.postproc_loss = standard_loss(result.postprocessed, pair.targets, task);
        report.postproc_dp = dp_disparity(result.postprocessed, pair.sensitive);
    }
    return result;
}

ReportFormat parse_report_format(const std::string& name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "text") return ReportFormat::text;
    if (name == "svg") return ReportFormat::svg;
    throw ValidationError("unknown report format: " + name);
}

const char* const kReportCsvHeader =
    "baseline_learner,baseline_loss,baseline_dp,epsilon,fair_learner,fair_loss,"
    "fair_dp,max_increase,max_decrease,avg_difference,postproc_name,postproc_loss,"
    "postproc_dp";

namespace {

std::string format_value(double x, bool full_precision) {
    if (full_precision) return format_double(x);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", x);
    std::string s(buf);
    if (s == "-0.000") s = "0.000";
    return s;
}

std::string render_csv(const ExperimentReport& r, bool full) {
    std::ostringstream out;
    out << kReportCsvHeader << '\n';
    std::vector<std::string> cells = {
        csv_escape(r.baseline_learner),
        format_value(r.baseline_loss, full),
        format_value(r.baseline_dp, full),
        r.epsilon ? format_value(*r.epsilon, full) : "",
        csv_escape(r.fair_learner),
        format_value(r.fair_loss, full),
        format_value(r.fair_dp, full),
        format_value(r.max_increase, full),
        format_value(r.max_decrease, full),
        format_value(r.avg_difference, full),
        r.postproc_name ? csv_escape(*r.postproc_name) : "",
        r.postproc_loss ? format_value(*r.postproc_loss, full) : "",
        r.postproc_dp ? format_value(*r.postproc_dp, full) : "",
    };
    for (std::size_t i = 0; i < cells.size(); ++i)
        out << (i ? "," : "") << cells[i];
    out << '\n';
    return out.str();
}

std::string render_text(const ExperimentReport& r, const Histogram& h, bool full) {
    std::ostringstream out;
    out << "experiment report\n";
    out << "  baseline   " << r.baseline_learner << "  loss "
        << format_value(r.baseline_loss, full) << "  dp "
        << format_value(r.baseline_dp, full) << '\n';
    out << "  fair       " << r.fair_learner;
    if (r.epsilon) out << " (epsilon " << format_value(*r.epsilon, full) << ')';
    out << "  loss " << format_value(r.fair_loss, full) << "  dp "
        << format_value(r.fair_dp, full) << '\n';
    out << "  difference fair-baseline: max increase "
        << format_value(r.max_increase, full) << ", max decrease "
        << format_value(r.max_decrease, full) << ", average "
        << format_value(r.avg_difference, full) << '\n';
    if (r.postproc_name) {
        out << "  postproc   " << *r.postproc_name << "  loss "
            << format_value(*r.postproc_loss, full) << "  dp "
            << format_value(*r.postproc_dp, full) << '\n';
    }
    out << "  learner defaults: ols ridge 1e-8; logistic max_iter 5000 tol 1e-6\n";
    out << '\n';
    out << "  difference histogram (" << h.counts.size() << " bins)\n";
    const std::size_t peak = *std::max_element(h.counts.begin(), h.counts.end());
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const bool last = i + 1 == h.counts.size();
        out << "  [" << format_value(h.bin_edges[i], full) << ", "
            << format_value(h.bin_edges[i + 1], full) << (last ? "]" : ")") << ' ';
        const std::size_t width =
            peak == 0 ? 0 : (h.counts[i] * 40 + peak - 1) / peak;
        out << std::string(width, '#') << ' ' << h.counts[i] << '\n';
    }
    return out.str();
}

std::string render_svg(const Histogram& h) {
    const double width = 640.0;
    const double height = 400.0;
    const double left = 60.0;
    const double bottom = 350.0;
    const double top = 30.0;
    const double right = 610.0;
    const double lo = h.bin_edges.front();
    const double hi = h.bin_edges.back();
    const std::size_t peak =
        std::max<std::size_t>(1, *std::max_element(h.counts.begin(), h.counts.end()));

    auto x_of = [&](double v) { return left + (v - lo) / (hi - lo) * (right - left); };
    auto y_of = [&](std::size_t count) {
        return bottom - static_cast<double>(count) / static_cast<double>(peak) *
                            (bottom - top);
    };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
        << "\">\n";
    out << "  <line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
        << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
    out << "  <line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << left
        << "\" y2=\"" << top << "\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        if (h.counts[i] == 0) continue;
        const double x0 = x_of(h.bin_edges[i]);
        const double x1 = x_of(h.bin_edges[i + 1]);
        const double y = y_of(h.counts[i]);
        out << "  <rect x=\"" << x0 << "\" y=\"" << y << "\" width=\"" << (x1 - x0)
            << "\" height=\"" << (bottom - y) << "\" fill=\"steelblue\"/>\n";
    }
    out << "  <text x=\"" << (left + (right - left) / 2.0) << "\" y=\""
        << (bottom + 35.0) << "\" text-anchor=\"middle\">&#948;</text>\n";
    out << "  <text x=\"18\" y=\"" << (top + (bottom - top) / 2.0)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << (top + (bottom - top) / 2.0) << ")\">count</text>\n";
    out << "  <text x=\"" << left << "\" y=\"" << (bottom + 18.0)
        << "\" text-anchor=\"middle\">" << format_double(lo) << "</text>\n";
    out << "  <text x=\"" << right << "\" y=\"" << (bottom + 18.0)
        << "\" text-anchor=\"middle\">" << format_double(hi) << "</text>\n";
    out << "  <text x=\"" << (left - 8.0) << "\" y=\"" << (top + 4.0)
        << "\" text-anchor=\"end\">" << peak << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace

std::string render_report(const ExperimentReport& r, const Histogram& h,
                          ReportFormat format, bool full_precision) {
    switch (format) {
        case ReportFormat::csv: return render_csv(r, full_precision);
        case ReportFormat::text: return render_text(r, h, full_precision);
        case ReportFormat::svg: return render_svg(h);
    }
    throw ValidationError("bad report format");
}

}  // namespace fairpost
