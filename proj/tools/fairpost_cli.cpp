#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fairpost/dataset.hpp"
#include "fairpost/errors.hpp"
#include "fairpost/learners.hpp"
#include "fairpost/metrics.hpp"
#include "fairpost/numeric.hpp"
#include "fairpost/postproc.hpp"
#include "fairpost/repair.hpp"
#include "fairpost/report.hpp"

namespace {

using namespace fairpost;

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
    if (!out.flush()) throw DataError("failed writing file: " + path);
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty())
        std::cout << content;
    else
        write_text_file(path, content);
}

Dataset load_with_schema(const std::string& data_path, const std::string& schema_path) {
    auto schema = DatasetSchema::from_config(KvConfig::load(schema_path));
    return load_dataset(data_path, schema);
}

// Maps source-file row ids back to per-row attributes of a loaded dataset.
struct RowLookup {
    std::map<std::size_t, std::size_t> index;

    explicit RowLookup(const Dataset& ds) {
        for (std::size_t i = 0; i < ds.size(); ++i) index[ds.row_ids[i]] = i;
    }

    std::size_t at(std::size_t row_id) const {
        auto it = index.find(row_id);
        if (it == index.end())
            throw DataError("row_id " + std::to_string(row_id) +
                            " not present in the dataset");
        return it->second;
    }
};

struct TrainOptions {
    std::string data;
    std::string schema;
    std::string baseline;
    std::uint64_t seed = 0;
    double train_fraction = 0.5;
    std::uint64_t sample = 1000;
    std::string model_out;
    std::string predictions_out;
    std::string train_predictions_out;
    std::string dump_encoded_out;
};

void cmd_train(const TrainOptions& opt) {
    const LearnerKind kind = parse_learner_kind(opt.baseline);
    auto ds = load_with_schema(opt.data, opt.schema);
    if (!opt.dump_encoded_out.empty()) {
        std::ostringstream enc;
        dump_encoded(enc, ds);
        write_text_file(opt.dump_encoded_out, enc.str());
    }
    auto parts = split(ds, SplitSpec{opt.train_fraction, opt.sample, opt.seed});
    Predictor model;
    FitReport fit;
    if (kind == LearnerKind::ols)
        std::tie(model, fit) = fit_ols(parts.train);
    else
        std::tie(model, fit) = fit_logistic(parts.train);

    if (!opt.model_out.empty()) save_predictor(opt.model_out, model);
    if (!opt.train_predictions_out.empty()) {
        auto preds = predict(model, parts.train.features);
        write_predictions_file(opt.train_predictions_out, parts.train.row_ids, preds);
    }
    if (!opt.predictions_out.empty()) {
        auto preds = predict(model, parts.test.features);
        std::vector<std::size_t> ids;
        std::vector<double> values;
        for (std::size_t idx : parts.comparison_indices) {
            ids.push_back(parts.test.row_ids[idx]);
            values.push_back(preds[idx]);
        }
        write_predictions_file(opt.predictions_out, ids, values);
    }
    std::cout << "trained " << opt.baseline << ": rows=" << ds.size()
              << " train=" << parts.train.size() << " iterations=" << fit.iterations
              << " converged=" << (fit.converged ? "yes" : "no")
              << " training_loss=" << format_double(fit.final_training_loss) << '\n';
}

struct RepairOptions {
    std::string data;
    std::string schema;
    std::string train_predictions;
    double epsilon = 0.0;
    bool fit_requested = false;
    std::string model_in;
    std::string model_out;
    std::string apply;
    std::string fair_out;
};

void cmd_repair(const RepairOptions& opt) {
    RepairModel model;
    if (!opt.model_in.empty()) {
        if (opt.fit_requested || !opt.train_predictions.empty())
            throw ValidationError("--model-in conflicts with fitting flags");
        model = load_repair(opt.model_in);
    } else {
        if (opt.train_predictions.empty())
            throw ValidationError("repair needs --train-predictions or --model-in");
        auto ds = load_with_schema(opt.data, opt.schema);
        RowLookup lookup(ds);
        auto file = read_predictions_file(opt.train_predictions);
        std::vector<bool> sensitive(file.values.size());
        for (std::size_t i = 0; i < file.row_ids.size(); ++i)
            sensitive[i] = ds.sensitive[lookup.at(file.row_ids[i])];
        model = fit_repair(file.values, sensitive, opt.epsilon);
        std::cout << "repair fitted: lambda=" << format_double(model.lambda)
                  << " epsilon_target=" << format_double(model.epsilon_target) << '\n';
    }
    if (!opt.model_out.empty()) save_repair(opt.model_out, model);
    if (!opt.apply.empty()) {
        if (opt.fair_out.empty())
            throw ValidationError("--apply requires --fair-out");
        auto ds = load_with_schema(opt.data, opt.schema);
        RowLookup lookup(ds);
        auto file = read_predictions_file(opt.apply);
        std::vector<bool> sensitive(file.values.size());
        for (std::size_t i = 0; i < file.row_ids.size(); ++i)
            sensitive[i] = ds.sensitive[lookup.at(file.row_ids[i])];
        auto fair = apply_repair(model, file.values, sensitive);
        write_predictions_file(opt.fair_out, file.row_ids, fair);
    }
}

struct CompareOptions {
    std::string data;
    std::string schema;
    std::string baseline_predictions;
    std::string fair_predictions;
    std::string baseline_name = "baseline";
    std::string fair_name = "fair";
    std::optional<double> epsilon;
    std::string pair_out;
    std::string report_out;
    std::string format = "text";
    bool full_precision = false;
    std::uint64_t bins = 50;
};

ExperimentReport report_from_pair(const PredictionPair& pair,
                                  const std::vector<double>& postprocessed,
                                  TaskKind task, const std::string& baseline_name,
                                  const std::string& fair_name,
                                  std::optional<double> epsilon,
                                  std::optional<std::string> postproc_name) {
    ExperimentReport r;
    r.baseline_learner = baseline_name;
    r.fair_learner = fair_name;
    r.epsilon = epsilon;
    r.baseline_loss = standard_loss(pair.baseline, pair.targets, task);
    r.baseline_dp = dp_disparity(pair.baseline, pair.sensitive);
    r.fair_loss = standard_loss(pair.fair, pair.targets, task);
    r.fair_dp = dp_disparity(pair.fair, pair.sensitive);
    auto diffs = diff_distribution(pair);
    r.max_increase = diffs.max_increase;
    r.max_decrease = diffs.max_decrease;
    r.avg_difference = diffs.mean_diff;
    if (!postprocessed.empty()) {
        r.postproc_name = postproc_name.value_or("postproc");
        r.postproc_loss = standard_loss(postprocessed, pair.targets, task);
        r.postproc_dp = dp_disparity(postprocessed, pair.sensitive);
    }
    return r;
}

void cmd_compare(const CompareOptions& opt) {
    auto ds = load_with_schema(opt.data, opt.schema);
    RowLookup lookup(ds);
    auto base = read_predictions_file(opt.baseline_predictions);
    auto fair = read_predictions_file(opt.fair_predictions);
    std::map<std::size_t, double> fair_by_id;
    for (std::size_t i = 0; i < fair.row_ids.size(); ++i)
        fair_by_id[fair.row_ids[i]] = fair.values[i];

    PredictionPair pair;
    for (std::size_t i = 0; i < base.row_ids.size(); ++i) {
        const std::size_t id = base.row_ids[i];
        auto it = fair_by_id.find(id);
        if (it == fair_by_id.end())
            throw DataError("fair predictions lack row_id " + std::to_string(id));
        const std::size_t row = lookup.at(id);
        pair.row_ids.push_back(id);
        pair.baseline.push_back(base.values[i]);
        pair.fair.push_back(it->second);
        pair.sensitive.push_back(ds.sensitive[row]);
        pair.targets.push_back(ds.target[row]);
    }
    validate(pair);
    auto r = report_from_pair(pair, {}, ds.task_kind, opt.baseline_name, opt.fair_name,
                              opt.epsilon, std::nullopt);
    auto diffs = diff_distribution(pair);
    auto h = histogram(diffs.diffs, opt.bins);
    if (!opt.pair_out.empty()) write_pair_csv_file(opt.pair_out, pair, {});
    emit(opt.report_out,
         render_report(r, h, parse_report_format(opt.format), opt.full_precision));
}

struct PostprocessOptions {
    std::string pair;
    std::string algo;
    double theta = 0.0;
    bool theta_set = false;
    double a = 0.0;
    bool a_set = false;
    double b = 0.0;
    bool b_set = false;
    std::string out;
};

void cmd_postprocess(const PostprocessOptions& opt) {
    const PostprocAlgo algo = parse_postproc_algo(opt.algo);
    const bool needs_theta = algo == PostprocAlgo::cap;
    const bool needs_range =
        algo == PostprocAlgo::norm_nonpos || algo == PostprocAlgo::norm_budget;
    if (needs_theta != opt.theta_set)
        throw ValidationError(needs_theta ? "cap requires --theta"
                                          : "--theta only applies to cap");
    if (needs_range != (opt.a_set && opt.b_set)) {
        if (needs_range) throw ValidationError(opt.algo + " requires --a and --b");
    }
    if (!needs_range && (opt.a_set || opt.b_set))
        throw ValidationError("--a/--b only apply to norm-nonpos and norm-budget");

    std::vector<double> previous;
    auto pair = read_pair_csv_file(opt.pair, &previous);
    RangeParams params{opt.a, opt.b, opt.theta};
    auto post = apply_postproc(algo, pair, params);
    write_pair_csv_file(opt.out, pair, post);
    std::cout << "applied " << postproc_algo_name(algo) << " to " << pair.size()
              << " rows\n";
}

struct ReportOptions {
    std::string pair;
    std::string format = "text";
    std::string out;
    std::string task = "square";
    std::string baseline_name = "baseline";
    std::string fair_name = "fair";
    std::string postproc_name;
    std::optional<double> epsilon;
    std::uint64_t bins = 50;
    bool full_precision = false;
};

void cmd_report(const ReportOptions& opt) {
    TaskKind task;
    if (opt.task == "square")
        task = TaskKind::square_loss;
    else if (opt.task == "logistic")
        task = TaskKind::logistic_loss;
    else
        throw ValidationError("--task must be square or logistic");
    std::vector<double> postprocessed;
    auto pair = read_pair_csv_file(opt.pair, &postprocessed);
    auto r = report_from_pair(
        pair, postprocessed, task, opt.baseline_name, opt.fair_name, opt.epsilon,
        opt.postproc_name.empty() ? std::nullopt
                                  : std::optional<std::string>(opt.postproc_name));
    auto diffs = diff_distribution(pair);
    auto h = histogram(diffs.diffs, opt.bins);
    emit(opt.out,
         render_report(r, h, parse_report_format(opt.format), opt.full_precision));
}

struct RunOptions {
    std::string config;
    std::string out;
    std::string pair_out;
    std::string format = "csv";
    bool full_precision = false;
};

void cmd_run(const RunOptions& opt) {
    auto config = ExperimentConfig::load(opt.config);
    auto result = run_experiment(config);
    if (!opt.pair_out.empty())
        write_pair_csv_file(opt.pair_out, result.pair, result.postprocessed);
    emit(opt.out, render_report(result.report, result.diff_histogram,
                                parse_report_format(opt.format), opt.full_precision));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairpost: individual-level impact of fair regression predictions"};
    app.require_subcommand(1);

    TrainOptions train;
    auto* train_cmd = app.add_subcommand("train", "fit a baseline learner and export predictions");
    train_cmd->add_option("--data", train.data, "dataset CSV")->required();
    train_cmd->add_option("--schema", train.schema, "schema config")->required();
    train_cmd->add_option("--baseline", train.baseline, "ols or logistic")->required();
    train_cmd->add_option("--seed", train.seed, "split seed");
    train_cmd->add_option("--train-fraction", train.train_fraction, "train split fraction");
    train_cmd->add_option("--sample", train.sample, "comparison sample size");
    train_cmd->add_option("--model-out", train.model_out, "model JSON output");
    train_cmd->add_option("--predictions-out", train.predictions_out,
                          "comparison-sample predictions CSV");
    train_cmd->add_option("--train-predictions-out", train.train_predictions_out,
                          "training-half predictions CSV");
    train_cmd->add_option("--dump-encoded", train.dump_encoded_out,
                          "write the encoded feature matrix");

    RepairOptions repair;
    auto* repair_cmd = app.add_subcommand("repair", "fit and/or apply the fair repair");
    repair_cmd->add_option("--data", repair.data, "dataset CSV")->required();
    repair_cmd->add_option("--schema", repair.schema, "schema config")->required();
    repair_cmd->add_option("--train-predictions", repair.train_predictions,
                           "baseline predictions used for fitting");
    auto* eps_opt = repair_cmd->add_option("--epsilon", repair.epsilon,
                                           "disparity target in [0,1]");
    repair_cmd->add_option("--model-in", repair.model_in, "reuse a fitted repair model");
    repair_cmd->add_option("--model-out", repair.model_out, "repair model output");
    repair_cmd->add_option("--apply", repair.apply, "predictions CSV to repair");
    repair_cmd->add_option("--fair-out", repair.fair_out, "repaired predictions output");

    CompareOptions compare;
    auto* compare_cmd = app.add_subcommand("compare", "compare baseline and fair predictions");
    compare_cmd->add_option("--data", compare.data, "dataset CSV")->required();
    compare_cmd->add_option("--schema", compare.schema, "schema config")->required();
    compare_cmd->add_option("--baseline-predictions", compare.baseline_predictions,
                            "baseline predictions CSV")->required();
    compare_cmd->add_option("--fair-predictions", compare.fair_predictions,
                            "fair predictions CSV")->required();
    compare_cmd->add_option("--baseline-name", compare.baseline_name, "label in the report");
    compare_cmd->add_option("--fair-name", compare.fair_name, "label in the report");
    double compare_epsilon = 0.0;
    auto* compare_eps =
        compare_cmd->add_option("--epsilon", compare_epsilon, "epsilon label");
    compare_cmd->add_option("--pair-out", compare.pair_out, "aligned pair CSV output");
    compare_cmd->add_option("--report-out", compare.report_out, "report output (stdout default)");
    compare_cmd->add_option("--format", compare.format, "csv, text, or svg");
    compare_cmd->add_flag("--full-precision", compare.full_precision,
                          "render full float precision");
    compare_cmd->add_option("--bins", compare.bins, "histogram bins");

    PostprocessOptions post;
    auto* post_cmd = app.add_subcommand("postprocess", "apply a post-processing transform");
    post_cmd->add_option("--pair", post.pair, "pair CSV from compare/run")->required();
    post_cmd->add_option("--algo", post.algo,
                         "cap, translate-nonpos, norm-nonpos, translate-budget, norm-budget")
        ->required();
    auto* theta_opt = post_cmd->add_option("--theta", post.theta, "cap threshold");
    auto* a_opt = post_cmd->add_option("--a", post.a, "target range lower end");
    auto* b_opt = post_cmd->add_option("--b", post.b, "target range upper end");
    post_cmd->add_option("--out", post.out, "pair CSV output")->required();

    ReportOptions report;
    auto* report_cmd = app.add_subcommand("report", "render a report from a pair CSV");
    report_cmd->add_option("--pair", report.pair, "pair CSV")->required();
    report_cmd->add_option("--format", report.format, "csv, text, or svg")->required();
    report_cmd->add_option("--out", report.out, "output path (stdout default)");
    report_cmd->add_option("--task", report.task, "square or logistic loss");
    report_cmd->add_option("--baseline-name", report.baseline_name, "label in the report");
    report_cmd->add_option("--fair-name", report.fair_name, "label in the report");
    report_cmd->add_option("--postproc-name", report.postproc_name,
                           "label for the postprocessed column");
    double report_epsilon = 0.0;
    auto* report_eps = report_cmd->add_option("--epsilon", report_epsilon, "epsilon label");
    report_cmd->add_option("--bins", report.bins, "histogram bins");
    report_cmd->add_flag("--full-precision", report.full_precision,
                         "render full float precision");

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "end-to-end experiment from a config file");
    run_cmd->add_option("--config", run.config, "experiment config")->required();
    run_cmd->add_option("--out", run.out, "report output (stdout default)");
    run_cmd->add_option("--pair-out", run.pair_out, "aligned pair CSV output");
    run_cmd->add_option("--format", run.format, "csv, text, or svg");
    run_cmd->add_flag("--full-precision", run.full_precision,
                      "render full float precision");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*train_cmd) {
            cmd_train(train);
        } else if (*repair_cmd) {
            repair.fit_requested = eps_opt->count() > 0;
            if (repair.model_in.empty() && !repair.fit_requested)
                throw ValidationError("repair needs --epsilon (fit) or --model-in");
            cmd_repair(repair);
        } else if (*compare_cmd) {
            if (compare_eps->count() > 0) compare.epsilon = compare_epsilon;
            cmd_compare(compare);
        } else if (*post_cmd) {
            post.theta_set = theta_opt->count() > 0;
            post.a_set = a_opt->count() > 0;
            post.b_set = b_opt->count() > 0;
            cmd_postprocess(post);
        } else if (*report_cmd) {
            if (report_eps->count() > 0) report.epsilon = report_epsilon;
            cmd_report(report);
        } else if (*run_cmd) {
            cmd_run(run);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
