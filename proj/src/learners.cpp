#include "fairpost/learners.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "fairpost/csv.hpp"
#include "fairpost/errors.hpp"
#include "fairpost/numeric.hpp"

namespace fairpost {

namespace {

// Solves A x = rhs for symmetric positive-definite A (in place Cholesky).
std::vector<double> solve_spd(Matrix a, std::vector<double> rhs) {
    const std::size_t n = a.rows;
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a.at(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= a.at(j, k) * a.at(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag))
            throw DataError("fit_ols: normal equations are not positive definite");
        const double ljj = std::sqrt(diag);
        a.at(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a.at(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= a.at(i, k) * a.at(j, k);
            a.at(i, j) = v / ljj;
        }
    }
    // Forward substitution L y = rhs, then back substitution L^T x = y.
    for (std::size_t i = 0; i < n; ++i) {
        double v = rhs[i];
        for (std::size_t k = 0; k < i; ++k) v -= a.at(i, k) * rhs[k];
        rhs[i] = v / a.at(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double v = rhs[ii];
        for (std::size_t k = ii + 1; k < n; ++k) v -= a.at(k, ii) * rhs[k];
        rhs[ii] = v / a.at(ii, ii);
    }
    return rhs;
}

double dot_row(const Matrix& x, std::size_t r, const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.cols; ++c) s += x.at(r, c) * w[c];
    return s;
}

// Mean logistic loss via the overflow-safe form max(z,0) - z*y + log1p(exp(-|z|)).
double logistic_data_loss(const Matrix& x, const std::vector<double>& y,
                          const std::vector<double>& w, double b) {
    std::vector<double> terms(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const double z = dot_row(x, r, w) + b;
        terms[r] = std::max(z, 0.0) - z * y[r] + std::log1p(std::exp(-std::abs(z)));
    }
    return mean(terms);
}

double logistic_objective(const Matrix& x, const std::vector<double>& y,
                          const std::vector<double>& w, double b, double ridge) {
    double penalty = 0.0;
    for (double wi : w) penalty += wi * wi;
    return logistic_data_loss(x, y, w, b) + 0.5 * ridge * penalty;
}

}  // namespace

std::string learner_kind_name(LearnerKind kind) {
    return kind == LearnerKind::ols ? "ols" : "logistic";
}

LearnerKind parse_learner_kind(const std::string& name) {
    if (name == "ols") return LearnerKind::ols;
    if (name == "logistic") return LearnerKind::logistic;
    throw ValidationError("unknown learner kind: " + name);
}

std::pair<Predictor, FitReport> fit_ols(const Dataset& train, double ridge) {
    if (train.task_kind != TaskKind::square_loss)
        throw ValidationError("fit_ols: dataset task is not square loss");
    if (train.size() == 0) throw ValidationError("fit_ols: empty dataset");

    const std::size_t f = train.features.cols;
    const std::size_t d = f + 1;  // augmented with an intercept column of ones
    Matrix gram(d, d);
    std::vector<double> rhs(d, 0.0);
    for (std::size_t r = 0; r < train.size(); ++r) {
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = i < f ? train.features.at(r, i) : 1.0;
            for (std::size_t j = 0; j <= i; ++j) {
                const double xj = j < f ? train.features.at(r, j) : 1.0;
                gram.at(i, j) += xi * xj;
            }
            rhs[i] += xi * train.target[r];
        }
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) gram.at(i, j) = gram.at(j, i);
    for (std::size_t i = 0; i < f; ++i) gram.at(i, i) += ridge;  // intercept unpenalized

    auto coef = solve_spd(std::move(gram), std::move(rhs));
    Predictor p;
    p.kind = LearnerKind::ols;
    p.intercept = coef[f];
    coef.resize(f);
    p.weights = std::move(coef);

    FitReport report;
    report.converged = true;
    report.iterations = 0;
    auto preds = predict(p, train.features);
    std::vector<double> sq(train.size());
    for (std::size_t r = 0; r < train.size(); ++r) {
        const double e = preds[r] - train.target[r];
        sq[r] = e * e;
    }
    report.final_training_loss = mean(sq);
    return {std::move(p), report};
}

std::pair<Predictor, FitReport> fit_logistic(const Dataset& train,
                                             const LogisticOptions& options) {
    if (train.task_kind != TaskKind::logistic_loss)
        throw ValidationError("fit_logistic: dataset task is not logistic loss");
    if (train.size() == 0) throw ValidationError("fit_logistic: empty dataset");
    if (options.max_iter == 0 || !(options.tol > 0.0))
        throw ValidationError("fit_logistic: max_iter and tol must be positive");

    const Matrix& x = train.features;
    const std::vector<double>& y = train.target;
    const std::size_t n = x.rows;
    const std::size_t f = x.cols;

    std::vector<double> w(f, 0.0);
    double b = 0.0;
    double objective = logistic_objective(x, y, w, b, options.ridge);
    if (options.objective_trace) options.objective_trace->push_back(objective);

    std::vector<double> grad_w(f);
    std::vector<double> trial_w(f);
    double step = 1.0;
    bool converged = false;
    std::size_t iter = 0;
    for (; iter < options.max_iter; ++iter) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double resid = sigmoid(dot_row(x, r, w) + b) - y[r];
            for (std::size_t c = 0; c < f; ++c) grad_w[c] += resid * x.at(r, c);
            grad_b += resid;
        }
        double grad_sq = 0.0;
        double grad_max = 0.0;
        for (std::size_t c = 0; c < f; ++c) {
            grad_w[c] = grad_w[c] / static_cast<double>(n) + options.ridge * w[c];
            grad_sq += grad_w[c] * grad_w[c];
            grad_max = std::max(grad_max, std::abs(grad_w[c]));
        }
        grad_b /= static_cast<double>(n);
        grad_sq += grad_b * grad_b;
        grad_max = std::max(grad_max, std::abs(grad_b));
        if (grad_max < options.tol) {
            converged = true;
            break;
        }

        // Backtracking line search (Armijo). The trial step starts from twice
        // the last accepted step so the schedule can grow back after a cut.
        step = std::min(step * 2.0, 1e6);
        double next_objective = 0.0;
        double trial_b = b;
        for (;;) {
            for (std::size_t c = 0; c < f; ++c) trial_w[c] = w[c] - step * grad_w[c];
            trial_b = b - step * grad_b;
            next_objective = logistic_objective(x, y, trial_w, trial_b, options.ridge);
            if (!std::isfinite(next_objective))
                throw DataError("fit_logistic: non-finite loss; inputs must be scaled");
            if (next_objective <= objective - 1e-4 * step * grad_sq) break;
            step *= 0.5;
            if (step < 1e-18) {
                // No descent possible at double precision; treat as converged.
                converged = true;
                break;
            }
        }
        if (converged) break;
        w.swap(trial_w);
        b = trial_b;
        objective = next_objective;
        if (options.objective_trace) options.objective_trace->push_back(objective);
    }

    Predictor p;
    p.kind = LearnerKind::logistic;
    p.weights = std::move(w);
    p.intercept = b;

    FitReport report;
    report.converged = converged;
    report.iterations = iter;
    report.final_training_loss = logistic_data_loss(x, y, p.weights, p.intercept);
    return {std::move(p), report};
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::vector<double> predict(const Predictor& p, const Matrix& features) {
    if (features.cols != p.weights.size())
        throw ValidationError("predict: feature count does not match model");
    std::vector<double> out(features.rows);
    for (std::size_t r = 0; r < features.rows; ++r) {
        const double z = dot_row(features, r, p.weights) + p.intercept;
        out[r] = p.kind == LearnerKind::ols ? clamp01(z) : sigmoid(z);
    }
    return out;
}

std::string predictor_to_json(const Predictor& p) {
    nlohmann::json j;
    j["kind"] = learner_kind_name(p.kind);
    j["intercept"] = p.intercept;
    j["weights"] = p.weights;
    return j.dump(2) + "\n";
}

Predictor predictor_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        Predictor p;
        p.kind = parse_learner_kind(j.at("kind").get<std::string>());
        p.intercept = j.at("intercept").get<double>();
        p.weights = j.at("weights").get<std::vector<double>>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
}

void save_predictor(const std::string& path, const Predictor& p) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path);
    out << predictor_to_json(p);
    if (!out.flush()) throw DataError("failed writing model file: " + path);
}

Predictor load_predictor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return predictor_from_json(buf.str());
}

void write_predictions(std::ostream& out, const std::vector<std::size_t>& row_ids,
                       const std::vector<double>& values) {
    if (row_ids.size() != values.size())
        throw ValidationError("write_predictions: row_ids and values differ in length");
    out << "row_id,prediction\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << row_ids[i] << ',' << format_double(values[i]) << '\n';
}

void write_predictions_file(const std::string& path, const std::vector<std::size_t>& row_ids,
                            const std::vector<double>& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write predictions file: " + path);
    write_predictions(out, row_ids, values);
    if (!out.flush()) throw DataError("failed writing predictions file: " + path);
}

PredictionFile read_predictions(std::istream& in) {
    auto table = read_csv(in);
    if (table.header != std::vector<std::string>{"row_id", "prediction"})
        throw DataError("predictions file must have header row_id,prediction");
    PredictionFile file;
    file.row_ids.reserve(table.rows.size());
    file.values.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        std::size_t id = 0;
        auto res = std::from_chars(row[0].data(), row[0].data() + row[0].size(), id);
        if (res.ec != std::errc() || res.ptr != row[0].data() + row[0].size())
            throw DataError("bad row_id in predictions file: " + row[0]);
        double value = 0.0;
        if (!parse_double(row[1], value) || !std::isfinite(value))
            throw DataError("bad prediction value: " + row[1]);
        file.row_ids.push_back(id);
        file.values.push_back(value);
    }
    return file;
}

PredictionFile read_predictions_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read predictions file: " + path);
    return read_predictions(in);
}

}  // namespace fairpost
