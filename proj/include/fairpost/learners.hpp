#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fairpost/dataset.hpp"
#include "fairpost/matrix.hpp"

namespace fairpost {

enum class LearnerKind { ols, logistic };

std::string learner_kind_name(LearnerKind kind);
LearnerKind parse_learner_kind(const std::string& name);

// A fitted linear model. OLS outputs are clamped to [0,1]; logistic outputs
// pass through a sigmoid, so both predict into [0,1].
struct Predictor {
    LearnerKind kind = LearnerKind::ols;
    std::vector<double> weights;
    double intercept = 0.0;
};

struct FitReport {
    bool converged = false;
    std::size_t iterations = 0;
    double final_training_loss = 0.0;
};

struct LogisticOptions {
    std::size_t max_iter = 5000;
    double tol = 1e-6;
    double ridge = 1e-8;
    // When set, receives the penalized objective after the initial point and
    // after every accepted descent step (for monotonicity checks).
    std::vector<double>* objective_trace = nullptr;
};

// Ridge-regularized least squares via the normal equations; the intercept is
// not penalized. Throws DataError if the system cannot be factorized.
std::pair<Predictor, FitReport> fit_ols(const Dataset& train, double ridge = 1e-8);

// Full-batch gradient descent with backtracking line search on the mean
// logistic loss plus a small ridge penalty on the weights.
std::pair<Predictor, FitReport> fit_logistic(const Dataset& train,
                                             const LogisticOptions& options = {});

std::vector<double> predict(const Predictor& p, const Matrix& features);

double sigmoid(double z);

// Model files are JSON: {"kind": ..., "intercept": ..., "weights": [...]}.
std::string predictor_to_json(const Predictor& p);
Predictor predictor_from_json(const std::string& text);
void save_predictor(const std::string& path, const Predictor& p);
Predictor load_predictor(const std::string& path);

// Prediction files are CSV with header `row_id,prediction`.
struct PredictionFile {
    std::vector<std::size_t> row_ids;
    std::vector<double> values;
};

void write_predictions(std::ostream& out, const std::vector<std::size_t>& row_ids,
                       const std::vector<double>& values);
void write_predictions_file(const std::string& path, const std::vector<std::size_t>& row_ids,
                            const std::vector<double>& values);
PredictionFile read_predictions(std::istream& in);
PredictionFile read_predictions_file(const std::string& path);

}  // namespace fairpost
