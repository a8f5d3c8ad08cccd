#include "fairpost/repair.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fairpost/errors.hpp"
#include "fairpost/metrics.hpp"
#include "fairpost/numeric.hpp"

namespace fairpost {

namespace {

RankMap build_rank_map(std::vector<double> sorted) {
    RankMap map;
    const std::size_t m = sorted.size();
    if (m == 1) {
        map.values = {sorted[0]};
        map.ranks = {0.5};
        return map;
    }
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j + 1 < m && sorted[j + 1] == sorted[i]) ++j;
        map.values.push_back(sorted[i]);
        map.ranks.push_back(static_cast<double>(i + j) / (2.0 * static_cast<double>(m - 1)));
        i = j + 1;
    }
    return map;
}

double repaired_value(const RepairModel& m, double p, bool group) {
    const RankMap& map = group ? m.group_true : m.group_false;
    const double rank = interp_monotone(map.values, map.ranks, p);
    return interp_monotone(m.pooled_ranks, m.pooled_values, rank);
}

std::vector<double> apply_with_lambda(const RepairModel& m, double lambda,
                                      std::span<const double> predictions,
                                      const std::vector<bool>& sensitive) {
    if (predictions.size() != sensitive.size())
        throw ValidationError("apply_repair: predictions and sensitive differ in length");
    std::vector<double> out(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double p = predictions[i];
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("apply_repair: prediction outside [0,1]");
        if (lambda == 0.0) {
            out[i] = p;
            continue;
        }
        const double q = repaired_value(m, p, sensitive[i]);
        // p + lambda*(q - p) rather than (1-lambda)p + lambda*q: when the map
        // is the identity (q == p) the output is exactly p for every lambda.
        out[i] = clamp01(lambda == 1.0 ? q : p + lambda * (q - p));
    }
    return out;
}

}  // namespace

double interp_monotone(const std::vector<double>& xs, const std::vector<double>& ys,
                       double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

RepairModel fit_repair(std::span<const double> base_predictions,
                       const std::vector<bool>& sensitive, double epsilon_target) {
    if (base_predictions.size() != sensitive.size())
        throw ValidationError("fit_repair: predictions and sensitive differ in length");
    if (!(epsilon_target >= 0.0 && epsilon_target <= 1.0))
        throw ValidationError("fit_repair: epsilon_target must be in [0,1]");

    std::vector<double> group_true;
    std::vector<double> group_false;
    for (std::size_t i = 0; i < base_predictions.size(); ++i) {
        const double p = base_predictions[i];
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("fit_repair: prediction outside [0,1]");
        (sensitive[i] ? group_true : group_false).push_back(p);
    }
    if (group_true.empty() || group_false.empty())
        throw ValidationError("fit_repair: both sensitive groups must be non-empty");

    RepairModel model;
    model.epsilon_target = epsilon_target;
    std::vector<double> pooled(base_predictions.begin(), base_predictions.end());
    std::sort(pooled.begin(), pooled.end());
    std::sort(group_true.begin(), group_true.end());
    std::sort(group_false.begin(), group_false.end());
    model.group_true = build_rank_map(std::move(group_true));
    model.group_false = build_rank_map(std::move(group_false));
    const std::size_t k = pooled.size();
    model.pooled_ranks.resize(k);
    for (std::size_t j = 0; j < k; ++j)
        model.pooled_ranks[j] = static_cast<double>(j) / static_cast<double>(k - 1);
    model.pooled_values = std::move(pooled);

    model.lambda = 1.0;
    for (int step = 0; step <= 64; ++step) {
        const double lambda = static_cast<double>(step) / 64.0;
        auto repaired = apply_with_lambda(model, lambda, base_predictions, sensitive);
        if (dp_disparity(repaired, sensitive) <= epsilon_target) {
            model.lambda = lambda;
            break;
        }
    }
    return model;
}

std::vector<double> apply_repair(const RepairModel& m,
                                 std::span<const double> base_predictions,
                                 const std::vector<bool>& sensitive) {
    return apply_with_lambda(m, m.lambda, base_predictions, sensitive);
}

namespace {

nlohmann::json rank_map_to_json(const RankMap& map) {
    return nlohmann::json{{"values", map.values}, {"ranks", map.ranks}};
}

RankMap rank_map_from_json(const nlohmann::json& j) {
    RankMap map;
    map.values = j.at("values").get<std::vector<double>>();
    map.ranks = j.at("ranks").get<std::vector<double>>();
    if (map.values.empty() || map.values.size() != map.ranks.size())
        throw DataError("malformed repair model: bad rank map");
    return map;
}

}  // namespace

std::string repair_to_json(const RepairModel& m) {
    nlohmann::json j;
    j["lambda"] = m.lambda;
    j["epsilon_target"] = m.epsilon_target;
    j["group_true"] = rank_map_to_json(m.group_true);
    j["group_false"] = rank_map_to_json(m.group_false);
    j["pooled_ranks"] = m.pooled_ranks;
    j["pooled_values"] = m.pooled_values;
    return j.dump(2) + "\n";
}

RepairModel repair_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        RepairModel m;
        m.lambda = j.at("lambda").get<double>();
        m.epsilon_target = j.at("epsilon_target").get<double>();
        m.group_true = rank_map_from_json(j.at("group_true"));
        m.group_false = rank_map_from_json(j.at("group_false"));
        m.pooled_ranks = j.at("pooled_ranks").get<std::vector<double>>();
        m.pooled_values = j.at("pooled_values").get<std::vector<double>>();
        if (m.pooled_ranks.empty() || m.pooled_ranks.size() != m.pooled_values.size())
            throw DataError("malformed repair model: bad pooled arrays");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed repair model: ") + e.what());
    }
}

void save_repair(const std::string& path, const RepairModel& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write repair model: " + path);
    out << repair_to_json(m);
    if (!out.flush()) throw DataError("failed writing repair model: " + path);
}

RepairModel load_repair(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read repair model: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return repair_from_json(buf.str());
}

}  // namespace fairpost
