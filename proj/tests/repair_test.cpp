#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fairpost/errors.hpp"
#include "fairpost/metrics.hpp"
#include "fairpost/repair.hpp"
#include "fairpost/rng.hpp"

using namespace fairpost;

namespace {

std::vector<bool> alternating(std::size_t n) {
    std::vector<bool> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = i % 2 == 0;
    return s;
}

}  // namespace

TEST_CASE("fit_repair with epsilon one keeps predictions untouched") {
    std::vector<double> preds = {0.1, 0.9, 0.4, 0.6, 0.2, 0.8};
    auto sens = alternating(preds.size());
    auto model = fit_repair(preds, sens, 1.0);
    CHECK(model.lambda == 0.0);
    CHECK(apply_repair(model, preds, sens) == preds);
}

TEST_CASE("identical group distributions repair to the identity for every lambda") {
    // Both groups hold the same multiset, including a duplicated value.
    std::vector<double> preds;
    std::vector<bool> sens;
    for (double v : {0.1, 0.3, 0.3, 0.7, 0.95}) {
        preds.push_back(v);
        sens.push_back(true);
        preds.push_back(v);
        sens.push_back(false);
    }
    auto model = fit_repair(preds, sens, 0.0);
    CHECK(model.lambda == 0.0);  // disparity is already zero
    for (double lambda : {0.0, 1.0 / 64.0, 0.5, 63.0 / 64.0, 1.0}) {
        model.lambda = lambda;
        CHECK(apply_repair(model, preds, sens) == preds);
    }
}

TEST_CASE("fit_repair pulls a shifted group inside the disparity budget") {
    std::vector<double> preds;
    std::vector<bool> sens;
    for (int i = 0; i < 30; ++i) {
        preds.push_back(0.02 * i);
        sens.push_back(true);
        preds.push_back(0.02 * i + 0.4);
        sens.push_back(false);
    }
    CHECK(dp_disparity(preds, sens) > 0.3);
    auto model = fit_repair(preds, sens, 0.05);
    auto repaired = apply_repair(model, preds, sens);
    CHECK(dp_disparity(repaired, sens) <= 0.05);
    CHECK(model.lambda > 0.0);
    CHECK(model.lambda <= 1.0);
}

TEST_CASE("fit_repair picks the smallest qualifying lambda on the grid") {
    std::vector<double> preds;
    std::vector<bool> sens;
    Rng rng(21);
    for (int i = 0; i < 200; ++i) {
        preds.push_back(0.6 * rng.next_unit());
        sens.push_back(true);
        preds.push_back(0.4 + 0.6 * rng.next_unit());
        sens.push_back(false);
    }
    const double epsilon = 0.2;
    auto model = fit_repair(preds, sens, epsilon);
    const double steps = model.lambda * 64.0;
    CHECK(steps == std::floor(steps));  // lambda sits on the 1/64 grid
    REQUIRE(model.lambda > 0.0);
    auto at_selected = model;
    auto repaired = apply_repair(at_selected, preds, sens);
    CHECK(dp_disparity(repaired, sens) <= epsilon);
    auto below = model;
    below.lambda = model.lambda - 1.0 / 64.0;
    auto under = apply_repair(below, preds, sens);
    CHECK(dp_disparity(under, sens) > epsilon);
}

TEST_CASE("apply_repair with lambda zero is the exact identity") {
    std::vector<double> train = {0.2, 0.4, 0.6, 0.8};
    auto sens_train = alternating(train.size());
    auto model = fit_repair(train, sens_train, 1.0);
    model.lambda = 0.0;
    std::vector<double> fresh = {0.0, 0.123456, 0.77, 1.0};  // includes out-of-range-of-train
    auto sens_fresh = alternating(fresh.size());
    CHECK(apply_repair(model, fresh, sens_fresh) == fresh);
}

TEST_CASE("full repair of single-value groups lands midway in the pooled range") {
    std::vector<double> preds = {0.2, 0.8};
    std::vector<bool> sens = {true, false};
    auto model = fit_repair(preds, sens, 0.0);
    model.lambda = 1.0;
    // Each one-point group ranks at 0.5; the pooled quantile there is 0.5.
    auto out = apply_repair(model, preds, sens);
    CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-12));
    for (double v : out) {
        CHECK(v >= 0.2);
        CHECK(v <= 0.8);
    }
    // Constant extrapolation: unseen points rank like their group's knot.
    std::vector<double> unseen = {0.05, 0.99};
    auto mapped = apply_repair(model, unseen, sens);
    CHECK(mapped[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mapped[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("repair preserves within-group rank order for every lambda") {
    Rng rng(33);
    for (int instance = 0; instance < 10; ++instance) {
        std::vector<double> preds(120);
        std::vector<bool> sens(120);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            preds[i] = rng.next_unit();
            sens[i] = rng.next_below(2) == 0;
        }
        if (std::count(sens.begin(), sens.end(), true) == 0) sens[0] = true;
        if (std::count(sens.begin(), sens.end(), false) == 0) sens[1] = false;
        auto model = fit_repair(preds, sens, 0.5);
        for (double lambda : {1.0 / 64.0, 0.25, 1.0}) {
            model.lambda = lambda;
            auto out = apply_repair(model, preds, sens);
            for (std::size_t i = 0; i < preds.size(); ++i)
                for (std::size_t j = 0; j < preds.size(); ++j) {
                    if (sens[i] != sens[j] || preds[i] > preds[j]) continue;
                    CHECK(out[i] <= out[j]);
                }
        }
    }
}

TEST_CASE("full repair generalizes to held-out data") {
    Rng rng(7);
    auto draw = [&](bool group) { return group ? 0.8 * rng.next_unit() : 0.2 + 0.8 * rng.next_unit(); };
    std::vector<double> train;
    std::vector<bool> sens_train;
    for (int i = 0; i < 800; ++i) {
        train.push_back(draw(true));
        sens_train.push_back(true);
        train.push_back(draw(false));
        sens_train.push_back(false);
    }
    auto model = fit_repair(train, sens_train, 0.0);
    model.lambda = 1.0;
    std::vector<double> test;
    std::vector<bool> sens_test;
    for (int i = 0; i < 500; ++i) {
        test.push_back(draw(true));
        sens_test.push_back(true);
        test.push_back(draw(false));
        sens_test.push_back(false);
    }
    auto repaired = apply_repair(model, test, sens_test);
    CHECK(dp_disparity(repaired, sens_test) <= 0.1);
    for (double v : repaired) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("training disparity is non-increasing along the lambda grid") {
    Rng rng(99);
    struct Instance {
        double shift;
        double scale;
    };
    for (Instance inst : {Instance{0.3, 0.7}, Instance{0.5, 0.5}, Instance{0.15, 0.85}}) {
        std::vector<double> preds;
        std::vector<bool> sens;
        for (int i = 0; i < 300; ++i) {
            preds.push_back(inst.scale * rng.next_unit());
            sens.push_back(true);
            preds.push_back(inst.shift + inst.scale * rng.next_unit());
            sens.push_back(false);
        }
        auto model = fit_repair(preds, sens, 0.0);
        double previous = 2.0;
        for (int step = 0; step <= 64; ++step) {
            model.lambda = static_cast<double>(step) / 64.0;
            const double dp = dp_disparity(apply_repair(model, preds, sens), sens);
            CHECK(dp <= previous + 1e-12);
            previous = dp;
        }
    }
}

TEST_CASE("repair model knots are strictly monotone") {
    Rng rng(55);
    std::vector<double> preds(200);
    std::vector<bool> sens(200);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        preds[i] = rng.next_below(20) / 19.0;  // force duplicates
        sens[i] = i % 2 == 0;
    }
    auto model = fit_repair(preds, sens, 0.3);
    for (const RankMap* map : {&model.group_true, &model.group_false}) {
        for (std::size_t i = 1; i < map->values.size(); ++i) {
            CHECK(map->values[i] > map->values[i - 1]);
            CHECK(map->ranks[i] > map->ranks[i - 1]);
        }
    }
    for (std::size_t i = 1; i < model.pooled_ranks.size(); ++i) {
        CHECK(model.pooled_ranks[i] > model.pooled_ranks[i - 1]);
        CHECK(model.pooled_values[i] >= model.pooled_values[i - 1]);
    }
}

TEST_CASE("repair model JSON round-trips exactly") {
    std::vector<double> preds = {0.1, 2.0 / 3.0, 0.3, 0.9, 0.5, 0.25};
    auto sens = alternating(preds.size());
    auto model = fit_repair(preds, sens, 0.125);
    auto loaded = repair_from_json(repair_to_json(model));
    CHECK(loaded.lambda == model.lambda);
    CHECK(loaded.epsilon_target == model.epsilon_target);
    CHECK(loaded.group_true.values == model.group_true.values);
    CHECK(loaded.group_true.ranks == model.group_true.ranks);
    CHECK(loaded.group_false.values == model.group_false.values);
    CHECK(loaded.group_false.ranks == model.group_false.ranks);
    CHECK(loaded.pooled_ranks == model.pooled_ranks);
    CHECK(loaded.pooled_values == model.pooled_values);

    CHECK_THROWS_AS(repair_from_json("{"), DataError);
    CHECK_THROWS_AS(repair_from_json("{\"lambda\":0.5}"), DataError);
}

TEST_CASE("repair validation errors") {
    std::vector<double> preds = {0.1, 0.2};
    CHECK_THROWS_AS(fit_repair(preds, {true, true}, 0.1), ValidationError);
    CHECK_THROWS_AS(fit_repair(preds, {true}, 0.1), ValidationError);
    CHECK_THROWS_AS(fit_repair(preds, {true, false}, 1.5), ValidationError);
    std::vector<double> out_of_range = {-0.1, 0.5};
    CHECK_THROWS_AS(fit_repair(out_of_range, {true, false}, 0.1), ValidationError);

    auto model = fit_repair(preds, {true, false}, 1.0);
    std::vector<double> bad = {1.2, 0.5};
    CHECK_THROWS_AS(apply_repair(model, bad, {true, false}), ValidationError);
}
