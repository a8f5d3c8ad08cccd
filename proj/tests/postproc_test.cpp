#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "fairpost/errors.hpp"
#include "fairpost/metrics.hpp"
#include "fairpost/numeric.hpp"
#include "fairpost/postproc.hpp"
#include "fairpost/rng.hpp"

using namespace fairpost;

namespace {

constexpr double kTol = 1e-12;

PredictionPair make_pair(std::vector<double> baseline, std::vector<double> fair) {
    PredictionPair pair;
    pair.baseline = std::move(baseline);
    pair.fair = std::move(fair);
    pair.sensitive.assign(pair.baseline.size(), false);
    for (std::size_t i = 0; i < pair.sensitive.size(); i += 2) pair.sensitive[i] = true;
    pair.targets.assign(pair.baseline.size(), 0.5);
    return pair;
}

// Continuous random pair, n in [1, max_n].
PredictionPair random_pair(Rng& rng, std::size_t max_n) {
    std::size_t n = 1 + rng.next_below(max_n);
    std::vector<double> b(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = rng.next_unit();
        f[i] = rng.next_unit();
    }
    return make_pair(std::move(b), std::move(f));
}

// Values on a dyadic 1/1024 grid: differences and translations stay exact in
// double arithmetic, which the order-exactness checks rely on.
PredictionPair random_grid_pair(Rng& rng, std::size_t max_n) {
    std::size_t n = 2 + rng.next_below(max_n - 1);
    std::vector<double> b(n), f(n);
    std::vector<bool> sens(n);
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = static_cast<double>(rng.next_below(1025)) / 1024.0;
        f[i] = static_cast<double>(rng.next_below(1025)) / 1024.0;
        sens[i] = rng.next_below(2) == 1;
    }
    sens[0] = true;
    sens[1] = false;
    auto pair = make_pair(std::move(b), std::move(f));
    pair.sensitive = sens;
    return pair;
}

}  // namespace

TEST_CASE("diff_distribution worked example") {
    auto pair = make_pair({0.2, 0.5, 0.7}, {0.4, 0.3, 0.7});
    auto d = diff_distribution(pair);
    REQUIRE(d.diffs.size() == 3);
    CHECK(d.diffs[0] == doctest::Approx(0.2).epsilon(0).scale(1).epsilon(1e-12));
    CHECK(d.diffs[1] == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(d.diffs[2] == 0.0);
    CHECK(d.max_increase == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(d.max_decrease == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(std::fabs(d.mean_diff) <= kTol);
}

TEST_CASE("diff_distribution of identical outputs") {
    auto pair = make_pair({0.1, 0.6}, {0.1, 0.6});
    auto d = diff_distribution(pair);
    CHECK(d.max_increase == 0.0);
    CHECK(d.max_decrease == 0.0);
    CHECK(d.mean_diff == 0.0);
}

TEST_CASE("diff_distribution single element") {
    auto pair = make_pair({0.1}, {0.9});
    auto d = diff_distribution(pair);
    CHECK(d.diffs[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(d.max_increase == d.diffs[0]);
    CHECK(d.max_decrease == d.diffs[0]);
    CHECK(d.mean_diff == d.diffs[0]);
}

TEST_CASE("cap worked example at theta zero") {
    auto pair = make_pair({0.2, 0.5, 0.7}, {0.4, 0.3, 0.7});
    auto y = cap(pair, 0.0);
    CHECK(y[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(y[2] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("cap never binds with a large threshold") {
    auto pair = make_pair({0.2, 0.5, 0.7}, {0.4, 0.3, 0.7});
    CHECK(cap(pair, 10.0) == pair.fair);
}

TEST_CASE("cap of identical outputs at theta zero") {
    auto pair = make_pair({0.2, 0.5}, {0.2, 0.5});
    CHECK(cap(pair, 0.0) == pair.baseline);
}

TEST_CASE("cap accepts negative thresholds") {
    auto pair = make_pair({0.5, 0.5}, {0.4, 0.6});
    auto y = cap(pair, -0.2);
    CHECK(y[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("translate_nonpositive worked example") {
    auto pair = make_pair({0.2, 0.5, 0.7}, {0.4, 0.3, 0.7});
    auto y = translate_nonpositive(pair);
    CHECK(y[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(y[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("translate_nonpositive identity on equal outputs") {
    auto pair = make_pair({0.3, 0.4}, {0.3, 0.4});
    CHECK(translate_nonpositive(pair) == pair.baseline);
}

TEST_CASE("translate_nonpositive with all-negative diffs raises outputs") {
    auto pair = make_pair({0.5, 0.5}, {0.2, 0.4});  // diffs -0.3, -0.1
    auto y = translate_nonpositive(pair);
    CHECK(y[0] - pair.baseline[0] == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(y[1] - pair.baseline[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("normalize_diffs worked example") {
    auto pair = make_pair({0.4, 0.0, 0.0}, {0.0, 0.0, 0.1});  // diffs -0.4, 0, 0.1
    auto d = diff_distribution(pair);
    auto nd = normalize_diffs(d, -0.2, 0.0);
    CHECK(nd[0] == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(nd[1] == doctest::Approx(-0.04).epsilon(1e-12));
    CHECK(nd[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("normalize_diffs degenerate input maps to b") {
    // Dyadic values keep the diffs exactly constant in double arithmetic.
    auto pair = make_pair({0.125, 0.25, 0.375}, {0.375, 0.5, 0.625});
    auto d = diff_distribution(pair);
    auto nd = normalize_diffs(d, -0.5, -0.25);
    for (double v : nd) CHECK(v == -0.25);
}

TEST_CASE("normalize_diffs zero-width range") {
    auto pair = make_pair({0.4, 0.0, 0.0}, {0.0, 0.0, 0.1});
    auto d = diff_distribution(pair);
    auto nd = normalize_diffs(d, 0.3, 0.3);
    for (double v : nd) CHECK(v == 0.3);
}

TEST_CASE("normalize_diffs rejects inverted range") {
    auto pair = make_pair({0.1}, {0.2});
    auto d = diff_distribution(pair);
    CHECK_THROWS_AS(normalize_diffs(d, 0.5, -0.5), ValidationError);
}

TEST_CASE("normalize_translate_nonpositive worked example") {
    auto pair = make_pair({0.4, 0.0, 0.0}, {0.0, 0.0, 0.1});
    auto y = normalize_translate_nonpositive(pair, -0.2, 0.0);
    CHECK(y[0] - pair.baseline[0] == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(y[1] - pair.baseline[1] == doctest::Approx(-0.04).epsilon(1e-12));
    CHECK(y[2] - pair.baseline[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("normalize_translate_nonpositive keeps width when b exceeds zero") {
    auto pair = make_pair({0.4, 0.0, 0.0}, {0.0, 0.0, 0.1});
    auto y = normalize_translate_nonpositive(pair, -0.2, 0.1);
    std::vector<double> diffs(3);
    for (int i = 0; i < 3; ++i) diffs[i] = y[i] - pair.baseline[i];
    CHECK(*std::min_element(diffs.begin(), diffs.end()) == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(*std::max_element(diffs.begin(), diffs.end()) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("normalize_translate_nonpositive is identity on constant diffs") {
    auto pair = make_pair({0.125, 0.25, 0.375}, {0.375, 0.5, 0.625});
    auto y = normalize_translate_nonpositive(pair, -0.2, 0.0);
    for (int i = 0; i < 3; ++i) CHECK(y[i] == pair.baseline[i]);
}

TEST_CASE("translate_budget_neutral keeps already-neutral pair") {
    auto pair = make_pair({0.2, 0.5, 0.7}, {0.4, 0.3, 0.7});  // mean diff 0
    auto y = translate_budget_neutral(pair);
    for (int i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(pair.fair[i]).epsilon(1e-12));
}

TEST_CASE("translate_budget_neutral removes a constant shift") {
    auto pair = make_pair({0.1, 0.2, 0.3}, {0.2, 0.3, 0.4});
    auto y = translate_budget_neutral(pair);
    for (int i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(pair.baseline[i]).epsilon(1e-12));
}

TEST_CASE("translate_budget_neutral worked example") {
    auto pair = make_pair({0.0, 0.0}, {0.3, 0.1});
    auto y = translate_budget_neutral(pair);
    CHECK(y[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("normalize_translate_budget_neutral worked example") {
    auto pair = make_pair({0.4, 0.0, 0.0}, {0.0, 0.0, 0.1});  // diffs -0.4, 0, 0.1
    auto y = normalize_translate_budget_neutral(pair, -0.1, 0.1);
    CHECK(y[0] - pair.baseline[0] == doctest::Approx(-0.12).epsilon(1e-12));
    CHECK(y[1] - pair.baseline[1] == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(y[2] - pair.baseline[2] == doctest::Approx(0.08).epsilon(1e-12));
}

TEST_CASE("normalize_translate_budget_neutral is identity on constant diffs") {
    auto pair = make_pair({0.125, 0.25}, {0.375, 0.5});
    auto y = normalize_translate_budget_neutral(pair, -0.1, 0.1);
    CHECK(y[0] == pair.baseline[0]);
    CHECK(y[1] == pair.baseline[1]);
}

TEST_CASE("normalize_translate_budget_neutral is identity for symmetric diffs") {
    const double c = 0.25;
    auto pair = make_pair({0.5, 0.5}, {0.5 - c, 0.5 + c});
    auto y = normalize_translate_budget_neutral(pair, -c, c);
    CHECK(y[0] == doctest::Approx(pair.fair[0]).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(pair.fair[1]).epsilon(1e-12));
}

TEST_CASE("non-positive evolution holds exactly on grid data") {
    Rng rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        auto pair = random_grid_pair(rng, 60);
        auto y_cap = cap(pair, 0.0);
        auto y_tr = translate_nonpositive(pair);
        auto y_norm = normalize_translate_nonpositive(pair, -0.25, 0.0);
        for (std::size_t i = 0; i < pair.size(); ++i) {
            CHECK(y_cap[i] <= pair.baseline[i]);
            CHECK(y_tr[i] <= pair.baseline[i]);
            CHECK(y_norm[i] <= pair.baseline[i] + kTol);
        }
    }
}

TEST_CASE("pure translations preserve pairwise differences") {
    Rng rng(32);
    for (int trial = 0; trial < 50; ++trial) {
        auto pair = random_pair(rng, 30);
        auto y_tr = translate_nonpositive(pair);
        auto y_bu = translate_budget_neutral(pair);
        for (std::size_t i = 0; i < pair.size(); ++i) {
            for (std::size_t j = 0; j < pair.size(); ++j) {
                double want = pair.fair[i] - pair.fair[j];
                CHECK(std::fabs((y_tr[i] - y_tr[j]) - want) <= kTol);
                CHECK(std::fabs((y_bu[i] - y_bu[j]) - want) <= kTol);
            }
        }
    }
}

TEST_CASE("translations keep dp_disparity exactly on grid data") {
    Rng rng(33);
    for (int trial = 0; trial < 100; ++trial) {
        auto pair = random_grid_pair(rng, 50);
        double before = dp_disparity(pair.fair, pair.sensitive);
        CHECK(dp_disparity(translate_nonpositive(pair), pair.sensitive) == before);
        CHECK(dp_disparity(translate_budget_neutral(pair), pair.sensitive) == before);
    }
}

TEST_CASE("normalization preserves the rank order of diffs") {
    Rng rng(34);
    for (int trial = 0; trial < 50; ++trial) {
        auto pair = random_pair(rng, 40);
        auto d = diff_distribution(pair);
        auto y1 = normalize_translate_nonpositive(pair, -0.3, 0.0);
        auto y2 = normalize_translate_budget_neutral(pair, -0.1, 0.1);
        for (std::size_t i = 0; i < pair.size(); ++i) {
            for (std::size_t j = 0; j < pair.size(); ++j) {
                if (d.diffs[i] < d.diffs[j]) {
                    CHECK(y1[i] - pair.baseline[i] <= y1[j] - pair.baseline[j] + kTol);
                    CHECK(y2[i] - pair.baseline[i] <= y2[j] - pair.baseline[j] + kTol);
                }
            }
        }
    }
}

TEST_CASE("budget neutrality within 1e-12") {
    Rng rng(35);
    for (int trial = 0; trial < 200; ++trial) {
        auto pair = random_pair(rng, 500);
        auto y1 = translate_budget_neutral(pair);
        auto y2 = normalize_translate_budget_neutral(pair, -0.1, 0.1);
        std::vector<double> d1(pair.size()), d2(pair.size());
        for (std::size_t i = 0; i < pair.size(); ++i) {
            d1[i] = y1[i] - pair.baseline[i];
            d2[i] = y2[i] - pair.baseline[i];
        }
        CHECK(std::fabs(mean(d1)) <= kTol);
        CHECK(std::fabs(mean(d2)) <= kTol);
    }
}

TEST_CASE("translations are idempotent") {
    Rng rng(36);
    for (int trial = 0; trial < 50; ++trial) {
        auto pair = random_pair(rng, 60);
        auto once = translate_budget_neutral(pair);
        PredictionPair again = pair;
        again.fair = once;
        auto twice = translate_budget_neutral(again);
        for (std::size_t i = 0; i < pair.size(); ++i) {
            CHECK(std::fabs(twice[i] - once[i]) <= kTol);
        }

        auto np_once = translate_nonpositive(pair);
        again.fair = np_once;
        auto np_twice = translate_nonpositive(again);
        for (std::size_t i = 0; i < pair.size(); ++i) {
            CHECK(std::fabs(np_twice[i] - np_once[i]) <= kTol);
        }
    }
}

TEST_CASE("cap dominance in theta") {
    Rng rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        auto pair = random_pair(rng, 40);
        double t1 = rng.next_unit() - 0.5;
        double t2 = t1 + rng.next_unit();
        auto y1 = cap(pair, t1);
        auto y2 = cap(pair, t2);
        for (std::size_t i = 0; i < pair.size(); ++i) CHECK(y1[i] <= y2[i]);
    }
}

TEST_CASE("pair csv round-trips") {
    auto pair = make_pair({0.25, 0.5, 1.0 / 3.0}, {0.3, 0.1, 0.9});
    pair.row_ids = {4, 9, 17};
    pair.targets = {0.0, 1.0, 0.5};
    auto post = translate_budget_neutral(pair);

    std::ostringstream out;
    write_pair_csv(out, pair, post);

    std::istringstream in(out.str());
    std::vector<double> post_back;
    auto back = read_pair_csv(in, &post_back);

    CHECK(back.baseline == pair.baseline);
    CHECK(back.fair == pair.fair);
    CHECK(back.targets == pair.targets);
    CHECK(back.sensitive == pair.sensitive);
    CHECK(back.row_ids == pair.row_ids);
    CHECK(post_back == post);
}

TEST_CASE("pair csv leaves postprocessed column empty when absent") {
    auto pair = make_pair({0.1}, {0.2});
    std::ostringstream out;
    write_pair_csv(out, pair, {});
    CHECK(out.str().find(",,") != std::string::npos);

    std::istringstream in(out.str());
    std::vector<double> post_back;
    read_pair_csv(in, &post_back);
    CHECK(post_back.empty());
}

TEST_CASE("postproc algorithm names round-trip") {
    for (auto algo : {PostprocAlgo::cap, PostprocAlgo::translate_nonpos, PostprocAlgo::norm_nonpos,
                      PostprocAlgo::translate_budget, PostprocAlgo::norm_budget}) {
        CHECK(parse_postproc_algo(postproc_algo_name(algo)) == algo);
    }
    CHECK_THROWS_AS(parse_postproc_algo("median-match"), ValidationError);
}

TEST_CASE("prediction pair validation") {
    PredictionPair bad;
    bad.baseline = {0.1};
    bad.fair = {0.1, 0.2};
    bad.sensitive = {true};
    bad.targets = {0.5};
    CHECK_THROWS_AS(validate(bad), ValidationError);
    CHECK_THROWS_AS(diff_distribution(PredictionPair{}), ValidationError);
}
