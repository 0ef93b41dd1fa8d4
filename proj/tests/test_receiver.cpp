#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "persuasion/receiver.hpp"

using namespace persuasion;

TEST_SUITE_BEGIN("receiver");

namespace {

// Random parameter draws covering all five stage-2 regimes.
struct ParamDraw {
    ModelParams mp;
    double x;
};

ParamDraw draw_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double mu = 0.05 + 0.9 * u(rng);
    double l = mu * 0.9 * u(rng);
    double h = mu + (1.0 - mu) * (0.1 + 0.9 * u(rng));
    double kc = 1.0 / (2.0 * (h - l));
    double k = u(rng) < 0.5 ? kc * (0.15 + 0.84 * u(rng))   // slack regime
                            : kc * (1.01 + 3.0 * u(rng));   // tight regimes
    double x = l + (h - l) * u(rng);
    return {ModelParams{k, mu, l, h}, x};
}

// Points whose weight is below weight_tol are ignored: within ~1e-4 of a
// case boundary the two chord families tie to ~1e-8 in value and one of them
// carries a vanishing-mass endpoint the grid oracle cannot resolve.
bool supports_match(const BeliefDistribution& a, const BeliefDistribution& b,
                    double dist_tol, double weight_tol = 1e-3) {
    auto covered = [&](const BeliefDistribution& from, const BeliefDistribution& to) {
        for (std::size_t i = 0; i < from.size(); ++i) {
            if (from.weights()[i] < weight_tol) continue;
            double best = 1e300;
            for (double q : to.points())
                best = std::min(best, std::fabs(from.points()[i] - q));
            if (best > dist_tol) return false;
        }
        return true;
    };
    return covered(a, b) && covered(b, a);
}

}  // namespace

TEST_CASE("stage-2 payoff formula") {
    ModelParams mp{1.0, 0.5, 0.0, 1.0};
    CHECK(stage2_payoff(0.5, 0.5, mp) == doctest::Approx(0.5));
    CHECK(stage2_payoff(0.75, 0.5, mp) == doctest::Approx(0.6875));
    CHECK(stage2_payoff(0.25, 0.5, mp) == doctest::Approx(0.4375));
}

TEST_CASE("stage-2 closed form examples") {
    ModelParams mp{1.0, 0.5, 0.0, 1.0};
    auto s = stage2_closed_form(0.5, mp);
    REQUIRE(s.dist.binary_support());
    CHECK(s.dist.points()[0] == doctest::Approx(0.25));
    CHECK(s.dist.points()[1] == doctest::Approx(0.75));
    CHECK(s.dist.weights()[0] == doctest::Approx(0.5));

    auto s2 = stage2_closed_form(0.9, mp);
    CHECK(s2.dist.degenerate());
    CHECK(s2.dist.points()[0] == doctest::Approx(0.5));

    ModelParams mp3{1.0, 0.3, 0.0, 1.0};
    auto s3 = stage2_closed_form(0.2, mp3);
    REQUIRE(s3.dist.binary_support());
    CHECK(s3.dist.points()[0] == doctest::Approx(0.0));
    CHECK(s3.dist.points()[1] == doctest::Approx(std::sqrt(0.2)));
}

TEST_CASE("stage-2 oracle reproduces the closed form") {
    const int n = 2001;
    ModelParams mp{1.0, 0.5, 0.0, 1.0};
    double step = 1.0 / (n - 1);
    for (double x : {0.5, 0.9}) {
        auto cf = stage2_closed_form(x, mp);
        auto oc = stage2_oracle(x, mp, n);
        CHECK(std::fabs(cf.value - oc.value) < 1e-5);
        CHECK(supports_match(cf.dist, oc.dist, 2 * step));
    }
    ModelParams mp3{1.0, 0.3, 0.0, 1.0};
    auto cf = stage2_closed_form(0.2, mp3);
    auto oc = stage2_oracle(0.2, mp3, n);
    CHECK(std::fabs(cf.value - oc.value) < 1e-5);
    CHECK(supports_match(cf.dist, oc.dist, 2 * step));

    // enormous attention cost: learning is never worth it
    ModelParams huge{400.0, 0.5, 0.0, 1.0};
    auto sh = stage2_oracle(0.6, huge, n);
    CHECK(sh.dist.degenerate());
    CHECK(sh.dist.points()[0] == doctest::Approx(0.5));

    // cheap attention: the chord spans the whole support
    ModelParams cheap{0.4, 0.5, 0.0, 1.0};
    auto sc = stage2_closed_form(0.5, cheap);
    REQUIRE(sc.dist.binary_support());
    CHECK(sc.dist.points()[0] == doctest::Approx(0.0));
    CHECK(sc.dist.points()[1] == doctest::Approx(1.0));
    auto so = stage2_oracle(0.5, cheap, n);
    CHECK(supports_match(sc.dist, so.dist, 2 * step));
}

TEST_CASE("stage-2 closed form vs oracle on random draws") {
    std::mt19937_64 rng(2024);
    const int n = 2001;
    int per_case[6] = {0, 0, 0, 0, 0, 0};
    for (int trial = 0; trial < 500; ++trial) {
        auto [mp, x] = draw_params(rng);
        auto core = detail::stage2_core(x, mp.k, mp.mu, mp.l, mp.h);
        per_case[core.case_id]++;
        auto cf = stage2_closed_form(x, mp);
        auto oc = stage2_oracle(x, mp, n);
        double step = (mp.h - mp.l) / (n - 1);
        CHECK(std::fabs(cf.value - oc.value) < 1e-5);
        CHECK(supports_match(cf.dist, oc.dist, 2 * step + 1e-9));
    }
    for (int c = 1; c <= 5; ++c) CHECK(per_case[c] > 10);
}

TEST_CASE("stage-1 value composes the closed form with the stage-1 cost") {
    ModelParams mp{1.0, 0.5, 0.0, 1.0};
    CHECK(stage1_value(0.75, mp) == doctest::Approx(0.6875));
    CHECK(stage1_value(0.25, mp) == doctest::Approx(0.4375));
    CHECK(stage1_value(0.5, mp) == doctest::Approx(0.5625));
}

TEST_CASE("stage-1 closed form: multiplicity region") {
    ModelParams mp{1.0, 0.5, 0.0, 1.0};
    auto s1 = stage1_closed_form(mp);
    CHECK(s1.multiple);
    REQUIRE(s1.most_informative.dist.binary_support());
    CHECK(s1.most_informative.dist.points()[0] == doctest::Approx(0.25));
    CHECK(s1.most_informative.dist.points()[1] == doctest::Approx(0.75));
    CHECK(s1.value == doctest::Approx(0.5625));
    CHECK(support_set_contains(s1.admissible, 0.5));
    CHECK(support_set_contains(s1.admissible, 0.25));
    CHECK_FALSE(support_set_contains(s1.admissible, 0.1));

    ModelParams mp2{2.0, 0.5, 0.0, 1.0};
    auto s2 = stage1_closed_form(mp2);
    CHECK(s2.multiple);
    CHECK(s2.case_id == 3);
    CHECK(s2.most_informative.dist.points()[0] == doctest::Approx(0.375));
    CHECK(s2.most_informative.dist.points()[1] == doctest::Approx(0.625));
    CHECK_FALSE(support_set_contains(s2.admissible, 0.3));
}

TEST_CASE("stage-1 closed form: unique binary region") {
    ModelParams mp{1.0, 0.2, 0.0, 1.0};
    auto s1 = stage1_closed_form(mp);
    CHECK_FALSE(s1.multiple);
    REQUIRE(s1.most_informative.dist.binary_support());
    CHECK(s1.most_informative.dist.points()[0] == doctest::Approx(0.0));
    double y1 = s1.most_informative.dist.points()[1];
    CHECK(y1 > 0.2);
    CHECK(y1 < 0.25);

    // numeric endpoint maximizes the pinned chord slope: verify against a
    // brute-force scan of the stage-1 value
    double best = -1e300, best_z = 0.0;
    for (int i = 1; i <= 100000; ++i) {
        double z = i / 100000.0;
        double s = (stage1_value(z, mp) - stage1_value(0.0, mp)) / z;
        if (s > best) {
            best = s;
            best_z = z;
        }
    }
    CHECK(std::fabs(best_z - y1) < 1e-4);

    // mirror case
    ModelParams mp2{1.0, 0.8, 0.0, 1.0};
    auto s2 = stage1_closed_form(mp2);
    CHECK_FALSE(s2.multiple);
    CHECK(s2.most_informative.dist.points()[1] == doctest::Approx(1.0));
    double y2 = s2.most_informative.dist.points()[0];
    CHECK(y2 > 0.75);
    CHECK(y2 < 0.8);
}

TEST_CASE("stage-1 closed form value agrees with the envelope oracle") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        auto [mp, x] = draw_params(rng);
        (void)x;
        if (std::fabs(mp.mu - 0.5 * (mp.l + mp.h)) < 0.02) continue;  // knife edge
        auto s1 = stage1_closed_form(mp);
        auto f = SampledFunction::sample(
            [&](double z) { return stage1_value(z, mp); }, mp.l, mp.h, 4001,
            stage2_case_breakpoints(mp));
        auto oracle = optimal_garbling(f, mp.mu);
        CHECK(s1.value == doctest::Approx(oracle.value).epsilon(1e-6));
    }
}

TEST_CASE("no perfect learning and some learning always") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        double mu = 0.05 + 0.9 * u(rng);
        double k = 0.15 + 2.5 * u(rng);
        if (std::fabs(mu - 0.5) < 0.02 && k < 0.55) continue;  // knife edge
        ModelParams mp{k, mu, 0.0, 1.0};
        auto s1 = stage1_closed_form(mp);
        // some learning always: the canonical optimum is non-degenerate
        REQUIRE(s1.most_informative.dist.binary_support());
        // never full information at stage 1
        bool is_full = s1.most_informative.dist.points()[0] < 1e-9 &&
                       s1.most_informative.dist.points()[1] > 1.0 - 1e-9;
        CHECK_FALSE(is_full);
    }
}

TEST_CASE("stage-1 value is continuous: adjacent-grid jumps shrink with the grid") {
    ModelParams mp{0.7, 0.4, 0.1, 0.9};
    auto max_jump = [&](int n) {
        double prev = stage1_value(mp.l, mp), worst = 0.0;
        for (int i = 1; i < n; ++i) {
            double x = mp.l + (mp.h - mp.l) * i / (n - 1);
            double v = stage1_value(x, mp);
            worst = std::max(worst, std::fabs(v - prev));
            prev = v;
        }
        return worst;
    };
    double j1 = max_jump(1000);
    double j2 = max_jump(4000);
    CHECK(j2 < j1 / 2.0);
    CHECK(j1 < 0.01);
}

TEST_CASE("best response: both senders fully informative") {
    ModelParams mp{1.0, 0.5, 0.0, 1.0};
    auto full = BeliefDistribution::full_information(0.5);
    auto s = best_response(full, full, mp);
    CHECK(s.visits_anyone);
    CHECK(s.first_visit_prob == doctest::Approx(0.5));
    CHECK(s.value == doctest::Approx(9.0 / 16.0));
    REQUIRE(s.stage1.dist.binary_support());
    CHECK(s.stage1.dist.points()[0] == doctest::Approx(0.25));
    CHECK(s.stage1.dist.points()[1] == doctest::Approx(0.75));
    for (const auto& e : s.stage2) CHECK(e.action != StopAction::Continue);
    CHECK(s.sender1_payoff == doctest::Approx(0.5));
    CHECK(s.gross_value - s.stage1_cost - s.stage2_cost == doctest::Approx(s.value));
}

TEST_CASE("best response: both senders uninformative") {
    ModelParams mp{1.0, 0.4, 0.0, 1.0};
    auto none = BeliefDistribution::point_mass(0.4);
    auto s = best_response(none, none, mp);
    CHECK_FALSE(s.visits_anyone);
    CHECK(s.value == doctest::Approx(0.4));
    CHECK(s.sender1_payoff == doctest::Approx(0.5));
}

TEST_CASE("best response: informative sender gets the visit") {
    ModelParams mp{1.0, 0.5, 0.0, 1.0};
    auto none = BeliefDistribution::point_mass(0.5);
    auto full = BeliefDistribution::full_information(0.5);
    auto s = best_response(none, full, mp);
    CHECK(s.visits_anyone);
    CHECK(s.first_visit_prob == doctest::Approx(0.0));  // sender 2 visited first
    CHECK(s.value == doctest::Approx(9.0 / 16.0));
    CHECK(s.stage1.dist.points()[0] == doctest::Approx(0.25));
    CHECK(s.stage1.dist.points()[1] == doctest::Approx(0.75));
}

TEST_CASE("best response value is order-invariant for symmetric profiles") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        double mu = 0.2 + 0.6 * u(rng);
        double k = 0.6 + 1.5 * u(rng);
        ModelParams mp{k, mu, 0.0, 1.0};
        auto full = BeliefDistribution::full_information(mu);
        auto o1 = solve_visit_order(full, mu, full, mu, k, k);
        auto o2 = solve_visit_order(full, mu, full, mu, k, k);
        CHECK(o1.value == doctest::Approx(o2.value).epsilon(1e-12));
        auto s = best_response(full, full, mp);
        CHECK(s.first_visit_prob == doctest::Approx(0.5));
    }
}

TEST_CASE("best response handles non-binary offers through the candidate search") {
    // k strictly above 1/(2 mu), so {mu - 1/(4k), mu + 1/(4k)} is a strict
    // contraction of the uniform offer and the receiver attains the
    // unrestricted optimum mu + 1/(16k).
    double k = 1.3, mu = 0.4;
    ModelParams mp{k, mu, 0.0, 1.0};
    auto offer = uniform_benchmark(mu, 400);
    auto s = best_response(offer, offer, mp, TieRule::FirstVisited,
                           OracleConfig{1201, 0.01});
    CHECK(s.value == doctest::Approx(mu + 1.0 / (16.0 * k)).epsilon(1e-9));
    REQUIRE(s.stage1.dist.binary_support());
    CHECK(s.stage1.dist.points()[0] == doctest::Approx(mu - 1.0 / (4.0 * k)));
    CHECK(s.stage1.dist.points()[1] == doctest::Approx(mu + 1.0 / (4.0 * k)));
}

TEST_CASE("best response rejects offers violating Bayes plausibility") {
    ModelParams mp{1.0, 0.5, 0.0, 1.0};
    auto off_mean = BeliefDistribution::binary(0.0, 1.0, 0.6);
    auto full = BeliefDistribution::full_information(0.5);
    CHECK_THROWS_AS(best_response(off_mean, full, mp), std::invalid_argument);
}

TEST_SUITE_END();
