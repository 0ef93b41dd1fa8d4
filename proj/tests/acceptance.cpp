// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Each check pins its tolerance in code and recomputes its
// expected values from independent routes where the design calls for it.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "persuasion/extensions.hpp"

using namespace persuasion;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("criterion %2d: %s - %s (%s; %.1fs)\n", id,
                pass ? "PASS" : "FAIL", name.c_str(), detail.c_str(), seconds);
    if (!pass) ++failures;
}

struct Timer {
    Clock::time_point t0 = Clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    }
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
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

// ---- criterion 1: stage-2 closed form vs concavification oracle ----
void criterion1() {
    Timer t;
    std::mt19937_64 rng(20240801);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = 2001;
    const int trials = 10000;
    int per_case[6] = {0};
    int bad = 0;
    double worst_value_gap = 0.0;
    for (int i = 0; i < trials; ++i) {
        double mu = 0.05 + 0.9 * u(rng);
        double l = mu * 0.9 * u(rng);
        double h = mu + (1.0 - mu) * (0.1 + 0.9 * u(rng));
        double kc = 1.0 / (2.0 * (h - l));
        double k = u(rng) < 0.4 ? kc * (0.15 + 0.84 * u(rng))
                                : kc * (1.01 + 3.0 * u(rng));
        double x = l + (h - l) * u(rng);
        ModelParams mp{k, mu, l, h};
        auto core = detail::stage2_core(x, k, mu, l, h);
        per_case[core.case_id]++;
        auto cf = stage2_closed_form(x, mp);
        auto oc = stage2_oracle(x, mp, n);
        double step = (h - l) / (n - 1);
        double gap = std::fabs(cf.value - oc.value);
        worst_value_gap = std::max(worst_value_gap, gap);
        if (gap > 1e-5 || !supports_match(cf.dist, oc.dist, 2.0 * step + 1e-9))
            ++bad;
    }
    bool covered = true;
    for (int c = 1; c <= 5; ++c) covered = covered && per_case[c] >= 100;
    double sec = t.elapsed();
    report(1, "stage-2 closed form vs concavification oracle",
           bad == 0 && covered && sec <= 60.0,
           fmt("%d/%d agree within 1e-5 and 2 grid steps, worst value gap %.2g, "
               "case counts %d/%d/%d/%d/%d",
               trials - bad, trials, worst_value_gap, per_case[1], per_case[2],
               per_case[3], per_case[4], per_case[5]),
           sec);
}

// ---- criterion 2: full-information region map ----
void criterion2() {
    Timer t;
    DeviationSearchConfig cfg;  // defaults: step 0.005, threshold 1e-4
    int checked = 0, wrong = 0, missing_cert = 0;
    std::string first_wrong;
    for (double k : {0.6, 1.0, 2.0}) {
        auto cells = region_sweep(k, 0.0, 1.0, 99, cfg, true);
        double lo = 1.0 / (4.0 * k), hi = 1.0 - 1.0 / (4.0 * k);
        double step = 1.0 / 99.0;
        for (const auto& c : cells) {
            bool boundary = std::fabs(c.mu - lo) <= step || std::fabs(c.mu - hi) <= step;
            if (boundary) continue;
            ++checked;
            bool inside = c.mu > lo && c.mu < hi;
            if (inside && c.verdict != Verdict::Equilibrium) {
                ++wrong;
                if (first_wrong.empty())
                    first_wrong = fmt("k=%g mu=%.4f not equilibrium", k, c.mu);
            }
            if (!inside) {
                if (c.verdict != Verdict::Refuted) {
                    ++wrong;
                    if (first_wrong.empty())
                        first_wrong = fmt("k=%g mu=%.4f not refuted", k, c.mu);
                } else {
                    ModelParams mp{k, c.mu, 0.0, 1.0};
                    auto rep = check_full_info(mp, cfg);
                    if (!rep.best_deviation.has_value()) ++missing_cert;
                }
            }
        }
    }
    auto low = region_sweep(0.4, 0.0, 1.0, 99, cfg, true);
    for (const auto& c : low) {
        ++checked;
        if (c.verdict != Verdict::Refuted) {
            ++wrong;
            if (first_wrong.empty())
                first_wrong = fmt("k=0.4 mu=%.4f not refuted", c.mu);
        }
    }
    double sec = t.elapsed();
    report(2, "full-information region map (k in {0.6,1,2}, k=0.4 all refuted)",
           wrong == 0 && missing_cert == 0 && sec <= 300.0,
           wrong == 0 ? fmt("%d non-boundary cells match, certificates present",
                            checked)
                      : fmt("%d mismatches (%s)", wrong, first_wrong.c_str()),
           sec);
}

// ---- criterion 3: first-visit selection probability is 1/2 ----
void criterion3() {
    Timer t;
    int checked = 0, bad = 0;
    double worst = 0.0;
    for (double mu : {0.3, 0.5, 0.7}) {
        ModelParams mp{1.0, mu, 0.0, 1.0};
        auto s1 = stage1_closed_form(mp);
        double lo = mu - 0.25, hi = mu + 0.25;
        double mid_lo = std::max(0.25, lo), mid_hi = std::min(0.75, hi);
        std::vector<BeliefDistribution> garblings;
        garblings.push_back(BeliefDistribution::binary(lo, hi, mu));
        garblings.push_back(BeliefDistribution::point_mass(mu));
        garblings.push_back(BeliefDistribution::binary(mid_lo, hi, mu));
        garblings.push_back(
            BeliefDistribution::binary(0.5 * (mid_lo + mu), 0.5 * (mu + mid_hi), mu));
        {
            // three-point mixture on {lo, mu, hi}
            double wm = 0.4, rest = 1.0 - wm;
            double wl = (rest * hi - (mu - wm * mu)) / (hi - lo);
            garblings.push_back(
                BeliefDistribution({lo, mu, hi}, {wl, wm, rest - wl}));
        }
        {
            // asymmetric three-point mixture
            double a = lo, m = 0.5 * (mid_lo + mid_hi), b = mid_hi;
            double wm = 0.3, rest = 1.0 - wm;
            double wl = (rest * b - (mu - wm * m)) / (b - a);
            if (wl > 0.0 && rest - wl > 0.0)
                garblings.push_back(BeliefDistribution({a, m, b}, {wl, wm, rest - wl}));
        }
        for (const auto& g : garblings) {
            if (!s1.multiple) continue;
            double v = first_visit_value(g, mp);
            worst = std::max(worst, std::fabs(v - 0.5));
            if (std::fabs(v - 0.5) > 1e-6) ++bad;
            ++checked;
        }
    }
    report(3, "first-visit selection probability equals 1/2",
           bad == 0 && checked >= 15,
           fmt("%d optimal garblings checked, worst |V1 - 1/2| = %.2g", checked,
               worst),
           t.elapsed());
}

// ---- criterion 4: receiver value identity ----
void criterion4() {
    Timer t;
    ModelParams mp{1.0, 0.5, 0.0, 1.0};
    auto full = BeliefDistribution::full_information(0.5);
    double v = best_response(full, full, mp).value;
    double hv = hetero_value(HeteroParams{0.5, 0.5, 1.0});
    bool pass = std::fabs(v - 9.0 / 16.0) <= 1e-6 && std::fabs(hv - v) <= 1e-12;
    report(4, "receiver value 9/16 at k=1, mu=1/2 (two formulas)", pass,
           fmt("best_response=%.9f hetero_value=%.9f", v, hv), t.elapsed());
}

// ---- criterion 5: costless-attention benchmarks ----
void criterion5() {
    Timer t;
    bool pass = true;
    std::string detail;
    for (double mu : {0.25, 0.4, 0.5}) {
        auto rep = kzero_uniform_check(mu, 0.01);
        if (rep.max_abs_dev_from_half > 1e-9) {
            pass = false;
            detail = fmt("uniform mu=%g deviates by %.2g", mu,
                         rep.max_abs_dev_from_half);
        }
    }
    for (double lam : {0.25, 0.5, 0.75}) {
        auto rep = kzero_atom_check(0.75, lam, 0.01);
        double mu = 0.75;
        // independent route: deviation payoff minus on-path payoff
        double on = (2.0 * (2.0 * mu - 1.0) * (2.0 * mu - 1.0) * lam +
                     (1.0 - mu) * (3.0 * mu - 1.0)) /
                    (2.0 * mu * mu);
        double dev = 1.0 + 2.0 * lam * mu - lam - mu;
        if (std::fabs(rep.zero_one_gain1 - (dev - on)) > 1e-9) {
            pass = false;
            detail = fmt("atom gain mismatch at lambda=%g", lam);
        }
        if (rep.max_abs_binary_dev_from_half > 1e-9) {
            pass = false;
            detail = fmt("atom binary deviations stray at lambda=%g", lam);
        }
    }
    auto fi = kzero_fullinfo_refute(0.5, 10);
    double lhs = (1.0 + 20.0 - std::sqrt(41.0)) / 20.0;
    if (std::fabs(fi.lhs - lhs) > 1e-9 || !fi.profitable || fi.lhs <= 0.5) {
        pass = false;
        detail = fmt("full-info refutation family: lhs=%.6f", fi.lhs);
    }
    if (pass)
        detail = fmt("uniform exact 1/2; atom gains match to 1e-9; n=10 family "
                     "lhs=%.6f > 1/2",
                     fi.lhs);
    report(5, "k=0 benchmarks (uniform, atom, refutation family)", pass, detail,
           t.elapsed());
}

// ---- criterion 6: contraction-boundary flips of the benchmark profiles ----
void criterion6() {
    Timer t;
    bool pass = true;
    std::string detail = "flips at";
    const double kstep = 0.005;
    auto flip_point = [&](double mu, bool atom) {
        double target = atom ? 1.0 / (4.0 * (1.0 - mu)) : 1.0 / (2.0 * mu);
        BeliefDistribution bench =
            atom ? atom_benchmark(mu, 1000) : uniform_benchmark(mu, 1000);
        double first_true = -1.0;
        for (double k = target - 0.1; k <= target + 0.1 + 1e-12; k += kstep) {
            double q = 1.0 / (4.0 * k);
            bool ok = false;
            if (mu - q >= 0.0 && mu + q <= 1.0) {
                auto g = BeliefDistribution::binary(mu - q, mu + q, mu);
                ok = is_garbling(g, bench);
            }
            if (ok && first_true < 0.0) first_true = k;
            if (!ok && first_true >= 0.0) return -2.0;  // non-monotone flip
        }
        return first_true < 0.0 ? -1.0 : first_true;
    };
    for (double mu : {0.3, 0.4, 0.5}) {
        double k = flip_point(mu, false);
        double target = 1.0 / (2.0 * mu);
        if (k < 0.0 || std::fabs(k - target) > kstep + 1e-12) pass = false;
        detail += fmt(" u%.1f:%.3f(%.3f)", mu, k, target);
    }
    for (double mu : {0.7, 0.8}) {
        double k = flip_point(mu, true);
        double target = 1.0 / (4.0 * (1.0 - mu));
        if (k < 0.0 || std::fabs(k - target) > kstep + 1e-12) pass = false;
        detail += fmt(" a%.1f:%.3f(%.3f)", mu, k, target);
    }
    report(6, "contraction test flips at the outcome-equivalence thresholds", pass,
           detail, t.elapsed());
}

// ---- criterion 7: binary symmetric profiles at random parameters ----
void criterion7() {
    Timer t;
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DeviationSearchConfig cfg;
    int done = 0, bad = 0;
    std::string first_bad;
    while (done < 20) {
        double l = 0.35 * u(rng);
        double h = 0.65 + 0.35 * u(rng);
        double mu = l + (h - l) * (0.15 + 0.7 * u(rng));
        double k = (0.3 + 1.7 * u(rng)) / (h - l) * 0.5;
        if (std::fabs(mu - 0.5 * (l + h)) < 0.02) continue;  // knife edge
        double q = 1.0 / (4.0 * k);
        bool closed = k > 1.0 / (2.0 * (h - l)) && mu >= l + q && mu <= h - q;
        // skip draws within a deviation step of the region boundary
        if (k > 1.0 / (2.0 * (h - l)) &&
            (std::fabs(mu - (l + q)) < cfg.support_step ||
             std::fabs(mu - (h - q)) < cfg.support_step))
            continue;
        if (std::fabs(k - 1.0 / (2.0 * (h - l))) < 0.02) continue;
        auto p = BeliefDistribution::binary(l, h, mu);
        ModelParams mp{k, mu, 0.0, 1.0};
        auto rep = check_binary_symmetric(p, mp, cfg);
        bool ok = closed ? (rep.verdict == Verdict::Equilibrium &&
                            rep.margin <= cfg.profit_threshold)
                         : (rep.verdict == Verdict::Refuted &&
                            rep.margin > cfg.profit_threshold);
        if (!ok) {
            ++bad;
            if (first_bad.empty())
                first_bad = fmt("l=%.3f h=%.3f mu=%.3f k=%.3f verdict=%s margin=%.3g",
                                l, h, mu, k, to_string(rep.verdict).c_str(),
                                rep.margin);
        }
        ++done;
    }
    report(7, "binary symmetric verdicts at 20 random parameter triples", bad == 0,
           bad == 0 ? "all verdicts match the closed form, margins concur"
                    : first_bad,
           t.elapsed());
}

// ---- criterion 8: single-sender benchmark ----
void criterion8() {
    Timer t;
    SingleSenderParams ssp{0.6, 1.0, 0.5};
    auto sol = single_sender_solve(ssp, 0.005, 2001);
    auto [fixed_garbling, fixed_acc] =
        single_sender_response(BeliefDistribution::binary(0.0, 0.6, 0.5), ssp);
    auto [full_resp, full_acc] =
        single_sender_response(BeliefDistribution::full_information(0.5), ssp);
    bool pass = sol.acceptance > 0.0;
    pass = pass && fixed_acc == 0.0;
    pass = pass && is_garbling(sol.receiver_garbling, full_resp, 1e-4);
    pass = pass && !sol.receiver_garbling.approx_equal(full_resp, 1e-3);
    report(8, "single sender: positive acceptance, {0,lambda} rejected, strict contraction",
           pass,
           fmt("acceptance=%.4f, {0,lambda} acceptance=%.1f, full-info response "
               "{%.3f, %.3f}",
               sol.acceptance, fixed_acc, full_resp.support_lo(),
               full_resp.support_hi()),
           t.elapsed());
}

// ---- criterion 9: heterogeneous means ----
void criterion9() {
    Timer t;
    std::mt19937_64 rng(99991);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    int ex_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        HeteroParams hp{u(rng), u(rng), 1.0};
        bool a = true, b = true;
        try { hetero_stage1(hp, 2); } catch (const out_of_region_error&) { a = false; }
        try { hetero_stage1(hp, 1); } catch (const out_of_region_error&) { b = false; }
        if (a != b) ++ex_bad;
    }
    int grid_bad = 0, value_bad = 0, in_region = 0;
    double worst_gap = 0.0;
    const int steps = 50;
    for (int i = 0; i < steps; ++i) {
        for (int j = 0; j < steps; ++j) {
            double m1 = (i + 0.5) / steps;
            double m2 = (j + 0.5) / steps;
            bool gap_ok = std::fabs(m2 - m1) <= 0.25 + 1e-12;
            bool c1 = m1 >= 0.25 && m1 <= 0.75 && m2 >= 0.25 && m2 <= 0.75;
            bool c2 = (m1 <= 0.75 && m2 >= 0.75) || (m2 <= 0.75 && m1 >= 0.75);
            bool c3 = (m1 <= 0.25 && m2 >= 0.25) || (m2 <= 0.25 && m1 >= 0.25);
            bool expected = gap_ok && (c1 || c2 || c3);
            auto rep = check_hetero_fullinfo(HeteroParams{m1, m2, 1.0});
            bool got_eq = rep.verdict == Verdict::Equilibrium;
            if (got_eq != expected) ++grid_bad;
            if (expected) {
                ++in_region;
                // order indifference, via the numeric protocol values
                auto f1 = BeliefDistribution::full_information(m1);
                auto f2 = BeliefDistribution::full_information(m2);
                double formula = hetero_value(HeteroParams{m1, m2, 1.0});
                double g1 = std::fabs(
                    solve_visit_order(f1, m1, f2, m2, 1.0, 1.0).value - formula);
                double g2 = std::fabs(
                    solve_visit_order(f2, m2, f1, m1, 1.0, 1.0).value - formula);
                worst_gap = std::max({worst_gap, g1, g2});
                if (g1 > 1e-6 || g2 > 1e-6) ++value_bad;
            }
        }
    }
    report(9, "heterogeneous means: exchangeability, verdict grid, order indifference",
           ex_bad == 0 && grid_bad == 0 && value_bad == 0,
           fmt("exchangeability 1000/1000, 50x50 verdicts match, %d in-region "
               "cells, worst order gap %.2g",
               in_region, worst_gap),
           t.elapsed());
}

// ---- criterion 10: cost monotonicity under contraction ----
void criterion10() {
    Timer t;
    std::mt19937_64 rng(314159);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        double l = 0.4 * u(rng), h = 0.6 + 0.4 * u(rng);
        double mu = l + (h - l) * (0.15 + 0.7 * u(rng));
        BeliefDistribution p = i % 2 == 0
                                   ? BeliefDistribution::binary(l, h, mu)
                                   : BeliefDistribution(
                                         {l, 0.5 * (l + mu), mu + 0.3 * (h - mu), h},
                                         {0.2, 0.3, 0.3, 0.2});
        if (i % 2 == 1) mu = p.mean();
        BeliefDistribution q =
            i % 3 == 0 ? BeliefDistribution::point_mass(mu)
            : i % 3 == 1
                ? BeliefDistribution::binary(l + 0.3 * (mu - l),
                                             mu + 0.6 * (h - mu), mu)
                : BeliefDistribution::binary(l + 0.05 * (mu - l),
                                             mu + 0.9 * (h - mu), mu);
        if (!is_garbling(q, p)) continue;
        double k = 0.2 + 2.0 * u(rng);
        if (attention_cost(q, mu, k) > attention_cost(p, mu, k) + 1e-15)
            ++violations;
    }
    report(10, "attention cost is monotone under contraction", violations == 0,
           fmt("%d violations in 1000 random pairs", violations), t.elapsed());
}

}  // namespace

int main() {
    Timer total;
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    std::printf("acceptance: %s (%d/10 criteria, %.1fs total)\n",
                failures == 0 ? "ALL PASS" : "FAILURES", 10 - failures,
                total.elapsed());
    return failures == 0 ? 0 : 1;
}
