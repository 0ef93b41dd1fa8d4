#include "persuasion/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "deviation_internal.hpp"

namespace persuasion {

namespace {

constexpr double kEdgeTol = 1e-12;

double sq(double v) { return v * v; }

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void HeteroParams::validate() const {
    if (!(mu1 > 0.0 && mu1 < 1.0 && mu2 > 0.0 && mu2 < 1.0))
        throw std::invalid_argument("hetero: means must lie in (0,1)");
    if (std::fabs(k - 1.0) > kEdgeTol)
        throw std::invalid_argument("hetero: closed forms require k = 1");
}

HeteroStage1Set hetero_stage1(const HeteroParams& hp, int second_visited) {
    hp.validate();
    if (second_visited != 1 && second_visited != 2)
        throw std::invalid_argument("hetero_stage1: sender id must be 1 or 2");
    const double m2 = second_visited == 2 ? hp.mu2 : hp.mu1;  // visited second
    const double m1 = second_visited == 2 ? hp.mu1 : hp.mu2;  // visited first
    const double q = 0.25;

    HeteroStage1Set out;
    auto done = [&](int c, std::vector<SupportInterval> set) {
        out.case_id = c;
        out.support = std::move(set);
        out.no_learning_first = support_set_contains(out.support, m1);
        return out;
    };
    if (m2 >= 0.5 - kEdgeTol && m2 <= 0.75 + kEdgeTol && m1 >= m2 - q - kEdgeTol &&
        m1 <= m2 + q + kEdgeTol)
        return done(1, {{m2 - q, 0.75}, {m2 + q, m2 + q}});
    if (m2 >= 0.75 - kEdgeTol && m1 >= m2 - q - kEdgeTol && m1 <= 0.75 + kEdgeTol)
        return done(2, {{m2 - q, 0.75}});
    if (m2 >= 0.25 - kEdgeTol && m2 <= 0.5 + kEdgeTol && m1 >= m2 - q - kEdgeTol &&
        m1 <= m2 + q + kEdgeTol)
        return done(3, {{m2 - q, m2 - q}, {0.25, m2 + q}});
    if (m2 <= 0.25 + kEdgeTol && m1 >= 0.25 - kEdgeTol && m1 <= m2 + q + kEdgeTol)
        return done(4, {{0.25, m2 + q}});
    throw out_of_region_error("hetero_stage1: no characterized case applies");
}

double hetero_value(const HeteroParams& hp) {
    hp.validate();
    // Ensure a characterized case applies for at least one visit order.
    bool any = false;
    for (int s : {2, 1}) {
        try {
            hetero_stage1(hp, s);
            any = true;
            break;
        } catch (const out_of_region_error&) {
        }
    }
    if (!any) throw out_of_region_error("hetero_value: outside the characterized region");
    const double m1 = hp.mu1, m2 = hp.mu2;
    return m1 * m1 + m2 * m2 + 0.5 * (m1 + m2) - 2.0 * m1 * m2 + 1.0 / 16.0;
}

EquilibriumReport check_hetero_fullinfo(const HeteroParams& hp) {
    hp.validate();
    const double m1 = hp.mu1, m2 = hp.mu2;
    EquilibriumReport rep;
    rep.sender1_payoff = 0.5 + 2.0 * (m1 - m2);
    rep.sender2_payoff = 0.5 + 2.0 * (m2 - m1);

    bool gap_ok = std::fabs(m2 - m1) <= 0.25 + kEdgeTol;
    bool cond1 = m1 >= 0.25 - kEdgeTol && m1 <= 0.75 + kEdgeTol &&
                 m2 >= 0.25 - kEdgeTol && m2 <= 0.75 + kEdgeTol;
    bool cond2 = (m1 <= 0.75 + kEdgeTol && m2 >= 0.75 - kEdgeTol) ||
                 (m2 <= 0.75 + kEdgeTol && m1 >= 0.75 - kEdgeTol);
    bool cond3 = (m1 <= 0.25 + kEdgeTol && m2 >= 0.25 - kEdgeTol) ||
                 (m2 <= 0.25 + kEdgeTol && m1 >= 0.25 - kEdgeTol);
    rep.closed_form_equilibrium = gap_ok && (cond1 || cond2 || cond3);
    if (!rep.closed_form_equilibrium) {
        rep.verdict = Verdict::Inconclusive;
        rep.out_of_region = true;
        rep.region_note =
            "outside the sufficient conditions (|mu2 - mu1| <= 1/4 plus one of "
            "three placement conditions); no claim is made";
        return rep;
    }

    // Exchangeability: a characterized case must apply in both visit orders.
    bool ex_ok = true;
    try {
        hetero_stage1(hp, 2);
        hetero_stage1(hp, 1);
    } catch (const out_of_region_error&) {
        ex_ok = false;
    }

    // Order indifference: solving either visit order numerically must give
    // the closed-form value.
    const double formula = m1 * m1 + m2 * m2 + 0.5 * (m1 + m2) - 2.0 * m1 * m2 +
                           1.0 / 16.0;
    auto full1 = BeliefDistribution::full_information(m1);
    auto full2 = BeliefDistribution::full_information(m2);
    OrderSolution o12 = solve_visit_order(full1, m1, full2, m2, 1.0, 1.0);
    OrderSolution o21 = solve_visit_order(full2, m2, full1, m1, 1.0, 1.0);
    double gap = std::max(std::fabs(o12.value - formula),
                          std::fabs(o21.value - formula));
    rep.receiver_value = formula;

    // Selection probability of the first-visited sender must be 0, 1, or
    // affine over the admissible stage-1 support.
    double max_resid = 0.0;
    for (int second : {2, 1}) {
        HeteroStage1Set set = hetero_stage1(hp, second);
        double mu_second = second == 2 ? m2 : m1;
        ModelParams view{1.0, mu_second, 0.0, 1.0};
        for (const auto& iv : set.support) {
            int n = iv.hi - iv.lo > kEdgeTol ? 41 : 1;
            for (int i = 0; i < n; ++i) {
                double x = n == 1 ? iv.lo : iv.lo + (iv.hi - iv.lo) * i / (n - 1);
                double p = select_first_prob(x, view);
                double affine = std::clamp(2.0 * (x - mu_second) + 0.5, 0.0, 1.0);
                max_resid = std::max(max_resid, std::fabs(p - affine));
            }
        }
    }

    if (!ex_ok || gap > 1e-6 || max_resid > 1e-6) {
        rep.verdict = Verdict::Inconclusive;
        std::ostringstream note;
        note << "in-region structural verification failed: exchangeability="
             << (ex_ok ? "ok" : "failed") << ", value gap=" << fmt(gap)
             << ", selection residual=" << fmt(max_resid);
        rep.region_note = note.str();
        return rep;
    }
    rep.verdict = Verdict::Equilibrium;
    rep.margin = 0.0;
    rep.margin_favorable = 0.0;
    std::ostringstream note;
    note << "order-indifferent value " << fmt(formula)
         << "; selection probability affine on the admissible support";
    rep.region_note = note.str();
    return rep;
}

EquilibriumReport check_public(const BeliefDistribution& p, const ModelParams& mp,
                               const DeviationSearchConfig& cfg) {
    mp.validate();
    if (!p.binary_support())
        throw std::invalid_argument("check_public: offer must be binary");
    if (std::fabs(p.mean() - mp.mu) > 1e-9)
        throw std::invalid_argument("check_public: offer mean != mu");
    ModelParams prof = mp;
    prof.l = p.support_lo();
    prof.h = p.support_hi();
    prof.validate();
    const double mu = prof.mu, k = prof.k;
    const double q = 1.0 / (4.0 * k);
    bool closed_eq = k > 1.0 / (2.0 * (prof.h - prof.l)) + kEdgeTol &&
                     mu >= prof.l + q - kEdgeTol && mu <= prof.h - q + kEdgeTol;

    double on_value = stage1_closed_form(prof).value;

    // Master grid: continuation against the on-path opponent (used when the
    // deviator is visited first).
    detail::SecondView sv{false, prof};
    detail::MasterGrid g = detail::build_master(sv, mu, k, cfg);
    detail::EvalBuffers buf;

    // Index range of the on-path support inside the master grid, for the
    // non-deviator-first branch.
    std::size_t il = detail::grid_index(g, prof.l);
    std::size_t ih = detail::grid_index(g, prof.h);

    DeviationSearchResult res;
    res.margin_neutral = -1e300;
    res.margin_favorable = -1e300;
    std::vector<double> u1b(g.x.size()), p2b(g.x.size());

    auto consider = [&](double alpha, double beta, bool uninf) {
        // Order A: the receiver visits the deviator first.
        detail::FirstVisitEval fa;
        if (uninf) {
            fa.value = g.u1[g.i_mu];
            fa.p_lo = fa.p_hi = g.ps[g.i_mu];
        } else {
            fa = detail::eval_first_visit(g, detail::grid_index(g, alpha),
                                          detail::grid_index(g, beta), buf);
        }
        // Order B: the receiver visits the non-deviator first and garbles the
        // deviation at stage 2.
        for (std::size_t i = il; i <= ih; ++i) {
            double x = g.x[i];
            double p2;
            double v2;
            if (uninf) {
                v2 = std::max(x, mu);
                p2 = mu > x + kEdgeTol ? 1.0 : (mu < x - kEdgeTol ? 0.0 : 0.5);
            } else {
                ModelParams dev_view{k, mu, alpha, beta};
                v2 = stage2_value(x, dev_view);
                p2 = 1.0 - select_first_prob(x, dev_view, cfg.tie_rule);
            }
            u1b[i] = v2 - k * sq(x - mu);
            p2b[i] = p2;
        }
        detail::FirstVisitEval fb =
            detail::eval_first_visit_values(g, u1b, p2b, il, ih, buf);

        double v_none = mu;
        double vmax = std::max({fa.value, fb.value, v_none});
        double lo = 1e300, hi = -1e300;
        if (fa.value >= vmax - 1e-9) {
            lo = std::min(lo, fa.p_lo);
            hi = std::max(hi, fa.p_hi);
        }
        if (fb.value >= vmax - 1e-9) {
            lo = std::min(lo, fb.p_lo);
            hi = std::max(hi, fb.p_hi);
        }
        if (v_none >= vmax - 1e-9) {
            lo = std::min(lo, 0.5);
            hi = std::max(hi, 0.5);
        }
        double gain_n = lo - 0.5;
        double gain_f = hi - 0.5;
        res.margin_neutral = std::max(res.margin_neutral, gain_n);
        res.margin_favorable = std::max(res.margin_favorable, gain_f);
        ++res.deviations_scanned;
        if (!res.best || gain_n > res.best->gain_neutral) {
            BeliefDistribution d = uninf ? BeliefDistribution::point_mass(mu)
                                         : BeliefDistribution::binary(alpha, beta, mu);
            std::ostringstream trace;
            trace << "publicly observed deviation: order values ["
                  << fmt(fa.value) << " deviator-first, " << fmt(fb.value)
                  << " other-first, " << fmt(v_none)
                  << " no visit]; selection probability range [" << fmt(lo)
                  << ", " << fmt(hi) << "]";
            res.best = DeviationFinding{1, d, gain_n, gain_f, trace.str()};
        }
    };

    consider(mu, mu, true);
    const double step = cfg.support_step;
    const int m = static_cast<int>(std::floor(1.0 / step + 0.5));
    for (int ja = 0; ja * step < mu - kEdgeTol; ++ja)
        for (int jb = m; jb * step > mu + kEdgeTol; --jb)
            consider(ja * step, std::min(1.0, jb * step), false);

    EquilibriumReport rep;
    rep.closed_form_equilibrium = closed_eq;
    rep.receiver_value = on_value;
    rep.sender1_payoff = 0.5;
    rep.sender2_payoff = 0.5;
    rep.margin = res.margin_neutral;
    rep.margin_favorable = res.margin_favorable;
    rep.best_deviation = res.best;
    rep.region_note = "publicly observed experiments; baseline region test applies";
    if (closed_eq && res.margin_neutral <= cfg.profit_threshold)
        rep.verdict = Verdict::Equilibrium;
    else if (!closed_eq && res.margin_neutral > cfg.profit_threshold)
        rep.verdict = Verdict::Refuted;
    else
        rep.verdict = Verdict::Inconclusive;
    if (rep.verdict != Verdict::Refuted) rep.best_deviation.reset();
    return rep;
}

EquilibriumReport check_costvariant_fullinfo(double mu, const CostModel& cm,
                                             const DeviationSearchConfig& cfg) {
    if (cm.mode() != CostModel::Mode::ExperimentDependent)
        throw std::invalid_argument(
            "check_costvariant_fullinfo: requires an experiment-dependent cost model");
    if (!(mu > 0.0 && mu < 1.0))
        throw std::invalid_argument("check_costvariant_fullinfo: mu must lie in (0,1)");

    auto full = BeliefDistribution::full_information(mu);
    const double kF = cm.coefficient(&full);  // the floor, by definition

    EquilibriumReport rep;
    rep.sender1_payoff = 0.5;
    rep.sender2_payoff = 0.5;
    const double q = kF > 0.0 ? 1.0 / (4.0 * kF) : 1e300;
    bool region = kF > 0.5 + kEdgeTol && mu >= q - kEdgeTol && mu <= 1.0 - q + kEdgeTol;
    rep.closed_form_equilibrium = region;
    if (!region) {
        rep.verdict = Verdict::Inconclusive;
        rep.out_of_region = true;
        rep.region_note =
            "hypothesis fails (needs k_F > 1/2 and mu in [1/(4k_F), 1-1/(4k_F)]); "
            "no equilibrium claim";
        return rep;
    }

    ModelParams base{kF, mu, 0.0, 1.0};
    rep.receiver_value = stage1_closed_form(base).value;

    // The receiver never visits the second sender on path, so deviations
    // matter only when the deviator is visited first, re-priced at the
    // deviation's own coefficient.
    detail::SecondView sv{false, base};
    detail::MasterGrid g = detail::build_master(sv, mu, kF, cfg);
    detail::EvalBuffers buf;
    std::vector<double> u1(g.x.size());

    DeviationSearchResult res;
    res.margin_neutral = -1e300;
    res.margin_favorable = -1e300;
    double worst_no_learning_gap = 0.0;

    auto consider = [&](double alpha, double beta, bool uninf) {
        detail::FirstVisitEval fv;
        double k_dev;
        if (uninf) {
            auto d = BeliefDistribution::point_mass(mu);
            k_dev = cm.coefficient(&d);
            fv.value = g.v2[g.i_mu];
            fv.p_lo = fv.p_hi = g.ps[g.i_mu];
        } else {
            auto d = BeliefDistribution::binary(alpha, beta, mu);
            k_dev = cm.coefficient(&d);
            for (std::size_t i = 0; i < g.x.size(); ++i)
                u1[i] = g.v2[i] - k_dev * sq(g.x[i] - mu);
            fv = detail::eval_first_visit_values(g, u1, g.ps,
                                                 detail::grid_index(g, alpha),
                                                 detail::grid_index(g, beta), buf);
            // Learning nothing at the deviator must remain a best response.
            worst_no_learning_gap =
                std::max(worst_no_learning_gap, fv.value - g.v2[g.i_mu]);
        }
        double gain_n = 0.5 * (fv.p_lo - 0.5);
        double gain_f = 0.5 * (fv.p_hi - 0.5);
        res.margin_neutral = std::max(res.margin_neutral, gain_n);
        res.margin_favorable = std::max(res.margin_favorable, gain_f);
        ++res.deviations_scanned;
        if (!res.best || gain_n > res.best->gain_neutral) {
            BeliefDistribution d = uninf ? BeliefDistribution::point_mass(mu)
                                         : BeliefDistribution::binary(alpha, beta, mu);
            res.best = DeviationFinding{
                1, d, gain_n, gain_f,
                "re-priced at coefficient " + fmt(k_dev) +
                    "; receiver may still learn nothing at the deviator"};
        }
    };

    consider(mu, mu, true);
    const double step = cfg.support_step;
    const int m = static_cast<int>(std::floor(1.0 / step + 0.5));
    for (int ja = 0; ja * step < mu - kEdgeTol; ++ja)
        for (int jb = m; jb * step > mu + kEdgeTol; --jb)
            consider(ja * step, std::min(1.0, jb * step), false);

    rep.margin = res.margin_neutral;
    rep.margin_favorable = res.margin_favorable;
    std::ostringstream note;
    note << "on-path coefficient " << fmt(kF)
         << "; max value of learning at a deviator over ignoring it: "
         << fmt(worst_no_learning_gap);
    rep.region_note = note.str();
    if (res.margin_neutral <= cfg.profit_threshold && worst_no_learning_gap <= 1e-9)
        rep.verdict = Verdict::Equilibrium;
    else
        rep.verdict = Verdict::Inconclusive;
    return rep;
}

}  // namespace persuasion
