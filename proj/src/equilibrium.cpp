#include "persuasion/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
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

// Closed-form equilibrium region of the symmetric binary profile {l, h}.
bool closed_form_region(const ModelParams& mp) {
    double q = 1.0 / (4.0 * mp.k);
    return mp.k > 1.0 / (2.0 * (mp.h - mp.l)) + kEdgeTol &&
           mp.mu >= mp.l + q - kEdgeTol && mp.mu <= mp.h - q + kEdgeTol;
}

struct OnPathBranch {
    double x = 0.0;
    double w = 0.0;
    bool visits = false;  // receiver visits the second sender at this belief
    double p2_on = 0.0;   // P(second-visited selected | x) on path
};

struct OnPath {
    Stage1Solution s1;
    std::vector<OnPathBranch> branches;
    double u_first = 0.0;   // P(first-visited selected) on path
    double u_second = 0.0;  // complement
};

OnPath solve_on_path(const ModelParams& mp, TieRule tie) {
    OnPath op{stage1_closed_form(mp), {}, 0.0, 0.0};
    const BeliefDistribution& F = op.s1.most_informative.dist;
    for (std::size_t i = 0; i < F.size(); ++i) {
        OnPathBranch br;
        br.x = F.points()[i];
        br.w = F.weights()[i];
        auto core = detail::stage2_core(br.x, mp.k, mp.mu, mp.l, mp.h);
        br.visits = !core.is_degenerate;  // indifferent => she does not visit
        br.p2_on = 1.0 - select_first_prob(br.x, mp, tie);
        op.u_first += br.w * (1.0 - br.p2_on);
        op.branches.push_back(br);
    }
    op.u_second = 1.0 - op.u_first;
    return op;
}

std::string first_visit_trace(const detail::FirstVisitEval& fv) {
    std::ostringstream os;
    os << "visited first: receiver optimum leaves selection probability in ["
       << fmt(fv.p_lo) << ", " << fmt(fv.p_hi) << "]";
    return os.str();
}

// Closed-form deviation candidates built from the on-path stage-1 beliefs
// that are followed by a second visit. They cover the refutation families
// whose profitable window can be narrower than the scan grid: raising the
// low point so the receiver learns nothing at a second-visited deviator and
// selects it at the prior, or capping the high point just below the
// receiver's on-path stage-2 reach.
std::vector<std::pair<double, double>> targeted_deviations(const ModelParams& prof,
                                                           const OnPath& op) {
    std::vector<std::pair<double, double>> out;
    const double k = prof.k, mu = prof.mu;
    auto push = [&](double a, double b) {
        if (a >= 0.0 && b <= 1.0 && a < mu - 1e-9 && b > mu + 1e-9)
            out.emplace_back(a, b);
    };
    for (const auto& br : op.branches) {
        if (!br.visits) continue;
        double w = br.x;
        if (w < mu) {
            // smallest l' with w <= l' + k (mu - l')^2
            double disc = 1.0 - 4.0 * k * (mu - w);
            if (disc >= 0.0) {
                double d = (1.0 - std::sqrt(disc)) / (2.0 * k);
                for (double eps : {0.0, 1e-6, 1e-4, 1e-3})
                    push(mu - d + eps, prof.h);
            }
        } else {
            auto core = detail::stage2_core(w, k, mu, prof.l, prof.h);
            if (!core.is_degenerate) {
                for (double eps : {1e-6, 1e-4, 1e-3, 1e-2})
                    push(prof.l, core.y2 - eps);
            }
        }
    }
    return out;
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Equilibrium: return "equilibrium";
        case Verdict::Refuted: return "refuted";
        default: return "inconclusive";
    }
}

double selection_probability(double x, const ModelParams& mp) {
    Stage1Solution s1 = stage1_closed_form(mp);
    if (!s1.multiple)
        throw out_of_region_error(
            "selection probability characterized only in the multiplicity region");
    if (!support_set_contains(s1.admissible, x))
        throw std::invalid_argument(
            "selection probability: x is not an admissible stage-1 support point");
    return std::clamp(2.0 * mp.k * (x - mp.mu) + 0.5, 0.0, 1.0);
}

double first_visit_value(const BeliefDistribution& F, const ModelParams& mp) {
    Stage1Solution s1 = stage1_closed_form(mp);
    if (!s1.multiple)
        throw out_of_region_error(
            "first-visit value characterized only in the multiplicity region");
    if (std::fabs(F.mean() - mp.mu) > 1e-9)
        throw std::invalid_argument("first_visit_value: F is not Bayes-plausible");
    double v = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        if (!support_set_contains(s1.admissible, F.points()[i]))
            throw std::invalid_argument(
                "first_visit_value: F is not an optimal stage-1 garbling");
        v += F.weights()[i] *
             std::clamp(2.0 * mp.k * (F.points()[i] - mp.mu) + 0.5, 0.0, 1.0);
    }
    return v;
}

namespace {

// Scans deviations for one sender against a symmetric conjectured profile
// with support {mp.l, mp.h}. lambda_first is the probability the deviator is
// visited first.
void scan_sender_deviations(const ModelParams& mp, const OnPath& op,
                            double lambda_first, int sender_id,
                            const DeviationSearchConfig& cfg,
                            const detail::MasterGrid& g,
                            const std::vector<std::pair<double, double>>& targeted,
                            DeviationSearchResult& out) {
    detail::EvalBuffers buf;
    const double mu = mp.mu;

    struct Best {
        double alpha = 0.0, beta = 0.0;
        bool uninformative = false;
        double gain_n = -1e300, gain_f = -1e300;
        detail::FirstVisitEval fv;
        bool present = false;
    } best;

    auto second_branch_gain = [&](double alpha, double beta, bool uninf) {
        double p2 = 0.0;
        for (const auto& br : op.branches) {
            if (!br.visits) {
                p2 += br.w * br.p2_on;
                continue;
            }
            double p = uninf ? detail::p2_after_deviation(br.x, mu, mu, mu, mp.k,
                                                          cfg.tie_rule)
                             : detail::p2_after_deviation(br.x, alpha, beta, mu,
                                                          mp.k, cfg.tie_rule);
            p2 += br.w * p;
        }
        return p2 - op.u_second;
    };

    auto consider = [&](double alpha, double beta, bool uninf) {
        detail::FirstVisitEval fv;
        if (uninf) {
            fv.value = g.u1[g.i_mu];
            fv.p_lo = fv.p_hi = g.ps[g.i_mu];
        } else {
            fv = detail::eval_first_visit(g, detail::grid_index(g, alpha),
                                          detail::grid_index(g, beta), buf);
        }
        double gsec = second_branch_gain(alpha, beta, uninf);
        double gain_n = lambda_first * (fv.p_lo - op.u_first) +
                        (1.0 - lambda_first) * gsec;
        double gain_f = lambda_first * (fv.p_hi - op.u_first) +
                        (1.0 - lambda_first) * gsec;
        out.margin_neutral = std::max(out.margin_neutral, gain_n);
        out.margin_favorable = std::max(out.margin_favorable, gain_f);
        ++out.deviations_scanned;
        if (gain_n > best.gain_n + 1e-15) {
            best = {alpha, beta, uninf, gain_n, gain_f, fv, true};
        }
    };

    consider(mu, mu, true);  // the uninformative deviation
    const double step = cfg.support_step;
    const int m = static_cast<int>(std::floor(1.0 / step + 0.5));
    for (int ja = 0; ja * step < mu - kEdgeTol; ++ja) {
        double alpha = ja * step;
        for (int jb = m; jb * step > mu + kEdgeTol; --jb) {
            double beta = std::min(1.0, jb * step);
            consider(alpha, beta, false);
        }
    }
    for (auto [alpha, beta] : targeted) consider(alpha, beta, false);

    if (best.present &&
        (out.best == std::nullopt || best.gain_n > out.best->gain_neutral)) {
        BeliefDistribution d =
            best.uninformative
                ? BeliefDistribution::point_mass(mu)
                : BeliefDistribution::binary(best.alpha, best.beta, mu);
        std::ostringstream trace;
        trace << first_visit_trace(best.fv);
        for (const auto& br : op.branches) {
            if (!br.visits) continue;
            double p = best.uninformative
                           ? detail::p2_after_deviation(br.x, mu, mu, mu, mp.k,
                                                        cfg.tie_rule)
                           : detail::p2_after_deviation(br.x, best.alpha,
                                                        best.beta, mu, mp.k,
                                                        cfg.tie_rule);
            trace << "; visited second at belief " << fmt(br.x)
                  << ": selection probability " << fmt(br.p2_on) << " -> "
                  << fmt(p);
        }
        out.best = DeviationFinding{sender_id, d, best.gain_n, best.gain_f,
                                    trace.str()};
    }
}

// Coarse three-point deviations, evaluated through the restricted candidate
// response search. Used to sanity-check the binary-deviation reduction.
void scan_three_point(const ModelParams& mp, const OnPath& op,
                      double lambda_first, int sender_id,
                      const DeviationSearchConfig& cfg,
                      const detail::MasterGrid& g, DeviationSearchResult& out) {
    const double mu = mp.mu;
    const double step = cfg.three_point_step;
    const double cstep = cfg.three_point_candidate_step;

    auto u1_of = [&](double x) { return stage2_value(x, mp) - mp.k * sq(x - mu); };
    auto ps_of = [&](double x) { return select_first_prob(x, mp, cfg.tie_rule); };

    auto respond_first = [&](const BeliefDistribution& dev, double& p_lo,
                             double& p_hi) {
        // Restricted response set: no learning, the deviation itself, and
        // binary contractions on a grid. Among value maximizers, report the
        // deviator's selection probability range.
        double best_v = u1_of(mu);
        std::vector<std::pair<double, double>> cand;  // (value, E[P])
        cand.push_back({best_v, ps_of(mu)});
        auto eval = [&](const BeliefDistribution& q) {
            double v = 0.0, p = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) {
                v += q.weights()[i] * u1_of(q.points()[i]);
                p += q.weights()[i] * ps_of(q.points()[i]);
            }
            cand.push_back({v, p});
            best_v = std::max(best_v, v);
        };
        eval(dev);
        double lo = dev.support_lo(), hi = dev.support_hi();
        for (double a = std::floor(lo / cstep) * cstep; a < mu; a += cstep) {
            if (a < lo - kEdgeTol) continue;
            for (double b = std::ceil(mu / cstep) * cstep; b <= hi + kEdgeTol;
                 b += cstep) {
                if (b <= mu + kEdgeTol) continue;
                auto q = BeliefDistribution::binary(std::max(a, lo),
                                                    std::min(b, hi), mu);
                if (is_garbling(q, dev)) eval(q);
            }
        }
        p_lo = 1e300;
        p_hi = -1e300;
        for (auto& [v, p] : cand) {
            if (v >= best_v - 1e-9) {
                p_lo = std::min(p_lo, p);
                p_hi = std::max(p_hi, p);
            }
        }
    };

    auto respond_second = [&](const BeliefDistribution& dev, double w) {
        // Receiver re-optimizes the stage-2 garbling of the deviation at
        // incoming belief w; returns P(deviator selected).
        auto util = [&](double y) { return std::max(w, y) - mp.k * sq(y - mu); };
        double best_v = util(mu);
        double best_p = mu > w ? 1.0 : (mu < w ? 0.0 : 0.5);
        auto eval = [&](const BeliefDistribution& q) {
            double v = 0.0, p = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) {
                v += q.weights()[i] * util(q.points()[i]);
                if (q.points()[i] > w + kEdgeTol) p += q.weights()[i];
            }
            if (v > best_v + 1e-12) {
                best_v = v;
                best_p = p;
            }
        };
        eval(dev);
        double lo = dev.support_lo(), hi = dev.support_hi();
        for (double a = std::floor(lo / cstep) * cstep; a < mu; a += cstep) {
            if (a < lo - kEdgeTol) continue;
            for (double b = std::ceil(mu / cstep) * cstep; b <= hi + kEdgeTol;
                 b += cstep) {
                if (b <= mu + kEdgeTol) continue;
                auto q = BeliefDistribution::binary(std::max(a, lo),
                                                    std::min(b, hi), mu);
                if (is_garbling(q, dev)) eval(q);
            }
        }
        return best_p;
    };

    (void)g;
    const int m = static_cast<int>(std::floor(1.0 / step + 0.5));
    for (int ja = 0; ja * step < mu; ++ja) {
        double a = ja * step;
        for (int jb = m; jb * step > mu; --jb) {
            double b = std::min(1.0, jb * step);
            for (int jm = ja + 1; jm < jb; ++jm) {
                double mid = jm * step;
                for (double t : {0.25, 0.5, 0.75}) {
                    // mass t on mid, remainder split to hit the mean
                    double rest = 1.0 - t;
                    double need = mu - t * mid;
                    if (b - a < 1e-12) continue;
                    double wa = (rest * b - need) / (b - a);
                    double wb = rest - wa;
                    if (wa < 1e-9 || wb < 1e-9) continue;
                    BeliefDistribution dev({a, mid, b}, {wa, t, wb});
                    double p_lo, p_hi;
                    respond_first(dev, p_lo, p_hi);
                    double p2 = 0.0;
                    for (const auto& br : op.branches)
                        p2 += br.w * (br.visits ? respond_second(dev, br.x)
                                                : br.p2_on);
                    double gsec = p2 - op.u_second;
                    double gain_n = lambda_first * (p_lo - op.u_first) +
                                    (1.0 - lambda_first) * gsec;
                    double gain_f = lambda_first * (p_hi - op.u_first) +
                                    (1.0 - lambda_first) * gsec;
                    out.margin_neutral = std::max(out.margin_neutral, gain_n);
                    out.margin_favorable = std::max(out.margin_favorable, gain_f);
                    ++out.deviations_scanned;
                    if (!out.best || gain_n > out.best->gain_neutral)
                        out.best = DeviationFinding{
                            sender_id, dev, gain_n, gain_f,
                            "three-point deviation (restricted response search)"};
                }
            }
        }
    }
}

}  // namespace

DeviationSearchResult deviation_search(const BeliefDistribution& p1,
                                       const BeliefDistribution& p2,
                                       const ModelParams& mp,
                                       const DeviationSearchConfig& cfg) {
    mp.validate();
    if (std::fabs(p1.mean() - mp.mu) > 1e-9 || std::fabs(p2.mean() - mp.mu) > 1e-9)
        throw std::invalid_argument("deviation_search: offers not Bayes-plausible");

    DeviationSearchResult out;
    out.margin_neutral = -1e300;
    out.margin_favorable = -1e300;

    const bool symmetric = p1.approx_equal(p2);

    // Uninformative conjectured profile: the receiver never visits, so no
    // deviation is ever observed and every gain is zero.
    if (p1.degenerate() && p2.degenerate()) {
        out.margin_neutral = 0.0;
        out.margin_favorable = 0.0;
        out.deviations_scanned = 1;
        out.best = DeviationFinding{1, p1, 0.0, 0.0,
                                    "receiver never visits; deviations undetected"};
        return out;
    }

    if (!p1.binary_support() || !p2.binary_support() || !symmetric)
        throw std::invalid_argument(
            "deviation_search: implemented for symmetric binary profiles "
            "(other profiles are handled by their dedicated checkers)");

    ModelParams prof = mp;
    prof.l = p1.support_lo();
    prof.h = p1.support_hi();
    prof.validate();

    OnPath op = solve_on_path(prof, cfg.tie_rule);
    auto targeted = targeted_deviations(prof, op);
    std::vector<double> extra;
    for (auto [a, b] : targeted) {
        extra.push_back(a);
        extra.push_back(b);
    }
    detail::SecondView sv{false, prof};
    detail::MasterGrid g = detail::build_master(sv, prof.mu, prof.k, cfg, extra);

    // Symmetric profile: the visit order is an even mix and both senders
    // face the same scan.
    scan_sender_deviations(prof, op, 0.5, 1, cfg, g, targeted, out);
    if (cfg.include_three_point) scan_three_point(prof, op, 0.5, 1, cfg, g, out);
    return out;
}

namespace {

EquilibriumReport assemble_report(const ModelParams& prof, bool closed_eq,
                                  double receiver_value,
                                  const DeviationSearchResult& dev,
                                  const DeviationSearchConfig& cfg) {
    EquilibriumReport rep;
    rep.closed_form_equilibrium = closed_eq;
    rep.receiver_value = receiver_value;
    rep.sender1_payoff = 0.5;
    rep.sender2_payoff = 0.5;
    rep.margin = dev.margin_neutral;
    rep.margin_favorable = dev.margin_favorable;
    rep.best_deviation = dev.best;
    double q = 1.0 / (4.0 * prof.k);
    std::ostringstream note;
    note << "closed form: equilibrium iff k > " << fmt(1.0 / (2.0 * (prof.h - prof.l)))
         << " and mu in [" << fmt(prof.l + q) << ", " << fmt(prof.h - q) << "]";
    rep.region_note = note.str();
    if (closed_eq && dev.margin_neutral <= cfg.profit_threshold)
        rep.verdict = Verdict::Equilibrium;
    else if (!closed_eq && dev.margin_neutral > cfg.profit_threshold)
        rep.verdict = Verdict::Refuted;
    else
        rep.verdict = Verdict::Inconclusive;
    if (rep.verdict != Verdict::Refuted) rep.best_deviation.reset();
    return rep;
}

}  // namespace

EquilibriumReport check_binary_symmetric(const BeliefDistribution& p,
                                         const ModelParams& mp,
                                         const DeviationSearchConfig& cfg) {
    mp.validate();
    if (!p.binary_support())
        throw std::invalid_argument("check_binary_symmetric: offer must be binary");
    if (std::fabs(p.mean() - mp.mu) > 1e-9)
        throw std::invalid_argument("check_binary_symmetric: offer mean != mu");
    ModelParams prof = mp;
    prof.l = p.support_lo();
    prof.h = p.support_hi();
    prof.validate();

    bool closed_eq = closed_form_region(prof);
    double value = stage1_closed_form(prof).value;
    DeviationSearchResult dev = deviation_search(p, p, prof, cfg);
    return assemble_report(prof, closed_eq, value, dev, cfg);
}

EquilibriumReport check_full_info(const ModelParams& mp,
                                  const DeviationSearchConfig& cfg) {
    mp.validate();
    if (std::fabs(mp.l) > kEdgeTol || std::fabs(mp.h - 1.0) > kEdgeTol)
        throw std::invalid_argument("check_full_info: requires l = 0, h = 1");
    return check_binary_symmetric(BeliefDistribution::full_information(mp.mu), mp,
                                  cfg);
}

EquilibriumReport check_uninformative(const ModelParams& mp) {
    mp.validate();
    EquilibriumReport rep;
    rep.verdict = Verdict::Equilibrium;
    rep.closed_form_equilibrium = true;
    rep.receiver_value = mp.mu;
    rep.sender1_payoff = 0.5;
    rep.sender2_payoff = 0.5;
    rep.margin = 0.0;
    rep.margin_favorable = 0.0;
    rep.region_note =
        "uninformative profile: the receiver never visits, deviations go undetected";
    return rep;
}

EquilibriumReport check_outcome_equivalent(const BeliefDistribution& p1,
                                           const BeliefDistribution& p2,
                                           const ModelParams& mp) {
    mp.validate();
    double q = 1.0 / (4.0 * mp.k);
    if (!(mp.k > 0.5 && mp.mu >= q - kEdgeTol && mp.mu <= 1.0 - q + kEdgeTol))
        throw out_of_region_error(
            "outcome equivalence requires k > 1/2 and mu in [1/(4k), 1 - 1/(4k)]");
    if (std::fabs(p1.mean() - mp.mu) > 1e-9 || std::fabs(p2.mean() - mp.mu) > 1e-9)
        throw std::invalid_argument(
            "check_outcome_equivalent: offers not Bayes-plausible");

    BeliefDistribution g = BeliefDistribution::binary(mp.mu - q, mp.mu + q, mp.mu);
    bool ok1 = is_garbling(g, p1);
    bool ok2 = is_garbling(g, p2);

    EquilibriumReport rep;
    rep.closed_form_equilibrium = ok1 && ok2;
    rep.receiver_value = mp.mu + 1.0 / (16.0 * mp.k);
    rep.sender1_payoff = 0.5;
    rep.sender2_payoff = 0.5;
    rep.margin = 0.0;
    rep.margin_favorable = 0.0;
    if (ok1 && ok2) {
        rep.verdict = Verdict::Equilibrium;
        rep.region_note =
            "{mu - 1/(4k), mu + 1/(4k)} is a contraction of both offers; "
            "outcome equivalent to full information";
    } else {
        rep.verdict = Verdict::Inconclusive;
        rep.region_note =
            std::string("{mu - 1/(4k), mu + 1/(4k)} is not a contraction of ") +
            (ok2 ? "the first offer" : ok1 ? "the second offer" : "either offer") +
            "; outcome equivalence does not apply";
    }
    return rep;
}

// ---- k = 0 benchmarks ----

KZeroUniformReport kzero_uniform_check(double mu, double grid_step) {
    if (!(mu > 0.0 && mu <= 0.5))
        throw std::invalid_argument("kzero_uniform_check: mu must lie in (0, 1/2]");
    if (!(grid_step > 0.0))
        throw std::invalid_argument("kzero_uniform_check: grid step must be positive");
    KZeroUniformReport rep;
    rep.mu = mu;
    rep.on_path_payoff = 0.5;
    const double hi = 2.0 * mu;
    // Against the uniform opponent a draw x wins with probability x/(2 mu),
    // so any mean-mu deviation supported within [0, 2 mu] pays exactly 1/2.
    for (double alpha = 0.0; alpha < mu - kEdgeTol; alpha += grid_step) {
        for (double beta = hi; beta > mu + kEdgeTol; beta -= grid_step) {
            double p = (beta - mu) / (beta - alpha);
            double payoff = p * alpha / hi + (1.0 - p) * beta / hi;
            rep.max_abs_dev_from_half =
                std::max(rep.max_abs_dev_from_half, std::fabs(payoff - 0.5));
            ++rep.deviations_checked;
        }
    }
    rep.equilibrium = rep.max_abs_dev_from_half <= 1e-9;
    return rep;
}

KZeroAtomReport kzero_atom_check(double mu, double lambda_visit,
                                 double grid_step) {
    if (!(mu > 0.5 && mu < 1.0))
        throw std::invalid_argument("kzero_atom_check: mu must lie in (1/2, 1)");
    if (!(lambda_visit >= 0.0 && lambda_visit <= 1.0))
        throw std::invalid_argument("kzero_atom_check: lambda_visit outside [0,1]");
    KZeroAtomReport rep;
    rep.mu = mu;
    rep.lambda_visit = lambda_visit;
    const double lam = lambda_visit;
    rep.on_path_payoff1 =
        (2.0 * sq(2.0 * mu - 1.0) * lam + (1.0 - mu) * (3.0 * mu - 1.0)) /
        (2.0 * sq(mu));
    rep.zero_one_gain1 =
        sq(1.0 - mu) * (2.0 * mu - 1.0) * (2.0 * lam - 1.0) / (2.0 * sq(mu));
    rep.zero_one_gain2 =
        sq(1.0 - mu) * (2.0 * mu - 1.0) * (2.0 * (1.0 - lam) - 1.0) / (2.0 * sq(mu));
    rep.equilibrium = std::fabs(lam - 0.5) <= kEdgeTol;

    // At the fair visit mix every binary deviation pays 1/2: either the top
    // point stays in the continuous range, or it sits on the atom at 1.
    const double cont_hi = 2.0 * (1.0 - mu);
    for (double alpha = 0.0; alpha < mu - kEdgeTol; alpha += grid_step) {
        for (double beta = mu + grid_step; beta <= cont_hi + kEdgeTol;
             beta += grid_step) {
            double p = (beta - mu) / (beta - alpha);
            double payoff = p * alpha / (2.0 * mu) + (1.0 - p) * beta / (2.0 * mu);
            rep.max_abs_binary_dev_from_half = std::max(
                rep.max_abs_binary_dev_from_half, std::fabs(payoff - 0.5));
            ++rep.deviations_checked;
        }
        // beta = 1 case
        double p = (1.0 - mu) / (1.0 - alpha);
        double payoff = (p * alpha + (1.0 - p)) / (2.0 * mu);
        rep.max_abs_binary_dev_from_half =
            std::max(rep.max_abs_binary_dev_from_half, std::fabs(payoff - 0.5));
        ++rep.deviations_checked;
    }
    return rep;
}

KZeroFullInfoReport kzero_fullinfo_refute(double mu, int n) {
    if (!(mu > 0.0 && mu < 1.0))
        throw std::invalid_argument("kzero_fullinfo_refute: mu must lie in (0,1)");
    if (n <= 1.0 / mu)
        throw std::invalid_argument("kzero_fullinfo_refute: need n > 1/mu");
    KZeroFullInfoReport rep;
    rep.mu = mu;
    rep.n = n;
    rep.eta = mu - 1.0 / n;
    rep.epsilon = 1.0 / (n + 1.0 - mu * n);
    rep.lhs = (1.0 + 2.0 * n - std::sqrt(1.0 + 4.0 * n)) / (2.0 * n);
    rep.profitable = rep.lhs > mu;
    // lhs > mu reduces to n > mu / (1-mu)^2, together with n > 1/mu.
    double lo = std::max(1.0 / mu, mu / sq(1.0 - mu));
    rep.smallest_profitable_n = static_cast<int>(std::floor(lo)) + 1;
    return rep;
}

// ---- single sender ----

void SingleSenderParams::validate() const {
    if (!(lambda_threshold > 0.0 && lambda_threshold < 1.0))
        throw std::invalid_argument("single sender: lambda must lie in (0,1)");
    if (!(mu > 0.0 && mu < 1.0))
        throw std::invalid_argument("single sender: mu must lie in (0,1)");
    if (k < 0.0)
        throw std::invalid_argument("single sender: k must be nonnegative");
}

std::pair<BeliefDistribution, double> single_sender_response(
    const BeliefDistribution& offer, const SingleSenderParams& ssp,
    int grid_points) {
    ssp.validate();
    const double lam = ssp.lambda_threshold, k = ssp.k, mu = ssp.mu;
    auto acceptance_of = [&](const BeliefDistribution& q) {
        double a = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i)
            if (q.points()[i] >= lam - kEdgeTol) a += q.weights()[i];
        return a;
    };
    if (k == 0.0) {
        // Learning is free: the receiver uses the offer as-is.
        return {offer, acceptance_of(offer)};
    }
    auto util = [&](double y) { return std::max(y, lam) - k * sq(y - mu); };
    if (offer.degenerate()) return {offer, acceptance_of(offer)};
    double lo = offer.support_lo(), hi = offer.support_hi();
    std::vector<double> bps = {lam, mu};
    if (hi > lam) bps.push_back(hi - std::sqrt(std::max(0.0, hi - lam) / k));
    if (lam > lo) bps.push_back(lo + std::sqrt(std::max(0.0, lam - lo) / k));
    bps.push_back(lam - 1.0 / (4.0 * k));
    bps.push_back(lam + 1.0 / (4.0 * k));
    if (offer.binary_support()) {
        auto f = SampledFunction::sample(util, lo, hi, grid_points, bps);
        auto sol = optimal_garbling(f, mu);
        return {sol.dist, acceptance_of(sol.dist)};
    }
    auto sol = optimal_garbling_of_offer(offer, util, bps,
                                         OracleConfig{grid_points, 0.005}, {});
    return {sol.dist, acceptance_of(sol.dist)};
}

SingleSenderSolution single_sender_solve(const SingleSenderParams& ssp,
                                         double support_step, int grid_points) {
    ssp.validate();
    const double lam = ssp.lambda_threshold, mu = ssp.mu;
    if (lam <= mu) {
        // Accepted at the prior: an uninformative offer is sender-optimal.
        auto d = BeliefDistribution::point_mass(mu);
        return {d, d, 1.0};
    }
    if (ssp.k == 0.0) {
        auto d = BeliefDistribution::binary(0.0, lam, mu);
        return {d, d, mu / lam};
    }
    SingleSenderSolution best{BeliefDistribution::point_mass(mu),
                              BeliefDistribution::point_mass(mu), 0.0};
    const int m = static_cast<int>(std::floor(1.0 / support_step + 0.5));
    for (int jb = m; jb * support_step > lam + kEdgeTol; --jb) {
        double b = std::min(1.0, jb * support_step);
        for (int ja = 0; ja * support_step < lam - kEdgeTol; ++ja) {
            double a = ja * support_step;
            if (a >= mu) break;  // offer must allow the mean
            if (b <= mu) continue;
            auto offer = BeliefDistribution::binary(a, b, mu);
            auto [garbling, acc] = single_sender_response(offer, ssp, grid_points);
            bool better = acc > best.acceptance + 1e-9;
            bool tie = std::fabs(acc - best.acceptance) <= 1e-9;
            bool prefer =
                tie && (a > best.sender_distribution.support_lo() + kEdgeTol ||
                        (std::fabs(a - best.sender_distribution.support_lo()) <=
                             kEdgeTol &&
                         b < best.sender_distribution.support_hi() - kEdgeTol));
            if (better || prefer)
                best = {offer, garbling, acc};
        }
    }
    return best;
}

// ---- region sweeps ----

std::vector<RegionCell> region_sweep(double k, double mu_lo, double mu_hi,
                                     int steps, const DeviationSearchConfig& cfg,
                                     bool parallel) {
    if (steps < 1) throw std::invalid_argument("region sweep: steps must be >= 1");
    // cell centers: mu_i = lo + (i - 1/2) (hi - lo) / steps
    std::vector<double> mus(steps);
    for (int i = 0; i < steps; ++i)
        mus[i] = mu_lo + (i + 0.5) * (mu_hi - mu_lo) / steps;
    std::vector<RegionCell> cells(steps);
    auto work = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            ModelParams mp{k, mus[i], 0.0, 1.0};
            EquilibriumReport rep = check_full_info(mp, cfg);
            cells[i] = {mus[i], k, rep.verdict, rep.margin};
        }
    };
    if (!parallel || steps < 4) {
        work(0, steps);
    } else {
        int half = steps / 2;
        auto f1 = std::async(std::launch::async, work, 0, half);
        work(half, steps);
        f1.get();
    }
    return cells;
}

}  // namespace persuasion
