#include "persuasion/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace persuasion {

namespace {

constexpr double kTieTol = 1e-12;

double sq(double v) { return v * v; }

}  // namespace

void ModelParams::validate() const {
    if (!(k > 0.0)) throw std::invalid_argument("model: k must be positive");
    if (!(l >= 0.0 && l < mu && mu < h && h <= 1.0))
        throw std::invalid_argument("model: need 0 <= l < mu < h <= 1");
}

double stage2_payoff(double y, double x, const ModelParams& mp) {
    return std::max(x, y) - mp.k * sq(y - mp.mu);
}

namespace detail {

// The (k, mu, l, h) space splits into five regimes by how the supporting
// chord of max{x,y} - k(y-mu)^2 over [l, h] interacts with the bounds;
// within each regime the stage-1 belief x selects the chord family. Regimes
// are tested in a fixed order so that boundary parameter values resolve
// deterministically (the overlaps are value ties).
Stage2Core stage2_core(double x, double k, double mu, double l, double h) {
    Stage2Core out;
    auto degenerate = [&](int c) {
        out.is_degenerate = true;
        out.y1 = out.y2 = mu;
        out.nu = 1.0;
        out.value = std::max(x, mu);
        out.case_id = c;
        return out;
    };
    auto binary = [&](double y1, double y2, int c) {
        y1 = std::max(y1, l);
        y2 = std::min(y2, h);
        if (y2 - y1 < 1e-12 || mu <= y1 || mu >= y2) return degenerate(c);
        out.is_degenerate = false;
        out.y1 = y1;
        out.y2 = y2;
        out.nu = (y2 - mu) / (y2 - y1);
        out.value = out.nu * (std::max(x, y1) - k * sq(y1 - mu)) +
                    (1.0 - out.nu) * (std::max(x, y2) - k * sq(y2 - mu));
        out.case_id = c;
        return out;
    };

    if (x <= l || x >= h) return degenerate(0);

    const double q = 1.0 / (4.0 * k);
    const double lo_mid = l + 2.0 * q;
    const double hi_mid = h - 2.0 * q;
    const bool tight = k > 1.0 / (2.0 * (h - l));

    if (tight && mu <= std::min(hi_mid, lo_mid)) {  // case 1
        if (x <= l + k * sq(mu - l)) return degenerate(1);
        if (x < l + q) return binary(l, l + std::sqrt((x - l) / k), 1);
        if (x < mu + q) return binary(x - q, x + q, 1);
        return degenerate(1);
    }
    if (tight && mu >= std::max(hi_mid, lo_mid)) {  // case 2, mirror of case 1
        if (x <= mu - q) return degenerate(2);
        if (x <= h - q) return binary(x - q, x + q, 2);
        if (x < h - k * sq(h - mu)) return binary(h - std::sqrt((h - x) / k), h, 2);
        return degenerate(2);
    }
    if (lo_mid <= mu && mu <= hi_mid) {  // case 3: both bounds slack
        if (x > mu - q && x < mu + q) return binary(x - q, x + q, 3);
        return degenerate(3);
    }
    if (tight) {  // case 4: hi_mid < mu < lo_mid
        if (x <= l + k * sq(mu - l)) return degenerate(4);
        if (x < l + q) return binary(l, l + std::sqrt((x - l) / k), 4);
        if (x <= h - q) return binary(x - q, x + q, 4);
        if (x < h - k * sq(h - mu)) return binary(h - std::sqrt((h - x) / k), h, 4);
        return degenerate(4);
    }
    // case 5: k <= 1/(2(h-l)), the chord can span the whole support
    if (x <= l + k * sq(mu - l)) return degenerate(5);
    if (x < l + k * sq(h - l)) return binary(l, l + std::sqrt((x - l) / k), 5);
    if (x <= h - k * sq(h - l)) return binary(l, h, 5);
    if (x < h - k * sq(h - mu)) return binary(h - std::sqrt((h - x) / k), h, 5);
    return degenerate(5);
}

}  // namespace detail

GarblingSolution stage2_closed_form(double x, const ModelParams& mp) {
    mp.validate();
    auto core = detail::stage2_core(x, mp.k, mp.mu, mp.l, mp.h);
    if (core.is_degenerate)
        return {BeliefDistribution::point_mass(mp.mu), core.value};
    return {BeliefDistribution::binary(core.y1, core.y2, mp.mu), core.value};
}

double stage2_value(double x, const ModelParams& mp) {
    return detail::stage2_core(x, mp.k, mp.mu, mp.l, mp.h).value;
}

std::vector<double> stage2_case_breakpoints(const ModelParams& mp) {
    const double k = mp.k, mu = mp.mu, l = mp.l, h = mp.h;
    const double q = 1.0 / (4.0 * k);
    std::vector<double> bp = {l,
                              h,
                              mu,
                              mu - q,
                              mu + q,
                              l + q,
                              h - q,
                              l + k * sq(mu - l),
                              h - k * sq(h - mu),
                              l + k * sq(h - l),
                              h - k * sq(h - l)};
    std::vector<double> out;
    for (double b : bp)
        if (b > 0.0 && b < 1.0) out.push_back(b);
    return out;
}

GarblingSolution stage2_oracle(double x, const ModelParams& mp, int grid_points) {
    mp.validate();
    auto bp = stage2_case_breakpoints(mp);
    bp.push_back(x);
    auto f = SampledFunction::sample(
        [&](double y) { return stage2_payoff(y, x, mp); }, mp.l, mp.h,
        grid_points, bp);
    return optimal_garbling(f, mp.mu);
}

double stage1_value(double x, const ModelParams& mp) {
    return stage2_value(x, mp) - mp.k * sq(x - mp.mu);
}

bool support_set_contains(const std::vector<SupportInterval>& set, double x,
                          double tol) {
    for (const auto& iv : set)
        if (x >= iv.lo - tol && x <= iv.hi + tol) return true;
    return false;
}

namespace {

// Refines argmax_{z in (anchor, far]} of the chord slope from the pinned
// point (anchor, f(anchor)); `sign` flips the scan for chords pinned on the
// right. The slope is scanned on a fine grid and polished by ternary search
// around the best bracket.
double refine_pinned_chord(const std::function<double(double)>& f, double anchor,
                           double lo, double hi, bool pin_left,
                           const std::vector<double>& breakpoints) {
    const int n = 4001;
    double f_anchor = f(anchor);
    auto slope = [&](double z) {
        return pin_left ? (f(z) - f_anchor) / (z - anchor)
                        : (f_anchor - f(z)) / (anchor - z);
    };
    std::vector<double> grid;
    grid.reserve(n + breakpoints.size());
    for (int i = 0; i < n; ++i) grid.push_back(lo + (hi - lo) * i / (n - 1));
    for (double b : breakpoints)
        if (b > lo && b < hi) grid.push_back(b);
    std::sort(grid.begin(), grid.end());

    double best_z = grid.front();
    double best_s = -1e300;
    for (double z : grid) {
        if (std::fabs(z - anchor) < 1e-9) continue;
        double s = pin_left ? slope(z) : -slope(z);
        // Exact ties can occur at knife-edge parameters; keep the point
        // nearest the anchor, the interior chord-condition root.
        bool nearer = pin_left ? (z < best_z) : (z > best_z);
        if (s > best_s + 1e-15 || (s > best_s - 1e-15 && nearer)) {
            best_s = s;
            best_z = z;
        }
    }
    // ternary polish within one grid step either side
    double step = (hi - lo) / (n - 1);
    double a = std::max(lo, best_z - step), b = std::min(hi, best_z + step);
    if (pin_left) a = std::max(a, anchor + 1e-9);
    else b = std::min(b, anchor - 1e-9);
    for (int it = 0; it < 200 && b - a > 1e-10; ++it) {
        double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        double s1 = pin_left ? slope(m1) : -slope(m1);
        double s2 = pin_left ? slope(m2) : -slope(m2);
        if (s1 < s2) a = m1;
        else b = m2;
    }
    return 0.5 * (a + b);
}

}  // namespace

Stage1Solution stage1_closed_form(const ModelParams& mp) {
    mp.validate();
    const double k = mp.k, mu = mp.mu, l = mp.l, h = mp.h;
    const double q = 1.0 / (4.0 * k);
    const double lo_mid = l + 2.0 * q;
    const double hi_mid = h - 2.0 * q;
    const bool tight = k > 1.0 / (2.0 * (h - l));
    auto u1 = [&](double x) { return stage1_value(x, mp); };
    auto bps = stage2_case_breakpoints(mp);

    auto multiple = [&](std::vector<SupportInterval> set, int c) {
        Stage1Solution s;
        s.multiple = true;
        s.case_id = c;
        s.admissible = std::move(set);
        BeliefDistribution d = BeliefDistribution::binary(mu - q, mu + q, mu);
        s.most_informative = {d, 0.5 * u1(mu - q) + 0.5 * u1(mu + q)};
        s.value = s.most_informative.value;
        return s;
    };
    auto unique_low = [&](int c) {
        double y1 = refine_pinned_chord(u1, l, l, h, true, bps);
        Stage1Solution s;
        s.multiple = false;
        s.case_id = c;
        if (y1 <= mu + 1e-9) {
            // Knife edge (mu exactly between the chord roots): the chord
            // condition collapses onto the prior; she learns nothing at
            // stage 1 and everything at stage 2.
            s.admissible = {{mu, mu}};
            s.most_informative = {BeliefDistribution::point_mass(mu), u1(mu)};
            s.value = u1(mu);
            return s;
        }
        s.admissible = {{l, l}, {y1, y1}};
        BeliefDistribution d = BeliefDistribution::binary(l, y1, mu);
        double value = u1(l) + (u1(y1) - u1(l)) * (mu - l) / (y1 - l);
        s.most_informative = {d, value};
        s.value = value;
        return s;
    };
    auto unique_high = [&](int c) {
        double y2 = refine_pinned_chord(u1, h, l, h, false, bps);
        Stage1Solution s;
        s.multiple = false;
        s.case_id = c;
        if (y2 >= mu - 1e-9) {
            s.admissible = {{mu, mu}};
            s.most_informative = {BeliefDistribution::point_mass(mu), u1(mu)};
            s.value = u1(mu);
            return s;
        }
        s.admissible = {{y2, y2}, {h, h}};
        BeliefDistribution d = BeliefDistribution::binary(y2, h, mu);
        double value = u1(h) + (u1(y2) - u1(h)) * (h - mu) / (h - y2);
        s.most_informative = {d, value};
        s.value = value;
        return s;
    };

    if (tight && mu <= std::min(hi_mid, lo_mid)) {  // case 1
        if (mu >= l + q)
            return multiple({{mu - q, mu - q}, {l + q, mu + q}}, 1);
        return unique_low(1);
    }
    if (tight && mu >= std::max(hi_mid, lo_mid)) {  // case 2
        if (mu <= h - q)
            return multiple({{mu - q, h - q}, {mu + q, mu + q}}, 2);
        return unique_high(2);
    }
    if (lo_mid <= mu && mu <= hi_mid)  // case 3
        return multiple({{mu - q, mu + q}}, 3);
    if (tight) {  // case 4
        if (mu >= l + q && mu <= h - q)
            return multiple({{mu - q, mu - q}, {l + q, h - q}, {mu + q, mu + q}}, 4);
        if (mu < l + q) return unique_low(4);
        return unique_high(4);
    }
    // case 5
    if (mu <= 0.5 * (l + h)) return unique_low(5);
    return unique_high(5);
}

double select_first_prob(double x, const ModelParams& second_view, TieRule tie) {
    double tie_first = tie == TieRule::FirstVisited
                           ? 1.0
                           : (tie == TieRule::SecondVisited ? 0.0 : 0.5);
    auto core = detail::stage2_core(x, second_view.k, second_view.mu,
                                    second_view.l, second_view.h);
    if (core.is_degenerate) {
        if (x > second_view.mu + kTieTol) return 1.0;
        if (x < second_view.mu - kTieTol) return 0.0;
        return tie_first;
    }
    double p = 0.0;
    if (core.y1 < x - kTieTol) p += core.nu;
    else if (std::fabs(core.y1 - x) <= kTieTol) p += tie_first * core.nu;
    if (core.y2 < x - kTieTol) p += 1.0 - core.nu;
    else if (std::fabs(core.y2 - x) <= kTieTol) p += tie_first * (1.0 - core.nu);
    return p;
}

std::vector<BeliefDistribution> contraction_candidates(
    const BeliefDistribution& offer, double step,
    const std::vector<BeliefDistribution>& extra) {
    const double mean = offer.mean();
    std::vector<BeliefDistribution> out;
    out.push_back(BeliefDistribution::point_mass(mean));
    out.push_back(offer);
    const double lo = offer.support_lo(), hi = offer.support_hi();
    for (double a = std::floor(lo / step) * step; a < mean; a += step) {
        if (a < lo - 1e-12) continue;
        for (double b = std::ceil(mean / step) * step; b <= hi + 1e-12; b += step) {
            if (b <= mean + 1e-12) continue;
            BeliefDistribution cand =
                BeliefDistribution::binary(std::max(a, lo), std::min(b, hi), mean);
            if (is_garbling(cand, offer)) out.push_back(std::move(cand));
        }
    }
    for (const auto& d : extra)
        if (std::fabs(d.mean() - mean) <= 1e-9 && is_garbling(d, offer))
            out.push_back(d);
    return out;
}

GarblingSolution best_candidate_for(const std::vector<BeliefDistribution>& cands,
                                    const std::function<double(double)>& util) {
    const BeliefDistribution* best = nullptr;
    double best_v = -1e300;
    for (const auto& d : cands) {
        double v = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i)
            v += d.weights()[i] * util(d.points()[i]);
        if (v > best_v + 1e-12) {
            best_v = v;
            best = &d;
        }
    }
    return {*best, best_v};
}

GarblingSolution optimal_garbling_of_offer(const BeliefDistribution& offer,
                                           const std::function<double(double)>& util,
                                           const std::vector<double>& breakpoints,
                                           const OracleConfig& cfg,
                                           const std::vector<BeliefDistribution>& extra) {
    if (offer.degenerate())
        return {offer, util(offer.points().front())};
    if (offer.binary_support()) {
        auto f = SampledFunction::sample(util, offer.support_lo(),
                                         offer.support_hi(), cfg.grid_points,
                                         breakpoints);
        return optimal_garbling(f, offer.mean());
    }
    return best_candidate_for(contraction_candidates(offer, cfg.support_step, extra),
                              util);
}

OrderSolution solve_visit_order(const BeliefDistribution& first, double mu_first,
                                const BeliefDistribution& second,
                                double mu_second, double k_first, double k_second,
                                TieRule tie, const OracleConfig& cfg) {
    if (std::fabs(first.mean() - mu_first) > 1e-9 ||
        std::fabs(second.mean() - mu_second) > 1e-9)
        throw std::invalid_argument("solve_visit_order: offers not Bayes-plausible");

    // Stage-2 solution against `second`, given the stage-1 belief x. For a
    // non-binary opponent the feasible contraction list is precomputed once;
    // per-belief work is then a linear scan.
    ModelParams second_view{k_second, mu_second, second.support_lo(),
                            second.support_hi()};
    const bool second_binary = second.binary_support();
    std::vector<BeliefDistribution> second_cands;
    if (!second.degenerate() && !second_binary)
        second_cands = contraction_candidates(second, cfg.support_step, {});
    auto stage2_at = [&](double x) -> GarblingSolution {
        if (second.degenerate())
            return {second, std::max(x, mu_second)};
        if (second_binary) {
            auto core = detail::stage2_core(x, k_second, mu_second,
                                            second_view.l, second_view.h);
            if (core.is_degenerate)
                return {BeliefDistribution::point_mass(mu_second), core.value};
            return {BeliefDistribution::binary(core.y1, core.y2, mu_second),
                    core.value};
        }
        auto util = [&](double y) {
            return std::max(x, y) - k_second * sq(y - mu_second);
        };
        return best_candidate_for(second_cands, util);
    };
    auto v2 = [&](double x) {
        if (second.degenerate()) return std::max(x, mu_second);
        if (second_binary)
            return detail::stage2_core(x, k_second, mu_second, second_view.l,
                                       second_view.h)
                .value;
        return stage2_at(x).value;
    };
    auto u1 = [&](double x) { return v2(x) - k_first * sq(x - mu_first); };

    std::vector<double> bps;
    if (second_binary) {
        bps = stage2_case_breakpoints(second_view);
        bps.push_back(mu_first);
        bps.push_back(mu_second);
    } else {
        bps = {mu_first, mu_second};
    }

    // Candidate closed-form supports help the restricted search for
    // non-binary first offers.
    std::vector<BeliefDistribution> extra;
    {
        double r = 1.0 / (4.0 * k_first);
        if (mu_first - r >= 0.0 && mu_first + r <= 1.0)
            extra.push_back(
                BeliefDistribution::binary(mu_first - r, mu_first + r, mu_first));
    }
    GarblingSolution stage1 = optimal_garbling_of_offer(first, u1, bps, cfg, extra);

    OrderSolution out;
    out.stage1 = stage1;
    out.value = stage1.value;
    out.stage1_cost = k_first * stage1.dist.quadratic_moment_about(mu_first);
    for (std::size_t i = 0; i < stage1.dist.size(); ++i) {
        double x = stage1.dist.points()[i];
        double w = stage1.dist.weights()[i];
        GarblingSolution s2 = stage2_at(x);
        Stage2Entry e;
        e.stage1_belief = x;
        e.weight = w;
        e.garbling = s2;
        double tie_first = tie == TieRule::FirstVisited
                               ? 1.0
                               : (tie == TieRule::SecondVisited ? 0.0 : 0.5);
        if (s2.degenerate()) {
            double y = s2.dist.points().front();
            e.select_first_prob =
                x > y + kTieTol ? 1.0 : (x < y - kTieTol ? 0.0 : tie_first);
            e.action = e.select_first_prob >= 0.5 ? StopAction::SelectVisited
                                                  : StopAction::SelectOther;
        } else {
            e.action = StopAction::Continue;
            double p = 0.0;
            for (std::size_t j = 0; j < s2.dist.size(); ++j) {
                double y = s2.dist.points()[j];
                double wy = s2.dist.weights()[j];
                if (y < x - kTieTol) p += wy;
                else if (std::fabs(y - x) <= kTieTol) p += tie_first * wy;
            }
            e.select_first_prob = p;
        }
        out.u_first += w * e.select_first_prob;
        out.stage2_cost +=
            w * (s2.degenerate()
                     ? 0.0
                     : k_second * s2.dist.quadratic_moment_about(mu_second));
        double gross = 0.0;
        for (std::size_t j = 0; j < s2.dist.size(); ++j)
            gross += s2.dist.weights()[j] * std::max(x, s2.dist.points()[j]);
        out.gross_value += w * gross;
        out.stage2.push_back(std::move(e));
    }
    return out;
}

ReceiverStrategy best_response(const BeliefDistribution& p1,
                               const BeliefDistribution& p2,
                               const ModelParams& mp, TieRule tie,
                               const OracleConfig& cfg) {
    mp.validate();
    if (std::fabs(p1.mean() - mp.mu) > 1e-9 || std::fabs(p2.mean() - mp.mu) > 1e-9)
        throw std::invalid_argument("best_response: offers not Bayes-plausible");

    OrderSolution sol1 =
        solve_visit_order(p1, mp.mu, p2, mp.mu, mp.k, mp.k, tie, cfg);
    OrderSolution sol2 =
        solve_visit_order(p2, mp.mu, p1, mp.mu, mp.k, mp.k, tie, cfg);

    ReceiverStrategy out;
    double best = std::max(sol1.value, sol2.value);
    if (best <= mp.mu + kTieTol) {
        // Learning is worthless; she selects at the prior without visiting.
        out.visits_anyone = false;
        out.first_visit_prob = 0.5;
        out.stage1 = {BeliefDistribution::point_mass(mp.mu), mp.mu};
        out.value = mp.mu;
        out.gross_value = mp.mu;
        out.u_first = 0.5;
        out.sender1_payoff = 0.5;
        out.sender2_payoff = 0.5;
        return out;
    }
    out.visits_anyone = true;
    double lambda1;
    if (sol1.value > sol2.value + kTieTol) lambda1 = 1.0;
    else if (sol2.value > sol1.value + kTieTol) lambda1 = 0.0;
    else {
        // Value tie: she would rather not put off learning, so an order
        // whose first visit is informative wins over one that defers.
        bool learn1 = !sol1.stage1.dist.degenerate();
        bool learn2 = !sol2.stage1.dist.degenerate();
        lambda1 = learn1 == learn2 ? 0.5 : (learn1 ? 1.0 : 0.0);
    }
    const OrderSolution& shown = lambda1 >= 0.5 ? sol1 : sol2;
    out.first_visit_prob = lambda1;
    out.stage1 = shown.stage1;
    out.stage2 = shown.stage2;
    out.value = shown.value;
    out.gross_value = shown.gross_value;
    out.stage1_cost = shown.stage1_cost;
    out.stage2_cost = shown.stage2_cost;
    out.u_first = shown.u_first;
    out.sender1_payoff =
        lambda1 * sol1.u_first + (1.0 - lambda1) * (1.0 - sol2.u_first);
    out.sender2_payoff = 1.0 - out.sender1_payoff;
    return out;
}

}  // namespace persuasion
