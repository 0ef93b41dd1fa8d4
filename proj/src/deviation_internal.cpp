#include "deviation_internal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace persuasion::detail {

namespace {
constexpr double kDedupeTol = 1e-12;
constexpr double kContactTol = 1e-9;
}  // namespace

MasterGrid build_master(const SecondView& sv, double mu, double k_first,
                        const DeviationSearchConfig& cfg,
                        const std::vector<double>& extra_points) {
    MasterGrid g;
    g.mu = mu;
    g.k_first = k_first;
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(cfg.grid_points) + 300);
    for (int i = 0; i < cfg.grid_points; ++i)
        xs.push_back(static_cast<double>(i) / (cfg.grid_points - 1));
    const int m = static_cast<int>(std::floor(1.0 / cfg.support_step + 0.5));
    for (int j = 0; j <= m; ++j)
        xs.push_back(std::min(1.0, j * cfg.support_step));
    if (!sv.uninformative)
        for (double b : stage2_case_breakpoints(sv.view)) xs.push_back(b);
    for (double e : extra_points)
        if (e >= 0.0 && e <= 1.0) xs.push_back(e);
    xs.push_back(mu);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return b - a <= kDedupeTol; }),
             xs.end());
    g.x = std::move(xs);

    g.v2.resize(g.x.size());
    g.ps.resize(g.x.size());
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        double x = g.x[i];
        if (sv.uninformative) {
            g.v2[i] = std::max(x, mu);
            if (x > mu + kDedupeTol) g.ps[i] = 1.0;
            else if (x < mu - kDedupeTol) g.ps[i] = 0.0;
            else
                g.ps[i] = cfg.tie_rule == TieRule::FirstVisited    ? 1.0
                          : cfg.tie_rule == TieRule::SecondVisited ? 0.0
                                                                   : 0.5;
        } else {
            g.v2[i] = stage2_value(x, sv.view);
            g.ps[i] = select_first_prob(x, sv.view, cfg.tie_rule);
        }
    }
    reprice_stage1(g, k_first);

    auto it = std::lower_bound(g.x.begin(), g.x.end(), mu - kDedupeTol);
    g.i_mu = static_cast<std::size_t>(it - g.x.begin());
    if (g.i_mu >= g.x.size() || std::fabs(g.x[g.i_mu] - mu) > 1e-9)
        throw std::logic_error("master grid: mu not on grid");
    return g;
}

void reprice_stage1(MasterGrid& g, double k_first) {
    g.k_first = k_first;
    g.u1.resize(g.x.size());
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        double d = g.x[i] - g.mu;
        g.u1[i] = g.v2[i] - k_first * d * d;
    }
}

std::size_t grid_index(const MasterGrid& g, double x) {
    auto it = std::lower_bound(g.x.begin(), g.x.end(), x - kDedupeTol);
    std::size_t i = static_cast<std::size_t>(it - g.x.begin());
    if (i >= g.x.size() || std::fabs(g.x[i] - x) > 1e-9)
        throw std::logic_error("master grid: point not on grid");
    return i;
}

namespace {

// Value at `at` of the upper (or lower) hull of the points (xs, vs).
double hull_value_at(const std::vector<double>& xs, std::vector<double>& vs,
                     std::vector<std::size_t>& hull, double at, bool lower) {
    if (lower)
        for (double& v : vs) v = -v;
    upper_hull_indices(xs, vs, 0, xs.size() - 1, hull);
    double out = vs[hull.back()];
    for (std::size_t j = 0; j + 1 < hull.size(); ++j) {
        double xa = xs[hull[j]], xb = xs[hull[j + 1]];
        if (at <= xb + kDedupeTol) {
            if (at <= xa + kDedupeTol) {
                out = vs[hull[j]];
            } else {
                double t = (at - xa) / (xb - xa);
                out = vs[hull[j]] + t * (vs[hull[j + 1]] - vs[hull[j]]);
            }
            break;
        }
    }
    if (lower) {
        out = -out;
        for (double& v : vs) v = -v;
    }
    return out;
}

}  // namespace

FirstVisitEval eval_first_visit_values(const MasterGrid& g,
                                       const std::vector<double>& u,
                                       const std::vector<double>& p,
                                       std::size_t ia, std::size_t ib,
                                       EvalBuffers& buf) {
    if (!(ia <= g.i_mu && g.i_mu <= ib))
        throw std::logic_error("eval_first_visit: mu outside feasible range");
    upper_hull_indices(g.x, u, ia, ib, buf.hull);

    const double mu = g.mu;
    FirstVisitEval out;
    // Locate the hull segment containing mu.
    std::size_t seg = buf.hull.size();
    for (std::size_t j = 0; j < buf.hull.size(); ++j) {
        double hx = g.x[buf.hull[j]];
        if (std::fabs(hx - mu) <= kDedupeTol) {
            // mu is a hull vertex: the unique optimum is no learning.
            out.value = u[buf.hull[j]];
            out.p_lo = out.p_hi = p[buf.hull[j]];
            return out;
        }
        if (hx > mu) {
            seg = j;
            break;
        }
    }
    if (seg == 0 || seg == buf.hull.size())
        throw std::logic_error("eval_first_visit: mu outside hull span");
    const std::size_t jl = buf.hull[seg - 1], jr = buf.hull[seg];
    const double xa = g.x[jl], va = u[jl];
    const double xb = g.x[jr], vb = u[jr];
    const double slope = (vb - va) / (xb - xa);
    out.value = va + slope * (mu - xa);

    // Contact set of the supporting line: the receiver may mix over any
    // Bayes-plausible distribution on it, so the deviator's selection
    // probability ranges over the hulls of (x, P) restricted to the set.
    const double ctol = kContactTol * std::max(1.0, std::fabs(out.value));
    buf.cx.clear();
    buf.cp.clear();
    for (std::size_t i = ia; i <= ib; ++i) {
        double line = va + slope * (g.x[i] - xa);
        if (line - u[i] <= ctol) {
            buf.cx.push_back(g.x[i]);
            buf.cp.push_back(p[i]);
        }
    }
    out.p_hi = hull_value_at(buf.cx, buf.cp, buf.chull, mu, false);
    out.p_lo = hull_value_at(buf.cx, buf.cp, buf.chull, mu, true);
    return out;
}

FirstVisitEval eval_first_visit(const MasterGrid& g, std::size_t ia,
                                std::size_t ib, EvalBuffers& buf) {
    return eval_first_visit_values(g, g.u1, g.ps, ia, ib, buf);
}

double p2_after_deviation(double w, double alpha, double beta, double mu,
                          double k, TieRule tie) {
    if (beta - alpha < 1e-12) {
        // Uninformative deviation: the receiver keeps belief mu about it.
        if (mu > w + kDedupeTol) return 1.0;
        if (mu < w - kDedupeTol) return 0.0;
        return tie == TieRule::FirstVisited ? 0.0
               : tie == TieRule::SecondVisited ? 1.0
                                               : 0.5;
    }
    ModelParams view{k, mu, alpha, beta};
    return 1.0 - select_first_prob(w, view, tie);
}

}  // namespace persuasion::detail
