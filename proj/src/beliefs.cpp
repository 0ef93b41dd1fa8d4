#include "persuasion/beliefs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace persuasion {

namespace {

constexpr double kPointMergeTol = 1e-12;
constexpr double kMassTol = 1e-12;
constexpr double kMeanTol = 1e-9;

void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

BeliefDistribution::BeliefDistribution(std::vector<double> points,
                                       std::vector<double> weights) {
    if (points.size() != weights.size())
        fail("belief distribution: points/weights length mismatch");
    if (points.empty())
        fail("belief distribution: empty support");

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    points_.reserve(points.size());
    weights_.reserve(points.size());
    for (std::size_t idx : order) {
        double p = points[idx];
        double w = weights[idx];
        if (!std::isfinite(p) || !std::isfinite(w))
            fail("belief distribution: non-finite entry");
        if (w < -kMassTol)
            fail("belief distribution: negative weight");
        if (w <= kMassTol)
            continue;  // zero weights are stripped
        if (p < -1e-9 || p > 1.0 + 1e-9)
            fail("belief distribution: point outside [0,1]");
        p = std::min(1.0, std::max(0.0, p));
        if (!points_.empty() && p - points_.back() <= kPointMergeTol) {
            weights_.back() += w;  // duplicate points are merged
        } else {
            points_.push_back(p);
            weights_.push_back(w);
        }
    }
    if (points_.empty())
        fail("belief distribution: no positive-weight support");

    double total = 0.0;
    for (double w : weights_) total += w;
    if (std::fabs(total - 1.0) > kMassTol)
        fail("belief distribution: weights sum to " + std::to_string(total) +
             ", expected 1 within 1e-12");

    mean_ = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i)
        mean_ += points_[i] * weights_[i];
}

BeliefDistribution BeliefDistribution::point_mass(double x) {
    return BeliefDistribution({x}, {1.0});
}

BeliefDistribution BeliefDistribution::binary(double lo, double hi, double mean) {
    if (lo > hi) std::swap(lo, hi);
    if (hi - lo <= kPointMergeTol)
        return point_mass(mean);
    if (mean < lo - 1e-12 || mean > hi + 1e-12)
        fail("binary distribution: mean outside support");
    double w_lo = (hi - mean) / (hi - lo);
    w_lo = std::min(1.0, std::max(0.0, w_lo));
    return BeliefDistribution({lo, hi}, {w_lo, 1.0 - w_lo});
}

BeliefDistribution BeliefDistribution::full_information(double mean) {
    return binary(0.0, 1.0, mean);
}

double BeliefDistribution::quadratic_moment_about(double center) const {
    double s = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        double d = points_[i] - center;
        s += weights_[i] * d * d;
    }
    return s;
}

double BeliefDistribution::cdf(double x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < points_.size() && points_[i] <= x; ++i)
        s += weights_[i];
    return s;
}

double BeliefDistribution::mass_below(double x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < points_.size() && points_[i] < x; ++i)
        s += weights_[i];
    return s;
}

double BeliefDistribution::mass_at(double x, double tol) const {
    double s = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i)
        if (std::fabs(points_[i] - x) <= tol) s += weights_[i];
    return s;
}

double BeliefDistribution::integrated_cdf(double x) const {
    // J(x) = sum_i w_i * max(0, x - p_i)
    double s = 0.0;
    for (std::size_t i = 0; i < points_.size() && points_[i] < x; ++i)
        s += weights_[i] * (x - points_[i]);
    return s;
}

bool BeliefDistribution::approx_equal(const BeliefDistribution& other,
                                      double tol) const {
    if (size() != other.size()) return false;
    for (std::size_t i = 0; i < size(); ++i) {
        if (std::fabs(points_[i] - other.points_[i]) > tol) return false;
        if (std::fabs(weights_[i] - other.weights_[i]) > tol) return false;
    }
    return true;
}

bool is_garbling(const BeliefDistribution& q, const BeliefDistribution& p,
                 double tol) {
    if (std::fabs(q.mean() - p.mean()) > kMeanTol) return false;
    // The contraction's integrated CDF lies weakly below: J_q(x) <= J_p(x)
    // for all x, with equality at x = 1 guaranteed by the equal means.
    // Both J's are piecewise linear with kinks at support points, so it
    // suffices to compare at the union of supports; a merged sweep keeps the
    // running mass and first moment for each side.
    double width = std::max(p.support_hi() - p.support_lo(), 1e-3);
    double slack = tol * width;
    std::size_t iq = 0, ip = 0;
    double mass_q = 0.0, sum_q = 0.0, mass_p = 0.0, sum_p = 0.0;
    const auto& qp = q.points();
    const auto& qw = q.weights();
    const auto& pp = p.points();
    const auto& pw = p.weights();
    while (iq < qp.size() || ip < pp.size()) {
        double x = iq < qp.size() && (ip >= pp.size() || qp[iq] <= pp[ip])
                       ? qp[iq]
                       : pp[ip];
        while (iq < qp.size() && qp[iq] <= x) {
            mass_q += qw[iq];
            sum_q += qw[iq] * qp[iq];
            ++iq;
        }
        while (ip < pp.size() && pp[ip] <= x) {
            mass_p += pw[ip];
            sum_p += pw[ip] * pp[ip];
            ++ip;
        }
        // J(x) = mass * x - first moment over points <= x (terms at x vanish)
        if ((mass_q * x - sum_q) > (mass_p * x - sum_p) + slack) return false;
    }
    return true;
}

CostModel CostModel::constant(double k) {
    if (!(k > 0.0)) fail("cost model: constant k must be positive");
    CostModel cm;
    cm.mode_ = Mode::Constant;
    cm.k_ = k;
    cm.k_floor_ = k;
    return cm;
}

CostModel CostModel::experiment_dependent(
    double k_floor, std::vector<std::pair<BeliefDistribution, double>> steps) {
    if (k_floor < 0.0) fail("cost model: k_floor must be nonnegative");
    for (const auto& [ref, k] : steps) {
        (void)ref;
        if (k < k_floor - 1e-12)
            fail("cost model: step coefficient below the floor");
    }
    // Weakly decreasing in the informativeness order: a more informative
    // reference may not carry a larger coefficient.
    for (std::size_t i = 0; i < steps.size(); ++i) {
        for (std::size_t j = 0; j < steps.size(); ++j) {
            if (i == j) continue;
            if (is_garbling(steps[i].first, steps[j].first) &&
                steps[j].second > steps[i].second + 1e-12)
                fail("cost model: schedule not weakly decreasing in informativeness");
        }
    }
    CostModel cm;
    cm.mode_ = Mode::ExperimentDependent;
    cm.k_floor_ = k_floor;
    cm.steps_ = std::move(steps);
    return cm;
}

double CostModel::coefficient(const BeliefDistribution* sender_dist) const {
    if (mode_ == Mode::Constant) return k_;
    if (sender_dist == nullptr)
        fail("cost model: experiment-dependent mode requires the sender distribution");
    double best = -1.0;
    for (const auto& [ref, k] : steps_) {
        if (is_garbling(ref, *sender_dist)) {
            if (best < 0.0 || k < best) best = k;
        }
    }
    // Full information prices at the floor by definition.
    double m = sender_dist->mean();
    if (m > 0.0 && m < 1.0 &&
        is_garbling(BeliefDistribution::binary(0.0, 1.0, m), *sender_dist))
        best = best < 0.0 ? k_floor_ : std::min(best, k_floor_);
    // Incomparable with every reference: take the floor.
    return best < 0.0 ? k_floor_ : best;
}

double attention_cost(const BeliefDistribution& q, double prior,
                      const CostModel& cm, const BeliefDistribution* sender_dist) {
    return cm.coefficient(sender_dist) * q.quadratic_moment_about(prior);
}

BeliefDistribution uniform_benchmark(double mu, int n_points) {
    if (!(mu > 0.0 && mu <= 0.5))
        fail("uniform benchmark: mu must lie in (0, 1/2]");
    if (n_points < 1) fail("uniform benchmark: need at least one point");
    std::vector<double> pts(n_points), wts(n_points, 1.0 / n_points);
    for (int i = 0; i < n_points; ++i)
        pts[i] = 2.0 * mu * (i + 0.5) / n_points;
    return BeliefDistribution(std::move(pts), std::move(wts));
}

BeliefDistribution atom_benchmark(double mu, int n_points) {
    if (!(mu > 0.5 && mu < 1.0))
        fail("atom benchmark: mu must lie in (1/2, 1)");
    if (n_points < 1) fail("atom benchmark: need at least one point");
    double atom_mass = 2.0 - 1.0 / mu;
    double cont_mass = (1.0 - mu) / mu;
    double cont_hi = 2.0 * (1.0 - mu);
    std::vector<double> pts, wts;
    pts.reserve(n_points + 1);
    wts.reserve(n_points + 1);
    for (int i = 0; i < n_points; ++i) {
        pts.push_back(cont_hi * (i + 0.5) / n_points);
        wts.push_back(cont_mass / n_points);
    }
    pts.push_back(1.0);
    wts.push_back(atom_mass);
    return BeliefDistribution(std::move(pts), std::move(wts));
}

std::string to_text(const BeliefDistribution& d) {
    std::ostringstream out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "# mean=%.17g\n", d.mean());
    out << buf;
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", d.points()[i],
                      d.weights()[i]);
        out << buf;
    }
    return out.str();
}

BeliefDistribution distribution_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> pts, wts;
    bool has_declared_mean = false;
    double declared_mean = 0.0;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            auto pos = line.find("mean=");
            if (pos != std::string::npos) {
                declared_mean = std::stod(line.substr(pos + 5));
                has_declared_mean = true;
            }
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos)
            fail("distribution record: expected 'point,weight', got '" + line + "'");
        try {
            pts.push_back(std::stod(line.substr(first, comma - first)));
            wts.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            fail("distribution record: malformed number in '" + line + "'");
        }
    }
    BeliefDistribution d(std::move(pts), std::move(wts));
    if (has_declared_mean && std::fabs(d.mean() - declared_mean) > kMeanTol)
        fail("distribution record: declared mean " + std::to_string(declared_mean) +
             " does not match computed mean " + std::to_string(d.mean()));
    return d;
}

}  // namespace persuasion
