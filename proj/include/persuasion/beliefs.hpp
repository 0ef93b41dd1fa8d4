#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace persuasion {

/// Finite-support probability distribution over posterior beliefs in [0,1].
///
/// The canonical representation keeps support points strictly increasing:
/// weights of zero are stripped and duplicate points are merged on
/// construction. Weights must be nonnegative and sum to 1 within 1e-12.
/// Instances are immutable after construction and safe to share across
/// threads.
class BeliefDistribution {
public:
    BeliefDistribution(std::vector<double> points, std::vector<double> weights);

    static BeliefDistribution point_mass(double x);
    /// Binary distribution on {lo, hi} with weights chosen so the mean is
    /// `mean`. Collapses to a point mass when mean coincides with lo or hi.
    static BeliefDistribution binary(double lo, double hi, double mean);
    /// Support {0,1} with mean `mean`.
    static BeliefDistribution full_information(double mean);

    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return points_.size(); }
    bool degenerate() const { return points_.size() == 1; }
    bool binary_support() const { return points_.size() == 2; }
    double support_lo() const { return points_.front(); }
    double support_hi() const { return points_.back(); }

    double mean() const { return mean_; }
    /// Sum of w_i * (p_i - center)^2.
    double quadratic_moment_about(double center) const;
    /// P(point <= x).
    double cdf(double x) const;
    /// P(point < x).
    double mass_below(double x) const;
    /// Probability at points within tol of x.
    double mass_at(double x, double tol = 1e-12) const;
    /// Integral of the CDF from 0 to x; piecewise linear and convex in x.
    double integrated_cdf(double x) const;

    bool approx_equal(const BeliefDistribution& other, double tol = 1e-9) const;

private:
    std::vector<double> points_;
    std::vector<double> weights_;
    double mean_ = 0.0;
};

/// Mean-preserving-contraction test: true iff q and p have equal means
/// (within 1e-9) and the integrated CDF of q lies weakly below that of p
/// everywhere. `tol` bounds the allowed pointwise violation, scaled by the
/// support width of p. For binary p this coincides with the support
/// characterization supp(q) within [lo, hi].
bool is_garbling(const BeliefDistribution& q, const BeliefDistribution& p,
                 double tol = 1e-7);

/// Attention cost coefficient model. Constant mode carries a single k > 0.
/// Experiment-dependent mode maps the sender's chosen distribution to a
/// coefficient through a step schedule of reference distributions: the
/// coefficient of p is the smallest step coefficient among references that
/// are garblings of p (p at least as informative as the reference), and the
/// floor k_floor when no reference is comparable. Step coefficients must be
/// weakly decreasing along the informativeness order and no smaller than
/// k_floor.
class CostModel {
public:
    enum class Mode { Constant, ExperimentDependent };

    static CostModel constant(double k);
    static CostModel experiment_dependent(
        double k_floor,
        std::vector<std::pair<BeliefDistribution, double>> steps);

    Mode mode() const { return mode_; }
    double k() const { return k_; }
    double k_floor() const { return k_floor_; }
    const std::vector<std::pair<BeliefDistribution, double>>& steps() const {
        return steps_;
    }

    /// Coefficient applied to a garbling of `sender_dist`. In constant mode
    /// the argument is ignored; in experiment-dependent mode it is required.
    double coefficient(const BeliefDistribution* sender_dist = nullptr) const;

private:
    CostModel() = default;
    Mode mode_ = Mode::Constant;
    double k_ = 1.0;
    double k_floor_ = 0.0;
    std::vector<std::pair<BeliefDistribution, double>> steps_;
};

/// Quadratic posterior-separable attention cost k * sum w_i (p_i - prior)^2.
inline double attention_cost(const BeliefDistribution& q, double prior, double k) {
    return k * q.quadratic_moment_about(prior);
}

double attention_cost(const BeliefDistribution& q, double prior,
                      const CostModel& cm,
                      const BeliefDistribution* sender_dist = nullptr);

/// n-point quantile-midpoint discretization of the uniform distribution on
/// [0, 2*mu]; requires 0 < mu <= 1/2. The mean is exactly mu.
BeliefDistribution uniform_benchmark(double mu, int n_points = 1000);

/// Discretization of the distribution with continuous CDF x/(2*mu) on
/// [0, 2(1-mu)] plus an exact atom of mass 2 - 1/mu at 1; requires
/// 1/2 < mu < 1. The continuous portion gets n quantile midpoints.
BeliefDistribution atom_benchmark(double mu, int n_points = 1000);

/// An optimal garbling: the chosen belief distribution and its attained
/// objective value.
struct GarblingSolution {
    BeliefDistribution dist = BeliefDistribution::point_mass(0.0);
    double value = 0.0;

    bool degenerate() const { return dist.degenerate(); }
    bool binary() const { return dist.binary_support(); }
};

/// Plain-text record: header line "# mean=<value>", then one "point,weight"
/// line per support point.
std::string to_text(const BeliefDistribution& d);
BeliefDistribution distribution_from_text(const std::string& text);

}  // namespace persuasion
