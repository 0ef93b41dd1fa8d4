#pragma once

#include <vector>

#include "persuasion/beliefs.hpp"
#include "persuasion/concavify.hpp"

namespace persuasion {

namespace detail {

/// Allocation-free stage-2 closed form, for grid-heavy loops.
struct Stage2Core {
    bool is_degenerate = true;
    double y1 = 0.0;
    double y2 = 0.0;
    double nu = 1.0;  // weight on y1
    double value = 0.0;
    int case_id = 0;
};

Stage2Core stage2_core(double x, double k, double mu, double l, double h);

}  // namespace detail

/// Baseline model parameters: attention coefficient k > 0, common prior mu,
/// and the senders' binary support bounds 0 <= l < mu < h <= 1.
struct ModelParams {
    double k = 1.0;
    double mu = 0.5;
    double l = 0.0;
    double h = 1.0;

    void validate() const;
};

/// Posterior-comparison tie handling, and the selection rule when no
/// learning happens at all.
enum class TieRule { FirstVisited, SecondVisited, SplitEven };

/// Stage-2 gross payoff max{x, y} minus the attention cost k (y - mu)^2 of
/// the stage-2 belief y, given the stage-1 belief x.
double stage2_payoff(double y, double x, const ModelParams& mp);

/// Optimal stage-2 garbling of a sender with support [l, h] given the
/// stage-1 belief x, by the closed-form case analysis: the solution is
/// either the point mass at mu or binary, with support drawn from
/// {x - 1/(4k), x + 1/(4k)}, {l, l + sqrt((x-l)/k)}, {h - sqrt((h-x)/k), h},
/// or {l, h} depending on where (k, mu, l, h, x) falls. Defined for any
/// x in [0, 1]; outside [l, h] the solution is the point mass at mu.
GarblingSolution stage2_closed_form(double x, const ModelParams& mp);

/// Value of the optimal stage-2 garbling at stage-1 belief x.
double stage2_value(double x, const ModelParams& mp);

/// Same contract as stage2_closed_form, computed by concavifying the
/// stage-2 payoff over [l, h] on a grid.
GarblingSolution stage2_oracle(double x, const ModelParams& mp,
                               int grid_points = 2001);

/// Breakpoints of the stage-2 case analysis (kinks of stage2_value), used
/// to make oracle grids exact.
std::vector<double> stage2_case_breakpoints(const ModelParams& mp);

/// Stage-1 continuation value: optimal stage-2 value at x minus the stage-1
/// attention cost k (x - mu)^2.
double stage1_value(double x, const ModelParams& mp);

/// A closed interval of admissible support points; lo == hi marks an
/// isolated point.
struct SupportInterval {
    double lo = 0.0;
    double hi = 0.0;
};

bool support_set_contains(const std::vector<SupportInterval>& set, double x,
                          double tol = 1e-9);

/// The receiver's optimal stage-1 garbling when both senders offer support
/// {l, h}. In the multiplicity region (k > 1/(2(h-l)) and
/// mu in [l + 1/(4k), h - 1/(4k)]) every Bayes-plausible distribution on the
/// admissible set is optimal and the most informative one has support
/// {mu - 1/(4k), mu + 1/(4k)}; otherwise the solution is a unique binary
/// distribution {l, y1} or {y2, h} whose interior endpoint is found
/// numerically from the envelope's chord condition.
struct Stage1Solution {
    GarblingSolution most_informative;
    std::vector<SupportInterval> admissible;
    bool multiple = false;
    int case_id = 0;  // 1..5, ordered as in stage2_closed_form
    double value = 0.0;
};

Stage1Solution stage1_closed_form(const ModelParams& mp);

/// Probability that the first-visited sender is selected, given the stage-1
/// belief x and the second sender's offer described by `second_view`
/// (mu = the second sender's prior, l/h = its support bounds).
double select_first_prob(double x, const ModelParams& second_view,
                         TieRule tie = TieRule::FirstVisited);

enum class StopAction { SelectVisited, SelectOther, Continue };

struct Stage2Entry {
    double stage1_belief = 0.0;
    double weight = 0.0;
    StopAction action = StopAction::Continue;
    GarblingSolution garbling;       // stage-2 garbling of the second sender
    double select_first_prob = 0.0;  // P(first-visited selected | this belief)
};

/// A full receiver strategy: visit order mix, stage-1 garbling at the
/// first-visited sender, and the per-belief stage-2 response.
struct ReceiverStrategy {
    double first_visit_prob = 0.5;  // probability sender 1 is visited first
    bool visits_anyone = false;
    GarblingSolution stage1;
    std::vector<Stage2Entry> stage2;
    double value = 0.0;
    double gross_value = 0.0;
    double stage1_cost = 0.0;
    double stage2_cost = 0.0;
    double u_first = 0.0;   // P(first-visited sender selected)
    double sender1_payoff = 0.0;
    double sender2_payoff = 0.0;
};

struct OracleConfig {
    int grid_points = 2001;
    double support_step = 0.005;  // candidate grid for non-binary senders
};

/// Solves the fixed-order protocol: visit the sender offering `first`
/// (prior mu_first) at stage 1, then the sender offering `second`
/// (prior mu_second) at stage 2. Stage-1 feasible garblings are the
/// mean-preserving contractions of `first`; for binary senders that is every
/// distribution supported on the offer's interval, for general senders a
/// restricted candidate search is used. Costs use coefficient k_first at
/// stage 1 and k_second at stage 2.
struct OrderSolution {
    double value = 0.0;
    GarblingSolution stage1;
    std::vector<Stage2Entry> stage2;
    double gross_value = 0.0;
    double stage1_cost = 0.0;
    double stage2_cost = 0.0;
    double u_first = 0.0;
};

OrderSolution solve_visit_order(const BeliefDistribution& first, double mu_first,
                                const BeliefDistribution& second,
                                double mu_second, double k_first,
                                double k_second,
                                TieRule tie = TieRule::FirstVisited,
                                const OracleConfig& cfg = {});

/// Optimal garbling of `offer` for a linear objective sum_y q(y) util(y).
/// Binary offers admit every mean-preserving distribution on their support
/// interval (solved by concavification over the grid with the given
/// breakpoints inserted); non-binary offers use a restricted candidate
/// search over no-learning, the offer itself, binary contractions on the
/// step grid, and the supplied extra candidates that pass the contraction
/// test.
GarblingSolution optimal_garbling_of_offer(
    const BeliefDistribution& offer, const std::function<double(double)>& util,
    const std::vector<double>& breakpoints, const OracleConfig& cfg,
    const std::vector<BeliefDistribution>& extra = {});

/// The receiver's best response to the offered pair (p1, p2): choose the
/// visit order (possibly visiting no one) and the garblings maximizing
/// expected selected quality net of attention costs.
ReceiverStrategy best_response(const BeliefDistribution& p1,
                               const BeliefDistribution& p2,
                               const ModelParams& mp,
                               TieRule tie = TieRule::FirstVisited,
                               const OracleConfig& cfg = {});

}  // namespace persuasion
