#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "persuasion/errors.hpp"
#include "persuasion/receiver.hpp"

namespace persuasion {

enum class Verdict { Equilibrium, Refuted, Inconclusive };
std::string to_string(Verdict v);

struct DeviationSearchConfig {
    double support_step = 0.005;     // grid for binary deviation supports
    double profit_threshold = 1e-4;  // separates numeric noise from real gains
    int grid_points = 2001;          // master grid for envelope evaluations
    TieRule tie_rule = TieRule::FirstVisited;
    bool include_three_point = false;  // coarse three-point deviation sweep
    double three_point_step = 0.1;
    double three_point_candidate_step = 0.02;
};

struct DeviationFinding {
    int sender = 1;  // deviating sender id, 1-based
    BeliefDistribution dist;
    double gain_neutral = 0.0;    // under the deviation-neutralizing receiver optimum
    double gain_favorable = 0.0;  // under the deviator-most-favorable optimum
    std::string trace;            // receiver response description
};

struct DeviationSearchResult {
    double margin_neutral = 0.0;    // max neutral gain over all scanned deviations
    double margin_favorable = 0.0;  // max favorable gain
    std::optional<DeviationFinding> best;  // argmax of the neutral gain
    long deviations_scanned = 0;
};

struct EquilibriumReport {
    Verdict verdict = Verdict::Inconclusive;
    double sender1_payoff = 0.5;
    double sender2_payoff = 0.5;
    double receiver_value = 0.0;
    double margin = 0.0;  // raw max neutral deviation gain
    double margin_favorable = 0.0;
    bool closed_form_equilibrium = false;
    bool out_of_region = false;
    std::string region_note;
    std::optional<DeviationFinding> best_deviation;
};

/// Probability that the first-visited sender is selected given a stage-1
/// belief x, valid on the admissible stage-1 support in the multiplicity
/// region: affine 2k(x - mu) + 1/2 clamped to [0, 1]. Throws
/// out_of_region_error outside the multiplicity region and
/// invalid_argument when x is not an admissible support point.
double selection_probability(double x, const ModelParams& mp);

/// Expected selection probability of the first-visited sender under an
/// optimal stage-1 garbling F; equals 1/2 for every optimal F in the
/// multiplicity region. Throws when F is not optimal.
double first_visit_value(const BeliefDistribution& F, const ModelParams& mp);

/// Scans binary deviations {alpha, beta} with mean mu on the support grid
/// (plus the uninformative deviation, and optionally coarse three-point
/// deviations) for each sender, holding the receiver's on-path conjecture
/// fixed: her response re-optimizes only once the deviating distribution is
/// observed at a visit.
DeviationSearchResult deviation_search(const BeliefDistribution& p1,
                                       const BeliefDistribution& p2,
                                       const ModelParams& mp,
                                       const DeviationSearchConfig& cfg = {});

/// Both senders offer full information on [0,1]: equilibrium iff k > 1/2
/// and mu in [1/(4k), 1 - 1/(4k)], cross-checked by deviation search.
EquilibriumReport check_full_info(const ModelParams& mp,
                                  const DeviationSearchConfig& cfg = {});

/// Both senders offer the same binary distribution with support {l, h}:
/// equilibrium iff k > 1/(2(h-l)) and mu in [l + 1/(4k), h - 1/(4k)].
EquilibriumReport check_binary_symmetric(const BeliefDistribution& p,
                                         const ModelParams& mp,
                                         const DeviationSearchConfig& cfg = {});

/// Both senders uninformative: always an equilibrium (deviations go
/// undetected because the receiver never visits).
EquilibriumReport check_uninformative(const ModelParams& mp);

/// Profiles outcome-equivalent to full information: requires k > 1/2 and
/// mu in [1/(4k), 1 - 1/(4k)]; equilibrium iff the receiver's most
/// informative optimal garbling {mu - 1/(4k), mu + 1/(4k)} is a contraction
/// of both offers, in which case the receiver value equals the full
/// information value mu + 1/(16k).
EquilibriumReport check_outcome_equivalent(const BeliefDistribution& p1,
                                           const BeliefDistribution& p2,
                                           const ModelParams& mp);

// ---- costless-attention (k = 0) benchmarks ----

struct KZeroUniformReport {
    double mu = 0.0;
    double on_path_payoff = 0.5;
    double max_abs_dev_from_half = 0.0;  // over the binary deviation grid
    long deviations_checked = 0;
    bool equilibrium = true;
};

/// Both senders uniform on [0, 2 mu], mu <= 1/2: every binary deviation
/// supported within [0, 2 mu] pays exactly 1/2.
KZeroUniformReport kzero_uniform_check(double mu, double grid_step = 0.01);

struct KZeroAtomReport {
    double mu = 0.0;
    double lambda_visit = 0.5;
    double on_path_payoff1 = 0.5;  // first sender, given the visit mix
    double zero_one_gain1 = 0.0;   // gain of sender 1 deviating to {0,1}
    double zero_one_gain2 = 0.0;   // mirror for sender 2
    double max_abs_binary_dev_from_half = 0.0;  // at the fair visit mix
    long deviations_checked = 0;
    bool equilibrium = false;  // true iff lambda_visit = 1/2
};

/// Both senders offer the atom benchmark (mu > 1/2): an equilibrium iff the
/// visit order is fair; the {0,1} deviation gain equals
/// (1-mu)^2 (2mu-1)(2lambda-1) / (2 mu^2).
KZeroAtomReport kzero_atom_check(double mu, double lambda_visit,
                                 double grid_step = 0.01);

struct KZeroFullInfoReport {
    double mu = 0.0;
    int n = 0;
    double eta = 0.0;      // weight on belief 1
    double epsilon = 0.0;  // low belief of the deviation
    double lhs = 0.0;      // (1 + 2n - sqrt(1 + 4n)) / (2n)
    bool profitable = false;
    int smallest_profitable_n = 0;
};

/// Full information with k = 0 is refuted by the deviation
/// {1 w.p. mu - 1/n, epsilon otherwise}: profitable iff lhs > mu. The
/// report also carries the smallest n that works for this mu.
KZeroFullInfoReport kzero_fullinfo_refute(double mu, int n);

// ---- single-sender benchmark ----

struct SingleSenderParams {
    double lambda_threshold = 0.5;  // acceptance threshold in (0,1)
    double k = 1.0;
    double mu = 0.5;
    void validate() const;
};

struct SingleSenderSolution {
    BeliefDistribution sender_distribution;
    BeliefDistribution receiver_garbling;
    double acceptance = 0.0;
};

/// Receiver's optimal garbling of a given offer under the payoff
/// max{y, lambda} - k (y - mu)^2, and the induced acceptance probability
/// (mass at or above lambda).
std::pair<BeliefDistribution, double> single_sender_response(
    const BeliefDistribution& offer, const SingleSenderParams& ssp,
    int grid_points = 2001);

/// Acceptance-maximizing binary sender distribution {a, b} with
/// a < lambda < b, found by grid search; degenerate cases (lambda <= mu,
/// or k = 0) are returned in closed form.
SingleSenderSolution single_sender_solve(const SingleSenderParams& ssp,
                                         double support_step = 0.005,
                                         int grid_points = 2001);

// ---- region sweeps ----

struct RegionCell {
    double mu = 0.0;
    double k = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    double margin = 0.0;
};

/// Full-information verdicts over the cell-center grid
/// mu_i = lo + (i - 1/2)(hi - lo)/steps, i = 1..steps.
std::vector<RegionCell> region_sweep(double k, double mu_lo, double mu_hi,
                                     int steps, const DeviationSearchConfig& cfg,
                                     bool parallel = false);

}  // namespace persuasion
