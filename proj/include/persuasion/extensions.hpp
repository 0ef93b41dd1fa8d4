#pragma once

#include "persuasion/equilibrium.hpp"

namespace persuasion {

/// Heterogeneous prior means; the closed forms require k = 1.
struct HeteroParams {
    double mu1 = 0.5;
    double mu2 = 0.5;
    double k = 1.0;
    void validate() const;
};

struct HeteroStage1Set {
    int case_id = 0;  // 1..4
    std::vector<SupportInterval> support;
    bool no_learning_first = false;  // the first-visited prior lies in the set
};

/// Admissible stage-1 support set when the sender with the given id is
/// visited second (k = 1, both senders offering full information). Throws
/// out_of_region_error when no case applies.
HeteroStage1Set hetero_stage1(const HeteroParams& hp, int second_visited);

/// Receiver's optimal expected payoff under heterogeneous means (k = 1):
/// mu1^2 + mu2^2 + (mu1 + mu2)/2 - 2 mu1 mu2 + 1/16. Symmetric in its
/// arguments; throws out_of_region_error when no stage-1 case applies.
double hetero_value(const HeteroParams& hp);

/// Full-information equilibrium check with heterogeneous means (k = 1):
/// equilibrium when |mu2 - mu1| <= 1/4 and one of the three closed-form
/// conditions holds; outside the region the verdict is inconclusive (the
/// conditions are sufficient, not necessary). In-region the checker also
/// verifies order exchangeability, the order-indifference value identity,
/// and that the first-visited sender's conditional selection probability is
/// 0, 1, or affine on the admissible support.
EquilibriumReport check_hetero_fullinfo(const HeteroParams& hp);

/// Symmetric binary profile with publicly observed experiments: the region
/// verdict matches the baseline, but a deviation is visible at stage 0 and
/// the receiver re-chooses her visit order (ties enumerated; the verdict
/// uses the deviation-neutralizing order, the favorable margin the other).
EquilibriumReport check_public(const BeliefDistribution& p, const ModelParams& mp,
                               const DeviationSearchConfig& cfg = {});

/// Full-information equilibrium under the experiment-dependent cost
/// C(q, p) = k(p) * sum w (x - mu)^2: on path both senders price at the
/// floor k_F, and deviations are re-priced at their own (weakly higher)
/// coefficient. Equilibrium for k_F > 1/2 and mu in [1/(4 k_F), 1 - 1/(4 k_F)];
/// outside that region no claim is made.
EquilibriumReport check_costvariant_fullinfo(double mu, const CostModel& cm,
                                             const DeviationSearchConfig& cfg = {});

}  // namespace persuasion
