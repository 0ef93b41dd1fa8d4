#pragma once

// Shared machinery for deviation scans: a master grid of stage-1
// continuation values against a fixed opponent, subrange envelope
// evaluation with the receiver's full optimal set, and the per-branch
// selection accounting. Used by the equilibrium and extensions checkers.

#include <cstddef>
#include <vector>

#include "persuasion/equilibrium.hpp"
#include "persuasion/receiver.hpp"

namespace persuasion::detail {

// The opponent the receiver continues to after the first visit.
struct SecondView {
    bool uninformative = false;
    ModelParams view;  // valid when !uninformative; l/h = opponent support
};

struct MasterGrid {
    std::vector<double> x;   // grid on [0,1]: uniform + breakpoints + deviation steps
    std::vector<double> v2;  // optimal stage-2 value against the opponent at x
    std::vector<double> u1;  // v2 - k_first (x - mu)^2
    std::vector<double> ps;  // P(first-visited selected | stage-1 belief x)
    std::size_t i_mu = 0;    // exact index of mu
    double mu = 0.0;
    double k_first = 0.0;
};

MasterGrid build_master(const SecondView& sv, double mu, double k_first,
                        const DeviationSearchConfig& cfg,
                        const std::vector<double>& extra_points = {});

// Rewrites u1 for a different stage-1 cost coefficient (experiment-dependent
// cost schedules re-price the deviator's experiment).
void reprice_stage1(MasterGrid& g, double k_first);

std::size_t grid_index(const MasterGrid& g, double x);

// Envelope of u1 restricted to grid indices [ia, ib], its value at mu, and
// the range of the deviator's selection probability over the receiver's
// full optimal set (every Bayes-plausible distribution on the contact set
// of the supporting line at mu).
struct FirstVisitEval {
    double value = 0.0;
    double p_lo = 0.0;  // min E[P] over optimal stage-1 garblings
    double p_hi = 0.0;  // max E[P]
};

struct EvalBuffers {
    std::vector<std::size_t> hull;
    std::vector<double> cx, cp;
    std::vector<std::size_t> chull;
};

FirstVisitEval eval_first_visit(const MasterGrid& g, std::size_t ia,
                                std::size_t ib, EvalBuffers& buf);

// Same evaluation against externally supplied values (u, p) on g.x; used
// when the continuation or the cost coefficient differs from the master's.
FirstVisitEval eval_first_visit_values(const MasterGrid& g,
                                       const std::vector<double>& u,
                                       const std::vector<double>& p,
                                       std::size_t ia, std::size_t ib,
                                       EvalBuffers& buf);

// P(second-visited sender selected | incoming belief w) after the receiver
// re-optimizes her stage-2 garbling of the deviator's binary offer
// {alpha, beta} (alpha < mu < beta).
double p2_after_deviation(double w, double alpha, double beta, double mu,
                          double k, TieRule tie);

}  // namespace persuasion::detail
