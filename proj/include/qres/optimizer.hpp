#pragma once

#include <cstdint>
#include <span>

#include "qres/freesets.hpp"
#include "qres/witnesses.hpp"

namespace qres {

// Which side of the realization is restricted to the free set; the other side
// ranges over all quantum objects of the same dimension.
enum class ConstrainSide { StatesOnly, OperationsOnly, Both };

enum class InnerSearch { SeeSaw, NelderMead, Hybrid };

struct OptimizationConfig {
    int restarts = 200;
    int max_seesaw_rounds = 500;
    double convergence_tol = 1e-9; // absolute witness-value change per round
    std::uint64_t seed = 12345;
    InnerSearch inner_search = InnerSearch::Hybrid;
};

// The best free value exhibited over all restarts. This is a certified LOWER
// bound on the true free maximum: it comes with an explicit realization, and
// agreement with an analytic bound is a consistency check, not a proof of
// global optimality.
struct CertifiedBound {
    double value = 0.0;
    PreparationBox argmax_states;
    OperationBox argmax_effects;
    int restarts_agreeing = 0; // within 1e-6 of the best value
    int converged_restarts = 0;
    int non_converged_restarts = 0;
    OptimizationConfig config_used;
    std::string witness_name;
    std::string free_set_name;
};

// Maximize the witness over the free set's parametrized states/instruments.
// Linear witnesses alternate exact half-steps (see-saw): with states fixed,
// each instrument is rebuilt from the eigenspaces of its accumulated
// coefficient operators; with instruments fixed, each state is the free set's
// exact linear maximizer (polytope sets pick vertices). Nonlinear witnesses
// run Nelder-Mead over the joint parametrization.
CertifiedBound certify_bound(const WitnessSpec& witness, const FreeSetSpec& free_set,
                             ConstrainSide constrain, const OptimizationConfig& cfg);

// The extremal-assignment route for the qudit coherence bound: enumerate the
// rank-1 incoherent instruments (computational projectors under outcome
// relabelings pi, tau), optimize states freely for each, and return the best,
// which lands on d^2 + d. Supported for 2 <= d <= 5.
CertifiedBound certify_qudit_coherence(int d, const OptimizationConfig& cfg);

// Max of -sum_{x,y} |p(0|x,y) - p_ref(0|x,y)| over free realizations of the
// reference table's shape. Strictly negative when no free model reproduces
// p_ref; its magnitude is the recommended epsilon for generic_witness.
double estimate_gap(const CorrelationTable& p_ref, const FreeSetSpec& free_set,
                    const OptimizationConfig& cfg);

struct NelderMeadResult {
    std::vector<double> best_params;
    double best_value = 0.0; // minimized objective at best_params
    int iterations = 0;
    bool converged = false;
};

// Standard downhill simplex (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5); stops when the simplex value spread falls below ftol.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::span<const double> start, double step, int max_iters,
                             double ftol);

} // namespace qres
