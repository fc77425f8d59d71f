#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qres/qmath.hpp"

namespace qres {

struct MembershipReport {
    bool is_member = false;
    double distance_estimate = 0.0; // distance to the set's defining constraints
};

// Total map from a real parameter box into the free states. Every parameter
// vector, including ones Nelder-Mead wanders to, yields a valid member.
struct StateParametrization {
    int num_params = 0;
    double box_lo = -1.0;
    double box_hi = 1.0;
    std::function<DensityMatrix(std::span<const double>)> make;
};

// Same, for complete instruments with a given outcome count.
struct InstrumentParametrization {
    double box_lo = -1.0;
    double box_hi = 1.0;
    std::function<int(int num_outcomes)> num_params;
    std::function<std::vector<Effect>(int num_outcomes, std::span<const double>)> make;
};

// A resource theory's free states and operations: extremal operator bases
// (the Gamma_{d,i} / Delta_{d,i}), rank budgets n(S_ext,d) / n(O_ext,d), and
// parametrizations plus exact linear-maximizer steps for the optimizer.
struct FreeSetSpec {
    std::string name;
    int dim = 0;

    std::vector<DensityMatrix> state_basis;
    std::vector<Effect> effect_basis;
    int state_rank_budget = 0;  // = state_basis.size()
    int effect_rank_budget = 0; // = effect_basis.size()

    // Present when the free states form a polytope with finitely many vertices.
    std::optional<std::vector<DensityMatrix>> extremal_states;
    bool effects_unconstrained = false;

    StateParametrization state_param;
    InstrumentParametrization effect_param;

    std::function<double(const DensityMatrix&)> state_distance;
    std::function<double(const Effect&)> effect_distance;

    // argmax of Tr(rho H) over free states, H Hermitian. Exact.
    std::function<DensityMatrix(const ComplexMatrix& h)> best_free_state;
    // argmax of sum_j Tr(E_j G_j) over free instruments; nullopt when the set
    // has no exact closed-form step for that outcome count.
    std::function<std::optional<std::vector<Effect>>(const std::vector<ComplexMatrix>& g)>
        best_free_instrument;
};

// Coherence: diagonal states and diagonal POVM elements; n = d on both sides.
FreeSetSpec incoherent(int d);

// Imaginarity (qubit only): rho = rho*, effects m0*1 + mz*sz + mx*sx; n = 3.
FreeSetSpec real_states(int d = 2);

// Magic (qubit): states in the convex hull of the six stabilizer projectors;
// effects unconstrained, matching how the published bound is optimized. The
// state budget 4 equals d^2, so the rank test is vacuous here.
FreeSetSpec stabilizer_qubit();

// Purity: the single free state 1/d; effects unconstrained.
FreeSetSpec maximally_mixed(int d);

MembershipReport membership(const FreeSetSpec& spec, const DensityMatrix& state);
MembershipReport membership(const FreeSetSpec& spec, const Effect& effect);

// Arbitrary POVM elements C_j C_j†, sandwich-normalized to a complete
// instrument; the parametrization the unconstrained side of an optimization
// runs over.
InstrumentParametrization unconstrained_instrument_parametrization(int d);

// Same but every raw element is a rank-1 dyad a_j a_j†, so each normalized
// effect has rank <= 1 (trace <= 1); needs >= d outcomes to be complete.
InstrumentParametrization rank_one_instrument_parametrization(int d);

// CLI-addressable names: incoherent, real, stabilizer, maximally-mixed,
// asymmetry-d2, athermality-d2 (the last two alias incoherent at d = 2).
FreeSetSpec free_set_by_name(std::string_view name, int d);
std::vector<std::string> free_set_names();

} // namespace qres
