#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qres/scenario.hpp"

namespace qres {

enum class BoundProvenance { Analytic, CertifiedNumeric };

struct WitnessShape {
    int num_y = 0;
    int num_x = 0;
    int min_outcomes = 0;
};

// One addend of a linear witness: coeff * p(j|x,y).
struct LinearTerm {
    int j = 0;
    int x = 0;
    int y = 0;
    double coeff = 1.0;
};

// A witness functional of the correlation table together with its free bound
// and a reference quantum realization that violates it. Evaluation never looks
// at states or effects, only at the table.
struct WitnessSpec {
    std::string name;
    int dim = 0; // Hilbert space dimension of the intended realization; 0 = any
    WitnessShape required_shape;
    std::function<double(const CorrelationTable&)> evaluate_fn;
    // Present iff the witness is linear in the probabilities.
    std::optional<std::vector<LinearTerm>> linear_terms;
    double free_bound = 0.0;
    BoundProvenance bound_provenance = BoundProvenance::Analytic;
    // The two-decimal published value, when the shipped bound is a re-derivation.
    std::optional<double> paper_bound;
    std::optional<Realization> reference;
    double reference_value = 0.0;
    // The bound derivation assumes the monitored outcome effect has trace <= 1
    // (rank-1); certification must honor it.
    bool rank_one_monitored_effects = false;
    // A VIOLATED verdict additionally needs at least this many outcomes in the
    // table; a one-outcome instrument is trace-preserving as a whole and says
    // nothing (purity sets 2).
    int min_outcomes_for_violation = 1;
    // Name of the free set the bound is stated against (empty for generic).
    std::string canonical_free_set;
};

struct WitnessVerdict {
    double value = 0.0;
    bool violated = false;
};

// 3 preparations, 2 two-outcome instruments; free bound 4 over incoherent
// states and operations, reference value 3+sqrt2.
WitnessSpec coherence_qubit();

// Random-access-code witness, d^2 preparations indexed y = y0*d + y1 and two
// d-outcome instruments; free bound d^2+d, reference value d^2+d*sqrt(d).
WitnessSpec coherence_qudit(int d);

// 4 preparations, 3 two-outcome instruments; nonlinear. The shipped bound 5
// is the published analytic value; it is evadable by real instruments with an
// identity component (see certify_bound), which tests surface honestly.
WitnessSpec imaginarity_qubit();

// Single probability p(0|0,0); free bound 1/d against the maximally mixed
// state, assuming the monitored effect has trace <= 1.
WitnessSpec purity(int d);

// Same functional as coherence_qubit; bound re-derived exactly over the
// stabilizer polytope with unconstrained measurements (the published value is
// 4.32 at two decimals).
WitnessSpec magic_qubit();

// -sum_{x,y} |p(0|x,y) - ref(0|x,y)| <= -epsilon, the generic nearly-tight
// witness; epsilon must be strictly positive (estimate_gap suggests one).
WitnessSpec generic_witness(const CorrelationTable& reference_table, double epsilon);
WitnessSpec generic_witness(const Realization& reference, double epsilon);

// Exact maximum of the coherence functional over stabilizer-vertex states and
// unconstrained two-outcome measurements: max over vertex triples of
// 2 + pos(rho0+rho1-rho2) + pos(rho0-rho1), pos() the positive-part trace.
double certified_magic_bound();

// Shape-checked evaluation; names the missing cells on mismatch.
double evaluate_witness(const WitnessSpec& spec, const CorrelationTable& table);
WitnessVerdict evaluate_with_verdict(const WitnessSpec& spec, const CorrelationTable& table);

// CLI-addressable names: coherence, coherence-d, imaginarity, purity, magic,
// generic (generic requires a reference table and is built separately).
WitnessSpec witness_by_name(std::string_view name, int d);
std::vector<std::string> witness_names();

} // namespace qres
