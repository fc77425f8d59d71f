#include "qres/witnesses.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace qres {

namespace {

double linear_evaluate(const std::vector<LinearTerm>& terms, const CorrelationTable& table) {
    double value = 0.0;
    for (const auto& t : terms) value += t.coeff * table(t.j, t.x, t.y);
    return value;
}

std::function<double(const CorrelationTable&)> make_linear_fn(std::vector<LinearTerm> terms) {
    return [terms = std::move(terms)](const CorrelationTable& t) {
        return linear_evaluate(terms, t);
    };
}

Realization coherence_reference() {
    std::vector<DensityMatrix> states = {DensityMatrix::pure(ket(2, 0)),
                                         DensityMatrix::pure(plus_state()),
                                         DensityMatrix::pure(bar_one())};
    std::vector<std::vector<Effect>> instruments = {
        {Effect::projector(bar_zero()), Effect::projector(bar_one())},
        {Effect::projector(bar_plus()), Effect::projector(bar_minus())}};
    return Realization{PreparationBox(2, std::move(states)),
                       OperationBox(2, std::move(instruments))};
}

std::vector<LinearTerm> coherence_terms() {
    return {{0, 0, 0, 1.0}, {0, 0, 1, 1.0}, {0, 1, 0, 1.0}, {1, 1, 1, 1.0}, {1, 0, 2, 1.0}};
}

// Sum of positive eigenvalues of a Hermitian 2x2 matrix, via trace/determinant.
double positive_part_2x2(const Eigen::Matrix2cd& m) {
    const double tr = m.trace().real();
    const double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    const double lo = 0.5 * (tr - disc);
    const double hi = 0.5 * (tr + disc);
    return std::max(0.0, lo) + std::max(0.0, hi);
}

void check_reference_consistency(const WitnessSpec& spec) {
    if (!spec.reference) return;
    const CorrelationTable table =
        simulate(spec.reference->preparations, spec.reference->operations);
    const double value = spec.evaluate_fn(table);
    if (std::abs(value - spec.reference_value) > 1e-9) {
        throw ContractViolation("witness '" + spec.name + "': reference realization evaluates to " +
                                std::to_string(value) + ", expected " +
                                std::to_string(spec.reference_value));
    }
}

} // namespace

WitnessSpec coherence_qubit() {
    WitnessSpec spec;
    spec.name = "coherence";
    spec.dim = 2;
    spec.canonical_free_set = "incoherent";
    spec.required_shape = {3, 2, 2};
    spec.linear_terms = coherence_terms();
    spec.evaluate_fn = make_linear_fn(*spec.linear_terms);
    spec.free_bound = 4.0;
    spec.bound_provenance = BoundProvenance::Analytic;
    spec.reference = coherence_reference();
    spec.reference_value = 3.0 + std::numbers::sqrt2;
    check_reference_consistency(spec);
    return spec;
}

WitnessSpec coherence_qudit(int d) {
    if (d < 2) throw InvalidInput("coherence_qudit: d must be >= 2");
    WitnessSpec spec;
    spec.name = "coherence-d";
    spec.dim = d;
    spec.canonical_free_set = "incoherent";
    spec.required_shape = {d * d, 2, d};

    std::vector<LinearTerm> terms;
    terms.reserve(2 * d * d);
    for (int y0 = 0; y0 < d; ++y0) {
        for (int y1 = 0; y1 < d; ++y1) {
            const int y = y0 * d + y1;
            terms.push_back({y0, 0, y, 1.0});
            terms.push_back({y1, 1, y, 1.0});
        }
    }
    spec.linear_terms = std::move(terms);
    spec.evaluate_fn = make_linear_fn(*spec.linear_terms);
    spec.free_bound = double(d * d + d);
    spec.bound_provenance = BoundProvenance::Analytic;

    std::vector<DensityMatrix> states;
    states.reserve(d * d);
    for (int y0 = 0; y0 < d; ++y0) {
        for (int y1 = 0; y1 < d; ++y1) {
            states.push_back(DensityMatrix::pure(qrac_state(d, y0, y1)));
        }
    }
    // x=0 reads the computational register: the encoding shifts the dominant
    // component of |psi_00> down to index (d - y0) mod d, so outcome j carries
    // the relabeled projector |(d-j) mod d>. x=1 reads the X_d eigenbasis.
    std::vector<Effect> z_instrument, x_instrument;
    for (int j = 0; j < d; ++j) {
        z_instrument.push_back(Effect::projector(ket(d, (d - j) % d)));
        x_instrument.push_back(Effect::projector(fourier_state(d, j)));
    }
    spec.reference = Realization{PreparationBox(d, std::move(states)),
                                 OperationBox(d, {std::move(z_instrument), std::move(x_instrument)})};
    spec.reference_value = double(d * d) + d * std::sqrt(double(d));
    check_reference_consistency(spec);
    return spec;
}

WitnessSpec imaginarity_qubit() {
    WitnessSpec spec;
    spec.name = "imaginarity";
    spec.dim = 2;
    spec.canonical_free_set = "real";
    spec.required_shape = {4, 3, 2};
    const auto wc = coherence_terms();
    spec.evaluate_fn = [wc](const CorrelationTable& t) {
        return linear_evaluate(wc, t) + t(0, 2, 3) - std::abs(t(0, 2, 0) - t(1, 2, 0)) -
               std::abs(t(0, 2, 1) - t(1, 2, 1));
    };
    spec.linear_terms = std::nullopt; // the penalty terms are nonlinear
    spec.free_bound = 5.0;
    spec.bound_provenance = BoundProvenance::Analytic;

    std::vector<DensityMatrix> states = {
        DensityMatrix::pure(ket(2, 0)), DensityMatrix::pure(plus_state()),
        DensityMatrix::pure(bar_one()), DensityMatrix::pure(plus_y_state())};
    std::vector<std::vector<Effect>> instruments = {
        {Effect::projector(bar_zero()), Effect::projector(bar_one())},
        {Effect::projector(bar_plus()), Effect::projector(bar_minus())},
        {Effect::projector(plus_y_state()), Effect::projector(minus_y_state())}};
    spec.reference = Realization{PreparationBox(2, std::move(states)),
                                 OperationBox(2, std::move(instruments))};
    spec.reference_value = 4.0 + std::numbers::sqrt2;
    check_reference_consistency(spec);
    return spec;
}

WitnessSpec purity(int d) {
    if (d < 2) throw InvalidInput("purity: d must be >= 2");
    WitnessSpec spec;
    spec.name = "purity";
    spec.dim = d;
    spec.canonical_free_set = "maximally-mixed";
    spec.required_shape = {1, 1, 1};
    spec.linear_terms = std::vector<LinearTerm>{{0, 0, 0, 1.0}};
    spec.evaluate_fn = make_linear_fn(*spec.linear_terms);
    spec.free_bound = 1.0 / d;
    spec.bound_provenance = BoundProvenance::Analytic;
    spec.rank_one_monitored_effects = true;
    spec.min_outcomes_for_violation = 2;

    Effect first = Effect::projector(ket(d, 0));
    Effect second = first.complement();
    spec.reference = Realization{PreparationBox(d, {DensityMatrix::pure(ket(d, 0))}),
                                 OperationBox(d, {{std::move(first), std::move(second)}})};
    spec.reference_value = 1.0;
    check_reference_consistency(spec);
    return spec;
}

WitnessSpec magic_qubit() {
    WitnessSpec spec = coherence_qubit();
    spec.name = "magic";
    spec.canonical_free_set = "stabilizer";
    spec.free_bound = certified_magic_bound();
    spec.bound_provenance = BoundProvenance::CertifiedNumeric;
    spec.paper_bound = 4.32;
    check_reference_consistency(spec);
    return spec;
}

WitnessSpec generic_witness(const CorrelationTable& reference_table, double epsilon) {
    if (epsilon <= 0.0) {
        throw InvalidInput("generic_witness: epsilon must be strictly positive, got " +
                           std::to_string(epsilon));
    }
    WitnessSpec spec;
    spec.name = "generic";
    spec.required_shape = {reference_table.num_y(), reference_table.num_x(), 1};
    const int ny = reference_table.num_y();
    const int nx = reference_table.num_x();
    std::vector<double> ref(static_cast<size_t>(ny) * nx);
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) ref[static_cast<size_t>(y) * nx + x] = reference_table(0, x, y);
    }
    spec.evaluate_fn = [ny, nx, ref = std::move(ref)](const CorrelationTable& t) {
        double sum = 0.0;
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x) {
                sum += std::abs(t(0, x, y) - ref[static_cast<size_t>(y) * nx + x]);
            }
        }
        return -sum;
    };
    spec.linear_terms = std::nullopt;
    spec.free_bound = -epsilon;
    spec.bound_provenance = BoundProvenance::Analytic;
    spec.reference_value = 0.0;
    return spec;
}

WitnessSpec generic_witness(const Realization& reference, double epsilon) {
    WitnessSpec spec = generic_witness(simulate(reference.preparations, reference.operations),
                                       epsilon);
    spec.reference = reference;
    check_reference_consistency(spec);
    return spec;
}

double certified_magic_bound() {
    const std::vector<PureState> vertex_states = {ket(2, 0),        ket(2, 1),
                                                  plus_state(),     minus_state(),
                                                  plus_y_state(),   minus_y_state()};
    std::vector<Eigen::Matrix2cd> vertices;
    for (const auto& v : vertex_states) {
        vertices.push_back(Eigen::Matrix2cd(v.projector().raw()));
    }
    // With states fixed, the optimal two-outcome measurements contribute
    // Tr(rho2) + pos(rho0+rho1-rho2) for x=0 and Tr(rho1) + pos(rho0-rho1) for
    // x=1. That value is convex in the states, so the polytope maximum sits on
    // vertex triples.
    double best = 0.0;
    for (const auto& r0 : vertices) {
        for (const auto& r1 : vertices) {
            const double x1_value = 1.0 + positive_part_2x2(r0 - r1);
            for (const auto& r2 : vertices) {
                const double value = x1_value + 1.0 + positive_part_2x2(r0 + r1 - r2);
                best = std::max(best, value);
            }
        }
    }
    return best;
}

double evaluate_witness(const WitnessSpec& spec, const CorrelationTable& table) {
    const auto& s = spec.required_shape;
    if (table.num_y() < s.num_y || table.num_x() < s.num_x || table.num_j() < s.min_outcomes) {
        std::string msg = "witness '" + spec.name + "': table shape (y=" +
                          std::to_string(table.num_y()) + ", x=" + std::to_string(table.num_x()) +
                          ", j=" + std::to_string(table.num_j()) + ") is missing";
        if (table.num_y() < s.num_y) {
            msg += " preparations y in [" + std::to_string(table.num_y()) + ", " +
                   std::to_string(s.num_y - 1) + "]";
        }
        if (table.num_x() < s.num_x) {
            msg += " instruments x in [" + std::to_string(table.num_x()) + ", " +
                   std::to_string(s.num_x - 1) + "]";
        }
        if (table.num_j() < s.min_outcomes) {
            msg += " outcomes j in [" + std::to_string(table.num_j()) + ", " +
                   std::to_string(s.min_outcomes - 1) + "]";
        }
        throw InvalidInput(msg);
    }
    return spec.evaluate_fn(table);
}

WitnessVerdict evaluate_with_verdict(const WitnessSpec& spec, const CorrelationTable& table) {
    const double value = evaluate_witness(spec, table);
    const bool informative = table.num_j() >= spec.min_outcomes_for_violation;
    return {value, informative && value > spec.free_bound + 1e-9};
}

WitnessSpec witness_by_name(std::string_view name, int d) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower == "coherence") return coherence_qubit();
    if (lower == "coherence-d") return coherence_qudit(d);
    if (lower == "imaginarity") return imaginarity_qubit();
    if (lower == "purity") return purity(d);
    if (lower == "magic") return magic_qubit();
    if (lower == "generic") {
        throw InvalidInput("witness 'generic' needs a reference table; build it via "
                           "generic_witness()");
    }
    throw InvalidInput("unknown witness '" + std::string(name) + "'");
}

std::vector<std::string> witness_names() {
    return {"coherence", "coherence-d", "imaginarity", "purity", "magic", "generic"};
}

} // namespace qres
