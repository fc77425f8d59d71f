#include "qres/freesets.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace qres {

namespace {

// Squares-normalized weights: total on any input, exact corners at unit
// parameter vectors, uniform fallback near the origin.
std::vector<double> simplex_weights(std::span<const double> params, int n) {
    std::vector<double> w(n, 0.0);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        w[i] = params[i] * params[i];
        sum += w[i];
    }
    if (sum < 1e-30) {
        std::fill(w.begin(), w.end(), 1.0 / n);
    } else {
        for (double& v : w) v /= sum;
    }
    return w;
}

std::vector<Effect> sandwich_normalize(std::vector<Eigen::MatrixXcd> raw) {
    const int d = static_cast<int>(raw.front().rows());
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(d, d);
    for (auto& a : raw) {
        a += 1e-12 * Eigen::MatrixXcd::Identity(d, d); // keep the sum invertible
        s += a;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s);
    const Eigen::MatrixXcd inv_sqrt = es.operatorInverseSqrt();
    std::vector<Effect> out;
    out.reserve(raw.size());
    for (const auto& a : raw) {
        Eigen::MatrixXcd e = inv_sqrt * a * inv_sqrt;
        out.emplace_back(ComplexMatrix(0.5 * (e + e.adjoint())));
    }
    return out;
}

double max_offdiag(const Eigen::MatrixXcd& m) {
    double best = 0.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (r != c) best = std::max(best, std::abs(m(r, c)));
        }
    }
    return best;
}

double max_imag(const Eigen::MatrixXcd& m) {
    double best = 0.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            best = std::max(best, std::abs(m(r, c).imag()));
        }
    }
    return best;
}

void bloch_components(const Eigen::MatrixXcd& rho, double& rx, double& ry, double& rz) {
    rx = 2.0 * rho(0, 1).real();
    ry = -2.0 * rho(0, 1).imag();
    rz = (rho(0, 0) - rho(1, 1)).real();
}

// Instrument of unconstrained POVM elements via C_j C_j† sandwich.
InstrumentParametrization general_instrument_param(int d) {
    InstrumentParametrization p;
    p.num_params = [d](int outcomes) { return 2 * d * d * outcomes; };
    p.make = [d](int outcomes, std::span<const double> params) {
        if (outcomes < 2) throw InvalidInput("instrument parametrization: needs >= 2 outcomes");
        std::vector<Eigen::MatrixXcd> raw;
        raw.reserve(outcomes);
        size_t idx = 0;
        for (int j = 0; j < outcomes; ++j) {
            Eigen::MatrixXcd c(d, d);
            for (int r = 0; r < d; ++r) {
                for (int col = 0; col < d; ++col) {
                    c(r, col) = Complex(params[idx], params[idx + 1]);
                    idx += 2;
                }
            }
            raw.push_back(c * c.adjoint());
        }
        return sandwich_normalize(std::move(raw));
    };
    return p;
}

InstrumentParametrization real_instrument_param(int d) {
    InstrumentParametrization p;
    p.num_params = [d](int outcomes) { return d * d * outcomes; };
    p.make = [d](int outcomes, std::span<const double> params) {
        if (outcomes < 2) throw InvalidInput("instrument parametrization: needs >= 2 outcomes");
        std::vector<Eigen::MatrixXcd> raw;
        raw.reserve(outcomes);
        size_t idx = 0;
        for (int j = 0; j < outcomes; ++j) {
            Eigen::MatrixXd b(d, d);
            for (int r = 0; r < d; ++r) {
                for (int col = 0; col < d; ++col) b(r, col) = params[idx++];
            }
            raw.push_back((b * b.transpose()).cast<Complex>());
        }
        return sandwich_normalize(std::move(raw));
    };
    return p;
}

std::vector<Effect> operator_basis_effects(int d) {
    std::vector<Effect> out;
    for (const auto& psi : operator_basis_states(d)) out.push_back(Effect::projector(psi));
    return out;
}

std::vector<DensityMatrix> stabilizer_vertices() {
    return {DensityMatrix::pure(ket(2, 0)),        DensityMatrix::pure(ket(2, 1)),
            DensityMatrix::pure(plus_state()),     DensityMatrix::pure(minus_state()),
            DensityMatrix::pure(plus_y_state()),   DensityMatrix::pure(minus_y_state())};
}

DensityMatrix best_vertex(const std::vector<DensityMatrix>& vertices, const ComplexMatrix& h) {
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < vertices.size(); ++i) {
        const double v = (vertices[i].raw() * h.raw()).trace().real();
        if (v > best_val + 1e-15) {
            best_val = v;
            best = static_cast<int>(i);
        }
    }
    return vertices[best];
}

} // namespace

InstrumentParametrization unconstrained_instrument_parametrization(int d) {
    return general_instrument_param(d);
}

InstrumentParametrization rank_one_instrument_parametrization(int d) {
    InstrumentParametrization p;
    p.num_params = [d](int outcomes) { return 2 * d * outcomes; };
    p.make = [d](int outcomes, std::span<const double> params) {
        if (outcomes < std::max(2, d)) {
            throw InvalidInput("rank-one instrument parametrization: needs >= max(2, d) outcomes");
        }
        std::vector<Eigen::MatrixXcd> raw;
        raw.reserve(outcomes);
        size_t idx = 0;
        for (int j = 0; j < outcomes; ++j) {
            Eigen::VectorXcd a(d);
            for (int r = 0; r < d; ++r) {
                a(r) = Complex(params[idx], params[idx + 1]);
                idx += 2;
            }
            raw.push_back(a * a.adjoint());
        }
        return sandwich_normalize(std::move(raw));
    };
    return p;
}

FreeSetSpec incoherent(int d) {
    if (d < 2) throw InvalidInput("incoherent: d must be >= 2");
    FreeSetSpec spec;
    spec.name = "incoherent";
    spec.dim = d;
    for (int i = 0; i < d; ++i) {
        spec.state_basis.push_back(DensityMatrix::pure(ket(d, i)));
        spec.effect_basis.push_back(Effect::projector(ket(d, i)));
    }
    spec.state_rank_budget = d;
    spec.effect_rank_budget = d;
    spec.extremal_states = spec.state_basis;

    spec.state_param.num_params = d;
    spec.state_param.make = [d](std::span<const double> params) {
        const auto w = simplex_weights(params, d);
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
        for (int i = 0; i < d; ++i) m(i, i) = w[i];
        return DensityMatrix(ComplexMatrix(std::move(m)));
    };

    spec.effect_param.num_params = [d](int outcomes) { return d * outcomes; };
    spec.effect_param.make = [d](int outcomes, std::span<const double> params) {
        if (outcomes < 2) throw InvalidInput("instrument parametrization: needs >= 2 outcomes");
        // Column i of the weight matrix is a distribution over outcomes.
        std::vector<Eigen::MatrixXcd> mats(outcomes, Eigen::MatrixXcd::Zero(d, d));
        for (int i = 0; i < d; ++i) {
            std::vector<double> col(outcomes);
            for (int j = 0; j < outcomes; ++j) col[j] = params[j * d + i];
            const auto w = simplex_weights(col, outcomes);
            for (int j = 0; j < outcomes; ++j) mats[j](i, i) = w[j];
        }
        std::vector<Effect> out;
        out.reserve(outcomes);
        for (auto& m : mats) out.emplace_back(ComplexMatrix(std::move(m)));
        return out;
    };

    spec.state_distance = [](const DensityMatrix& rho) { return max_offdiag(rho.raw()); };
    spec.effect_distance = [](const Effect& e) { return max_offdiag(e.raw()); };

    spec.best_free_state = [d](const ComplexMatrix& h) {
        int best = 0;
        for (int i = 1; i < d; ++i) {
            if (h(i, i).real() > h(best, best).real() + 1e-15) best = i;
        }
        return DensityMatrix::pure(ket(d, best));
    };
    spec.best_free_instrument =
        [d](const std::vector<ComplexMatrix>& g) -> std::optional<std::vector<Effect>> {
        const int outcomes = static_cast<int>(g.size());
        std::vector<Eigen::MatrixXcd> mats(outcomes, Eigen::MatrixXcd::Zero(d, d));
        for (int i = 0; i < d; ++i) {
            int best = 0;
            for (int j = 1; j < outcomes; ++j) {
                if (g[j](i, i).real() > g[best](i, i).real() + 1e-15) best = j;
            }
            mats[best](i, i) = 1.0;
        }
        std::vector<Effect> out;
        out.reserve(outcomes);
        for (auto& m : mats) out.emplace_back(ComplexMatrix(std::move(m)));
        return out;
    };
    return spec;
}

FreeSetSpec real_states(int d) {
    if (d != 2) throw InvalidInput("real_states: only d = 2 is supported");
    FreeSetSpec spec;
    spec.name = "real";
    spec.dim = 2;
    spec.state_basis = {DensityMatrix::pure(ket(2, 0)), DensityMatrix::pure(ket(2, 1)),
                        DensityMatrix::pure(plus_state())};
    spec.effect_basis = {Effect::projector(ket(2, 0)), Effect::projector(ket(2, 1)),
                         Effect::projector(plus_state())};
    spec.state_rank_budget = 3;
    spec.effect_rank_budget = 3;

    spec.state_param.num_params = 2;
    spec.state_param.make = [](std::span<const double> params) {
        double rx = params[0], rz = params[1];
        const double n = std::sqrt(rx * rx + rz * rz);
        if (n > 1.0) {
            rx /= n;
            rz /= n;
        }
        return DensityMatrix::from_bloch(rx, 0.0, rz);
    };
    spec.effect_param = real_instrument_param(2);

    spec.state_distance = [](const DensityMatrix& rho) { return max_imag(rho.raw()); };
    spec.effect_distance = [](const Effect& e) { return max_imag(e.raw()); };

    spec.best_free_state = [](const ComplexMatrix& h) {
        const double hx = 2.0 * h(0, 1).real();
        const double hz = (h(0, 0) - h(1, 1)).real();
        const double n = std::hypot(hx, hz);
        if (n < 1e-15) return DensityMatrix::maximally_mixed(2);
        return DensityMatrix::from_bloch(hx / n, 0.0, hz / n);
    };
    spec.best_free_instrument =
        [](const std::vector<ComplexMatrix>& g) -> std::optional<std::vector<Effect>> {
        if (g.size() != 2) return std::nullopt;
        // Real part of the Hermitian gap is the real-symmetric projection.
        const Eigen::MatrixXd gap = (g[0].raw() - g[1].raw()).real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (gap + gap.transpose()));
        Eigen::MatrixXd e0 = Eigen::MatrixXd::Zero(2, 2);
        for (int i = 0; i < 2; ++i) {
            if (es.eigenvalues()(i) >= 0.0) { // ties go to outcome 0
                e0 += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
            }
        }
        const Eigen::MatrixXd e1 = Eigen::MatrixXd::Identity(2, 2) - e0;
        return std::vector<Effect>{Effect(ComplexMatrix(e0.cast<Complex>())),
                                   Effect(ComplexMatrix(e1.cast<Complex>()))};
    };
    return spec;
}

FreeSetSpec stabilizer_qubit() {
    FreeSetSpec spec;
    spec.name = "stabilizer";
    spec.dim = 2;
    spec.state_basis = {DensityMatrix::pure(ket(2, 0)), DensityMatrix::pure(ket(2, 1)),
                        DensityMatrix::pure(plus_state()), DensityMatrix::pure(plus_y_state())};
    spec.effect_basis = operator_basis_effects(2);
    spec.state_rank_budget = 4; // equals d^2: the rank test cannot fire
    spec.effect_rank_budget = 4;
    spec.extremal_states = stabilizer_vertices();
    spec.effects_unconstrained = true;

    spec.state_param.num_params = 6;
    spec.state_param.make = [](std::span<const double> params) {
        const auto vertices = stabilizer_vertices();
        const auto w = simplex_weights(params, 6);
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
        for (int i = 0; i < 6; ++i) m += w[i] * vertices[i].raw();
        return DensityMatrix(ComplexMatrix(std::move(m)));
    };
    spec.effect_param = general_instrument_param(2);

    spec.state_distance = [](const DensityMatrix& rho) {
        double rx, ry, rz;
        bloch_components(rho.raw(), rx, ry, rz);
        // Octahedron facets: |rx| + |ry| + |rz| <= 1.
        return std::max(0.0, std::abs(rx) + std::abs(ry) + std::abs(rz) - 1.0);
    };
    spec.effect_distance = [](const Effect&) { return 0.0; };

    spec.best_free_state = [](const ComplexMatrix& h) {
        return best_vertex(stabilizer_vertices(), h);
    };
    spec.best_free_instrument =
        [](const std::vector<ComplexMatrix>&) -> std::optional<std::vector<Effect>> {
        return std::nullopt; // unconstrained; the optimizer supplies the step
    };
    return spec;
}

FreeSetSpec maximally_mixed(int d) {
    if (d < 2) throw InvalidInput("maximally_mixed: d must be >= 2");
    FreeSetSpec spec;
    spec.name = "maximally-mixed";
    spec.dim = d;
    spec.state_basis = {DensityMatrix::maximally_mixed(d)};
    spec.effect_basis = operator_basis_effects(d);
    spec.state_rank_budget = 1;
    spec.effect_rank_budget = d * d;
    spec.extremal_states = spec.state_basis;
    spec.effects_unconstrained = true;

    spec.state_param.num_params = 0;
    spec.state_param.make = [d](std::span<const double>) {
        return DensityMatrix::maximally_mixed(d);
    };
    spec.effect_param = general_instrument_param(d);

    spec.state_distance = [d](const DensityMatrix& rho) {
        return (rho.raw() - Eigen::MatrixXcd::Identity(d, d) / double(d)).cwiseAbs().maxCoeff();
    };
    spec.effect_distance = [](const Effect&) { return 0.0; };

    spec.best_free_state = [d](const ComplexMatrix&) { return DensityMatrix::maximally_mixed(d); };
    spec.best_free_instrument =
        [](const std::vector<ComplexMatrix>&) -> std::optional<std::vector<Effect>> {
        return std::nullopt;
    };
    return spec;
}

MembershipReport membership(const FreeSetSpec& spec, const DensityMatrix& state) {
    if (state.dim() != spec.dim) {
        throw InvalidInput("membership: state dimension " + std::to_string(state.dim()) +
                           " does not match free set dimension " + std::to_string(spec.dim));
    }
    const double dist = spec.state_distance(state);
    return {dist <= 1e-9, dist};
}

MembershipReport membership(const FreeSetSpec& spec, const Effect& effect) {
    if (effect.dim() != spec.dim) {
        throw InvalidInput("membership: effect dimension " + std::to_string(effect.dim()) +
                           " does not match free set dimension " + std::to_string(spec.dim));
    }
    const double dist = spec.effect_distance(effect);
    return {dist <= 1e-9, dist};
}

FreeSetSpec free_set_by_name(std::string_view name, int d) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower == "incoherent") return incoherent(d);
    if (lower == "real") return real_states(d);
    if (lower == "stabilizer") {
        if (d != 2) throw InvalidInput("free set 'stabilizer' is qubit-only (d = 2)");
        return stabilizer_qubit();
    }
    if (lower == "maximally-mixed") return maximally_mixed(d);
    if (lower == "asymmetry-d2" || lower == "athermality-d2") {
        if (d != 2) {
            throw InvalidInput("free set '" + lower + "' aliases incoherent at d = 2 only");
        }
        FreeSetSpec spec = incoherent(2);
        spec.name = lower;
        return spec;
    }
    throw InvalidInput("unknown free set '" + std::string(name) + "'");
}

std::vector<std::string> free_set_names() {
    return {"incoherent", "real", "stabilizer", "maximally-mixed", "asymmetry-d2",
            "athermality-d2"};
}

} // namespace qres
