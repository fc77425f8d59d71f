#include "qres/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace qres {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent of the total restart count, so growing `restarts` only appends
// new trajectories.
std::uint64_t restart_seed(std::uint64_t master, int restart) {
    return splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(restart) + 1));
}

DensityMatrix random_pure_state(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (true) {
        Eigen::VectorXcd v(d);
        for (int i = 0; i < d; ++i) v(i) = Complex(gauss(rng), gauss(rng));
        const double n = v.norm();
        if (n > 1e-6) return DensityMatrix::pure(PureState(v / n));
    }
}

std::vector<double> random_box(int n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(n);
    for (double& v : out) v = dist(rng);
    return out;
}

std::vector<Eigen::MatrixXcd> coefficient_operators(const WitnessSpec& w, int x, int outcomes,
                                                    int d,
                                                    const std::vector<DensityMatrix>& states) {
    std::vector<Eigen::MatrixXcd> g(outcomes, Eigen::MatrixXcd::Zero(d, d));
    for (const auto& t : *w.linear_terms) {
        if (t.x == x) g[t.j] += t.coeff * states[t.y].raw();
    }
    return g;
}

Eigen::MatrixXcd state_operator(const WitnessSpec& w, int y, int d,
                                const std::vector<std::vector<Effect>>& instruments) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& t : *w.linear_terms) {
        if (t.y == y) h += t.coeff * instruments[t.x][t.j].raw();
    }
    return h;
}

// Projector onto the eigenspace with eigenvalue >= 0; zero modes count toward
// outcome 0 (ties break toward the lower outcome index).
Eigen::MatrixXcd nonneg_eigenspace_projector(const Eigen::MatrixXcd& m) {
    const int d = static_cast<int>(m.rows());
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& [lambda, vec] : spectral_decomposition(ComplexMatrix(m))) {
        if (lambda >= 0.0) p += vec.projector().raw();
    }
    return p;
}

bool effects_constrained(const FreeSetSpec& free_set, ConstrainSide constrain) {
    return constrain != ConstrainSide::StatesOnly && !free_set.effects_unconstrained;
}

bool states_constrained(ConstrainSide constrain) {
    return constrain != ConstrainSide::OperationsOnly;
}

std::vector<std::vector<Effect>> effects_step(const WitnessSpec& w, const FreeSetSpec& free_set,
                                              ConstrainSide constrain,
                                              const std::vector<DensityMatrix>& states,
                                              int outcomes) {
    const int d = free_set.dim;
    std::vector<std::vector<Effect>> instruments;
    instruments.reserve(w.required_shape.num_x);
    for (int x = 0; x < w.required_shape.num_x; ++x) {
        auto g = coefficient_operators(w, x, outcomes, d, states);
        if (effects_constrained(free_set, constrain)) {
            std::vector<ComplexMatrix> gm;
            gm.reserve(g.size());
            for (auto& m : g) gm.emplace_back(0.5 * (m + m.adjoint()));
            auto step = free_set.best_free_instrument(gm);
            if (!step) {
                throw InvalidInput("see-saw: free set '" + free_set.name +
                                   "' has no exact instrument step for " +
                                   std::to_string(outcomes) + " outcomes");
            }
            instruments.push_back(std::move(*step));
        } else if (w.rank_one_monitored_effects) {
            // Monitored outcome gets the best rank-1 sub-projector; the
            // completion is unconstrained.
            const auto pairs = spectral_decomposition(ComplexMatrix(0.5 * (g[0] + g[0].adjoint())));
            Effect first = Effect::projector(pairs.front().second);
            Effect second = first.complement();
            std::vector<Effect> inst = {std::move(first), std::move(second)};
            for (int j = 2; j < outcomes; ++j) inst.emplace_back(ComplexMatrix::zero(d));
            instruments.push_back(std::move(inst));
        } else {
            if (outcomes != 2) {
                throw InvalidInput("see-saw: unconstrained instrument step supports exactly 2 "
                                   "outcomes, got " + std::to_string(outcomes));
            }
            const Eigen::MatrixXcd gap = g[0] - g[1];
            Effect first(ComplexMatrix(nonneg_eigenspace_projector(0.5 * (gap + gap.adjoint()))));
            Effect second = first.complement();
            instruments.push_back({std::move(first), std::move(second)});
        }
    }
    return instruments;
}

std::vector<DensityMatrix> states_step(const WitnessSpec& w, const FreeSetSpec& free_set,
                                       ConstrainSide constrain,
                                       const std::vector<std::vector<Effect>>& instruments) {
    const int d = free_set.dim;
    std::vector<DensityMatrix> states;
    states.reserve(w.required_shape.num_y);
    for (int y = 0; y < w.required_shape.num_y; ++y) {
        const Eigen::MatrixXcd h = state_operator(w, y, d, instruments);
        const ComplexMatrix hm(0.5 * (h + h.adjoint()));
        if (states_constrained(constrain)) {
            states.push_back(free_set.best_free_state(hm));
        } else {
            states.push_back(DensityMatrix::pure(spectral_decomposition(hm).front().second));
        }
    }
    return states;
}

struct RestartResult {
    double value = -std::numeric_limits<double>::infinity();
    std::vector<DensityMatrix> states;
    std::vector<std::vector<Effect>> instruments;
    bool converged = false;
};

RestartResult run_seesaw(const WitnessSpec& w, const FreeSetSpec& free_set,
                         ConstrainSide constrain, int outcomes, const OptimizationConfig& cfg,
                         std::mt19937_64& rng) {
    const int d = free_set.dim;
    std::vector<DensityMatrix> states;
    states.reserve(w.required_shape.num_y);
    for (int y = 0; y < w.required_shape.num_y; ++y) {
        if (states_constrained(constrain)) {
            const auto params = random_box(free_set.state_param.num_params,
                                           free_set.state_param.box_lo,
                                           free_set.state_param.box_hi, rng);
            states.push_back(free_set.state_param.make(params));
        } else {
            states.push_back(random_pure_state(d, rng));
        }
    }

    RestartResult result;
    std::vector<std::vector<Effect>> instruments;
    double prev = -std::numeric_limits<double>::infinity();
    for (int round = 0; round < cfg.max_seesaw_rounds; ++round) {
        instruments = effects_step(w, free_set, constrain, states, outcomes);
        states = states_step(w, free_set, constrain, instruments);
        const CorrelationTable table =
            simulate(PreparationBox(d, states), OperationBox(d, instruments));
        const double value = evaluate_witness(w, table);
        if (value < prev - 1e-9) {
            throw ContractViolation("see-saw: witness value decreased from " +
                                    std::to_string(prev) + " to " + std::to_string(value));
        }
        const bool settled = std::abs(value - prev) < cfg.convergence_tol;
        prev = value;
        if (settled) {
            result.converged = true;
            break;
        }
    }
    result.value = prev;
    result.states = std::move(states);
    result.instruments = std::move(instruments);
    return result;
}

// Unconstrained mixed state C C† / Tr(C C†).
DensityMatrix mixed_state_from_params(int d, std::span<const double> params) {
    Eigen::MatrixXcd c(d, d);
    size_t idx = 0;
    for (int r = 0; r < d; ++r) {
        for (int col = 0; col < d; ++col) {
            c(r, col) = Complex(params[idx], params[idx + 1]);
            idx += 2;
        }
    }
    Eigen::MatrixXcd rho = c * c.adjoint() + 1e-12 * Eigen::MatrixXcd::Identity(d, d);
    rho /= rho.trace().real();
    return DensityMatrix(ComplexMatrix(0.5 * (rho + rho.adjoint())));
}

struct JointParametrization {
    int total = 0;
    int outcomes = 2;
    double lo = -1.0, hi = 1.0;
    std::function<Realization(std::span<const double>)> build;
};

JointParametrization make_joint(const WitnessSpec& w, const FreeSetSpec& free_set,
                                ConstrainSide constrain, int outcomes) {
    const int d = free_set.dim;
    const int ny = w.required_shape.num_y;
    const int nx = w.required_shape.num_x;
    const bool sc = states_constrained(constrain);
    const bool ec = effects_constrained(free_set, constrain);

    InstrumentParametrization effect_param;
    if (ec) {
        effect_param = free_set.effect_param;
    } else if (w.rank_one_monitored_effects) {
        effect_param = rank_one_instrument_parametrization(d);
        outcomes = std::max(outcomes, d);
    } else {
        effect_param = unconstrained_instrument_parametrization(d);
    }

    const int state_params = sc ? free_set.state_param.num_params : 2 * d * d;
    const int effect_params = effect_param.num_params(outcomes);

    JointParametrization jp;
    jp.total = ny * state_params + nx * effect_params;
    jp.outcomes = outcomes;
    jp.build = [=, sp = free_set.state_param](std::span<const double> params) {
        std::vector<DensityMatrix> states;
        states.reserve(ny);
        for (int y = 0; y < ny; ++y) {
            const auto sub = params.subspan(static_cast<size_t>(y) * state_params, state_params);
            states.push_back(sc ? sp.make(sub) : mixed_state_from_params(d, sub));
        }
        std::vector<std::vector<Effect>> instruments;
        instruments.reserve(nx);
        const size_t base = static_cast<size_t>(ny) * state_params;
        for (int x = 0; x < nx; ++x) {
            const auto sub = params.subspan(base + static_cast<size_t>(x) * effect_params,
                                            effect_params);
            instruments.push_back(effect_param.make(outcomes, sub));
        }
        return Realization{PreparationBox(d, std::move(states)),
                           OperationBox(d, std::move(instruments))};
    };
    return jp;
}

RestartResult run_nelder_mead(const WitnessSpec& w, const FreeSetSpec& free_set,
                              ConstrainSide constrain, int outcomes,
                              const OptimizationConfig& cfg, std::mt19937_64& rng) {
    const JointParametrization jp = make_joint(w, free_set, constrain, outcomes);
    RestartResult result;
    if (jp.total == 0) {
        const Realization r = jp.build({});
        result.value = evaluate_witness(w, simulate(r.preparations, r.operations));
        result.states = r.preparations.states;
        result.instruments = r.operations.instruments;
        result.converged = true;
        return result;
    }
    const auto objective = [&](std::span<const double> p) -> double {
        try {
            const Realization r = jp.build(p);
            return -evaluate_witness(w, simulate(r.preparations, r.operations));
        } catch (const std::exception&) {
            return 1e100; // degenerate parametrization corner
        }
    };
    const auto start = random_box(jp.total, jp.lo, jp.hi, rng);
    const int max_iters = std::max(1000, cfg.max_seesaw_rounds * 8);
    NelderMeadResult nm =
        nelder_mead(objective, start, 0.25 * (jp.hi - jp.lo), max_iters, cfg.convergence_tol);
    // Polish from the incumbent with a tight simplex; NM stalls on wide ones.
    NelderMeadResult polished = nelder_mead(objective, nm.best_params, 0.02 * (jp.hi - jp.lo),
                                            max_iters, cfg.convergence_tol);
    if (polished.best_value < nm.best_value) nm = std::move(polished);
    else nm.converged = nm.converged || polished.converged;
    const Realization best = jp.build(nm.best_params);
    result.value = evaluate_witness(w, simulate(best.preparations, best.operations));
    result.states = best.preparations.states;
    result.instruments = best.operations.instruments;
    result.converged = nm.converged;
    return result;
}

void validate_config(const OptimizationConfig& cfg) {
    if (cfg.restarts < 1) throw InvalidInput("optimizer: restarts must be >= 1");
    if (cfg.max_seesaw_rounds < 1) throw InvalidInput("optimizer: max_seesaw_rounds must be >= 1");
    if (cfg.convergence_tol <= 0.0) throw InvalidInput("optimizer: convergence_tol must be > 0");
}

} // namespace

CertifiedBound certify_bound(const WitnessSpec& witness, const FreeSetSpec& free_set,
                             ConstrainSide constrain, const OptimizationConfig& cfg) {
    validate_config(cfg);
    if (witness.dim != 0 && witness.dim != free_set.dim) {
        throw InvalidInput("certify_bound: witness '" + witness.name + "' expects dimension " +
                           std::to_string(witness.dim) + " but free set '" + free_set.name +
                           "' has dimension " + std::to_string(free_set.dim));
    }
    const int outcomes = std::max(2, witness.required_shape.min_outcomes);
    const bool linear = witness.linear_terms.has_value();

    bool use_seesaw = false;
    switch (cfg.inner_search) {
    case InnerSearch::SeeSaw:
        if (!linear) {
            throw InvalidInput("certify_bound: SEESAW needs a linear witness; '" + witness.name +
                               "' is nonlinear, use NELDER_MEAD or HYBRID");
        }
        use_seesaw = true;
        break;
    case InnerSearch::NelderMead:
        use_seesaw = false;
        break;
    case InnerSearch::Hybrid:
        use_seesaw = linear;
        break;
    }
    if (use_seesaw && effects_constrained(free_set, constrain)) {
        // Probe whether the free set has an exact instrument step at this
        // outcome count; otherwise fall back to derivative-free search.
        const std::vector<ComplexMatrix> zeros(outcomes, ComplexMatrix::zero(free_set.dim));
        if (!free_set.best_free_instrument(zeros)) {
            if (cfg.inner_search == InnerSearch::SeeSaw) {
                throw InvalidInput("certify_bound: free set '" + free_set.name +
                                   "' has no exact instrument step for " +
                                   std::to_string(outcomes) + " outcomes");
            }
            use_seesaw = false;
        }
    }

    RestartResult best;
    int agreeing = 0, converged = 0;
    std::vector<double> values;
    values.reserve(cfg.restarts);
    for (int r = 0; r < cfg.restarts; ++r) {
        std::mt19937_64 rng(restart_seed(cfg.seed, r));
        RestartResult rr = use_seesaw
                               ? run_seesaw(witness, free_set, constrain, outcomes, cfg, rng)
                               : run_nelder_mead(witness, free_set, constrain, outcomes, cfg, rng);
        if (rr.converged) ++converged;
        values.push_back(rr.value);
        if (rr.value > best.value) best = std::move(rr);
    }
    for (const double v : values) {
        if (v >= best.value - 1e-6) ++agreeing;
    }

    const int d = free_set.dim;
    PreparationBox argmax_states(d, best.states);
    OperationBox argmax_effects(d, best.instruments);

    const double check =
        evaluate_witness(witness, simulate(argmax_states, argmax_effects));
    if (std::abs(check - best.value) > 1e-9) {
        throw ContractViolation("certify_bound: argmax re-evaluation gives " +
                                std::to_string(check) + ", best value was " +
                                std::to_string(best.value));
    }
    if (states_constrained(constrain)) {
        for (const auto& s : argmax_states.states) {
            if (!membership(free_set, s).is_member) {
                throw ContractViolation("certify_bound: argmax state left the free set '" +
                                        free_set.name + "'");
            }
        }
    }
    if (constrain != ConstrainSide::StatesOnly) {
        for (const auto& inst : argmax_effects.instruments) {
            for (const auto& e : inst) {
                if (!membership(free_set, e).is_member) {
                    throw ContractViolation("certify_bound: argmax effect left the free set '" +
                                            free_set.name + "'");
                }
            }
        }
    }

    return CertifiedBound{best.value,
                          std::move(argmax_states),
                          std::move(argmax_effects),
                          agreeing,
                          converged,
                          cfg.restarts - converged,
                          cfg,
                          witness.name,
                          free_set.name};
}

CertifiedBound certify_qudit_coherence(int d, const OptimizationConfig& cfg) {
    validate_config(cfg);
    if (d < 2 || d > 5) {
        throw InvalidInput("certify_qudit_coherence: supported for 2 <= d <= 5, got " +
                           std::to_string(d));
    }
    const WitnessSpec witness = coherence_qudit(d);

    std::vector<int> pi(d), tau(d);
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<int> best_pi, best_tau;
    std::vector<double> values;

    std::iota(pi.begin(), pi.end(), 0);
    do {
        std::iota(tau.begin(), tau.end(), 0);
        do {
            // States are free, so each (y0, y1) contributes
            // ||A_{y0} + B_{y1}|| = max_i (A + B)_{ii} for diagonal projectors.
            double value = 0.0;
            for (int y0 = 0; y0 < d; ++y0) {
                for (int y1 = 0; y1 < d; ++y1) {
                    value += (pi[y0] == tau[y1]) ? 2.0 : 1.0;
                }
            }
            values.push_back(value);
            if (value > best_value + 1e-12) {
                best_value = value;
                best_pi = pi;
                best_tau = tau;
            }
        } while (std::next_permutation(tau.begin(), tau.end()));
    } while (std::next_permutation(pi.begin(), pi.end()));

    int agreeing = 0;
    for (const double v : values) {
        if (v >= best_value - 1e-6) ++agreeing;
    }

    // Realize the best assignment: states sit on the dominant eigenvector of
    // A_{y0} + B_{y1}, which is |pi(y0)> (doubly occupied when the labels meet).
    std::vector<DensityMatrix> states;
    states.reserve(d * d);
    for (int y0 = 0; y0 < d; ++y0) {
        for (int y1 = 0; y1 < d; ++y1) {
            (void)y1;
            states.push_back(DensityMatrix::pure(ket(d, best_pi[y0])));
        }
    }
    std::vector<Effect> a_inst, b_inst;
    for (int j = 0; j < d; ++j) {
        a_inst.push_back(Effect::projector(ket(d, best_pi[j])));
        b_inst.push_back(Effect::projector(ket(d, best_tau[j])));
    }
    PreparationBox argmax_states(d, std::move(states));
    OperationBox argmax_effects(d, {std::move(a_inst), std::move(b_inst)});

    const double check = evaluate_witness(witness, simulate(argmax_states, argmax_effects));
    if (std::abs(check - best_value) > 1e-9) {
        throw ContractViolation("certify_qudit_coherence: assignment value " +
                                std::to_string(best_value) + " but realization gives " +
                                std::to_string(check));
    }

    const int enumerated = static_cast<int>(values.size());
    return CertifiedBound{best_value,
                          std::move(argmax_states),
                          std::move(argmax_effects),
                          agreeing,
                          enumerated,
                          0,
                          cfg,
                          witness.name,
                          "incoherent"};
}

double estimate_gap(const CorrelationTable& p_ref, const FreeSetSpec& free_set,
                    const OptimizationConfig& cfg) {
    WitnessSpec witness = generic_witness(p_ref, 1.0); // epsilon is irrelevant here
    witness.dim = free_set.dim;
    OptimizationConfig nm_cfg = cfg;
    nm_cfg.inner_search = InnerSearch::NelderMead;
    return certify_bound(witness, free_set, ConstrainSide::Both, nm_cfg).value;
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::span<const double> start, double step, int max_iters,
                             double ftol) {
    const int n = static_cast<int>(start.size());
    NelderMeadResult result;
    if (n == 0) {
        result.best_value = objective({});
        result.converged = true;
        return result;
    }

    std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(start.begin(), start.end()));
    for (int i = 0; i < n; ++i) simplex[i + 1][i] += step;
    std::vector<double> f(n + 1);
    for (int i = 0; i <= n; ++i) f[i] = objective(simplex[i]);

    std::vector<int> order(n + 1);
    int iter = 0;
    for (; iter < max_iters; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return f[a] != f[b] ? f[a] < f[b] : a < b;
        });
        const int best = order[0], second_worst = order[n - 1], worst = order[n];
        if (std::abs(f[worst] - f[best]) <= ftol) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (int i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (int k = 0; k < n; ++k) centroid[k] += simplex[i][k];
        }
        for (double& c : centroid) c /= n;

        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (int k = 0; k < n; ++k) p[k] = centroid[k] + t * (centroid[k] - simplex[worst][k]);
            return p;
        };

        const auto reflected = blend(1.0);
        const double fr = objective(reflected);
        if (fr < f[best]) {
            const auto expanded = blend(2.0);
            const double fe = objective(expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                f[worst] = fe;
            } else {
                simplex[worst] = reflected;
                f[worst] = fr;
            }
            continue;
        }
        if (fr < f[second_worst]) {
            simplex[worst] = reflected;
            f[worst] = fr;
            continue;
        }
        const bool outside = fr < f[worst];
        const auto contracted = blend(outside ? 0.5 : -0.5);
        const double fc = objective(contracted);
        if ((outside && fc <= fr) || (!outside && fc < f[worst])) {
            simplex[worst] = contracted;
            f[worst] = fc;
            continue;
        }
        for (int i = 0; i <= n; ++i) { // shrink toward the best vertex
            if (i == best) continue;
            for (int k = 0; k < n; ++k) {
                simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
            }
            f[i] = objective(simplex[i]);
        }
    }

    int best = 0;
    for (int i = 1; i <= n; ++i) {
        if (f[i] < f[best]) best = i;
    }
    result.best_params = simplex[best];
    result.best_value = f[best];
    result.iterations = iter;
    return result;
}

} // namespace qres
