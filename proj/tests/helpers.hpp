#pragma once

#include <random>

#include "qres/freesets.hpp"
#include "qres/scenario.hpp"

namespace qres::testing {

inline Eigen::MatrixXcd random_hermitian(int d, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Eigen::MatrixXcd a(d, d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) a(r, c) = Complex(gauss(rng), gauss(rng));
    }
    return 0.5 * (a + a.adjoint());
}

inline PureState random_pure(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (true) {
        Eigen::VectorXcd v(d);
        for (int i = 0; i < d; ++i) v(i) = Complex(gauss(rng), gauss(rng));
        if (v.norm() > 1e-6) return PureState(v / v.norm());
    }
}

// Random complete instrument of `outcomes` arbitrary POVM elements.
inline std::vector<Effect> random_instrument(int d, int outcomes, std::mt19937_64& rng) {
    const auto param = unconstrained_instrument_parametrization(d);
    std::uniform_real_distribution<double> dist(param.box_lo, param.box_hi);
    std::vector<double> p(param.num_params(outcomes));
    for (auto& v : p) v = dist(rng);
    return param.make(outcomes, p);
}

inline std::vector<double> random_params(int n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

inline DensityMatrix random_free_state(const FreeSetSpec& spec, std::mt19937_64& rng) {
    return spec.state_param.make(random_params(spec.state_param.num_params,
                                               spec.state_param.box_lo, spec.state_param.box_hi,
                                               rng));
}

inline std::vector<Effect> random_free_instrument(const FreeSetSpec& spec, int outcomes,
                                                  std::mt19937_64& rng) {
    return spec.effect_param.make(
        outcomes, random_params(spec.effect_param.num_params(outcomes), spec.effect_param.box_lo,
                                spec.effect_param.box_hi, rng));
}

} // namespace qres::testing
