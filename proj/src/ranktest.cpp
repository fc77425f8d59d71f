#include "qres/ranktest.hpp"
#include <algorithm>

#include <Eigen/SVD>

namespace qres {

namespace {

CorrelationMatrix build_matrix(const CorrelationTable& table, int outcome, bool rows_are_y) {
    if (outcome < 0 || outcome >= table.num_j()) {
        throw InvalidInput("rank test: outcome index " + std::to_string(outcome) +
                           " out of range (num_j = " + std::to_string(table.num_j()) + ")");
    }
    Eigen::MatrixXd m(rows_are_y ? table.num_y() : table.num_x(),
                      rows_are_y ? table.num_x() : table.num_y());
    for (int y = 0; y < table.num_y(); ++y) {
        for (int x = 0; x < table.num_x(); ++x) {
            // tables admit +-1e-12 of dust; the matrix entries live in [0, 1]
            const double p = std::clamp(table(outcome, x, y), 0.0, 1.0);
            if (rows_are_y) {
                m(y, x) = p;
            } else {
                m(x, y) = p;
            }
        }
    }
    return CorrelationMatrix{std::move(m)};
}

RankReport run_side(const CorrelationTable& table, const FreeSetSpec& free_set,
                    DetectionMode side, double rel_tol, int outcome) {
    RankReport report;
    report.mode = side;
    const bool states = (side == DetectionMode::States);
    const CorrelationMatrix m = states ? build_state_test_matrix(table, outcome)
                                       : build_operation_test_matrix(table, outcome);
    report.budget = states ? free_set.state_rank_budget : free_set.effect_rank_budget;
    report.hypothesis_met = report.budget < free_set.dim * free_set.dim;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.entries);
    report.singular_values.assign(svd.singularValues().data(),
                                  svd.singularValues().data() + svd.singularValues().size());
    report.rank = numerical_rank(m, rel_tol);
    report.detected = report.rank > report.budget;
    return report;
}

} // namespace

CorrelationMatrix build_state_test_matrix(const CorrelationTable& table, int outcome) {
    return build_matrix(table, outcome, /*rows_are_y=*/true);
}

CorrelationMatrix build_operation_test_matrix(const CorrelationTable& table, int outcome) {
    return build_matrix(table, outcome, /*rows_are_y=*/false);
}

int numerical_rank(const CorrelationMatrix& m, double rel_tol) {
    if (m.entries.size() == 0) throw InvalidInput("numerical_rank: empty matrix");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.entries);
    const auto& sv = svd.singularValues();
    const double sigma_max = sv(0);
    if (sigma_max <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > rel_tol * sigma_max) ++rank;
    }
    return rank;
}

DetectionVerdict detect(const CorrelationTable& table, const FreeSetSpec& free_set,
                        DetectionMode mode, double rel_tol, int outcome) {
    DetectionVerdict verdict;
    verdict.mode = mode;
    verdict.tolerance_used = rel_tol;
    if (mode == DetectionMode::States || mode == DetectionMode::Both) {
        verdict.reports.push_back(run_side(table, free_set, DetectionMode::States, rel_tol, outcome));
    }
    if (mode == DetectionMode::Operations || mode == DetectionMode::Both) {
        verdict.reports.push_back(
            run_side(table, free_set, DetectionMode::Operations, rel_tol, outcome));
    }
    bool any_detected = false;
    for (const auto& r : verdict.reports) {
        any_detected = any_detected || r.detected;
        verdict.hypothesis_warning = verdict.hypothesis_warning || !r.hypothesis_met;
    }
    verdict.verdict = any_detected ? Verdict::ResourceDetected : Verdict::ConsistentWithFree;
    return verdict;
}

Realization max_rank_realization(int d, int state_count) {
    if (d < 2) throw InvalidInput("max_rank_realization: d must be >= 2");
    const auto basis = operator_basis_states(d);
    if (state_count < 1 || state_count > static_cast<int>(basis.size())) {
        throw InvalidInput("max_rank_realization: state count " + std::to_string(state_count) +
                           " out of range [1, " + std::to_string(basis.size()) + "]");
    }
    std::vector<DensityMatrix> states;
    states.reserve(state_count);
    for (int y = 0; y < state_count; ++y) states.push_back(DensityMatrix::pure(basis[y]));

    std::vector<std::vector<Effect>> instruments;
    instruments.reserve(basis.size());
    for (const auto& phi : basis) {
        Effect first = Effect::projector(phi);
        Effect second = first.complement();
        instruments.push_back({std::move(first), std::move(second)});
    }
    return Realization{PreparationBox(d, std::move(states)),
                       OperationBox(d, std::move(instruments))};
}

} // namespace qres
