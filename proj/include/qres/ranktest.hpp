#pragma once

#include <vector>

#include "qres/freesets.hpp"
#include "qres/scenario.hpp"

namespace qres {

// Matrix of p(outcome|x,y) values. Rows run over y for the state test and
// over x for the operation test.
struct CorrelationMatrix {
    Eigen::MatrixXd entries;

    int rows() const { return static_cast<int>(entries.rows()); }
    int cols() const { return static_cast<int>(entries.cols()); }
};

enum class DetectionMode { States, Operations, Both };
enum class Verdict { ResourceDetected, ConsistentWithFree };

struct RankReport {
    DetectionMode mode; // States or Operations
    int rank = 0;
    int budget = 0;
    std::vector<double> singular_values;
    bool hypothesis_met = true; // budget < d^2
    bool detected = false;      // rank > budget
};

struct DetectionVerdict {
    DetectionMode mode;
    Verdict verdict = Verdict::ConsistentWithFree;
    double tolerance_used = 0.0;
    bool hypothesis_warning = false; // some tested budget >= d^2
    std::vector<RankReport> reports; // one per tested side

    int rank() const { return reports.empty() ? 0 : reports.front().rank; }
    int budget() const { return reports.empty() ? 0 : reports.front().budget; }
};

// Entry (y, x) = p(outcome|x,y).
CorrelationMatrix build_state_test_matrix(const CorrelationTable& table, int outcome = 0);
// Transposed layout, entry (x, y) = p(outcome|x,y).
CorrelationMatrix build_operation_test_matrix(const CorrelationTable& table, int outcome = 0);

// Count of singular values above rel_tol * sigma_max; 0 for the zero matrix.
int numerical_rank(const CorrelationMatrix& m, double rel_tol = 1e-8);

// Rank-versus-budget detection. States mode compares the (y, x) matrix rank
// against free.state_rank_budget, Operations mode the (x, y) matrix against
// free.effect_rank_budget, Both runs both and fires if either does. A budget
// of d^2 or more leaves the test vacuous and sets the hypothesis warning.
DetectionVerdict detect(const CorrelationTable& table, const FreeSetSpec& free_set,
                        DetectionMode mode, double rel_tol = 1e-8, int outcome = 0);

// The explicit realization from the state no-go argument: N+1 linearly
// independent pure states and d^2 two-outcome instruments whose first effects
// are linearly independent rank-1 projectors spanning operator space.
Realization max_rank_realization(int d, int state_count);

} // namespace qres
