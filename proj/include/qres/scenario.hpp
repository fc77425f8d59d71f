#pragma once

#include <vector>

#include "qres/qmath.hpp"

namespace qres {

// The states rho_y the preparation box can emit, indexed by y.
struct PreparationBox {
    int dim;
    std::vector<DensityMatrix> states;

    PreparationBox(int dim, std::vector<DensityMatrix> states);
    int num_inputs() const { return static_cast<int>(states.size()); }
};

// One instrument per input x; instrument x is the list of POVM elements
// K_{j,x}†K_{j,x} over outcomes j, summing to the identity.
struct OperationBox {
    int dim;
    std::vector<std::vector<Effect>> instruments;

    OperationBox(int dim, std::vector<std::vector<Effect>> instruments,
                 double completeness_tol = 1e-10);
    int num_inputs() const { return static_cast<int>(instruments.size()); }
    int max_outcomes() const;
};

struct Realization {
    PreparationBox preparations;
    OperationBox operations;
};

// p(j|x,y) for all inputs and outcomes. Rows over j sum to one; instruments
// with fewer outcomes than num_j are padded with zero probability.
class CorrelationTable {
public:
    // probs laid out as [(y * num_x + x) * num_j + j].
    CorrelationTable(int num_y, int num_x, int num_j, std::vector<double> probs,
                     double sum_tol = 1e-10, double entry_tol = 1e-12);

    int num_y() const { return num_y_; }
    int num_x() const { return num_x_; }
    int num_j() const { return num_j_; }

    double operator()(int j, int x, int y) const;
    const std::vector<double>& flat() const { return p_; }

    bool approx_equal(const CorrelationTable& other, double tol = 1e-12) const;

private:
    int num_y_, num_x_, num_j_;
    std::vector<double> p_;
};

// Born rule: p(j|x,y) = Tr(K_{j,x}†K_{j,x} rho_y).
CorrelationTable simulate(const PreparationBox& prep, const OperationBox& ops);

// Ingest raw (typically experimental) probabilities. Gate is looser than the
// simulated-table invariant: deviations up to sum_tol are repaired (negative
// dust clamped, outcome rows renormalized); anything worse is rejected.
CorrelationTable table_from_raw(const std::vector<double>& probs, int num_y, int num_x,
                                int num_j, double sum_tol = 1e-6);

} // namespace qres
