#include "qres/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace qres {

PreparationBox::PreparationBox(int dim, std::vector<DensityMatrix> states_in)
    : dim(dim), states(std::move(states_in)) {
    if (states.empty()) throw InvalidInput("PreparationBox: needs at least one state");
    for (size_t y = 0; y < states.size(); ++y) {
        if (states[y].dim() != dim) {
            throw InvalidInput("PreparationBox: state y=" + std::to_string(y) + " has dimension " +
                               std::to_string(states[y].dim()) + ", expected " +
                               std::to_string(dim));
        }
    }
}

OperationBox::OperationBox(int dim, std::vector<std::vector<Effect>> instruments_in,
                           double completeness_tol)
    : dim(dim), instruments(std::move(instruments_in)) {
    if (instruments.empty()) throw InvalidInput("OperationBox: needs at least one instrument");
    for (size_t x = 0; x < instruments.size(); ++x) {
        const auto& inst = instruments[x];
        if (inst.size() < 2) {
            throw InvalidInput("OperationBox: instrument x=" + std::to_string(x) +
                               " has fewer than 2 outcomes");
        }
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
        for (const auto& e : inst) {
            if (e.dim() != dim) {
                throw InvalidInput("OperationBox: effect dimension mismatch at x=" +
                                   std::to_string(x));
            }
            sum += e.raw();
        }
        const double dev = (sum - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
        if (dev > completeness_tol) {
            throw InvalidInput("OperationBox: instrument x=" + std::to_string(x) +
                               " does not sum to identity (max deviation " + std::to_string(dev) +
                               ")");
        }
    }
}

int OperationBox::max_outcomes() const {
    size_t m = 0;
    for (const auto& inst : instruments) m = std::max(m, inst.size());
    return static_cast<int>(m);
}

CorrelationTable::CorrelationTable(int num_y, int num_x, int num_j, std::vector<double> probs,
                                   double sum_tol, double entry_tol)
    : num_y_(num_y), num_x_(num_x), num_j_(num_j), p_(std::move(probs)) {
    if (num_y_ < 1 || num_x_ < 1 || num_j_ < 1) {
        throw InvalidInput("CorrelationTable: dims must be positive");
    }
    if (p_.size() != static_cast<size_t>(num_y_) * num_x_ * num_j_) {
        throw InvalidInput("CorrelationTable: got " + std::to_string(p_.size()) +
                           " entries, expected " + std::to_string(num_y_ * num_x_ * num_j_));
    }
    for (int y = 0; y < num_y_; ++y) {
        for (int x = 0; x < num_x_; ++x) {
            double sum = 0.0;
            for (int j = 0; j < num_j_; ++j) {
                const double v = (*this)(j, x, y);
                if (v < -entry_tol || v > 1.0 + entry_tol) {
                    throw InvalidInput("CorrelationTable: p(" + std::to_string(j) + "|" +
                                       std::to_string(x) + "," + std::to_string(y) + ") = " +
                                       std::to_string(v) + " outside [0,1]");
                }
                sum += v;
            }
            if (std::abs(sum - 1.0) > sum_tol) {
                throw ContractViolation("CorrelationTable: outcomes at (x=" + std::to_string(x) +
                                        ", y=" + std::to_string(y) + ") sum to " +
                                        std::to_string(sum));
            }
        }
    }
}

double CorrelationTable::operator()(int j, int x, int y) const {
    if (j < 0 || j >= num_j_ || x < 0 || x >= num_x_ || y < 0 || y >= num_y_) {
        throw InvalidInput("CorrelationTable: index (j=" + std::to_string(j) + ", x=" +
                           std::to_string(x) + ", y=" + std::to_string(y) + ") out of range");
    }
    return p_[(static_cast<size_t>(y) * num_x_ + x) * num_j_ + j];
}

bool CorrelationTable::approx_equal(const CorrelationTable& other, double tol) const {
    if (num_y_ != other.num_y_ || num_x_ != other.num_x_ || num_j_ != other.num_j_) return false;
    for (size_t i = 0; i < p_.size(); ++i) {
        if (std::abs(p_[i] - other.p_[i]) > tol) return false;
    }
    return true;
}

CorrelationTable simulate(const PreparationBox& prep, const OperationBox& ops) {
    if (prep.dim != ops.dim) {
        throw InvalidInput("simulate: preparation dimension " + std::to_string(prep.dim) +
                           " does not match operation dimension " + std::to_string(ops.dim));
    }
    const int ny = prep.num_inputs();
    const int nx = ops.num_inputs();
    const int nj = ops.max_outcomes();
    std::vector<double> p(static_cast<size_t>(ny) * nx * nj, 0.0);
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            const auto& inst = ops.instruments[x];
            for (size_t j = 0; j < inst.size(); ++j) {
                const Complex tr = (inst[j].raw() * prep.states[y].raw()).trace();
                if (std::abs(tr.imag()) > 1e-12) {
                    throw ContractViolation("simulate: Tr(E rho) has imaginary residue " +
                                            std::to_string(tr.imag()));
                }
                p[(static_cast<size_t>(y) * nx + x) * nj + j] = tr.real();
            }
        }
    }
    return CorrelationTable(ny, nx, nj, std::move(p));
}

CorrelationTable table_from_raw(const std::vector<double>& probs, int num_y, int num_x,
                                int num_j, double sum_tol) {
    if (num_y < 1 || num_x < 1 || num_j < 1) {
        throw DataValidation("table_from_raw: dims must be positive");
    }
    if (probs.size() != static_cast<size_t>(num_y) * num_x * num_j) {
        throw DataValidation("table_from_raw: got " + std::to_string(probs.size()) +
                             " entries, expected " + std::to_string(num_y * num_x * num_j));
    }
    std::vector<double> p = probs;
    for (int y = 0; y < num_y; ++y) {
        for (int x = 0; x < num_x; ++x) {
            const size_t base = (static_cast<size_t>(y) * num_x + x) * num_j;
            double sum = 0.0;
            for (int j = 0; j < num_j; ++j) {
                double& v = p[base + j];
                if (v < -sum_tol || v > 1.0 + sum_tol) {
                    throw DataValidation("table_from_raw: p(" + std::to_string(j) + "|" +
                                         std::to_string(x) + "," + std::to_string(y) + ") = " +
                                         std::to_string(v) + " outside [0,1] by more than " +
                                         std::to_string(sum_tol));
                }
                // Repair only entries the strict table invariant would reject.
                if (v < -1e-12 || v > 1.0 + 1e-12) v = std::clamp(v, 0.0, 1.0);
                sum += v;
            }
            if (std::abs(sum - 1.0) > sum_tol) {
                throw DataValidation("table_from_raw: outcomes at (x=" + std::to_string(x) +
                                     ", y=" + std::to_string(y) + ") sum to " +
                                     std::to_string(sum) + ", beyond the " +
                                     std::to_string(sum_tol) + " gate");
            }
            // Only touch rows that would fail the strict table invariant.
            if (std::abs(sum - 1.0) > 1e-10) {
                for (int j = 0; j < num_j; ++j) p[base + j] /= sum;
            }
        }
    }
    return CorrelationTable(num_y, num_x, num_j, std::move(p));
}

} // namespace qres
