#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "qres/optimizer.hpp"
#include "qres/ranktest.hpp"

namespace qres {

enum class OutputFormat { Json, Csv, Text };

OutputFormat output_format_from_string(std::string_view s);

// A parsed experiment description: the scenario plus optional analysis
// directives. Complex entries are [re, im] pairs, matrices row-major.
struct ExperimentConfig {
    int dimension = 0;
    PreparationBox preparations;
    OperationBox instruments;
    std::optional<std::string> witness;
    std::optional<std::string> free_set;
    std::optional<DetectionMode> detection_mode;
    std::optional<double> rank_tolerance;
    std::optional<double> epsilon;
    OptimizationConfig optimizer;
    bool optimizer_seed_given = false;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

CorrelationTable table_from_json(const nlohmann::json& j);
CorrelationTable load_table(const std::string& path);
nlohmann::json table_to_json(const CorrelationTable& table);

// Named state constructors accepted in configs: "ket <i>", "plus", "minus",
// "plus_y", "minus_y", "bar0", "bar1", "barplus", "barminus", "fourier <k>",
// "qrac d=<d> y0=<i> y1=<i>", "mixed".
DensityMatrix parse_state(const nlohmann::json& entry, int dim, const std::string& where);

// Instrument entries: a shortcut name ("zbasis", "xbasis", "barbasis",
// "pmbarbasis", "ybasis", "proj2 <state>") or a list of effects, each either
// "proj <state>" or {"matrix": ...}.
std::vector<Effect> parse_instrument(const nlohmann::json& entry, int dim,
                                     const std::string& where);

DetectionMode detection_mode_from_string(std::string_view s);
std::string to_string(DetectionMode mode);
std::string to_string(Verdict verdict);
ConstrainSide constrain_from_string(std::string_view s);
std::string to_string(ConstrainSide side);
InnerSearch inner_search_from_string(std::string_view s);

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j, const std::string& where);

// Fixed-format scalar used in text reports so identical doubles render
// identically.
std::string fnum(double v);

std::string format_table(const CorrelationTable& table, OutputFormat format);

} // namespace qres
