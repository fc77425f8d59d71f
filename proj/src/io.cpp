#include "qres/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qres {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

int parse_int(const std::string& s, const std::string& where) {
    try {
        size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataValidation(where + ": expected an integer, got '" + s + "'");
    }
}

// key=value token, e.g. "y0=2".
int parse_kv(const std::string& token, const std::string& key, const std::string& where) {
    const std::string prefix = key + "=";
    if (token.rfind(prefix, 0) != 0) {
        throw DataValidation(where + ": expected '" + key + "=<int>', got '" + token + "'");
    }
    return parse_int(token.substr(prefix.size()), where);
}

void require_qubit(int dim, const std::string& name, const std::string& where) {
    if (dim != 2) {
        throw DataValidation(where + ": state '" + name + "' is qubit-only, dimension is " +
                             std::to_string(dim));
    }
}

PureState parse_pure(const std::string& name, int dim, const std::string& where) {
    const auto tok = tokens(name);
    if (tok.empty()) throw DataValidation(where + ": empty state name");
    const std::string kind = lower(tok[0]);
    if (kind == "ket") {
        if (tok.size() != 2) throw DataValidation(where + ": usage 'ket <i>'");
        return ket(dim, parse_int(tok[1], where));
    }
    if (kind == "plus") { require_qubit(dim, kind, where); return plus_state(); }
    if (kind == "minus") { require_qubit(dim, kind, where); return minus_state(); }
    if (kind == "plus_y") { require_qubit(dim, kind, where); return plus_y_state(); }
    if (kind == "minus_y") { require_qubit(dim, kind, where); return minus_y_state(); }
    if (kind == "bar0") { require_qubit(dim, kind, where); return bar_zero(); }
    if (kind == "bar1") { require_qubit(dim, kind, where); return bar_one(); }
    if (kind == "barplus") { require_qubit(dim, kind, where); return bar_plus(); }
    if (kind == "barminus") { require_qubit(dim, kind, where); return bar_minus(); }
    if (kind == "fourier") {
        if (tok.size() != 2) throw DataValidation(where + ": usage 'fourier <k>'");
        return fourier_state(dim, parse_int(tok[1], where));
    }
    if (kind == "qrac") {
        if (tok.size() != 4) throw DataValidation(where + ": usage 'qrac d=<d> y0=<i> y1=<i>'");
        const int d = parse_kv(tok[1], "d", where);
        const int y0 = parse_kv(tok[2], "y0", where);
        const int y1 = parse_kv(tok[3], "y1", where);
        if (d != dim) {
            throw DataValidation(where + ": qrac d=" + std::to_string(d) +
                                 " does not match config dimension " + std::to_string(dim));
        }
        try {
            return qrac_state(d, y0, y1);
        } catch (const InvalidInput& e) {
            throw DataValidation(where + ": " + e.what());
        }
    }
    throw DataValidation(where + ": unknown state '" + name + "'");
}

} // namespace

OutputFormat output_format_from_string(std::string_view s) {
    const std::string l = lower(s);
    if (l == "json") return OutputFormat::Json;
    if (l == "csv") return OutputFormat::Csv;
    if (l == "text") return OutputFormat::Text;
    throw InvalidInput("unknown format '" + std::string(s) + "' (expected json|csv|text)");
}

DetectionMode detection_mode_from_string(std::string_view s) {
    const std::string l = lower(s);
    if (l == "states") return DetectionMode::States;
    if (l == "operations") return DetectionMode::Operations;
    if (l == "both") return DetectionMode::Both;
    throw InvalidInput("unknown detection mode '" + std::string(s) +
                       "' (expected states|operations|both)");
}

std::string to_string(DetectionMode mode) {
    switch (mode) {
    case DetectionMode::States: return "STATES";
    case DetectionMode::Operations: return "OPERATIONS";
    case DetectionMode::Both: return "BOTH";
    }
    return "?";
}

std::string to_string(Verdict verdict) {
    return verdict == Verdict::ResourceDetected ? "RESOURCE_DETECTED" : "CONSISTENT_WITH_FREE";
}

ConstrainSide constrain_from_string(std::string_view s) {
    const std::string l = lower(s);
    if (l == "states") return ConstrainSide::StatesOnly;
    if (l == "operations") return ConstrainSide::OperationsOnly;
    if (l == "both") return ConstrainSide::Both;
    throw InvalidInput("unknown constrain side '" + std::string(s) +
                       "' (expected states|operations|both)");
}

std::string to_string(ConstrainSide side) {
    switch (side) {
    case ConstrainSide::StatesOnly: return "STATES_ONLY";
    case ConstrainSide::OperationsOnly: return "OPERATIONS_ONLY";
    case ConstrainSide::Both: return "BOTH";
    }
    return "?";
}

InnerSearch inner_search_from_string(std::string_view s) {
    const std::string l = lower(s);
    if (l == "seesaw") return InnerSearch::SeeSaw;
    if (l == "nelder_mead" || l == "nelder-mead") return InnerSearch::NelderMead;
    if (l == "hybrid") return InnerSearch::Hybrid;
    throw InvalidInput("unknown inner search '" + std::string(s) +
                       "' (expected seesaw|nelder_mead|hybrid)");
}

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw DataValidation(where + ": matrix must be a nonempty array of rows");
    const size_t n = j.size();
    Eigen::MatrixXcd m(n, n);
    for (size_t r = 0; r < n; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || row.size() != n) {
            throw DataValidation(where + ": row " + std::to_string(r) + " must have " +
                                 std::to_string(n) + " entries");
        }
        for (size_t c = 0; c < n; ++c) {
            const auto& e = row[c];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw DataValidation(where + ": entry (" + std::to_string(r) + "," +
                                     std::to_string(c) + ") must be a [re, im] pair");
            }
            m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

DensityMatrix parse_state(const nlohmann::json& entry, int dim, const std::string& where) {
    try {
        if (entry.is_string()) {
            const std::string name = entry.get<std::string>();
            if (lower(tokens(name).empty() ? name : tokens(name)[0]) == "mixed") {
                return DensityMatrix::maximally_mixed(dim);
            }
            return DensityMatrix::pure(parse_pure(name, dim, where));
        }
        if (entry.is_object() && entry.contains("matrix")) {
            const Eigen::MatrixXcd m = matrix_from_json(entry["matrix"], where);
            if (m.rows() != dim) {
                throw DataValidation(where + ": matrix dimension " + std::to_string(m.rows()) +
                                     " does not match config dimension " + std::to_string(dim));
            }
            return DensityMatrix(ComplexMatrix(m));
        }
    } catch (const InvalidInput& e) {
        throw DataValidation(where + ": " + e.what());
    }
    throw DataValidation(where + ": expected a state name or {\"matrix\": ...}");
}

std::vector<Effect> parse_instrument(const nlohmann::json& entry, int dim,
                                     const std::string& where) {
    try {
        if (entry.is_string()) {
            const auto tok = tokens(entry.get<std::string>());
            if (tok.empty()) throw DataValidation(where + ": empty instrument name");
            const std::string kind = lower(tok[0]);
            std::vector<Effect> out;
            if (kind == "zbasis" || kind == "computational") {
                for (int i = 0; i < dim; ++i) out.push_back(Effect::projector(ket(dim, i)));
                return out;
            }
            if (kind == "xbasis") {
                for (int k = 0; k < dim; ++k) out.push_back(Effect::projector(fourier_state(dim, k)));
                return out;
            }
            if (kind == "barbasis") {
                require_qubit(dim, kind, where);
                return {Effect::projector(bar_zero()), Effect::projector(bar_one())};
            }
            if (kind == "pmbarbasis") {
                require_qubit(dim, kind, where);
                return {Effect::projector(bar_plus()), Effect::projector(bar_minus())};
            }
            if (kind == "ybasis") {
                require_qubit(dim, kind, where);
                return {Effect::projector(plus_y_state()), Effect::projector(minus_y_state())};
            }
            if (kind == "proj2") {
                const std::string rest = entry.get<std::string>().substr(
                    entry.get<std::string>().find(tok[0]) + tok[0].size());
                const Effect first = Effect::projector(parse_pure(rest, dim, where));
                return {first, first.complement()};
            }
            throw DataValidation(where + ": unknown instrument '" + entry.get<std::string>() + "'");
        }
        if (entry.is_array()) {
            std::vector<Effect> out;
            for (size_t j = 0; j < entry.size(); ++j) {
                const auto& e = entry[j];
                const std::string ewhere = where + "[" + std::to_string(j) + "]";
                if (e.is_string()) {
                    const auto tok = tokens(e.get<std::string>());
                    if (tok.size() >= 2 && lower(tok[0]) == "proj") {
                        const std::string rest = e.get<std::string>().substr(
                            e.get<std::string>().find(tok[0]) + tok[0].size());
                        out.push_back(Effect::projector(parse_pure(rest, dim, ewhere)));
                        continue;
                    }
                    throw DataValidation(ewhere + ": expected 'proj <state>' or {\"matrix\": ...}");
                }
                if (e.is_object() && e.contains("matrix")) {
                    const Eigen::MatrixXcd m = matrix_from_json(e["matrix"], ewhere);
                    if (m.rows() != dim) {
                        throw DataValidation(ewhere + ": matrix dimension mismatch");
                    }
                    out.push_back(Effect(ComplexMatrix(m)));
                    continue;
                }
                throw DataValidation(ewhere + ": expected 'proj <state>' or {\"matrix\": ...}");
            }
            return out;
        }
    } catch (const InvalidInput& e) {
        throw DataValidation(where + ": " + e.what());
    }
    throw DataValidation(where + ": expected an instrument name or a list of effects");
}

ExperimentConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw DataValidation("config: top level must be a JSON object");
    if (!j.contains("dimension") || !j["dimension"].is_number_integer()) {
        throw DataValidation("config.dimension: required integer");
    }
    const int dim = j["dimension"].get<int>();
    if (dim < 2) throw DataValidation("config.dimension: must be >= 2");

    if (!j.contains("preparations") || !j["preparations"].is_array() || j["preparations"].empty()) {
        throw DataValidation("config.preparations: required nonempty array");
    }
    std::vector<DensityMatrix> states;
    for (size_t y = 0; y < j["preparations"].size(); ++y) {
        states.push_back(parse_state(j["preparations"][y], dim,
                                     "config.preparations[" + std::to_string(y) + "]"));
    }

    if (!j.contains("instruments") || !j["instruments"].is_array() || j["instruments"].empty()) {
        throw DataValidation("config.instruments: required nonempty array");
    }
    std::vector<std::vector<Effect>> instruments;
    for (size_t x = 0; x < j["instruments"].size(); ++x) {
        instruments.push_back(parse_instrument(j["instruments"][x], dim,
                                               "config.instruments[" + std::to_string(x) + "]"));
    }

    PreparationBox prep(dim, std::move(states));
    OperationBox ops = [&] {
        try {
            return OperationBox(dim, std::move(instruments));
        } catch (const InvalidInput& e) {
            throw DataValidation(std::string("config.instruments: ") + e.what());
        }
    }();

    ExperimentConfig cfg{dim, std::move(prep), std::move(ops), {}, {}, {}, {}, {}, {}, false};

    if (j.contains("witness")) {
        if (!j["witness"].is_string()) throw DataValidation("config.witness: must be a string");
        cfg.witness = j["witness"].get<std::string>();
    }
    if (j.contains("free_set")) {
        if (!j["free_set"].is_string()) throw DataValidation("config.free_set: must be a string");
        cfg.free_set = j["free_set"].get<std::string>();
    }
    if (j.contains("detection_mode")) {
        if (!j["detection_mode"].is_string()) {
            throw DataValidation("config.detection_mode: must be a string");
        }
        try {
            cfg.detection_mode = detection_mode_from_string(j["detection_mode"].get<std::string>());
        } catch (const InvalidInput& e) {
            throw DataValidation(std::string("config.detection_mode: ") + e.what());
        }
    }
    if (j.contains("rank_tolerance")) {
        if (!j["rank_tolerance"].is_number() || j["rank_tolerance"].get<double>() <= 0.0) {
            throw DataValidation("config.rank_tolerance: must be a positive number");
        }
        cfg.rank_tolerance = j["rank_tolerance"].get<double>();
    }
    if (j.contains("epsilon")) {
        if (!j["epsilon"].is_number() || j["epsilon"].get<double>() <= 0.0) {
            throw DataValidation("config.epsilon: must be a positive number");
        }
        cfg.epsilon = j["epsilon"].get<double>();
    }
    if (j.contains("optimizer")) {
        const auto& o = j["optimizer"];
        if (!o.is_object()) throw DataValidation("config.optimizer: must be an object");
        if (o.contains("restarts")) cfg.optimizer.restarts = o["restarts"].get<int>();
        if (o.contains("max_rounds")) cfg.optimizer.max_seesaw_rounds = o["max_rounds"].get<int>();
        if (o.contains("tol")) cfg.optimizer.convergence_tol = o["tol"].get<double>();
        if (o.contains("seed")) {
            cfg.optimizer.seed = o["seed"].get<std::uint64_t>();
            cfg.optimizer_seed_given = true;
        }
        if (o.contains("inner_search")) {
            try {
                cfg.optimizer.inner_search =
                    inner_search_from_string(o["inner_search"].get<std::string>());
            } catch (const InvalidInput& e) {
                throw DataValidation(std::string("config.optimizer.inner_search: ") + e.what());
            }
        }
        if (cfg.optimizer.restarts < 1 || cfg.optimizer.max_seesaw_rounds < 1 ||
            cfg.optimizer.convergence_tol <= 0.0) {
            throw DataValidation("config.optimizer: restarts/max_rounds must be >= 1, tol > 0");
        }
    }
    return cfg;
}

namespace {
nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataValidation("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataValidation("'" + path + "': " + e.what());
    }
}
} // namespace

ExperimentConfig load_config(const std::string& path) {
    return parse_config(read_json_file(path));
}

CorrelationTable table_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DataValidation("table: top level must be a JSON object");
    for (const char* key : {"num_y", "num_x", "num_j"}) {
        if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<int>() < 1) {
            throw DataValidation(std::string("table.") + key + ": required positive integer");
        }
    }
    const int ny = j["num_y"].get<int>();
    const int nx = j["num_x"].get<int>();
    const int nj = j["num_j"].get<int>();
    if (!j.contains("probs") || !j["probs"].is_array() || j["probs"].size() != size_t(ny)) {
        throw DataValidation("table.probs: must be an array of " + std::to_string(ny) +
                             " y-blocks");
    }
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(ny) * nx * nj);
    for (int y = 0; y < ny; ++y) {
        const auto& yblock = j["probs"][y];
        if (!yblock.is_array() || yblock.size() != size_t(nx)) {
            throw DataValidation("table.probs[" + std::to_string(y) + "]: must have " +
                                 std::to_string(nx) + " x-blocks");
        }
        for (int x = 0; x < nx; ++x) {
            const auto& xblock = yblock[x];
            if (!xblock.is_array() || xblock.size() != size_t(nj)) {
                throw DataValidation("table.probs[" + std::to_string(y) + "][" +
                                     std::to_string(x) + "]: must have " + std::to_string(nj) +
                                     " outcomes");
            }
            for (int jj = 0; jj < nj; ++jj) {
                if (!xblock[jj].is_number()) {
                    throw DataValidation("table.probs[" + std::to_string(y) + "][" +
                                         std::to_string(x) + "][" + std::to_string(jj) +
                                         "]: must be a number");
                }
                flat.push_back(xblock[jj].get<double>());
            }
        }
    }
    return table_from_raw(flat, ny, nx, nj);
}

CorrelationTable load_table(const std::string& path) {
    return table_from_json(read_json_file(path));
}

nlohmann::json table_to_json(const CorrelationTable& table) {
    nlohmann::json probs = nlohmann::json::array();
    for (int y = 0; y < table.num_y(); ++y) {
        nlohmann::json yblock = nlohmann::json::array();
        for (int x = 0; x < table.num_x(); ++x) {
            nlohmann::json xblock = nlohmann::json::array();
            for (int j = 0; j < table.num_j(); ++j) xblock.push_back(table(j, x, y));
            yblock.push_back(std::move(xblock));
        }
        probs.push_back(std::move(yblock));
    }
    return {{"type", "correlation_table"},
            {"num_y", table.num_y()},
            {"num_x", table.num_x()},
            {"num_j", table.num_j()},
            {"probs", std::move(probs)}};
}

std::string fnum(double v) {
    v += 0.0; // fold -0.0 into 0.0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string format_table(const CorrelationTable& table, OutputFormat format) {
    switch (format) {
    case OutputFormat::Json:
        return table_to_json(table).dump(2) + "\n";
    case OutputFormat::Csv: {
        std::string out = "y,x,j,p\n";
        for (int y = 0; y < table.num_y(); ++y) {
            for (int x = 0; x < table.num_x(); ++x) {
                for (int j = 0; j < table.num_j(); ++j) {
                    out += std::to_string(y) + "," + std::to_string(x) + "," + std::to_string(j) +
                           "," + fnum(table(j, x, y)) + "\n";
                }
            }
        }
        return out;
    }
    case OutputFormat::Text: {
        std::string out = "correlation table: " + std::to_string(table.num_y()) +
                          " preparations, " + std::to_string(table.num_x()) + " instruments, " +
                          std::to_string(table.num_j()) + " outcomes\n";
        for (int y = 0; y < table.num_y(); ++y) {
            for (int x = 0; x < table.num_x(); ++x) {
                out += "  p(j|x=" + std::to_string(x) + ",y=" + std::to_string(y) + "):";
                for (int j = 0; j < table.num_j(); ++j) out += " " + fnum(table(j, x, y));
                out += "\n";
            }
        }
        return out;
    }
    }
    return {};
}

} // namespace qres
