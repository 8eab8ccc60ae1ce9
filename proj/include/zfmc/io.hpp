#ifndef ZFMC_IO_HPP
#define ZFMC_IO_HPP

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zfmc/chain.hpp"
#include "zfmc/error.hpp"
#include "zfmc/graph.hpp"
#include "zfmc/matrix.hpp"
#include "zfmc/reconstruct.hpp"

namespace zfmc::io {

using nlohmann::json;

namespace detail {

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::parse, path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::parse, path + ": cannot open for writing");
    out << text;
    if (!out) throw Error(errc::parse, path + ": write failed");
}

inline json parse_json(const std::string& text, const std::string& context) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(errc::parse, context + ": " + e.what());
    }
}

[[noreturn]] inline void schema_error(const std::string& context, const std::string& what) {
    throw Error(errc::parse, context + ": " + what);
}

inline double number_or_nan(const json& v, const std::string& context) {
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!v.is_number()) schema_error(context, "expected a number or null");
    return v.get<double>();
}

}  // namespace detail

// ---- graphs: { "order": S, "edges": [[i, j], ...] }, 1-indexed ----------

inline SimpleGraph graph_from_json(const json& j, const std::string& context = "graph") {
    if (!j.is_object() || !j.contains("order") || !j.contains("edges"))
        detail::schema_error(context, "expected an object with 'order' and 'edges'");
    if (!j["order"].is_number_integer()) detail::schema_error(context, "'order' must be an integer");
    try {
        SimpleGraph g(j["order"].get<int>());
        for (const json& e : j["edges"]) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
                !e[1].is_number_integer())
                detail::schema_error(context, "each edge must be a pair of integers");
            g.add_edge(e[0].get<int>(), e[1].get<int>());
        }
        return g;
    } catch (const Error& err) {
        if (err.code() == errc::bad_argument) detail::schema_error(context, err.what());
        throw;
    }
}

inline json graph_to_json(const SimpleGraph& g) {
    json edges = json::array();
    for (auto [u, v] : g.edges()) edges.push_back({u, v});
    return json{{"order", g.order()}, {"edges", edges}};
}

inline SimpleGraph load_graph(const std::string& path) {
    return graph_from_json(detail::parse_json(detail::slurp(path), path), path);
}

inline void save_graph(const SimpleGraph& g, const std::string& path) {
    detail::spit(path, graph_to_json(g).dump(2) + "\n");
}

// ---- matrices ------------------------------------------------------------
// JSON form: { "size": S, "rows": [[...], ...] }. A reconstruction result
// file is also accepted (its "matrix" field is read). CSV form: S lines of
// S comma-separated values.

inline Matrix matrix_from_json(const json& j, const std::string& context = "matrix") {
    if (!j.is_object()) detail::schema_error(context, "expected an object");
    const char* key = j.contains("rows") ? "rows" : (j.contains("matrix") ? "matrix" : nullptr);
    if (key == nullptr) detail::schema_error(context, "expected a 'rows' (or 'matrix') field");
    const json& rows = j[key];
    if (!rows.is_array() || rows.empty()) detail::schema_error(context, "rows must be a nonempty array");
    const int s = static_cast<int>(rows.size());
    if (j.contains("size") && (!j["size"].is_number_integer() || j["size"].get<int>() != s))
        detail::schema_error(context, "'size' does not match the number of rows");
    Matrix m(s);
    for (int i = 0; i < s; ++i) {
        if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != s)
            detail::schema_error(context, "matrix is not square");
        for (int c = 0; c < s; ++c) {
            if (!rows[i][c].is_number()) detail::schema_error(context, "matrix entries must be numbers");
            m(i, c) = rows[i][c].get<double>();
        }
    }
    return m;
}

inline Matrix matrix_from_csv(const std::string& text, const std::string& context) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                detail::schema_error(context, "bad number '" + cell + "'");
            }
            if (cell.find_first_not_of(" \t\r", used) != std::string::npos)
                detail::schema_error(context, "bad number '" + cell + "'");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) detail::schema_error(context, "empty matrix");
    const int s = static_cast<int>(rows.size());
    Matrix m(s);
    for (int i = 0; i < s; ++i) {
        if (static_cast<int>(rows[i].size()) != s)
            detail::schema_error(context, "matrix is not square");
        for (int j = 0; j < s; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

inline Matrix load_matrix(const std::string& path) {
    const std::string text = detail::slurp(path);
    const size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return matrix_from_json(detail::parse_json(text, path), path);
    return matrix_from_csv(text, path);
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.size(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return json{{"size", m.size()}, {"rows", rows}};
}

inline void save_matrix(const Matrix& m, const std::string& path) {
    detail::spit(path, matrix_to_json(m).dump(2) + "\n");
}

// ---- moment tables --------------------------------------------------------
// { "kind": "discrete"|"continuous", "known_states": [...], "max_power": N,
//   "values": { "1": [[...]], ... }, "stderr": { ... } }  -- absent entries
// serialize as null.

inline MomentTable moments_from_json(const json& j, const std::string& context = "moments") {
    for (const char* k : {"kind", "known_states", "max_power", "values"})
        if (!j.is_object() || !j.contains(k))
            detail::schema_error(context, std::string("missing field '") + k + "'");
    ChainKind kind;
    if (j["kind"] == "discrete")
        kind = ChainKind::discrete;
    else if (j["kind"] == "continuous")
        kind = ChainKind::continuous;
    else
        detail::schema_error(context, "kind must be 'discrete' or 'continuous'");
    if (!j["known_states"].is_array() || j["known_states"].empty())
        detail::schema_error(context, "known_states must be a nonempty array");
    std::vector<int> states;
    for (const json& v : j["known_states"]) {
        if (!v.is_number_integer()) detail::schema_error(context, "states must be integers");
        states.push_back(v.get<int>());
    }
    if (!j["max_power"].is_number_integer() || j["max_power"].get<int>() < 1)
        detail::schema_error(context, "max_power must be a positive integer");
    const int n_max = j["max_power"].get<int>();
    const int w = static_cast<int>(states.size());

    MomentTable table = [&] {
        try {
            return MomentTable(kind, states, n_max);
        } catch (const Error& e) {
            detail::schema_error(context, e.what());
        }
    }();

    auto read_block = [&](const json& block, const std::string& what,
                          auto&& store) {
        for (int n = 1; n <= n_max; ++n) {
            const std::string key = std::to_string(n);
            if (!block.contains(key))
                detail::schema_error(context, what + " missing power " + key);
            const json& grid = block[key];
            if (!grid.is_array() || static_cast<int>(grid.size()) != w)
                detail::schema_error(context, what + " power " + key + " has wrong shape");
            for (int a = 0; a < w; ++a) {
                if (!grid[a].is_array() || static_cast<int>(grid[a].size()) != w)
                    detail::schema_error(context, what + " power " + key + " has wrong shape");
                for (int b = 0; b < w; ++b)
                    store(n, a, b, detail::number_or_nan(grid[a][b], context));
            }
        }
    };

    read_block(j["values"], "values", [&](int n, int a, int b, double v) {
        if (kind == ChainKind::discrete && !std::isnan(v) && (v < -1e-9 || v > 1.0 + 1e-9))
            detail::schema_error(context, "discrete moment out of [0,1] at power " +
                                              std::to_string(n));
        if (!std::isnan(v)) table.set(n, a, b, v);
    });
    if (j.contains("stderr") && !j["stderr"].is_null()) {
        table.enable_se();
        read_block(j["stderr"], "stderr", [&](int n, int a, int b, double v) {
            if (!std::isnan(v) && v < 0.0)
                detail::schema_error(context, "standard errors must be nonnegative");
            table.set_se(n, a, b, v);
        });
    }
    return table;
}

inline json moments_to_json(const MomentTable& t) {
    auto block = [&](auto&& read) {
        json out = json::object();
        for (int n = 1; n <= t.max_power(); ++n) {
            json grid = json::array();
            for (int a = 0; a < t.width(); ++a) {
                json row = json::array();
                for (int b = 0; b < t.width(); ++b) row.push_back(read(n, a, b));
                grid.push_back(std::move(row));
            }
            out[std::to_string(n)] = std::move(grid);
        }
        return out;
    };
    json j{{"kind", to_string(t.kind())},
           {"known_states", t.states()},
           {"max_power", t.max_power()},
           {"values", block([&](int n, int a, int b) {
                return t.has(n, a, b) ? json(t.value(n, a, b)) : json(nullptr);
            })}};
    if (t.has_se())
        j["stderr"] = block([&](int n, int a, int b) {
            const double v = t.se(n, a, b);
            return std::isnan(v) ? json(nullptr) : json(v);
        });
    return j;
}

inline MomentTable load_moments(const std::string& path) {
    return moments_from_json(detail::parse_json(detail::slurp(path), path), path);
}

inline void save_moments(const MomentTable& t, const std::string& path) {
    detail::spit(path, moments_to_json(t).dump(2) + "\n");
}

// ---- reconstruction results -----------------------------------------------

inline json result_to_json(const ReconstructionResult& r) {
    const int s = r.matrix.size();
    json rows = json::array();
    json prov = json::array();
    for (int i = 1; i <= s; ++i) {
        json row = json::array(), prow = json::array();
        for (int j = 1; j <= s; ++j) {
            row.push_back(r.matrix(i - 1, j - 1));
            prow.push_back(to_string(r.provenance_at(i, j)));
        }
        rows.push_back(std::move(row));
        prov.push_back(std::move(prow));
    }
    json order = json::array();
    for (const Force& f : r.forcing.forces) order.push_back({f.forcer, f.forced});
    return json{{"matrix", rows},
                {"kind", to_string(r.kind)},
                {"provenance", prov},
                {"forcing_order", order},
                {"residual_max", r.residual_max},
                {"residual_mean", r.residual_mean},
                {"warnings", r.warnings}};
}

inline void save_result(const ReconstructionResult& r, const std::string& path) {
    detail::spit(path, result_to_json(r).dump(2) + "\n");
}

}  // namespace zfmc::io

#endif  // ZFMC_IO_HPP
