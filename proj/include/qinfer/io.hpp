#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qinfer/format.hpp"
#include "qinfer/seqprob.hpp"
#include "qinfer/types.hpp"

// File formats
// ------------
// Matrices and vectors share one schema. JSON:
//   {"rows": ["a1","a2"], "cols": ["b1","b2"],
//    "data": [[0.3,0.2],[0.1,0.4]], "ordering": "B<A"}
// "data" is row-major; "ordering" appears on joints only and names the
// preceding variable first (the column variable precedes the row variable).
// Vectors are single-column matrices.
//
// CSV: header row of column labels, first column row labels. The corner cell
// is empty for plain matrices and holds the ordering tag (e.g. B<A) for
// joints. Numbers are shortest round-trip decimals, so rewriting a parsed
// file is lossless.

namespace qinfer::io {

using json = nlohmann::json;

struct LabeledMatrix {
    Matrix data;
    Labels rows;
    Labels cols;
    std::optional<VarOrder> ordering;
};

namespace detail {

inline void require_clean_label(const std::string& label) {
    if (label.empty() || label.find_first_of(",\n\r\"") != std::string::npos)
        throw ParseError("label '" + label + "' is empty or contains a delimiter");
}

inline Labels string_array(const json& j, const char* field) {
    if (!j.is_array())
        throw ParseError(std::string(field) + ": expected an array of strings");
    Labels out;
    for (const auto& v : j) {
        if (!v.is_string())
            throw ParseError(std::string(field) + ": expected an array of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

inline std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

} // namespace detail

inline json matrix_to_json(const LabeledMatrix& m) {
    json rows = json::array();
    for (const auto& l : m.rows)
        rows.push_back(l);
    json cols = json::array();
    for (const auto& l : m.cols)
        cols.push_back(l);
    json data = json::array();
    for (Index i = 0; i < m.data.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.data.cols(); ++j)
            row.push_back(m.data(i, j));
        data.push_back(std::move(row));
    }
    json out{{"rows", std::move(rows)}, {"cols", std::move(cols)}, {"data", std::move(data)}};
    if (m.ordering)
        out["ordering"] = m.ordering->str();
    return out;
}

inline LabeledMatrix matrix_from_json(const json& j) {
    if (!j.is_object())
        throw ParseError("matrix: expected a JSON object");
    for (const char* field : {"rows", "cols", "data"})
        if (!j.contains(field))
            throw ParseError(std::string("matrix: missing field '") + field + "'");
    LabeledMatrix m;
    m.rows = detail::string_array(j["rows"], "rows");
    m.cols = detail::string_array(j["cols"], "cols");
    const auto& data = j["data"];
    if (!data.is_array() || data.size() != m.rows.size())
        throw ParseError("data: expected " + std::to_string(m.rows.size()) + " rows");
    m.data.resize(static_cast<Index>(m.rows.size()), static_cast<Index>(m.cols.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& row = data[i];
        if (!row.is_array() || row.size() != m.cols.size())
            throw ParseError("data row " + std::to_string(i) + ": expected " +
                             std::to_string(m.cols.size()) + " entries");
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (!row[k].is_number())
                throw ParseError("data row " + std::to_string(i) + ", entry " +
                                 std::to_string(k) + ": not a number");
            m.data(static_cast<Index>(i), static_cast<Index>(k)) = row[k].get<double>();
        }
    }
    if (j.contains("ordering")) {
        if (!j["ordering"].is_string())
            throw ParseError("ordering: expected a string like 'B<A'");
        m.ordering = VarOrder::parse(j["ordering"].get<std::string>());
    }
    return m;
}

inline std::string matrix_to_csv(const LabeledMatrix& m) {
    for (const auto& l : m.rows)
        detail::require_clean_label(l);
    for (const auto& l : m.cols)
        detail::require_clean_label(l);
    std::string out = m.ordering ? m.ordering->str() : "";
    for (const auto& l : m.cols) {
        out += ',';
        out += l;
    }
    out += '\n';
    for (Index i = 0; i < m.data.rows(); ++i) {
        out += m.rows[static_cast<std::size_t>(i)];
        for (Index j = 0; j < m.data.cols(); ++j) {
            out += ',';
            out += format_double(m.data(i, j));
        }
        out += '\n';
    }
    return out;
}

inline LabeledMatrix matrix_from_csv(std::string_view text) {
    std::vector<std::string> lines;
    for (auto line : detail::split(text, '\n')) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            lines.push_back(std::move(line));
    }
    if (lines.size() < 2)
        throw ParseError("csv: need a header row and at least one data row");
    auto header = detail::split(lines[0], ',');
    if (header.size() < 2)
        throw ParseError("csv: header needs at least one column label");
    LabeledMatrix m;
    if (!header[0].empty())
        m.ordering = VarOrder::parse(header[0]);
    m.cols.assign(header.begin() + 1, header.end());
    const std::size_t ncols = m.cols.size();
    m.data.resize(static_cast<Index>(lines.size() - 1), static_cast<Index>(ncols));
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto cells = detail::split(lines[i], ',');
        if (cells.size() != ncols + 1)
            throw ParseError("csv line " + std::to_string(i + 1) + ": expected " +
                             std::to_string(ncols + 1) + " cells, got " +
                             std::to_string(cells.size()));
        m.rows.push_back(cells[0]);
        for (std::size_t j = 0; j < ncols; ++j) {
            try {
                m.data(static_cast<Index>(i - 1), static_cast<Index>(j)) = parse_double(cells[j + 1]);
            } catch (const ParseError& e) {
                throw ParseError("csv line " + std::to_string(i + 1) + ", column " +
                                 std::to_string(j + 2) + ": " + e.what());
            }
        }
    }
    return m;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot write '" + path.string() + "'");
    out << content;
}

/// Load a matrix file, dispatching on the extension (.json or .csv).
inline LabeledMatrix load_matrix(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const auto ext = path.extension().string();
    if (ext == ".csv")
        return matrix_from_csv(text);
    if (ext == ".json") {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError("'" + path.string() + "': " + e.what());
        }
        return matrix_from_json(j);
    }
    throw ParseError("'" + path.string() + "': unknown extension (expected .json or .csv)");
}

inline void save_matrix(const std::filesystem::path& path, const LabeledMatrix& m) {
    const auto ext = path.extension().string();
    if (ext == ".csv")
        write_file(path, matrix_to_csv(m));
    else if (ext == ".json")
        write_file(path, matrix_to_json(m).dump(2) + "\n");
    else
        throw ParseError("'" + path.string() + "': unknown extension (expected .json or .csv)");
}

// conversions between the wire type and the domain types

inline LabeledMatrix to_labeled(const JointDist& j) {
    return {j.entries(), j.row_labels(), j.col_labels(), j.order()};
}
inline LabeledMatrix to_labeled(const QuasiStochasticMatrix& m) {
    return {m.entries(), m.row_labels(), m.col_labels(), std::nullopt};
}
inline LabeledMatrix to_labeled(const QuasiVector& v, const std::string& col_label = "p") {
    return {v.entries(), v.labels(), {col_label}, std::nullopt};
}

inline JointDist as_joint(const LabeledMatrix& m, const Tolerances& tol = {}) {
    return JointDist(m.data, m.ordering.value_or(VarOrder{}), m.rows, m.cols, tol);
}
inline StochasticMatrix as_model(const LabeledMatrix& m, const Tolerances& tol = {}) {
    return StochasticMatrix(m.data, m.rows, m.cols, tol);
}
inline QuasiVector as_quasi_vector(const LabeledMatrix& m, const Tolerances& tol = {}) {
    if (m.data.cols() != 1)
        throw ParseError("vector file must have exactly one column, got " +
                         std::to_string(m.data.cols()));
    return QuasiVector(m.data.col(0), m.rows, tol);
}
inline ProbVector as_prob_vector(const LabeledMatrix& m, const Tolerances& tol = {}) {
    if (m.data.cols() != 1)
        throw ParseError("vector file must have exactly one column, got " +
                         std::to_string(m.data.cols()));
    return ProbVector(m.data.col(0), m.rows, tol);
}

// ---------------------------------------------------------------------------
// multi-ordering assignment files (for the axiom checker)
// ---------------------------------------------------------------------------
// {
//   "variables": [{"name": "A", "alphabet": ["a1","a2"]}, ...],
//   "orderings": [
//     {"order": ["B","A"], "values": {"b1,a1": 0.3, ...}},
//     ...
//   ]
// }
// Every ordering of the variables must appear, with a value for each full
// sequence; keys list outcome labels in sequence order.

inline json assignment_to_json(const seqprob::ProbabilityAssignment& p) {
    const auto& space = p.space();
    json vars = json::array();
    for (const auto& v : space.variables()) {
        json alpha = json::array();
        for (const auto& l : v.alphabet)
            alpha.push_back(l);
        vars.push_back(json{{"name", v.name}, {"alphabet", std::move(alpha)}});
    }
    json orderings = json::array();
    for (const auto& s : space.orderings()) {
        json order = json::array();
        for (int pos = 0; pos < s.size(); ++pos)
            order.push_back(space.variables()[static_cast<std::size_t>(s.var_at(pos))].name);
        json values = json::object();
        for (const auto& full : space.enumerate_full(s)) {
            std::string key;
            for (std::size_t i = 0; i < full.items().size(); ++i) {
                if (i)
                    key += ',';
                const auto& it = full.items()[i];
                key += space.variables()[static_cast<std::size_t>(it.var)]
                           .alphabet[static_cast<std::size_t>(it.outcome)];
            }
            values[key] = p.at(full);
        }
        orderings.push_back(json{{"order", std::move(order)}, {"values", std::move(values)}});
    }
    return json{{"variables", std::move(vars)}, {"orderings", std::move(orderings)}};
}

inline seqprob::ProbabilityAssignment assignment_from_json(const json& j) {
    if (!j.is_object() || !j.contains("variables") || !j.contains("orderings"))
        throw ParseError("assignment: expected an object with 'variables' and 'orderings'");
    std::vector<seqprob::VariableSpec> vars;
    for (const auto& v : j["variables"]) {
        if (!v.is_object() || !v.contains("name") || !v.contains("alphabet"))
            throw ParseError("assignment variable: expected {name, alphabet}");
        vars.push_back(
            {v["name"].get<std::string>(), detail::string_array(v["alphabet"], "alphabet")});
    }
    seqprob::SequenceSpace space(std::move(vars));
    seqprob::ProbabilityAssignment p(space);

    std::size_t seen = 0;
    for (const auto& entry : j["orderings"]) {
        if (!entry.is_object() || !entry.contains("order") || !entry.contains("values"))
            throw ParseError("assignment ordering: expected {order, values}");
        const auto s = space.ordering_of(detail::string_array(entry["order"], "order"));
        const auto& values = entry["values"];
        if (!values.is_object())
            throw ParseError("assignment values: expected an object");
        std::size_t count = 0;
        for (const auto& [key, val] : values.items()) {
            if (!val.is_number())
                throw ParseError("assignment value '" + key + "': not a number");
            const auto labels = detail::split(key, ',');
            if (static_cast<int>(labels.size()) != space.num_vars())
                throw ParseError("assignment key '" + key + "': expected " +
                                 std::to_string(space.num_vars()) + " outcomes");
            std::vector<seqprob::Item> items;
            for (int pos = 0; pos < s.size(); ++pos) {
                const int var = s.var_at(pos);
                items.push_back(
                    {var, space.outcome_index(var, labels[static_cast<std::size_t>(pos)])});
            }
            p.set(seqprob::Sequence(s, std::move(items)), val.get<double>());
            ++count;
        }
        if (count != static_cast<std::size_t>(space.full_count()))
            throw ParseError("assignment ordering '" + space.ordering_str(s) + "': " +
                             std::to_string(count) + " values, expected " +
                             std::to_string(space.full_count()));
        ++seen;
    }
    if (seen != space.orderings().size())
        throw ParseError("assignment: " + std::to_string(seen) + " orderings given, expected " +
                         std::to_string(space.orderings().size()));
    if (!p.complete())
        throw ParseError("assignment: some full sequences have no value");
    return p;
}

inline seqprob::ProbabilityAssignment load_assignment(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path.string() + "': " + e.what());
    }
    return assignment_from_json(j);
}

inline void save_assignment(const std::filesystem::path& path,
                            const seqprob::ProbabilityAssignment& p) {
    write_file(path, assignment_to_json(p).dump(2) + "\n");
}

} // namespace qinfer::io
