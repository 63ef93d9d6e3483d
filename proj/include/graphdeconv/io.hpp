#pragma once

// Text formats: undirected edge lists and dense CSV matrices.

#include "graphdeconv/gsp.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace graphdeconv::io {

struct Edge {
    Index source = 0;
    Index target = 0;
    double weight = 1.0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

/// Format a double with 17 significant digits (round-trips exactly).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Parses `i j [w]` lines; `#` starts a comment line. Node ids are 0-based.
inline std::vector<Edge> read_edges(std::istream& in) {
    std::vector<Edge> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto fields = detail::split_ws(body);
        if (fields.size() != 2 && fields.size() != 3)
            throw ParseError("edge line must have the form 'i j [w]'", lineno);
        Edge e;
        if (!detail::parse_number(fields[0], e.source) || !detail::parse_number(fields[1], e.target) ||
            e.source < 0 || e.target < 0)
            throw ParseError("node ids must be nonnegative integers", lineno);
        if (fields.size() == 3 && (!detail::parse_number(fields[2], e.weight) || !(e.weight > 0.0)))
            throw ParseError("edge weight must be a positive real", lineno);
        edges.push_back(e);
    }
    return edges;
}

inline std::vector<Edge> read_edges_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open edge list '" + path + "'");
    return read_edges(in);
}

/// Undirected graph from an edge list. The node count is max id + 1 unless given.
inline Graph graph_from_edges(const std::vector<Edge>& edges, Index n_nodes = 0) {
    Index n = n_nodes;
    for (const auto& e : edges) n = std::max(n, std::max(e.source, e.target) + 1);
    std::vector<std::tuple<Index, Index, double>> triples;
    triples.reserve(edges.size());
    Matrix seen = Matrix::Zero(n, n);
    for (const auto& e : edges) {
        if (seen(e.source, e.target) != 0.0)
            throw ValidationError("edge " + std::to_string(e.source) + " " + std::to_string(e.target) +
                                  " listed more than once");
        seen(e.source, e.target) = seen(e.target, e.source) = 1.0;
        triples.emplace_back(e.source, e.target, e.weight);
    }
    return Graph::from_edges(n, triples);
}

inline Graph read_graph_file(const std::string& path) { return graph_from_edges(read_edges_file(path)); }

inline void write_edges(std::ostream& out, const Graph& g) {
    const Matrix& a = g.adjacency();
    out << "# undirected edge list: i j w (0-based), " << g.n_nodes() << " nodes\n";
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < j; ++i)
            if (a(i, j) != 0.0) out << i << ' ' << j << ' ' << format_double(a(i, j)) << '\n';
}

inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

inline void write_matrix_csv_file(const std::string& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    write_matrix_csv(out, m);
}

/// Dense numeric CSV without header. Every row must have the same width.
inline Matrix read_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        std::vector<double> row;
        for (auto field : detail::split(body, ',')) {
            double v = 0.0;
            if (!detail::parse_number(field, v)) throw ParseError("non-numeric CSV field", lineno);
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("ragged CSV row", lineno);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return Matrix(0, 0);
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

inline Matrix read_matrix_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_matrix_csv(in);
}

}  // namespace graphdeconv::io
