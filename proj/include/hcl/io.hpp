#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcl/errors.hpp"
#include "hcl/model.hpp"

namespace hcl {

/// Text hypergraph format: "n d k", then "S: ids", then one out-hyperedge per line (1-based ids).
inline std::string write_hypergraph(const HypergraphSample& s) {
    std::ostringstream os;
    os << s.n() << ' ' << s.d() << ' ' << s.planted().size() << "\nS:";
    for (Vertex v : s.planted()) os << ' ' << v + 1;
    os << '\n';
    for (std::size_t i = 0; i < s.edge_count(); ++i) {
        const auto e = s.edge(i);
        for (std::size_t j = 0; j < e.size(); ++j) os << (j ? " " : "") << e[j] + 1;
        os << '\n';
    }
    return os.str();
}

namespace detail {

inline std::vector<std::uint64_t> parse_uints(const std::string& line, char sep) {
    std::vector<std::uint64_t> out;
    std::string tok;
    std::istringstream is(line);
    auto push = [&](const std::string& t) {
        if (t.empty()) return;
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(t, &pos);
        } catch (const std::exception&) {
            throw ConfigError("malformed integer '" + t + "'");
        }
        if (pos != t.size() || t[0] == '-') throw ConfigError("malformed integer '" + t + "'");
        out.push_back(v);
    };
    if (sep == ' ') {
        while (is >> tok) push(tok);
    } else {
        while (std::getline(is, tok, sep)) {
            const auto b = tok.find_first_not_of(" \t\r");
            const auto e = tok.find_last_not_of(" \t\r");
            if (b == std::string::npos) throw ConfigError("empty matrix entry");
            push(tok.substr(b, e - b + 1));
        }
    }
    return out;
}

inline std::vector<Vertex> to_zero_based(const std::vector<std::uint64_t>& ids, std::uint32_t n) {
    std::vector<Vertex> out;
    out.reserve(ids.size());
    for (auto id : ids) {
        if (id < 1 || id > n) throw ConfigError("vertex id " + std::to_string(id) + " out of range");
        out.push_back(static_cast<Vertex>(id - 1));
    }
    return out;
}

}  // namespace detail

/// Parses the hypergraph format. p is not stored in the file and must be supplied.
inline HypergraphSample read_hypergraph(std::istream& in, double p) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("hypergraph file: missing header");
    const auto head = detail::parse_uints(line, ' ');
    if (head.size() != 3) throw ConfigError("hypergraph file: header must be 'n d k'");
    ModelParams params{static_cast<std::uint32_t>(head[0]), static_cast<int>(head[1]), static_cast<std::uint32_t>(head[2]), p};
    params.validate();
    if (!std::getline(in, line) || line.rfind("S:", 0) != 0) throw ConfigError("hypergraph file: line 2 must start with 'S:'");
    auto planted = detail::to_zero_based(detail::parse_uints(line.substr(2), ' '), params.n);
    std::vector<Vertex> flat;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto e = detail::to_zero_based(detail::parse_uints(line, ' '), params.n);
        if (e.size() != static_cast<std::size_t>(params.d)) throw ConfigError("hypergraph file: edge of wrong size");
        flat.insert(flat.end(), e.begin(), e.end());
    }
    return HypergraphSample(params, std::move(planted), std::move(flat));
}

inline HypergraphSample read_hypergraph_file(const std::string& path, double p) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_hypergraph(in, p);
}

/// n lines of n comma-separated integers.
inline std::string write_matrix(const AdjacencyMatrix& a) {
    std::ostringstream os;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const auto r = a.row(i);
        for (std::size_t j = 0; j < a.dim(); ++j) os << (j ? "," : "") << r[j];
        os << '\n';
    }
    return os.str();
}

inline AdjacencyMatrix read_matrix(std::istream& in) {
    std::vector<std::vector<std::uint64_t>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        rows.push_back(detail::parse_uints(line, ','));
    }
    const auto n = rows.size();
    if (n == 0 || n > kMaxVertices) throw ConfigError("matrix file: need between 1 and 1000 rows");
    AdjacencyMatrix a(static_cast<std::uint32_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw ConfigError("matrix file: row " + std::to_string(i + 1) + " is not of length n");
        for (std::size_t j = 0; j < n; ++j) a.at(i, j) = rows[i][j];
    }
    return a;
}

inline AdjacencyMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_matrix(in);
}

/// True when the file's second line starts with "S:" (hypergraph format).
inline bool looks_like_hypergraph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string l1, l2;
    std::getline(in, l1);
    return std::getline(in, l2) && l2.rfind("S:", 0) == 0;
}

}  // namespace hcl
