#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "symfact/clustering.hpp"
#include "symfact/error.hpp"
#include "symfact/graph.hpp"
#include "symfact/linalg.hpp"
#include "symfact/solver.hpp"

namespace symfact::io {

// 17 significant digits: enough to read back the identical double.
inline std::string format_double(double v) { return fmt::format("{:.17g}", v); }

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

struct Line {
    std::size_t number;  // 1-based
    std::string text;
};

// Non-blank lines with their 1-based numbers. CR line endings are stripped.
inline std::vector<Line> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::vector<Line> lines;
    std::string text;
    std::size_t number = 0;
    while (std::getline(in, text)) {
        ++number;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (trim(text).empty()) continue;
        lines.push_back({number, std::move(text)});
    }
    return lines;
}

inline DenseMatrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto m = n == 0 ? 0 : static_cast<Eigen::Index>(rows.front().size());
    DenseMatrix out(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) out(i, j) = rows[i][j];
    return out;
}

inline std::vector<double> parse_numeric_row(const std::string& path, const Line& line,
                                             std::size_t expected) {
    const auto fields = split(line.text, ',');
    if (expected != 0 && fields.size() != expected)
        throw ParseError(path, line.number,
                         fmt::format("expected {} fields, found {}", expected, fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
        const auto v = parse_double(fields[j]);
        if (!v)
            throw ParseError(path, line.number,
                             fmt::format("field {} is not a number: '{}'", j + 1, fields[j]));
        if (!std::isfinite(*v))
            throw ParseError(path, line.number, fmt::format("field {} is not finite", j + 1));
        row.push_back(*v);
    }
    return row;
}

/// Comma-separated numeric matrix without header.
inline DenseMatrix read_dense_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw ParseError(path, 0, "file is empty");
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    for (const auto& line : lines) {
        rows.push_back(parse_numeric_row(path, line, width));
        width = rows.back().size();
    }
    return rows_to_matrix(rows);
}

inline SymmetricMatrix read_similarity_csv(const std::string& path) {
    DenseMatrix m = read_dense_csv(path);
    if (m.rows() != m.cols())
        throw ParseError(path, 0, fmt::format("similarity matrix is {}x{}, expected square",
                                              m.rows(), m.cols()));
    try {
        return SymmetricMatrix(std::move(m));
    } catch (const InvalidInput& e) {
        throw ParseError(path, 0, e.what());
    }
}

/// `%%MatrixMarket matrix coordinate real symmetric`, 1-based indices,
/// lower triangle only. Densified.
inline SymmetricMatrix read_matrix_market_symmetric(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::string text;
    std::size_t number = 0;

    if (!std::getline(in, text)) throw ParseError(path, 0, "file is empty");
    ++number;
    {
        auto banner = split_ws(text);
        std::vector<std::string> lower;
        for (auto b : banner) {
            std::string s(b);
            std::transform(s.begin(), s.end(), s.begin(),
                           [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
            lower.push_back(std::move(s));
        }
        const std::vector<std::string> want{"%%matrixmarket", "matrix", "coordinate", "real",
                                            "symmetric"};
        if (lower != want)
            throw ParseError(path, number,
                             "expected header '%%MatrixMarket matrix coordinate real symmetric'");
    }

    Eigen::Index n = -1;
    long long nnz = -1;
    long long seen = 0;
    DenseMatrix m;
    std::vector<char> filled;
    while (std::getline(in, text)) {
        ++number;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        const auto body = trim(text);
        if (body.empty() || body.front() == '%') continue;
        const auto tok = split_ws(body);
        if (n < 0) {
            if (tok.size() != 3) throw ParseError(path, number, "expected 'rows cols nnz'");
            const auto r = parse_int(tok[0]), c = parse_int(tok[1]), z = parse_int(tok[2]);
            if (!r || !c || !z || *r < 1 || *c < 1 || *z < 0)
                throw ParseError(path, number, "invalid size line");
            if (*r != *c) throw ParseError(path, number, "symmetric matrix must be square");
            n = static_cast<Eigen::Index>(*r);
            nnz = *z;
            m = DenseMatrix::Zero(n, n);
            filled.assign(static_cast<std::size_t>(n * n), 0);
            continue;
        }
        if (tok.size() != 3) throw ParseError(path, number, "expected 'row col value'");
        const auto i = parse_int(tok[0]), j = parse_int(tok[1]);
        const auto v = parse_double(tok[2]);
        if (!i || !j || !v || !std::isfinite(*v)) throw ParseError(path, number, "invalid entry");
        if (*i < 1 || *j < 1 || *i > n || *j > n)
            throw ParseError(path, number, "index out of range");
        if (*i < *j) throw ParseError(path, number, "entry above the diagonal");
        const auto r = static_cast<Eigen::Index>(*i - 1), c = static_cast<Eigen::Index>(*j - 1);
        if (filled[static_cast<std::size_t>(r * n + c)])
            throw ParseError(path, number, "duplicate entry");
        filled[static_cast<std::size_t>(r * n + c)] = 1;
        m(r, c) = *v;
        m(c, r) = *v;
        ++seen;
    }
    if (n < 0) throw ParseError(path, number, "missing size line");
    if (seen != nnz)
        throw ParseError(path, number, fmt::format("expected {} entries, found {}", nnz, seen));
    return SymmetricMatrix(std::move(m));
}

/// n rows x m feature columns. A first line with non-numeric fields is a
/// header; when its last field is `label`, the last column holds integer
/// ground-truth labels.
inline Dataset read_features_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw ParseError(path, 0, "file is empty");

    std::size_t first = 0;
    bool has_label = false;
    std::size_t width = 0;
    {
        const auto fields = split(lines[0].text, ',');
        const bool numeric = std::all_of(fields.begin(), fields.end(),
                                         [](std::string_view f) { return parse_double(f).has_value(); });
        if (!numeric) {
            first = 1;
            width = fields.size();
            has_label = fields.back() == "label";
            if (has_label && fields.size() < 2)
                throw ParseError(path, lines[0].number, "header has no feature columns");
        }
    }

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t li = first; li < lines.size(); ++li) {
        const Line& line = lines[li];
        auto row = parse_numeric_row(path, line, width);
        width = row.size();
        if (has_label) {
            const double l = row.back();
            if (l < 0 || l != std::floor(l) || l > 1e9)
                throw ParseError(path, line.number, "label must be a non-negative integer");
            labels.push_back(static_cast<int>(l));
            row.pop_back();
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path, 0, "no data rows");

    Dataset ds;
    ds.features = rows_to_matrix(rows);
    if (has_label) ds.truth_labels = std::move(labels);
    return ds;
}

// One non-negative integer per line.
inline std::vector<int> read_labels(const std::string& path) {
    std::vector<int> labels;
    for (const auto& line : read_lines(path)) {
        const auto v = parse_int(line.text);
        if (!v || *v < 0 || *v > 1000000000)
            throw ParseError(path, line.number, "label must be a non-negative integer");
        labels.push_back(static_cast<int>(*v));
    }
    return labels;
}

inline void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string matrix_csv(const DenseMatrix& m) {
    std::string s;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) s += ',';
            s += format_double(m(i, j));
        }
        s += '\n';
    }
    return s;
}

inline std::string labels_csv(const LabelVector& labels) {
    std::string s;
    for (int l : labels.values()) s += fmt::format("{}\n", l);
    return s;
}

inline constexpr std::string_view kTraceHeader =
    "iter,objective,rel_error,stepsize,lipschitz,split_gap,wall_ms";

inline std::string trace_csv(const SolveTrace& trace, bool with_timing) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    std::string s(kTraceHeader);
    s += '\n';
    for (const auto& r : trace.records) {
        s += fmt::format("{},{},{},{},{},{},{}\n", r.iter, format_double(r.objective),
                         format_double(r.rel_error), opt(r.stepsize), opt(r.lipschitz),
                         opt(r.split_gap), with_timing ? format_double(r.wall_ms) : std::string());
    }
    return s;
}

}  // namespace symfact::io
