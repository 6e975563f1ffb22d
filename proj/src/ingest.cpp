#include "spheredepth/ingest.hpp"

#include "spheredepth/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string_view>

namespace spheredepth::ingest {

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) tokens.push_back(s.substr(start, i - start));
    }
    return tokens;
}

bool parse_size(std::string_view tok, std::size_t& out) {
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_real(std::string_view tok, double& out) {
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

}  // namespace

SparseMatrix parse_cluto_matrix(std::istream& in) {
    SparseMatrix m;
    std::string line;
    std::size_t line_no = 0;

    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto tokens = split_ws(line);
        if (tokens.size() != 3 || !parse_size(tokens[0], m.n_rows) || !parse_size(tokens[1], m.n_cols) ||
            !parse_size(tokens[2], m.nnz)) {
            throw ParseError("malformed header, expected `n_rows n_cols nnz`", line_no);
        }
        have_header = true;
        break;
    }
    if (!have_header) throw ParseError("empty matrix file", 0);

    m.rows.reserve(m.n_rows);
    std::size_t stored = 0;
    while (m.rows.size() < m.n_rows && std::getline(in, line)) {
        ++line_no;
        const auto tokens = split_ws(line);
        if (tokens.size() % 2 != 0) throw ParseError("odd number of tokens, trailing `" + std::string(tokens.back()) + "`", line_no);
        SparseMatrix::Row row;
        row.reserve(tokens.size() / 2);
        for (std::size_t t = 0; t < tokens.size(); t += 2) {
            std::size_t col = 0;
            double value = 0.0;
            if (!parse_size(tokens[t], col)) {
                throw ParseError("bad column index `" + std::string(tokens[t]) + "`", line_no);
            }
            if (col < 1 || col > m.n_cols) {
                throw ParseError("column index " + std::to_string(col) + " outside 1.." + std::to_string(m.n_cols),
                                 line_no);
            }
            if (!parse_real(tokens[t + 1], value)) {
                throw ParseError("bad value `" + std::string(tokens[t + 1]) + "`", line_no);
            }
            row.push_back({static_cast<std::uint32_t>(col - 1), value});
        }
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
        for (std::size_t k = 1; k < row.size(); ++k) {
            if (row[k].index == row[k - 1].index) {
                throw ParseError("duplicate column " + std::to_string(row[k].index + 1), line_no);
            }
        }
        stored += row.size();
        m.rows.push_back(std::move(row));
    }
    if (m.rows.size() != m.n_rows) {
        throw ParseError("expected " + std::to_string(m.n_rows) + " rows, found " + std::to_string(m.rows.size()),
                         line_no);
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (!blank(line)) throw ParseError("unexpected content after the last row", line_no);
    }
    if (stored != m.nnz) {
        throw ParseError("header declares nnz=" + std::to_string(m.nnz) + " but " + std::to_string(stored) +
                             " entries were read",
                         line_no);
    }
    return m;
}

SparseMatrix read_cluto_matrix(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_cluto_matrix(in);
}

void write_cluto_matrix(const SparseMatrix& m, std::ostream& out) {
    out << m.n_rows << ' ' << m.n_cols << ' ' << m.nnz << '\n';
    out << std::setprecision(17);
    for (const auto& row : m.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k > 0) out << ' ';
            out << row[k].index + 1 << ' ' << row[k].value;
        }
        out << '\n';
    }
}

void write_cluto_matrix(const SparseMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_cluto_matrix(m, out);
}

bool looks_like_cluto(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (blank(line) || line.find_first_not_of(" \t") == line.find('#')) continue;
        if (line.find(',') != std::string::npos) return false;
        const auto tokens = split_ws(line);
        std::size_t v = 0;
        return tokens.size() == 3 &&
               std::all_of(tokens.begin(), tokens.end(), [&](std::string_view t) { return parse_size(t, v); });
    }
    return false;
}

std::vector<SparseUnitVector> normalize_rows(const SparseMatrix& m, std::size_t workers) {
    std::vector<std::optional<SparseUnitVector>> slots(m.rows.size());
    parallel_for(m.rows.size(), workers, [&](std::size_t i) {
        const auto& row = m.rows[i];
        const bool empty = std::none_of(row.begin(), row.end(), [](const auto& e) { return e.value != 0.0; });
        if (empty) throw DegenerateVector("document " + std::to_string(i) + " has no nonzero entries");
        slots[i].emplace(normalize_sparse(m.n_cols, row));
    });
    std::vector<SparseUnitVector> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

double zero_fraction(const SparseMatrix& m) {
    const double cells = static_cast<double>(m.n_rows) * static_cast<double>(m.n_cols);
    if (cells == 0.0) return 0.0;
    std::size_t stored = 0;
    for (const auto& row : m.rows) {
        for (const auto& e : row) stored += e.value != 0.0;
    }
    return 1.0 - static_cast<double>(stored) / cells;
}

LabelFile parse_labels(std::istream& in, std::size_t n) {
    std::vector<std::string> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        labels.push_back(line.substr(first, last - first + 1));
        if (labels.size() > n) throw ParseError("more than the expected " + std::to_string(n) + " labels", line_no);
    }
    if (labels.size() != n) {
        throw ParseError("expected " + std::to_string(n) + " labels, found " + std::to_string(labels.size()), 0);
    }
    if (n == 0) throw ParseError("label file is empty", 0);

    std::vector<ClassCount> classes;
    std::vector<int> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = std::find_if(classes.begin(), classes.end(), [&](const auto& c) { return c.name == labels[i]; });
        if (it == classes.end()) {
            classes.push_back({labels[i], 0, 0.0});
            it = classes.end() - 1;
        }
        ++it->count;
        ids[i] = static_cast<int>(it - classes.begin());
    }
    for (auto& c : classes) c.proportion = static_cast<double>(c.count) / static_cast<double>(n);
    return LabelFile{std::move(labels), Partition(std::move(ids)), std::move(classes)};
}

LabelFile read_labels(const std::filesystem::path& path, std::size_t n) {
    auto in = open_in(path);
    return parse_labels(in, n);
}

void write_class_report(const LabelFile& labels, std::ostream& out) {
    out << "class,count,proportion\n";
    for (const auto& c : labels.classes) {
        out << c.name << ',' << c.count << ',' << std::fixed << std::setprecision(4) << c.proportion
            << std::defaultfloat << '\n';
    }
}

}  // namespace spheredepth::ingest
