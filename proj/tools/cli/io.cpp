#include "io.hpp"

#include "spheredepth/ingest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace spheredepth::cli {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& path, std::size_t line_no) {
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const auto comma = std::min(line.find(',', pos), line.size());
        const auto tok = trim(line.substr(pos, comma - pos));
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": bad number '" + tok + "'");
        }
        row.push_back(v);
        pos = comma + 1;
    }
    return row;
}

template <typename Fn>
void for_data_lines(const std::filesystem::path& path, Fn&& fn) {
    auto in = open_in(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        fn(t, line_no);
    }
}

}  // namespace

std::size_t PointSet::dim() const {
    if (size() == 0) return 0;
    return is_sparse ? sparse.front().dim() : dense.front().dim();
}

std::vector<std::vector<double>> read_real_rows(const std::filesystem::path& path) {
    std::vector<std::vector<double>> rows;
    for_data_lines(path, [&](const std::string& line, std::size_t line_no) {
        rows.push_back(parse_row(line, path, line_no));
        if (rows.back().size() != rows.front().size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(rows.front().size()) + " columns");
        }
    });
    if (rows.empty()) throw std::runtime_error(path.string() + ": no data rows");
    return rows;
}

std::vector<UnitVector> read_dense_points(const std::filesystem::path& path) {
    std::vector<UnitVector> points;
    std::size_t dim = 0;
    for_data_lines(path, [&](const std::string& line, std::size_t line_no) {
        const auto row = parse_row(line, path, line_no);
        if (dim == 0) dim = row.size();
        if (row.size() != dim) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(dim) + " columns");
        }
        try {
            points.push_back(normalize(row));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    });
    if (points.empty()) throw std::runtime_error(path.string() + ": no data rows");
    return points;
}

PointSet read_points(const std::filesystem::path& path) {
    PointSet set;
    if (ingest::looks_like_cluto(path)) {
        set.is_sparse = true;
        set.sparse = ingest::normalize_rows(ingest::read_cluto_matrix(path));
    } else {
        set.dense = read_dense_points(path);
    }
    return set;
}

std::string format_real(double x) {
    if (std::isnan(x)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_points(std::ostream& out, const std::vector<UnitVector>& points) {
    for (const auto& p : points) {
        for (std::size_t j = 0; j < p.dim(); ++j) {
            if (j > 0) out << ',';
            out << format_real(p[j]);
        }
        out << '\n';
    }
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    for_data_lines(path, [&](const std::string& line, std::size_t) { lines.push_back(line); });
    return lines;
}

}  // namespace spheredepth::cli
