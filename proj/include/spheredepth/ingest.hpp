#pragma once

#include "spheredepth/partition.hpp"
#include "spheredepth/sphere.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

/// Sparse document-term matrices in CLUTO format and class label files.
namespace spheredepth::ingest {

/// Malformed input. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Raw (unnormalized) rows with 0-based, strictly increasing columns.
struct SparseMatrix {
    using Row = std::vector<SparseUnitVector::Entry>;

    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::size_t nnz = 0;
    std::vector<Row> rows;
};

/// Header `n_rows n_cols nnz`, then one line per row of `col value` pairs
/// with 1-based columns. An empty line is a row without entries.
SparseMatrix parse_cluto_matrix(std::istream& in);
SparseMatrix read_cluto_matrix(const std::filesystem::path& path);

/// Values are written with 17 significant digits, so reading back is exact.
void write_cluto_matrix(const SparseMatrix& m, std::ostream& out);
void write_cluto_matrix(const SparseMatrix& m, const std::filesystem::path& path);

/// True when the first non-blank, non-`#` line consists of exactly three
/// non-negative integers and no comma.
bool looks_like_cluto(const std::filesystem::path& path);

/// Each row divided by its L2 norm. Throws DegenerateVector naming the
/// document index when a row has no nonzero entry.
std::vector<SparseUnitVector> normalize_rows(const SparseMatrix& m, std::size_t workers = 1);

/// Fraction of the n_rows x n_cols cells not stored.
double zero_fraction(const SparseMatrix& m);

struct ClassCount {
    std::string name;
    std::size_t count;
    double proportion;
};

struct LabelFile {
    std::vector<std::string> labels;
    /// Class ids in order of first appearance.
    Partition partition;
    /// Indexed by class id.
    std::vector<ClassCount> classes;
};

/// One class name per line (surrounding whitespace trimmed); blank lines and
/// lines starting with `#` are skipped. Exactly n labels are required.
LabelFile parse_labels(std::istream& in, std::size_t n);
LabelFile read_labels(const std::filesystem::path& path, std::size_t n);

/// CSV `class,count,proportion`, one row per class in id order.
void write_class_report(const LabelFile& labels, std::ostream& out);

}  // namespace spheredepth::ingest
