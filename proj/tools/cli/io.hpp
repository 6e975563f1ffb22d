#pragma once

#include "spheredepth/sphere.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace spheredepth::cli {

/// Bad flags or flag combinations; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Points loaded from disk, either dense CSV or CLUTO sparse.
struct PointSet {
    std::vector<UnitVector> dense;
    std::vector<SparseUnitVector> sparse;
    bool is_sparse = false;

    std::size_t size() const { return is_sparse ? sparse.size() : dense.size(); }
    std::size_t dim() const;
};

/// Headerless CSV, one point per row; blank and `#` lines are skipped. Rows
/// are L2-normalized.
std::vector<UnitVector> read_dense_points(const std::filesystem::path& path);

/// Dense CSV or, when the header shape matches, CLUTO sparse.
PointSet read_points(const std::filesystem::path& path);

void write_points(std::ostream& out, const std::vector<UnitVector>& points);

/// Non-empty lines, trimmed, `#` lines skipped.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Rows of comma-separated reals (membership matrices).
std::vector<std::vector<double>> read_real_rows(const std::filesystem::path& path);

std::string format_real(double x);

}  // namespace spheredepth::cli
