#pragma once

#include "spheredepth/partition.hpp"
#include "spheredepth/random.hpp"
#include "spheredepth/sphere.hpp"
#include "spheredepth/vmf.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <unistd.h>
#include <numbers>
#include <string>
#include <vector>

namespace testsupport {

using namespace spheredepth;

inline UnitVector basis(std::size_t d, std::size_t i, double sign = 1.0) {
    std::vector<double> v(d, 0.0);
    v[i] = sign;
    return UnitVector(v);
}

inline std::vector<UnitVector> uniform_points(std::size_t d, std::size_t n, std::uint64_t seed) {
    return vmf::sample_uniform(d, n, seed);
}

/// Labels in [0, k) with every cluster non-empty.
inline Partition random_partition(std::size_t n, int k, Rng& rng) {
    std::vector<int> labels(n);
    std::uniform_int_distribution<int> pick(0, k - 1);
    for (auto& l : labels) l = pick(rng);
    for (int c = 0; c < k && static_cast<std::size_t>(c) < n; ++c) labels[static_cast<std::size_t>(c)] = c;
    return Partition::from_any_labels(labels);
}

/// Points from K vMF clouds with uniformly drawn centers; labels aligned.
struct Mixture {
    std::vector<UnitVector> points;
    std::vector<int> labels;
};

inline Mixture vmf_mixture(std::size_t d, std::size_t k, std::size_t per_cluster, double kappa, std::uint64_t seed) {
    Rng rng(seed);
    Mixture m;
    for (std::size_t c = 0; c < k; ++c) {
        const vmf::VmfParams p(vmf::draw_uniform(d, rng), kappa);
        for (std::size_t i = 0; i < per_cluster; ++i) {
            m.points.push_back(vmf::draw(p, rng));
            m.labels.push_back(static_cast<int>(c));
        }
    }
    return m;
}

/// Two vMF clouds around e1 and -e1.
inline Mixture antipodal_clouds(std::size_t d, std::size_t per_cluster, double kappa, std::uint64_t seed) {
    Rng rng(seed);
    Mixture m;
    for (int c = 0; c < 2; ++c) {
        const vmf::VmfParams p(basis(d, 0, c == 0 ? 1.0 : -1.0), kappa);
        for (std::size_t i = 0; i < per_cluster; ++i) {
            m.points.push_back(vmf::draw(p, rng));
            m.labels.push_back(c);
        }
    }
    return m;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("spheredepth-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const { return path_ / name; }

    std::filesystem::path write(const std::string& name, const std::string& content) const {
        const auto p = file(name);
        std::ofstream(p) << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testsupport
