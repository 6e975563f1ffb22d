#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spheredepth {

/// Crisp partition of n points into K non-empty clusters labelled 0..K-1.
class Partition {
public:
    /// Labels must cover exactly {0, ..., K-1}; throws std::invalid_argument
    /// otherwise.
    explicit Partition(std::vector<int> labels);

    /// Relabel arbitrary integer ids to 0..K-1 in order of first appearance.
    static Partition from_any_labels(std::span<const int> raw);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t num_clusters() const noexcept { return sizes_.size(); }
    std::span<const int> labels() const noexcept { return labels_; }
    int label(std::size_t i) const { return labels_[i]; }
    std::span<const std::size_t> cluster_sizes() const noexcept { return sizes_; }

    /// Member indices of each cluster, ascending.
    std::vector<std::vector<std::size_t>> members() const;

    friend bool operator==(const Partition& a, const Partition& b) { return a.labels_ == b.labels_; }

private:
    std::vector<int> labels_;
    std::vector<std::size_t> sizes_;
};

}  // namespace spheredepth
