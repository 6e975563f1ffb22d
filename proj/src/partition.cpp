#include "spheredepth/partition.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace spheredepth {

Partition::Partition(std::vector<int> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw std::invalid_argument("Partition: no labels");
    const int max_label = *std::max_element(labels_.begin(), labels_.end());
    const int min_label = *std::min_element(labels_.begin(), labels_.end());
    if (min_label < 0) throw std::invalid_argument("Partition: negative label");
    sizes_.assign(static_cast<std::size_t>(max_label) + 1, 0);
    for (int l : labels_) ++sizes_[static_cast<std::size_t>(l)];
    for (std::size_t k = 0; k < sizes_.size(); ++k) {
        if (sizes_[k] == 0) {
            throw std::invalid_argument("Partition: cluster " + std::to_string(k) + " is empty");
        }
    }
}

Partition Partition::from_any_labels(std::span<const int> raw) {
    std::unordered_map<int, int> ids;
    std::vector<int> labels;
    labels.reserve(raw.size());
    for (int r : raw) {
        auto [it, inserted] = ids.try_emplace(r, static_cast<int>(ids.size()));
        labels.push_back(it->second);
    }
    return Partition(std::move(labels));
}

std::vector<std::vector<std::size_t>> Partition::members() const {
    std::vector<std::vector<std::size_t>> out(sizes_.size());
    for (std::size_t k = 0; k < sizes_.size(); ++k) out[k].reserve(sizes_[k]);
    for (std::size_t i = 0; i < labels_.size(); ++i) out[static_cast<std::size_t>(labels_[i])].push_back(i);
    return out;
}

}  // namespace spheredepth
