#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sparseforge/encode.hpp"

namespace sparseforge {

// Static top-k pruning budgets; 0 means unpruned.
struct PruneConfig {
    std::size_t qk = 0;
    std::size_t dk = 0;
};

// Keep the k highest-weight entries (ties: lower term_id); k = 0 is identity.
SparseVector prune(const SparseVector& vector, std::size_t k);

struct PruneSummary {
    std::uint64_t count = 0;
    std::optional<double> avg_l0_before;
    std::optional<double> avg_l0_after;
};

PruneSummary prune_corpus(const std::vector<SparseVector>& in, std::size_t k,
                          std::vector<SparseVector>& out);

}  // namespace sparseforge
