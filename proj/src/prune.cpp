#include "sparseforge/prune.hpp"

#include <algorithm>

namespace sparseforge {

SparseVector prune(const SparseVector& vector, std::size_t k) {
    if (k == 0 || vector.entries.size() <= k) return vector;

    std::vector<std::pair<std::uint32_t, double>> entries(vector.entries.begin(),
                                                          vector.entries.end());
    std::nth_element(entries.begin(), entries.begin() + k, entries.end(),
                     [](const auto& a, const auto& b) {
                         if (a.second != b.second) return a.second > b.second;
                         return a.first < b.first;
                     });
    SparseVector out;
    out.source_id = vector.source_id;
    out.entries.insert(entries.begin(), entries.begin() + k);
    return out;
}

PruneSummary prune_corpus(const std::vector<SparseVector>& in, std::size_t k,
                          std::vector<SparseVector>& out) {
    PruneSummary summary;
    double before = 0.0, after = 0.0;
    out.clear();
    out.reserve(in.size());
    for (const auto& v : in) {
        before += static_cast<double>(v.l0());
        out.push_back(prune(v, k));
        after += static_cast<double>(out.back().l0());
        ++summary.count;
    }
    if (summary.count > 0) {
        summary.avg_l0_before = before / static_cast<double>(summary.count);
        summary.avg_l0_after = after / static_cast<double>(summary.count);
    }
    return summary;
}

}  // namespace sparseforge
