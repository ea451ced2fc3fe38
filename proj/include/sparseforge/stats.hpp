#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "sparseforge/encode.hpp"

namespace sparseforge {

enum class StdConvention { Population, Sample };

// Mergeable running-moments accumulator (Welford).
struct Moments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const Moments& other);
    double variance(StdConvention conv = StdConvention::Population) const;
    double stddev(StdConvention conv = StdConvention::Population) const;
};

// A score row: sparse (present entries only) or dense over |U|.
struct ScoreRow {
    bool dense = false;
    std::size_t width = 0;                                // dense width
    std::vector<double> dense_scores;                     // when dense
    std::map<std::uint32_t, double> sparse_scores;        // when sparse
};

struct LogitScoreStd {
    double std = 0.0;        // mean of per-index stds over kept indices
    std::uint64_t logit_cnt = 0;
};

// Per logit index, std of its scores across rows where it appears; kept
// indices need >= threshold occurrences. Result is the unweighted mean of
// those stds.
std::optional<LogitScoreStd>
logit_score_std(const std::vector<ScoreRow>& rows, std::uint64_t threshold,
                StdConvention conv = StdConvention::Population);

struct AvgStd {
    double avg = 0.0;
    double std = 0.0;
};

// Per document, mean/std of its top-k scores (all when k = 0 or k exceeds the
// count); reported values are unweighted means of the per-document stats.
std::optional<AvgStd>
doc_score_stats(const std::vector<std::vector<double>>& docs, std::size_t topk,
                StdConvention conv = StdConvention::Population);

// Mean/std of per-row counts of entries >= 0 (zero counts as non-negative).
AvgStd non_neg_terms_stats(const std::vector<std::vector<double>>& rows,
                           StdConvention conv = StdConvention::Population);

std::optional<double> l0_std(const std::vector<SparseVector>& vectors,
                             StdConvention conv = StdConvention::Population);

}  // namespace sparseforge
