#include "sparseforge/stats.hpp"

#include <algorithm>
#include <cmath>

namespace sparseforge {

void Moments::add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
}

void Moments::merge(const Moments& other) {
    if (other.n == 0) return;
    if (n == 0) {
        *this = other;
        return;
    }
    const double total = static_cast<double>(n + other.n);
    const double delta = other.mean - mean;
    m2 += other.m2 + delta * delta * static_cast<double>(n) *
                         static_cast<double>(other.n) / total;
    mean += delta * static_cast<double>(other.n) / total;
    n += other.n;
}

double Moments::variance(StdConvention conv) const {
    const std::uint64_t denom = conv == StdConvention::Population ? n : n - 1;
    if (denom == 0) return 0.0;
    return m2 / static_cast<double>(denom);
}

double Moments::stddev(StdConvention conv) const {
    return std::sqrt(std::max(0.0, variance(conv)));
}

std::optional<LogitScoreStd>
logit_score_std(const std::vector<ScoreRow>& rows, std::uint64_t threshold,
                StdConvention conv) {
    if (rows.empty()) throw validation_error("empty row stream");

    std::map<std::uint32_t, Moments> per_index;
    for (const ScoreRow& row : rows) {
        if (row.dense) {
            for (std::size_t i = 0; i < row.width; ++i)
                per_index[static_cast<std::uint32_t>(i)].add(row.dense_scores[i]);
        } else {
            for (const auto& [idx, score] : row.sparse_scores) per_index[idx].add(score);
        }
    }

    double sum = 0.0;
    std::uint64_t kept = 0;
    for (const auto& [idx, m] : per_index) {
        if (m.n < threshold) continue;
        sum += m.stddev(conv);
        ++kept;
    }
    if (kept == 0) return std::nullopt;
    return LogitScoreStd{sum / static_cast<double>(kept), kept};
}

std::optional<AvgStd>
doc_score_stats(const std::vector<std::vector<double>>& docs, std::size_t topk,
                StdConvention conv) {
    if (docs.empty()) return std::nullopt;
    double avg_sum = 0.0, std_sum = 0.0;
    for (const auto& doc : docs) {
        if (doc.empty()) throw validation_error("document without scores");
        std::vector<double> scores = doc;
        if (topk > 0 && topk < scores.size()) {
            std::nth_element(scores.begin(), scores.begin() + topk, scores.end(),
                             std::greater<double>());
            scores.resize(topk);
        }
        Moments m;
        for (double s : scores) m.add(s);
        avg_sum += m.mean;
        std_sum += m.stddev(conv);
    }
    const double n = static_cast<double>(docs.size());
    return AvgStd{avg_sum / n, std_sum / n};
}

AvgStd non_neg_terms_stats(const std::vector<std::vector<double>>& rows, StdConvention conv) {
    Moments m;
    for (const auto& row : rows) {
        std::size_t count = 0;
        for (double s : row)
            if (s >= 0.0) ++count;
        m.add(static_cast<double>(count));
    }
    return AvgStd{m.mean, m.stddev(conv)};
}

std::optional<double> l0_std(const std::vector<SparseVector>& vectors, StdConvention conv) {
    if (vectors.empty()) return std::nullopt;
    Moments m;
    for (const auto& v : vectors) m.add(static_cast<double>(v.l0()));
    return m.stddev(conv);
}

}  // namespace sparseforge
