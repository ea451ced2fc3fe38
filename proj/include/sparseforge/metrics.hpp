#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sparseforge/index.hpp"

namespace sparseforge {

struct Qrels {
    std::set<std::string> positives;
    std::set<std::string> negatives;
};

using QrelSet = std::map<std::string, Qrels>;

// TSV: qid \t docid \t rel (1 = positive, -1 = labeled negative).
QrelSet read_qrels(std::istream& in);

// Ranked docid lists per query, in query order.
struct RunEntry {
    std::string qid;
    std::vector<std::string> ranked_docs;
};

struct EvalReport {
    double flops = 0.0;
    double mrr_at_10 = 0.0;
    double r_at_10 = 0.0;
    double r_at_100 = 0.0;
    double avg_l0_q = 0.0;
    double avg_l0_d = 0.0;
    std::size_t qk = 0;
    std::size_t dk = 0;
    std::uint64_t query_count = 0;
    std::uint64_t warnings = 0;  // evaluated queries missing from the run
    struct PerQuery {
        std::string qid;
        double reciprocal_rank_10;
        double recall_10;
        double recall_100;
    };
    std::vector<PerQuery> per_query;
};

// Eq-style efficiency proxy: sum of touched postings lengths per query,
// normalized by |Q| * |D|. Unindexed terms contribute 0.
double flops_metric(const InvertedIndex& index, const std::vector<SparseVector>& queries);

double mrr_at_k(const std::vector<RunEntry>& run, const QrelSet& qrels, std::size_t k,
                std::uint64_t* warnings = nullptr);

double recall_at_k(const std::vector<RunEntry>& run, const QrelSet& qrels, std::size_t k,
                   std::uint64_t* warnings = nullptr);

// |distinct query tokens present in title| / |distinct query tokens|.
double matched_term_ratio(const std::vector<std::string>& query_tokens,
                          const std::vector<std::string>& title_tokens);

// Splits queries into 3 equal-count buckets (sizes differ by at most 1) by
// ascending ratio; returns bucket index 0..2 per input position.
std::vector<int> quantile_buckets(const std::vector<double>& ratios);

EvalReport evaluate(const InvertedIndex& index, const std::vector<SparseVector>& queries,
                    const QrelSet& qrels, std::size_t qk, std::size_t top_n = 100);

void write_report(std::ostream& out, const EvalReport& report);

}  // namespace sparseforge
