#include "sparseforge/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace sparseforge {

QrelSet read_qrels(std::istream& in) {
    QrelSet qrels;
    std::string line;
    std::uint64_t record = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string qid, docid;
        int rel;
        if (!std::getline(fields, qid, '\t') || !std::getline(fields, docid, '\t') ||
            !(fields >> rel))
            throw io_error("bad qrels line " + std::to_string(record));
        if (rel > 0)
            qrels[qid].positives.insert(docid);
        else
            qrels[qid].negatives.insert(docid);
        ++record;
    }
    for (const auto& [qid, q] : qrels)
        for (const auto& d : q.positives)
            if (q.negatives.count(d))
                throw io_error("doc " + d + " both positive and negative for " + qid);
    return qrels;
}

double flops_metric(const InvertedIndex& index, const std::vector<SparseVector>& queries) {
    if (queries.empty()) throw validation_error("empty query set");
    if (index.doc_count == 0) throw validation_error("empty corpus");
    double numerator = 0.0;
    for (const auto& q : queries) {
        for (const auto& [term, weight] : q.entries) {
            auto it = index.postings.find(term);
            if (it != index.postings.end())
                numerator += static_cast<double>(it->second.size());
        }
    }
    return numerator /
           (static_cast<double>(queries.size()) * static_cast<double>(index.doc_count));
}

namespace {

// per-query contribution, or -1 when the query has no positives (skipped)
double query_rr(const RunEntry& entry, const QrelSet& qrels, std::size_t k) {
    auto it = qrels.find(entry.qid);
    if (it == qrels.end() || it->second.positives.empty()) return -1.0;
    const std::size_t depth = std::min(k, entry.ranked_docs.size());
    for (std::size_t r = 0; r < depth; ++r)
        if (it->second.positives.count(entry.ranked_docs[r]))
            return 1.0 / static_cast<double>(r + 1);
    return 0.0;
}

double query_recall(const RunEntry& entry, const QrelSet& qrels, std::size_t k) {
    auto it = qrels.find(entry.qid);
    if (it == qrels.end() || it->second.positives.empty()) return -1.0;
    const std::size_t depth = std::min(k, entry.ranked_docs.size());
    std::size_t found = 0;
    for (std::size_t r = 0; r < depth; ++r)
        if (it->second.positives.count(entry.ranked_docs[r])) ++found;
    return static_cast<double>(found) / static_cast<double>(it->second.positives.size());
}

}  // namespace

double mrr_at_k(const std::vector<RunEntry>& run, const QrelSet& qrels, std::size_t k,
                std::uint64_t* warnings) {
    std::unordered_map<std::string, const RunEntry*> by_qid;
    for (const auto& e : run) by_qid.emplace(e.qid, &e);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [qid, q] : qrels) {
        if (q.positives.empty()) continue;
        ++n;
        auto it = by_qid.find(qid);
        if (it == by_qid.end()) {
            if (warnings) ++*warnings;
            continue;  // counted as 0
        }
        sum += query_rr(*it->second, qrels, k);
    }
    if (n == 0) throw validation_error("no evaluable queries");
    return sum / static_cast<double>(n);
}

double recall_at_k(const std::vector<RunEntry>& run, const QrelSet& qrels, std::size_t k,
                   std::uint64_t* warnings) {
    std::unordered_map<std::string, const RunEntry*> by_qid;
    for (const auto& e : run) by_qid.emplace(e.qid, &e);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [qid, q] : qrels) {
        if (q.positives.empty()) continue;
        ++n;
        auto it = by_qid.find(qid);
        if (it == by_qid.end()) {
            if (warnings) ++*warnings;
            continue;
        }
        sum += query_recall(*it->second, qrels, k);
    }
    if (n == 0) throw validation_error("no evaluable queries");
    return sum / static_cast<double>(n);
}

double matched_term_ratio(const std::vector<std::string>& query_tokens,
                          const std::vector<std::string>& title_tokens) {
    if (query_tokens.empty()) throw validation_error("empty query");
    std::set<std::string> q(query_tokens.begin(), query_tokens.end());
    std::set<std::string> t(title_tokens.begin(), title_tokens.end());
    std::size_t matched = 0;
    for (const auto& tok : q)
        if (t.count(tok)) ++matched;
    return static_cast<double>(matched) / static_cast<double>(q.size());
}

std::vector<int> quantile_buckets(const std::vector<double>& ratios) {
    const std::size_t n = ratios.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (ratios[a] != ratios[b]) return ratios[a] < ratios[b];
        return a < b;
    });
    std::vector<int> bucket(n, 0);
    for (std::size_t pos = 0; pos < n; ++pos)
        bucket[order[pos]] = static_cast<int>(pos * 3 / std::max<std::size_t>(n, 1));
    return bucket;
}

EvalReport evaluate(const InvertedIndex& index, const std::vector<SparseVector>& queries,
                    const QrelSet& qrels, std::size_t qk, std::size_t top_n) {
    EvalReport report;
    report.qk = qk;
    report.dk = index.manifest.dk;
    report.query_count = queries.size();

    std::vector<SparseVector> pruned;
    pruned.reserve(queries.size());
    double l0_q = 0.0;
    for (const auto& q : queries) {
        pruned.push_back(prune(q, qk));
        l0_q += static_cast<double>(pruned.back().l0());
    }
    report.avg_l0_q = queries.empty() ? 0.0 : l0_q / static_cast<double>(queries.size());
    report.avg_l0_d = index.doc_count == 0
                          ? 0.0
                          : static_cast<double>(index.postings_total()) /
                                static_cast<double>(index.doc_count);
    report.flops = flops_metric(index, pruned);

    SearchOptions opts;
    opts.qk = 0;  // already pruned above
    opts.top_n = top_n;
    std::vector<RunEntry> run;
    run.reserve(queries.size());
    for (const auto& q : pruned) {
        SearchResult r = search(index, q, opts);
        RunEntry entry;
        entry.qid = q.source_id;
        for (const auto& [doc_id, score] : r.hits)
            entry.ranked_docs.push_back(index.manifest.doc_names.at(doc_id));
        run.push_back(std::move(entry));
    }

    report.mrr_at_10 = mrr_at_k(run, qrels, 10, &report.warnings);
    report.r_at_10 = recall_at_k(run, qrels, 10);
    report.r_at_100 = recall_at_k(run, qrels, 100);
    for (const auto& entry : run) {
        if (!qrels.count(entry.qid) || qrels.at(entry.qid).positives.empty()) continue;
        report.per_query.push_back({entry.qid, query_rr(entry, qrels, 10),
                                    query_recall(entry, qrels, 10),
                                    query_recall(entry, qrels, 100)});
    }
    return report;
}

void write_report(std::ostream& out, const EvalReport& report) {
    nlohmann::ordered_json j;
    j["qk"] = report.qk;
    j["dk"] = report.dk;
    j["L0_q"] = report.avg_l0_q;
    j["L0_d"] = report.avg_l0_d;
    j["FLOPS"] = report.flops;
    j["MRR@10"] = report.mrr_at_10;
    j["R@10"] = report.r_at_10;
    j["R@100"] = report.r_at_100;
    j["queries"] = report.query_count;
    j["warnings"] = report.warnings;
    auto per_query = nlohmann::ordered_json::array();
    for (const auto& pq : report.per_query)
        per_query.push_back({{"qid", pq.qid},
                             {"rr@10", pq.reciprocal_rank_10},
                             {"r@10", pq.recall_10},
                             {"r@100", pq.recall_100}});
    j["per_query"] = per_query;
    out << j.dump(2) << "\n";
}

}  // namespace sparseforge
