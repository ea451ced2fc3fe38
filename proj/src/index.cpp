#include "sparseforge/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include <json.hpp>

namespace sparseforge {

namespace {

template <typename T>
void write_le(std::ostream& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.write(buf, sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    char buf[sizeof(T)];
    in.read(buf, sizeof(T));
    if (!in) throw io_error("truncated index file");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

constexpr std::uint32_t kIndexVersion = 1;

}  // namespace

std::uint64_t InvertedIndex::postings_total() const {
    std::uint64_t total = 0;
    for (const auto& [term, list] : postings) total += list.size();
    return total;
}

InvertedIndex build_index(const std::vector<SparseVector>& docs, std::size_t dk,
                          std::uint64_t vocab_hash) {
    InvertedIndex index;
    index.manifest.dk = dk;
    index.manifest.vocab_hash = vocab_hash;

    std::unordered_set<std::string> seen;
    for (const auto& doc : docs) {
        if (!seen.insert(doc.source_id).second)
            throw validation_error("duplicate doc_id: " + doc.source_id);
        const std::uint64_t doc_id = index.doc_count++;
        index.manifest.doc_names.push_back(doc.source_id);
        SparseVector pruned = prune(doc, dk);
        for (const auto& [term, weight] : pruned.entries)
            index.postings[term].push_back({doc_id, static_cast<float>(weight)});
    }
    // inserts run in doc_id order, so lists arrive sorted
    return index;
}

SearchResult search(const InvertedIndex& index, const SparseVector& q,
                    const SearchOptions& opts) {
    if (opts.top_n == 0) throw validation_error("top_n must be >= 1");
    if (opts.expected_vocab_hash != 0 && index.manifest.vocab_hash != 0 &&
        opts.expected_vocab_hash != index.manifest.vocab_hash)
        throw validation_error("query/index vocabulary mismatch");

    const SparseVector pruned = prune(q, opts.qk);

    std::vector<double> score(index.doc_count, 0.0);
    std::vector<std::uint32_t> matched(index.doc_count, 0);
    std::vector<std::uint64_t> touched;
    for (const auto& [term, weight] : pruned.entries) {
        auto it = index.postings.find(term);
        if (it == index.postings.end()) continue;
        for (const Posting& p : it->second) {
            if (matched[p.doc_id] == 0) touched.push_back(p.doc_id);
            ++matched[p.doc_id];
            score[p.doc_id] += weight * static_cast<double>(p.weight);
        }
    }

    SearchResult result;
    result.matched_count = touched.size();

    std::vector<std::pair<std::uint64_t, double>> hits;
    hits.reserve(touched.size());
    const double distinct_terms = static_cast<double>(pruned.l0());
    for (std::uint64_t d : touched) {
        if (opts.mode == MatchMode::OverlapThreshold && distinct_terms > 0.0) {
            const double ratio = static_cast<double>(matched[d]) / distinct_terms;
            if (ratio < opts.theta) continue;
        }
        hits.emplace_back(d, score[d]);
    }

    const std::size_t n = std::min(opts.top_n, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + n, hits.end(),
                      [](const auto& a, const auto& b) {
                          if (a.second != b.second) return a.second > b.second;
                          return a.first < b.first;
                      });
    hits.resize(n);
    result.hits = std::move(hits);
    return result;
}

std::optional<PostingsStats> postings_stats(const InvertedIndex& index) {
    std::uint64_t lists = 0;
    double sum = 0.0;
    for (const auto& [term, list] : index.postings) {
        if (list.empty()) continue;
        ++lists;
        sum += static_cast<double>(list.size());
    }
    if (lists == 0) return std::nullopt;
    const double mean = sum / static_cast<double>(lists);
    double sq = 0.0;
    for (const auto& [term, list] : index.postings) {
        if (list.empty()) continue;
        const double d = static_cast<double>(list.size()) - mean;
        sq += d * d;
    }
    PostingsStats stats;
    stats.lists = lists;
    stats.mean = mean;
    stats.variance = sq / static_cast<double>(lists);
    stats.stddev = std::sqrt(stats.variance);
    return stats;
}

void write_index(std::ostream& out, const InvertedIndex& index) {
    out.write("SFIX", 4);
    write_le<std::uint32_t>(out, kIndexVersion);
    write_le<std::uint64_t>(out, index.doc_count);

    nlohmann::ordered_json manifest;
    manifest["dk"] = index.manifest.dk;
    manifest["vocab_hash"] = index.manifest.vocab_hash;
    manifest["doc_names"] = index.manifest.doc_names;
    const std::string blob = manifest.dump();
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(blob.size()));
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));

    for (const auto& [term, list] : index.postings) {
        write_le<std::uint32_t>(out, term);
        write_le<std::uint64_t>(out, list.size());
        for (const Posting& p : list) {
            write_le<std::uint64_t>(out, p.doc_id);
            write_le<float>(out, p.weight);
        }
    }
}

InvertedIndex read_index(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "SFIX", 4) != 0) throw io_error("bad index file magic");
    const auto version = read_le<std::uint32_t>(in);
    if (version != kIndexVersion) throw io_error("unsupported index version");

    InvertedIndex index;
    index.doc_count = read_le<std::uint64_t>(in);
    const auto blob_len = read_le<std::uint32_t>(in);
    std::string blob(blob_len, '\0');
    in.read(blob.data(), blob_len);
    if (!in) throw io_error("truncated index manifest");
    nlohmann::json manifest = nlohmann::json::parse(blob);
    index.manifest.dk = manifest.at("dk").get<std::size_t>();
    index.manifest.vocab_hash = manifest.at("vocab_hash").get<std::uint64_t>();
    index.manifest.doc_names = manifest.at("doc_names").get<std::vector<std::string>>();

    while (in.peek() != EOF) {
        const auto term = read_le<std::uint32_t>(in);
        const auto len = read_le<std::uint64_t>(in);
        auto& list = index.postings[term];
        list.reserve(len);
        for (std::uint64_t i = 0; i < len; ++i) {
            Posting p;
            p.doc_id = read_le<std::uint64_t>(in);
            p.weight = read_le<float>(in);
            list.push_back(p);
        }
    }
    return index;
}

void write_trec_run(std::ostream& out, const std::string& qid, const SearchResult& result,
                    const IndexManifest& manifest, const std::string& tag) {
    char buf[32];
    for (std::size_t rank = 0; rank < result.hits.size(); ++rank) {
        const auto& [doc_id, score] = result.hits[rank];
        std::snprintf(buf, sizeof(buf), "%.6g", score);
        out << qid << " Q0 " << manifest.doc_names.at(doc_id) << ' ' << (rank + 1) << ' '
            << buf << ' ' << tag << "\n";
    }
}

}  // namespace sparseforge
