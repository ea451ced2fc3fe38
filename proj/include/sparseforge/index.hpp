#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sparseforge/encode.hpp"
#include "sparseforge/prune.hpp"

namespace sparseforge {

struct Posting {
    std::uint64_t doc_id;  // dense internal id, 0..doc_count-1
    float weight;
};

struct IndexManifest {
    std::size_t dk = 0;
    std::uint64_t vocab_hash = 0;           // 0 when unknown
    std::vector<std::string> doc_names;     // by internal doc_id
};

struct InvertedIndex {
    std::map<std::uint32_t, std::vector<Posting>> postings;  // ascending term_id
    std::uint64_t doc_count = 0;
    IndexManifest manifest;

    std::uint64_t postings_total() const;
};

// Applies document pruning at dk, then inserts every (term, doc, weight).
// Document ids must be unique.
InvertedIndex build_index(const std::vector<SparseVector>& docs, std::size_t dk,
                          std::uint64_t vocab_hash = 0);

enum class MatchMode { Dot, OverlapThreshold };

struct SearchOptions {
    std::size_t qk = 0;
    std::size_t top_n = 10;
    MatchMode mode = MatchMode::Dot;
    double theta = 0.0;                      // overlap threshold in [0,1]
    std::uint64_t expected_vocab_hash = 0;   // 0 skips the manifest check
};

struct SearchResult {
    std::vector<std::pair<std::uint64_t, double>> hits;  // (doc_id, score) desc, ties doc asc
    std::uint64_t matched_count = 0;                     // docs touched before thresholding
};

// Term-at-a-time in ascending term_id; dot scores accumulate in that order so
// rankings are reproducible bit for bit.
SearchResult search(const InvertedIndex& index, const SparseVector& q,
                    const SearchOptions& opts);

struct PostingsStats {
    double mean = 0.0;
    double variance = 0.0;  // population
    double stddev = 0.0;
    std::uint64_t lists = 0;
};

// Statistics over non-empty postings lists; empty index yields no result.
std::optional<PostingsStats> postings_stats(const InvertedIndex& index);

// Binary format: magic SFIX, u32 version, u64 doc_count, u32 manifest length +
// manifest JSON, then per term u32 term_id, u64 length, (u64 doc_id, f32
// weight) pairs; ascending term_id, little-endian.
void write_index(std::ostream& out, const InvertedIndex& index);
InvertedIndex read_index(std::istream& in);

// TREC runfile lines: qid Q0 docid rank score tag.
void write_trec_run(std::ostream& out, const std::string& qid, const SearchResult& result,
                    const IndexManifest& manifest, const std::string& tag);

}  // namespace sparseforge
