#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "sparseforge/common.hpp"

namespace sparseforge {

// Base subword vocabulary. Continuation pieces carry the "##" prefix marker.
struct SubwordVocabulary {
    std::vector<std::string> pieces;
    std::unordered_map<std::string, std::uint32_t> piece_id;
    std::uint32_t mask_id = 0;
    std::uint32_t unk_id = 0;

    static SubwordVocabulary from_pieces(std::vector<std::string> pieces,
                                         const std::string& mask_piece = "[MASK]",
                                         const std::string& unk_piece = "[UNK]");

    std::size_t size() const { return pieces.size(); }
};

// Expanded unigram vocabulary U. Term ids are assigned in descending
// frequency order, ties broken by ascending term string.
struct ExpandedVocabulary {
    std::vector<std::string> terms;
    std::unordered_map<std::string, std::uint32_t> term_id;
    std::vector<std::vector<std::uint32_t>> subwords_of;  // by term_id
    std::vector<std::uint64_t> frequency;                 // by term_id

    std::size_t size() const { return terms.size(); }
};

// Dense MLM head: one weight row and one bias per vocabulary entry.
struct HeadMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> weights;  // row-major, rows*cols
    std::vector<double> bias;     // rows

    double* row(std::size_t r) { return weights.data() + r * cols; }
    const double* row(std::size_t r) const { return weights.data() + r * cols; }
};

struct UnigramConfig {
    bool case_fold = false;
};

std::string normalize_token(const std::string& token, const UnigramConfig& cfg);

// Exact unigram counts of whitespace-split tokens, after normalization.
std::map<std::string, std::uint64_t>
count_unigrams(std::istream& corpus, const UnigramConfig& cfg = {});

// Greedy longest-match-first decomposition; [unk_id] if any position fails.
std::vector<std::uint32_t>
tokenize_wordpiece(const std::string& term, const SubwordVocabulary& subvocab);

// Top target_size terms by count (ties lexicographic ascending); terms
// tokenizing entirely to unk are dropped before truncation.
ExpandedVocabulary
build_expanded_vocab(const std::map<std::string, std::uint64_t>& counts,
                     const SubwordVocabulary& subvocab, std::size_t target_size);

// Mean-pool subword rows/biases of the base head into one row per U term.
HeadMatrix expand_head(const HeadMatrix& base, const ExpandedVocabulary& expanded);

// Stable content hash over the term list, recorded in index manifests.
std::uint64_t vocab_hash(const ExpandedVocabulary& vocab);

// TSV vocab file, header "#sparseforge-vocab v1 |U|=<n>".
void write_vocab(std::ostream& out, const ExpandedVocabulary& vocab);
ExpandedVocabulary read_vocab(std::istream& in);

// Binary head file: magic SFHD, u32 rows, u32 cols, f32 weights, f32 biases.
void write_head(std::ostream& out, const HeadMatrix& head);
HeadMatrix read_head(std::istream& in);

SubwordVocabulary read_subword_vocab(std::istream& in,
                                     const std::string& mask_piece = "[MASK]",
                                     const std::string& unk_piece = "[UNK]");

}  // namespace sparseforge
