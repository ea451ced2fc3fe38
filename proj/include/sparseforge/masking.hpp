#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sparseforge/common.hpp"
#include "sparseforge/vocab.hpp"

namespace sparseforge {

enum class MaskAction : std::uint8_t { MASK, RANDOM, KEEP };

const char* to_string(MaskAction a);

// A U term occurrence in the subword token stream: [begin, end) positions.
struct USpan {
    std::uint32_t term_id;
    std::size_t begin;
    std::size_t end;
};

constexpr std::uint32_t kNoLabel = 0xffffffffu;

struct MaskedExample {
    std::vector<std::uint32_t> token_ids;   // after replacement
    std::vector<std::uint32_t> labels;      // per position; kNoLabel outside selected spans
    std::vector<MaskAction> actions;        // per selected span, span order
    std::uint64_t seed = 0;
    std::uint64_t record = 0;
};

struct MaskingConfig {
    double mask_ratio = 0.15;
    double p_mask = 0.8;
    double p_random = 0.1;  // remainder is KEEP
    std::size_t max_length = 64;
};

// Subword-tokenized title plus the U spans found in it.
struct TokenizedTitle {
    std::vector<std::uint32_t> token_ids;
    std::vector<USpan> spans;
};

TokenizedTitle tokenize_title(const std::string& title, const ExpandedVocabulary& vocab,
                              const SubwordVocabulary& subvocab, const UnigramConfig& norm = {},
                              std::size_t max_length = 64);

std::vector<USpan> find_u_spans(const std::string& title, const ExpandedVocabulary& vocab,
                                const SubwordVocabulary& subvocab, const UnigramConfig& norm = {});

// Exactly max(1, floor(ratio*|spans|)) spans, uniform without replacement;
// empty input selects nothing.
std::vector<USpan> select_mask_targets(const std::vector<USpan>& spans, Rng& rng,
                                       double ratio = 0.15);

// One 80/10/10 action per selected term, applied to all of its subwords.
MaskedExample apply_replacements(const std::vector<std::uint32_t>& tokens,
                                 const std::vector<USpan>& selected, Rng& rng,
                                 const SubwordVocabulary& subvocab,
                                 const MaskingConfig& cfg = {});

struct MaskGenSummary {
    std::uint64_t titles = 0;
    std::uint64_t titles_without_u_terms = 0;
    std::uint64_t selected_terms = 0;
};

// One JSONL example per input title; records with zero U terms are kept.
MaskGenSummary generate_masked_corpus(std::istream& titles, std::ostream& out,
                                      const ExpandedVocabulary& vocab,
                                      const SubwordVocabulary& subvocab, std::uint64_t seed,
                                      const MaskingConfig& cfg = {}, const UnigramConfig& norm = {});

}  // namespace sparseforge
