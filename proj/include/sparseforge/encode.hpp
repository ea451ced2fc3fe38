#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "sparseforge/common.hpp"
#include "sparseforge/vocab.hpp"

namespace sparseforge {

// Encoded query or document: term_id -> strictly positive weight.
struct SparseVector {
    std::string source_id;
    std::map<std::uint32_t, double> entries;

    std::size_t l0() const { return entries.size(); }
};

// Per-token logit rows over the expanded vocabulary; stand-in for model output.
struct LogitMatrix {
    std::string source_id;
    std::size_t tokens = 0;
    std::size_t width = 0;
    std::vector<double> scores;  // row-major, tokens*width

    double* row(std::size_t t) { return scores.data() + t * width; }
    const double* row(std::size_t t) const { return scores.data() + t * width; }
};

// max over tokens of log(1 + relu(score)); zero weights omitted.
SparseVector pool(const LogitMatrix& matrix);

// Keep the K highest-weight entries, ties won by lower term_id.
SparseVector topk_mask(const SparseVector& vector, std::size_t k);

enum class MockStyle { HashProjection, HeadProduct };

// Deterministic pipeline stand-in for the neural encoder.
LogitMatrix mock_encode(const std::string& text, const ExpandedVocabulary& vocab,
                        const HeadMatrix& head, MockStyle style = MockStyle::HashProjection);

// Seed-stable pseudo-random feature vector for one token (hash-projection style).
std::vector<double> token_hash_features(const std::string& token, std::size_t dim);

// JSONL: {"id":"...", "v":{"term_id":weight,...}}, 6 significant digits,
// ascending term_id.
void write_sparse_vector(std::ostream& out, const SparseVector& v);
std::vector<SparseVector> read_sparse_vectors(std::istream& in);

}  // namespace sparseforge
