#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "sparseforge/common.hpp"
#include "sparseforge/encode.hpp"
#include "sparseforge/vocab.hpp"

namespace sparseforge::test {

// Small subword vocabulary covering single lowercase letters, so any
// alphabetic term tokenizes letter by letter.
inline SubwordVocabulary letter_subvocab() {
    std::vector<std::string> pieces = {"[PAD]", "[MASK]", "[UNK]"};
    for (char c = 'a'; c <= 'z'; ++c) {
        pieces.push_back(std::string(1, c));
        pieces.push_back("##" + std::string(1, c));
    }
    return SubwordVocabulary::from_pieces(std::move(pieces));
}

// Synthetic word pool with roughly Zipfian draw probabilities.
inline std::vector<std::string> word_pool(std::size_t n) {
    std::vector<std::string> words;
    words.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string w;
        std::size_t x = i;
        do {
            w.push_back(static_cast<char>('a' + x % 26));
            x /= 26;
        } while (x > 0);
        words.push_back(w);
    }
    return words;
}

inline std::string zipf_word(const std::vector<std::string>& pool, Rng& rng) {
    // inverse-CDF approximation of a Zipf(1) draw over the pool
    const double u = rng.next_double();
    const double hmax = std::log(static_cast<double>(pool.size()) + 1.0);
    auto idx = static_cast<std::size_t>(std::exp(u * hmax)) - 1;
    return pool[std::min(idx, pool.size() - 1)];
}

inline std::vector<std::string> zipf_titles(std::size_t count, std::size_t pool_size,
                                            std::uint64_t seed, std::size_t min_words = 1,
                                            std::size_t max_words = 12) {
    auto pool = word_pool(pool_size);
    std::vector<std::string> titles;
    titles.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = Rng::for_record(seed, i);
        const std::size_t words =
            min_words + rng.next_below(max_words - min_words + 1);
        std::ostringstream title;
        for (std::size_t w = 0; w < words; ++w) {
            if (w) title << ' ';
            title << zipf_word(pool, rng);
        }
        titles.push_back(title.str());
    }
    return titles;
}

// Random sparse vector with l0 distinct terms over [0, width).
inline SparseVector random_sparse(std::string id, std::size_t width, std::size_t l0,
                                  Rng& rng) {
    SparseVector v;
    v.source_id = std::move(id);
    while (v.entries.size() < l0) {
        const auto term = static_cast<std::uint32_t>(rng.next_below(width));
        v.entries.emplace(term, 0.05 + rng.next_double() * 4.0);
    }
    return v;
}

}  // namespace sparseforge::test
