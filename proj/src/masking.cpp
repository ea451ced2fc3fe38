#include "sparseforge/masking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace sparseforge {

const char* to_string(MaskAction a) {
    switch (a) {
        case MaskAction::MASK: return "MASK";
        case MaskAction::RANDOM: return "RANDOM";
        case MaskAction::KEEP: return "KEEP";
    }
    return "?";
}

TokenizedTitle tokenize_title(const std::string& title, const ExpandedVocabulary& vocab,
                              const SubwordVocabulary& subvocab, const UnigramConfig& norm,
                              std::size_t max_length) {
    TokenizedTitle out;
    std::istringstream words(title);
    std::string word;
    while (words >> word) {
        auto ids = tokenize_wordpiece(word, subvocab);
        if (out.token_ids.size() + ids.size() > max_length) break;
        const std::size_t begin = out.token_ids.size();
        out.token_ids.insert(out.token_ids.end(), ids.begin(), ids.end());
        auto it = vocab.term_id.find(normalize_token(word, norm));
        if (it != vocab.term_id.end())
            out.spans.push_back({it->second, begin, out.token_ids.size()});
    }
    return out;
}

std::vector<USpan> find_u_spans(const std::string& title, const ExpandedVocabulary& vocab,
                                const SubwordVocabulary& subvocab, const UnigramConfig& norm) {
    return tokenize_title(title, vocab, subvocab, norm,
                          std::numeric_limits<std::size_t>::max()).spans;
}

std::vector<USpan> select_mask_targets(const std::vector<USpan>& spans, Rng& rng,
                                       double ratio) {
    if (spans.empty()) return {};
    std::size_t want = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(spans.size())));
    if (want == 0) want = 1;

    // Partial Fisher-Yates, then restore span order.
    std::vector<std::size_t> order(spans.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < want; ++i) {
        std::size_t j = i + rng.next_below(order.size() - i);
        std::swap(order[i], order[j]);
    }
    order.resize(want);
    std::sort(order.begin(), order.end());

    std::vector<USpan> selected;
    selected.reserve(want);
    for (std::size_t i : order) selected.push_back(spans[i]);
    return selected;
}

MaskedExample apply_replacements(const std::vector<std::uint32_t>& tokens,
                                 const std::vector<USpan>& selected, Rng& rng,
                                 const SubwordVocabulary& subvocab, const MaskingConfig& cfg) {
    for (std::size_t i = 1; i < selected.size(); ++i)
        if (selected[i].begin < selected[i - 1].end)
            throw validation_error("overlapping mask spans");

    MaskedExample ex;
    ex.token_ids = tokens;
    ex.labels.assign(tokens.size(), kNoLabel);
    for (const USpan& span : selected) {
        if (span.end > tokens.size()) throw validation_error("mask span out of range");
        const double u = rng.next_double();
        MaskAction action = u < cfg.p_mask               ? MaskAction::MASK
                            : u < cfg.p_mask + cfg.p_random ? MaskAction::RANDOM
                                                            : MaskAction::KEEP;
        ex.actions.push_back(action);
        for (std::size_t pos = span.begin; pos < span.end; ++pos) {
            ex.labels[pos] = span.term_id;
            switch (action) {
                case MaskAction::MASK:
                    ex.token_ids[pos] = subvocab.mask_id;
                    break;
                case MaskAction::RANDOM: {
                    // uniform over pieces excluding [MASK], independent per subword
                    std::uint32_t r = static_cast<std::uint32_t>(
                        rng.next_below(subvocab.size() - 1));
                    if (r >= subvocab.mask_id) ++r;
                    ex.token_ids[pos] = r;
                    break;
                }
                case MaskAction::KEEP:
                    break;
            }
        }
    }
    return ex;
}

MaskGenSummary generate_masked_corpus(std::istream& titles, std::ostream& out,
                                      const ExpandedVocabulary& vocab,
                                      const SubwordVocabulary& subvocab, std::uint64_t seed,
                                      const MaskingConfig& cfg, const UnigramConfig& norm) {
    MaskGenSummary summary;
    std::string line;
    std::uint64_t record = 0;
    while (std::getline(titles, line)) {
        auto tokenized = tokenize_title(line, vocab, subvocab, norm, cfg.max_length);
        Rng rng = Rng::for_record(seed, record);
        auto selected = select_mask_targets(tokenized.spans, rng, cfg.mask_ratio);
        auto ex = apply_replacements(tokenized.token_ids, selected, rng, subvocab, cfg);

        nlohmann::ordered_json j;
        j["tokens"] = ex.token_ids;
        auto labels = nlohmann::ordered_json::object();
        for (std::size_t pos = 0; pos < ex.labels.size(); ++pos)
            if (ex.labels[pos] != kNoLabel) labels[std::to_string(pos)] = ex.labels[pos];
        j["labels"] = labels;
        auto actions = nlohmann::ordered_json::array();
        for (MaskAction a : ex.actions) actions.push_back(to_string(a));
        j["actions"] = actions;
        j["record"] = record;
        if (tokenized.spans.empty()) j["no_u_terms"] = true;
        out << j.dump() << "\n";

        ++summary.titles;
        if (tokenized.spans.empty()) ++summary.titles_without_u_terms;
        summary.selected_terms += selected.size();
        ++record;
    }
    if (titles.bad())
        throw io_error("title read failed at record " + std::to_string(record));
    return summary;
}

}  // namespace sparseforge
