#include "sparseforge/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <sstream>

namespace sparseforge {

namespace {

const char* kContinuation = "##";

bool only_unk(const std::vector<std::uint32_t>& ids, std::uint32_t unk_id) {
    return ids.size() == 1 && ids[0] == unk_id;
}

void write_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.write(buf, 4);
}

std::uint32_t read_u32(std::istream& in) {
    char buf[4];
    in.read(buf, 4);
    if (!in) throw io_error("unexpected end of head file");
    std::uint32_t v;
    std::memcpy(&v, buf, 4);
    return v;
}

}  // namespace

SubwordVocabulary SubwordVocabulary::from_pieces(std::vector<std::string> pieces,
                                                const std::string& mask_piece,
                                                const std::string& unk_piece) {
    SubwordVocabulary v;
    v.pieces = std::move(pieces);
    for (std::uint32_t i = 0; i < v.pieces.size(); ++i) {
        auto [it, inserted] = v.piece_id.emplace(v.pieces[i], i);
        if (!inserted) throw validation_error("duplicate subword piece: " + v.pieces[i]);
    }
    auto mask = v.piece_id.find(mask_piece);
    auto unk = v.piece_id.find(unk_piece);
    if (mask == v.piece_id.end()) throw validation_error("missing mask piece " + mask_piece);
    if (unk == v.piece_id.end()) throw validation_error("missing unk piece " + unk_piece);
    v.mask_id = mask->second;
    v.unk_id = unk->second;
    return v;
}

std::string normalize_token(const std::string& token, const UnigramConfig& cfg) {
    if (!cfg.case_fold) return token;
    std::string out = token;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::map<std::string, std::uint64_t>
count_unigrams(std::istream& corpus, const UnigramConfig& cfg) {
    std::map<std::string, std::uint64_t> counts;
    std::string line;
    std::uint64_t record = 0;
    while (std::getline(corpus, line)) {
        std::istringstream tokens(line);
        std::string tok;
        while (tokens >> tok) ++counts[normalize_token(tok, cfg)];
        ++record;
    }
    if (corpus.bad())
        throw io_error("corpus read failed at record " + std::to_string(record));
    return counts;
}

std::vector<std::uint32_t>
tokenize_wordpiece(const std::string& term, const SubwordVocabulary& subvocab) {
    if (term.empty()) throw validation_error("cannot tokenize empty term");
    std::vector<std::uint32_t> ids;
    std::size_t start = 0;
    while (start < term.size()) {
        std::size_t end = term.size();
        bool found = false;
        while (end > start) {
            std::string piece = term.substr(start, end - start);
            if (start > 0) piece = kContinuation + piece;
            auto it = subvocab.piece_id.find(piece);
            if (it != subvocab.piece_id.end()) {
                ids.push_back(it->second);
                found = true;
                break;
            }
            --end;
        }
        if (!found) return {subvocab.unk_id};
        start = end;
    }
    return ids;
}

ExpandedVocabulary
build_expanded_vocab(const std::map<std::string, std::uint64_t>& counts,
                     const SubwordVocabulary& subvocab, std::size_t target_size) {
    if (target_size == 0) throw validation_error("target_size must be >= 1");

    struct Entry {
        std::string term;
        std::uint64_t count;
        std::vector<std::uint32_t> subwords;
    };
    std::vector<Entry> entries;
    entries.reserve(counts.size());
    for (const auto& [term, count] : counts) {
        auto ids = tokenize_wordpiece(term, subvocab);
        if (only_unk(ids, subvocab.unk_id)) continue;
        entries.push_back({term, count, std::move(ids)});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.term < b.term;
    });
    if (entries.size() > target_size) entries.resize(target_size);

    ExpandedVocabulary vocab;
    for (std::uint32_t i = 0; i < entries.size(); ++i) {
        vocab.terms.push_back(entries[i].term);
        vocab.term_id.emplace(entries[i].term, i);
        vocab.subwords_of.push_back(std::move(entries[i].subwords));
        vocab.frequency.push_back(entries[i].count);
    }
    return vocab;
}

HeadMatrix expand_head(const HeadMatrix& base, const ExpandedVocabulary& expanded) {
    HeadMatrix out;
    out.rows = expanded.size();
    out.cols = base.cols;
    out.weights.assign(out.rows * out.cols, 0.0);
    out.bias.assign(out.rows, 0.0);
    for (std::size_t t = 0; t < expanded.size(); ++t) {
        const auto& subs = expanded.subwords_of[t];
        if (subs.empty())
            throw validation_error("term " + expanded.terms[t] + " has no subwords");
        double* row = out.row(t);
        double bias = 0.0;
        for (std::uint32_t s : subs) {
            if (s >= base.rows) throw validation_error("subword id out of head range");
            const double* brow = base.row(s);
            for (std::size_t c = 0; c < out.cols; ++c) row[c] += brow[c];
            bias += base.bias[s];
        }
        const double inv = 1.0 / static_cast<double>(subs.size());
        for (std::size_t c = 0; c < out.cols; ++c) row[c] *= inv;
        out.bias[t] = bias * inv;
    }
    return out;
}

std::uint64_t vocab_hash(const ExpandedVocabulary& vocab) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& term : vocab.terms) {
        h = fnv1a(term, h);
        h = fnv1a("\x1f", h);
    }
    return h;
}

void write_vocab(std::ostream& out, const ExpandedVocabulary& vocab) {
    out << "#sparseforge-vocab v1 |U|=" << vocab.size() << "\n";
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        out << vocab.terms[i] << '\t' << i << '\t' << vocab.frequency[i] << '\t';
        for (std::size_t j = 0; j < vocab.subwords_of[i].size(); ++j) {
            if (j) out << ' ';
            out << vocab.subwords_of[i][j];
        }
        out << '\n';
    }
}

ExpandedVocabulary read_vocab(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("#sparseforge-vocab v1", 0) != 0)
        throw io_error("bad vocab file header");
    ExpandedVocabulary vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string term, ids;
        std::uint32_t id;
        std::uint64_t freq;
        if (!std::getline(fields, term, '\t')) throw io_error("bad vocab line: " + line);
        fields >> id >> freq;
        if (!fields) throw io_error("bad vocab line: " + line);
        if (id != vocab.terms.size()) throw io_error("vocab ids not dense at " + term);
        std::getline(fields, ids);  // remaining: tab + space-joined subword ids
        std::istringstream sub(ids);
        std::vector<std::uint32_t> subs;
        std::uint32_t s;
        while (sub >> s) subs.push_back(s);
        if (subs.empty()) throw io_error("term without subwords: " + term);
        vocab.terms.push_back(term);
        vocab.term_id.emplace(term, id);
        vocab.subwords_of.push_back(std::move(subs));
        vocab.frequency.push_back(freq);
    }
    return vocab;
}

void write_head(std::ostream& out, const HeadMatrix& head) {
    out.write("SFHD", 4);
    write_u32(out, static_cast<std::uint32_t>(head.rows));
    write_u32(out, static_cast<std::uint32_t>(head.cols));
    for (double w : head.weights) {
        float f = static_cast<float>(w);
        out.write(reinterpret_cast<const char*>(&f), 4);
    }
    for (double b : head.bias) {
        float f = static_cast<float>(b);
        out.write(reinterpret_cast<const char*>(&f), 4);
    }
}

HeadMatrix read_head(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "SFHD", 4) != 0) throw io_error("bad head file magic");
    HeadMatrix head;
    head.rows = read_u32(in);
    head.cols = read_u32(in);
    head.weights.resize(head.rows * head.cols);
    head.bias.resize(head.rows);
    for (auto& w : head.weights) {
        float f;
        in.read(reinterpret_cast<char*>(&f), 4);
        w = f;
    }
    for (auto& b : head.bias) {
        float f;
        in.read(reinterpret_cast<char*>(&f), 4);
        b = f;
    }
    if (!in) throw io_error("truncated head file");
    for (double w : head.weights)
        if (!std::isfinite(w)) throw io_error("non-finite head weight");
    return head;
}

SubwordVocabulary read_subword_vocab(std::istream& in, const std::string& mask_piece,
                                     const std::string& unk_piece) {
    std::vector<std::string> pieces;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) pieces.push_back(line);
    return SubwordVocabulary::from_pieces(std::move(pieces), mask_piece, unk_piece);
}

}  // namespace sparseforge
