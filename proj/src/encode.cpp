#include "sparseforge/encode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace sparseforge {

SparseVector pool(const LogitMatrix& matrix) {
    if (matrix.tokens == 0) throw validation_error("empty logit matrix");
    for (double s : matrix.scores)
        if (!std::isfinite(s)) throw validation_error("non-finite logit score");

    SparseVector v;
    v.source_id = matrix.source_id;
    for (std::size_t j = 0; j < matrix.width; ++j) {
        double best = 0.0;
        for (std::size_t t = 0; t < matrix.tokens; ++t) {
            const double s = matrix.row(t)[j];
            if (s > 0.0) best = std::max(best, std::log1p(s));
        }
        if (best > 0.0) v.entries.emplace(static_cast<std::uint32_t>(j), best);
    }
    return v;
}

SparseVector topk_mask(const SparseVector& vector, std::size_t k) {
    if (k == 0) throw validation_error("topk_mask requires K >= 1");
    if (vector.entries.size() <= k) return vector;

    std::vector<std::pair<std::uint32_t, double>> entries(vector.entries.begin(),
                                                          vector.entries.end());
    std::nth_element(entries.begin(), entries.begin() + k, entries.end(),
                     [](const auto& a, const auto& b) {
                         if (a.second != b.second) return a.second > b.second;
                         return a.first < b.first;
                     });
    SparseVector out;
    out.source_id = vector.source_id;
    out.entries.insert(entries.begin(), entries.begin() + k);
    return out;
}

std::vector<double> token_hash_features(const std::string& token, std::size_t dim) {
    std::vector<double> feat(dim);
    const std::uint64_t base = fnv1a(token);
    Rng rng(base);
    for (std::size_t i = 0; i < dim; ++i) feat[i] = rng.next_double() * 2.0 - 1.0;
    return feat;
}

LogitMatrix mock_encode(const std::string& text, const ExpandedVocabulary& vocab,
                        const HeadMatrix& head, MockStyle style) {
    std::istringstream words(text);
    std::vector<std::string> tokens;
    std::string tok;
    while (words >> tok) tokens.push_back(tok);
    if (tokens.empty()) throw validation_error("text has no tokens");

    LogitMatrix m;
    m.source_id = text;
    m.tokens = tokens.size();
    m.width = vocab.size();
    m.scores.assign(m.tokens * m.width, 0.0);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        double* row = m.row(t);
        if (style == MockStyle::HashProjection) {
            auto feat = token_hash_features(tokens[t], head.cols);
            for (std::size_t u = 0; u < m.width; ++u) {
                const double* w = head.row(u);
                double s = head.bias[u];
                for (std::size_t c = 0; c < head.cols; ++c) s += feat[c] * w[c];
                row[u] = s;
            }
        } else {
            // one-hot feature at a hashed hidden position
            const std::size_t pos = fnv1a(tokens[t]) % head.cols;
            for (std::size_t u = 0; u < m.width; ++u)
                row[u] = head.row(u)[pos] + head.bias[u];
        }
    }
    return m;
}

void write_sparse_vector(std::ostream& out, const SparseVector& v) {
    // hand-rolled writer: the 6-significant-digit weight format is part of
    // the file contract
    out << "{\"id\":" << nlohmann::json(v.source_id).dump() << ",\"v\":{";
    bool first = true;
    char buf[32];
    for (const auto& [term, weight] : v.entries) {
        if (!first) out << ',';
        first = false;
        std::snprintf(buf, sizeof(buf), "%.6g", weight);
        out << '"' << term << "\":" << buf;
    }
    out << "}}\n";
}

std::vector<SparseVector> read_sparse_vectors(std::istream& in) {
    std::vector<SparseVector> out;
    std::string line;
    std::uint64_t record = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw io_error("bad vector record " + std::to_string(record) + ": " + e.what());
        }
        SparseVector v;
        v.source_id = j.at("id").get<std::string>();
        for (const auto& [key, val] : j.at("v").items()) {
            const double w = val.get<double>();
            if (w <= 0.0 || !std::isfinite(w))
                throw io_error("non-positive weight in record " + std::to_string(record));
            v.entries.emplace(static_cast<std::uint32_t>(std::stoul(key)), w);
        }
        out.push_back(std::move(v));
        ++record;
    }
    if (in.bad()) throw io_error("vector read failed at record " + std::to_string(record));
    return out;
}

}  // namespace sparseforge
