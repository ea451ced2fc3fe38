// Acceptance suite: one pass/fail line per criterion. Exercises the pipeline
// end to end on synthetic data with deterministic seeds; exits nonzero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sparseforge/encode.hpp"
#include "sparseforge/index.hpp"
#include "sparseforge/losses.hpp"
#include "sparseforge/masking.hpp"
#include "sparseforge/metrics.hpp"
#include "sparseforge/prune.hpp"
#include "sparseforge/stats.hpp"
#include "sparseforge/vocab.hpp"

namespace fs = std::filesystem;
using namespace sparseforge;

namespace {

struct check_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw check_failure(what);
}

// ---- synthetic data helpers ------------------------------------------------

SubwordVocabulary letter_subvocab() {
    std::vector<std::string> pieces = {"[PAD]", "[MASK]", "[UNK]"};
    for (char c = 'a'; c <= 'z'; ++c) {
        pieces.push_back(std::string(1, c));
        pieces.push_back("##" + std::string(1, c));
    }
    return SubwordVocabulary::from_pieces(std::move(pieces));
}

std::vector<std::string> word_pool(std::size_t n) {
    std::vector<std::string> words;
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

std::vector<std::string> zipf_titles(std::size_t count, std::size_t pool_size,
                                     std::uint64_t seed, std::size_t max_words = 30) {
    auto pool = word_pool(pool_size);
    const double hmax = std::log(static_cast<double>(pool.size()) + 1.0);
    std::vector<std::string> titles;
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = Rng::for_record(seed, i);
        const std::size_t words = 1 + rng.next_below(max_words);
        std::ostringstream title;
        for (std::size_t w = 0; w < words; ++w) {
            if (w) title << ' ';
            const double u = rng.next_double();
            auto idx = static_cast<std::size_t>(std::exp(u * hmax)) - 1;
            title << pool[std::min(idx, pool.size() - 1)];
        }
        titles.push_back(title.str());
    }
    return titles;
}

SparseVector random_sparse(std::string id, std::size_t width, std::size_t l0, Rng& rng) {
    SparseVector v;
    v.source_id = std::move(id);
    while (v.entries.size() < l0) {
        const auto term = static_cast<std::uint32_t>(rng.next_below(width));
        v.entries.emplace(term, 0.05 + rng.next_double() * 4.0);
    }
    return v;
}

HeadMatrix random_head(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    HeadMatrix h;
    h.rows = rows;
    h.cols = cols;
    Rng rng(seed);
    for (std::size_t i = 0; i < rows * cols; ++i)
        h.weights.push_back(rng.next_double() * 2.0 - 1.0);
    for (std::size_t i = 0; i < rows; ++i) h.bias.push_back(rng.next_double() - 0.5);
    return h;
}

Batch random_batch(std::size_t n, std::size_t width, Rng& rng) {
    Batch b;
    for (std::size_t i = 0; i < n; ++i) {
        DenseVector q(width), d(width);
        for (auto& x : q) x = rng.next_double();
        for (auto& x : d) x = rng.next_double();
        b.q_vectors.push_back(std::move(q));
        b.d_vectors.push_back(std::move(d));
    }
    return b;
}

template <typename Loss>
double fd_error(const Batch& batch, Loss loss, Rng& rng, std::size_t coords = 100,
                double step = 1e-5) {
    LossValue analytic = loss(batch);
    double worst = 0.0;
    for (std::size_t s = 0; s < coords; ++s) {
        const bool on_q = rng.next_below(2) == 0;
        const std::size_t i = rng.next_below(batch.size());
        const std::size_t c = rng.next_below(batch.width());
        Batch lo = batch, hi = batch;
        (on_q ? lo.q_vectors[i][c] : lo.d_vectors[i][c]) -= step;
        (on_q ? hi.q_vectors[i][c] : hi.d_vectors[i][c]) += step;
        const double numeric = (loss(hi).value - loss(lo).value) / (2.0 * step);
        const double exact = on_q ? analytic.q_gradients[i][c] : analytic.d_gradients[i][c];
        const double denom = std::max({std::abs(numeric), std::abs(exact), 1e-8});
        worst = std::max(worst, std::abs(numeric - exact) / denom);
    }
    return worst;
}

// ---- criteria --------------------------------------------------------------

void criterion_masking_law() {
    const auto start = std::chrono::steady_clock::now();
    auto sub = letter_subvocab();
    auto pool = word_pool(400);
    std::map<std::string, std::uint64_t> counts;
    for (std::size_t i = 0; i < pool.size(); ++i) counts[pool[i]] = pool.size() - i;
    auto vocab = build_expanded_vocab(counts, sub, 200);

    auto titles = zipf_titles(10000, 500, 2024);
    std::uint64_t with_spans = 0;
    for (std::size_t i = 0; i < titles.size(); ++i) {
        auto spans = find_u_spans(titles[i], vocab, sub);
        Rng rng = Rng::for_record(7, i);
        auto selected = select_mask_targets(spans, rng);
        if (spans.empty()) {
            require(selected.empty(), "selected terms on a span-free title");
            continue;
        }
        ++with_spans;
        const auto want = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(0.15 * spans.size())));
        require(selected.size() == want,
                "masking count off at title " + std::to_string(i));
    }
    require(with_spans > 5000, "synthetic corpus too sparse in U terms");

    // the 20-term example selects exactly 3
    std::vector<USpan> twenty;
    for (std::uint32_t i = 0; i < 20; ++i) twenty.push_back({i, 2 * i, 2 * i + 1});
    Rng rng(1);
    require(select_mask_targets(twenty, rng).size() == 3, "20 U terms must select 3");

    const double secs = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();
    require(secs < 10.0, "masking law run exceeded 10 s");
}

void criterion_action_frequencies() {
    const auto start = std::chrono::steady_clock::now();
    auto sub = letter_subvocab();
    std::vector<std::uint32_t> tokens{3, 4, 5};
    std::vector<USpan> spans{{0, 0, 3}};
    std::size_t counts[3] = {0, 0, 0};
    const std::size_t trials = 120000;
    for (std::uint64_t rec = 0; rec < trials; ++rec) {
        Rng rng = Rng::for_record(2024, rec);
        auto ex = apply_replacements(tokens, spans, rng, sub);
        ++counts[static_cast<int>(ex.actions[0])];
    }
    const double n = static_cast<double>(trials);
    require(std::abs(counts[0] / n - 0.80) < 0.01, "MASK frequency off");
    require(std::abs(counts[1] / n - 0.10) < 0.01, "RANDOM frequency off");
    require(std::abs(counts[2] / n - 0.10) < 0.01, "KEEP frequency off");
    const double secs = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();
    require(secs < 30.0, "action frequency run exceeded 30 s");
}

void criterion_head_expansion() {
    auto sub = letter_subvocab();
    auto pool = word_pool(80);
    std::map<std::string, std::uint64_t> counts;
    for (std::size_t i = 0; i < pool.size(); ++i) counts[pool[i]] = pool.size() - i;
    auto vocab = build_expanded_vocab(counts, sub, 50);
    require(vocab.size() == 50, "vocab build came up short");

    auto base = random_head(200, 16, 11);
    require(base.rows >= sub.size(), "base head too small for subvocab");
    auto head = expand_head(base, vocab);
    for (std::size_t t = 0; t < vocab.size(); ++t) {
        const auto& subs = vocab.subwords_of[t];
        for (std::size_t c = 0; c < base.cols; ++c) {
            double acc = 0.0;
            for (auto s : subs) acc += base.row(s)[c];
            require(std::abs(head.row(t)[c] - acc / subs.size()) < 1e-12,
                    "mean-pool oracle mismatch");
        }
        double bias = 0.0;
        for (auto s : subs) bias += base.bias[s];
        require(std::abs(head.bias[t] - bias / subs.size()) < 1e-12, "bias oracle mismatch");
    }

    // linearity
    auto a = random_head(200, 16, 12), b = random_head(200, 16, 13);
    const double alpha = 0.6, beta = -2.1;
    HeadMatrix mix = a;
    for (std::size_t i = 0; i < mix.weights.size(); ++i)
        mix.weights[i] = alpha * a.weights[i] + beta * b.weights[i];
    for (std::size_t i = 0; i < mix.bias.size(); ++i)
        mix.bias[i] = alpha * a.bias[i] + beta * b.bias[i];
    auto ea = expand_head(a, vocab), eb = expand_head(b, vocab), em = expand_head(mix, vocab);
    for (std::size_t i = 0; i < em.weights.size(); ++i) {
        const double want = alpha * ea.weights[i] + beta * eb.weights[i];
        require(std::abs(em.weights[i] - want) <= 1e-10 * std::max(1.0, std::abs(want)),
                "linearity violated");
    }
}

void criterion_gradient_oracles() {
    Rng seeds(2025);
    int batches = 0;
    for (std::size_t n : {1, 2, 4, 8}) {
        for (std::size_t width : {8, 64}) {
            for (int rep = 0; rep < 3 && batches < 20; ++rep, ++batches) {
                Rng rng(seeds.next_u64());
                auto batch = random_batch(n, width, rng);
                if (n == 1)
                    require(in_batch_loss(batch).value == 0.0, "|B|=1 loss must be exactly 0");
                require(fd_error(batch, in_batch_loss, rng) < 1e-4, "in_batch gradient off");
                require(fd_error(batch, [](const Batch& b) {
                            auto v = flops_loss(b.q_vectors);
                            v.d_gradients.assign(b.size(), DenseVector(b.width(), 0.0));
                            return v;
                        }, rng) < 1e-4, "flops gradient off");
                require(fd_error(batch, [](const Batch& b) {
                            return joint_flops_loss(b.q_vectors, b.d_vectors);
                        }, rng) < 1e-4, "jflops gradient off");
                require(fd_error(batch, [](const Batch& b) {
                            return combined_objective(b, 5.0);
                        }, rng) < 1e-4, "combined gradient off");
            }
        }
    }
    require(batches == 20, "expected 20 batches");
}

void criterion_retrieval_oracle() {
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t corpus_seed = 0; corpus_seed < 5; ++corpus_seed) {
        Rng rng(900 + corpus_seed);
        const std::size_t n_docs = 500 + rng.next_below(1501);
        std::vector<SparseVector> docs;
        for (std::size_t i = 0; i < n_docs; ++i)
            docs.push_back(random_sparse("d" + std::to_string(i), 1000,
                                         1 + rng.next_below(40), rng));
        auto index = build_index(docs, 0);

        for (int qi = 0; qi < 100; ++qi) {
            auto q = random_sparse("q" + std::to_string(qi), 1000,
                                   1 + rng.next_below(12), rng);
            SearchOptions opts;
            opts.top_n = 50;
            auto got = search(index, q, opts);

            // dense brute force, same term order and f32 document weights
            std::vector<std::pair<std::uint64_t, double>> want;
            for (std::uint64_t d = 0; d < docs.size(); ++d) {
                double s = 0.0;
                bool touched = false;
                for (const auto& [term, weight] : q.entries) {
                    auto it = docs[d].entries.find(term);
                    if (it != docs[d].entries.end()) {
                        s += weight * static_cast<double>(static_cast<float>(it->second));
                        touched = true;
                    }
                }
                if (touched) want.emplace_back(d, s);
            }
            std::sort(want.begin(), want.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
            });
            if (want.size() > 50) want.resize(50);

            require(got.hits.size() == want.size(), "ranking length mismatch");
            for (std::size_t i = 0; i < want.size(); ++i) {
                require(got.hits[i].first == want[i].first, "ranking order mismatch");
                require(got.hits[i].second == want[i].second, "score not bit-exact");
            }
        }
    }
    const double secs = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();
    require(secs < 60.0, "retrieval oracle run exceeded 60 s");
}

void criterion_flops_metric() {
    Rng rng(31);
    std::vector<SparseVector> docs;
    for (int i = 0; i < 1500; ++i)
        docs.push_back(random_sparse("d" + std::to_string(i), 600,
                                     5 + rng.next_below(30), rng));
    std::vector<SparseVector> queries;
    for (int i = 0; i < 120; ++i)
        queries.push_back(random_sparse("q" + std::to_string(i), 600,
                                        1 + rng.next_below(10), rng));

    auto index = build_index(docs, 0);

    // index-free recount from the raw vectors
    double numerator = 0.0;
    for (const auto& q : queries)
        for (const auto& [term, w] : q.entries)
            for (const auto& d : docs)
                if (d.entries.count(term)) numerator += 1.0;
    const double want = numerator / (static_cast<double>(queries.size()) * docs.size());
    require(flops_metric(index, queries) == want, "recount oracle mismatch");

    // partition additivity
    std::vector<SparseVector> a(queries.begin(), queries.begin() + 50);
    std::vector<SparseVector> b(queries.begin() + 50, queries.end());
    const double whole = flops_metric(index, queries);
    const double mixed = (50.0 * flops_metric(index, a) + 70.0 * flops_metric(index, b)) /
                         static_cast<double>(queries.size());
    require(std::abs(whole - mixed) < 1e-12, "partition additivity violated");

    // monotone FLOPS over the pruning grid
    for (std::size_t qk : {0, 5, 10}) {
        std::vector<SparseVector> pruned_q;
        for (const auto& q : queries) pruned_q.push_back(prune(q, qk));
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t dk : {0, 20, 10, 5}) {
            const double f = flops_metric(build_index(docs, dk), pruned_q);
            if (dk != 0) require(f <= prev, "pruned FLOPS exceeded less-pruned FLOPS");
            prev = f;
        }
    }
}

void criterion_pruning_contracts() {
    Rng rng(32);
    std::vector<SparseVector> corpus;
    std::size_t dense_enough = 0;
    for (int i = 0; i < 10000; ++i) {
        corpus.push_back(random_sparse("d" + std::to_string(i), 2000,
                                       25 + rng.next_below(30), rng));
        if (corpus.back().l0() > 20) ++dense_enough;
    }
    require(dense_enough >= static_cast<std::size_t>(0.95 * corpus.size()),
            "generator must give >95% of vectors more than 20 terms");

    for (std::size_t k : {5, 10, 20}) {
        std::vector<SparseVector> out;
        auto summary = prune_corpus(corpus, k, out);
        require(*summary.avg_l0_after <= static_cast<double>(k), "avg L0 above k");
        require(*summary.avg_l0_after >= 0.9 * static_cast<double>(k),
                "avg L0 not near saturation on dense corpus");
        for (std::size_t i = 0; i < corpus.size(); i += 97) {
            const auto& v = corpus[i];
            auto once = prune(v, k);
            require(prune(once, k).entries == once.entries, "idempotence violated");
            auto wider = prune(v, k + 7);
            for (const auto& [term, weight] : once.entries) {
                require(wider.entries.count(term) == 1, "support nesting violated");
                require(v.entries.at(term) == weight, "kept weight modified");
            }
        }
    }
}

void criterion_diagnostics_oracles() {
    Rng rng(33);
    const std::size_t width = 120;
    std::vector<ScoreRow> rows;
    for (int r = 0; r < 1000; ++r) {
        ScoreRow row;
        const std::size_t entries = 1 + rng.next_below(20);
        while (row.sparse_scores.size() < entries)
            row.sparse_scores.emplace(static_cast<std::uint32_t>(rng.next_below(width)),
                                      rng.next_double() * 6.0 - 3.0);
        rows.push_back(std::move(row));
    }

    auto naive_std = [](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= xs.size();
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        return std::sqrt(var / xs.size());
    };

    std::uint64_t prev_cnt = std::numeric_limits<std::uint64_t>::max();
    for (std::uint64_t threshold : {1, 5, 50}) {
        auto got = logit_score_std(rows, threshold);
        std::vector<std::vector<double>> per_index(width);
        for (const auto& row : rows)
            for (const auto& [idx, s] : row.sparse_scores) per_index[idx].push_back(s);
        double sum = 0.0;
        std::uint64_t kept = 0;
        for (const auto& scores : per_index) {
            if (scores.size() < threshold) continue;
            sum += naive_std(scores);
            ++kept;
        }
        require(got.has_value() == (kept > 0), "presence mismatch");
        if (got) {
            require(got->logit_cnt == kept, "logit_cnt mismatch");
            require(std::abs(got->std - sum / kept) <= 1e-9 * std::max(1.0, got->std),
                    "logit-score-std oracle mismatch");
            require(got->logit_cnt <= prev_cnt, "logit_cnt not monotone in threshold");
            prev_cnt = got->logit_cnt;
        }
    }

    // doc_score_stats against a full-sort oracle
    std::vector<std::vector<double>> docs;
    for (int d = 0; d < 1000; ++d) {
        std::vector<double> scores(1 + rng.next_below(150));
        for (auto& s : scores) s = rng.next_double() * 9.0;
        docs.push_back(std::move(scores));
    }
    for (std::size_t k : {10, 100, 0}) {
        auto got = doc_score_stats(docs, k);
        double avg = 0.0, sd = 0.0;
        for (auto scores : docs) {
            std::sort(scores.begin(), scores.end(), std::greater<double>());
            if (k > 0 && k < scores.size()) scores.resize(k);
            double m = 0.0;
            for (double s : scores) m += s;
            m /= scores.size();
            avg += m;
            sd += naive_std(scores);
        }
        require(std::abs(got->avg - avg / docs.size()) <= 1e-9 * std::abs(got->avg),
                "doc-score-avg oracle mismatch");
        require(std::abs(got->std - sd / docs.size()) <= 1e-9 * std::max(1.0, got->std),
                "doc-score-std oracle mismatch");
    }

    // non_neg_terms_stats against a recount
    std::vector<std::vector<double>> dense;
    for (int r = 0; r < 1000; ++r) {
        std::vector<double> row(64);
        for (auto& x : row) x = rng.next_double() * 2.0 - 1.0;
        dense.push_back(std::move(row));
    }
    auto nn = non_neg_terms_stats(dense);
    std::vector<double> cnts;
    for (const auto& row : dense) {
        double c = 0.0;
        for (double x : row)
            if (x >= 0.0) c += 1.0;
        cnts.push_back(c);
    }
    double mean = 0.0;
    for (double c : cnts) mean += c;
    mean /= cnts.size();
    require(std::abs(nn.avg - mean) <= 1e-9 * std::max(1.0, mean), "non-neg avg mismatch");
    require(std::abs(nn.std - naive_std(cnts)) <= 1e-9 * std::max(1.0, nn.std),
            "non-neg std mismatch");

    // l0_std against the same naive oracle
    std::vector<SparseVector> vecs;
    std::vector<double> l0s;
    for (int i = 0; i < 1000; ++i) {
        vecs.push_back(random_sparse("v" + std::to_string(i), 400,
                                     1 + rng.next_below(50), rng));
        l0s.push_back(static_cast<double>(vecs.back().l0()));
    }
    require(std::abs(*l0_std(vecs) - naive_std(l0s)) <= 1e-9 * std::max(1.0, naive_std(l0s)),
            "l0-std oracle mismatch");
}

void criterion_tradeoff_direction() {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t width = 1000, n_docs = 5000, terms_per_doc = 12;
    const double hmax = std::log(static_cast<double>(width) + 1.0);

    auto zipf_term = [&](Rng& rng) {
        const double u = rng.next_double();
        auto idx = static_cast<std::size_t>(std::exp(u * hmax)) - 1;
        return static_cast<std::uint32_t>(std::min(idx, width - 1));
    };

    std::vector<SparseVector> uniform_docs, zipf_docs;
    for (std::size_t i = 0; i < n_docs; ++i) {
        Rng ru = Rng::for_record(41, i), rz = Rng::for_record(42, i);
        SparseVector u, z;
        u.source_id = z.source_id = "d" + std::to_string(i);
        while (u.entries.size() < terms_per_doc)
            u.entries.emplace(static_cast<std::uint32_t>(ru.next_below(width)),
                              0.1 + ru.next_double());
        while (z.entries.size() < terms_per_doc)
            z.entries.emplace(zipf_term(rz), 0.1 + rz.next_double());
        uniform_docs.push_back(std::move(u));
        zipf_docs.push_back(std::move(z));
    }
    // equal mean L0 by construction
    std::vector<SparseVector> queries;
    for (std::size_t i = 0; i < 200; ++i) {
        Rng rq = Rng::for_record(43, i);
        SparseVector q;
        q.source_id = "q" + std::to_string(i);
        while (q.entries.size() < 5) q.entries.emplace(zipf_term(rq), 1.0);
        queries.push_back(std::move(q));
    }

    auto uniform_index = build_index(uniform_docs, 0);
    auto zipf_index = build_index(zipf_docs, 0);
    auto us = postings_stats(uniform_index);
    auto zs = postings_stats(zipf_index);
    require(zs->variance > us->variance, "zipf index should have higher postings variance");

    const double f_uniform = flops_metric(uniform_index, queries);
    const double f_zipf = flops_metric(zipf_index, queries);
    require(f_zipf > f_uniform, "higher-variance index must yield strictly higher FLOPS");

    const double secs = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();
    require(secs < 60.0, "trade-off run exceeded 60 s");
}

void criterion_overlap_mode() {
    Rng rng(51);
    std::vector<SparseVector> docs;
    for (int i = 0; i < 1000; ++i)
        docs.push_back(random_sparse("d" + std::to_string(i), 150,
                                     1 + rng.next_below(20), rng));
    auto index = build_index(docs, 0);

    for (int qi = 0; qi < 20; ++qi) {
        auto q = random_sparse("q" + std::to_string(qi), 150, 2 + rng.next_below(5), rng);
        SearchOptions dot;
        dot.top_n = 1000;
        auto dot_r = search(index, q, dot);

        SearchOptions overlap = dot;
        overlap.mode = MatchMode::OverlapThreshold;
        overlap.theta = 0.0;
        require(search(index, q, overlap).hits == dot_r.hits, "theta=0 must equal dot mode");

        overlap.theta = 1.0;
        auto all_terms = search(index, q, overlap);
        for (const auto& [doc_id, score] : all_terms.hits)
            for (const auto& [term, w] : q.entries)
                require(docs[doc_id].entries.count(term) == 1,
                        "theta=1 survivor missing a query term");

        std::size_t prev = dot_r.hits.size();
        for (double theta : {0.25, 0.5, 0.75, 1.0}) {
            overlap.theta = theta;
            auto r = search(index, q, overlap);
            require(r.hits.size() <= prev, "survivor set not monotone in theta");
            // survivors at higher theta are a subset of those at lower theta
            prev = r.hits.size();
        }
    }
}

// criterion 11: byte-identical CLI re-runs
void criterion_cli_determinism(const std::string& cli) {
    require(!cli.empty(), "CLI binary path not provided (argv[1])");
    const fs::path dir = fs::temp_directory_path() / "sparseforge_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto run = [&](const std::string& args) {
        const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
        require(std::system(cmd.c_str()) == 0, "command failed: " + cmd);
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };

    // inputs
    auto sub = letter_subvocab();
    {
        std::ofstream f(dir / "subvocab.txt");
        for (const auto& p : sub.pieces) f << p << "\n";
    }
    {
        std::ofstream f(dir / "titles.txt");
        for (const auto& t : zipf_titles(400, 120, 77)) f << t << "\n";
    }
    {
        auto head = random_head(sub.size(), 16, 5);
        std::ofstream f(dir / "base_head.bin", std::ios::binary);
        write_head(f, head);
    }
    {
        std::ofstream f(dir / "qrels.tsv");
        f << "t0\td3\t1\nt1\td7\t1\nt2\td9\t-1\nt2\td11\t1\n";
    }

    const std::string d = (dir / "").string();
    struct Step {
        std::string args;
        std::vector<std::string> outputs;
    };
    std::vector<Step> steps = {
        {"vocab-build --in " + d + "titles.txt --subvocab " + d + "subvocab.txt --target 80 --out " + d + "vocab.tsv",
         {"vocab.tsv"}},
        {"expand-head --vocab " + d + "vocab.tsv --base " + d + "base_head.bin --out " + d + "head.bin",
         {"head.bin"}},
        {"mask-gen --vocab " + d + "vocab.tsv --subvocab " + d + "subvocab.txt --seed 9 --in " + d + "titles.txt --out " + d + "masked.jsonl",
         {"masked.jsonl"}},
        {"encode --vocab " + d + "vocab.tsv --head " + d + "head.bin --in " + d + "titles.txt --out " + d + "vecs.jsonl --topk 20",
         {"vecs.jsonl"}},
        {"prune --k 8 --in " + d + "vecs.jsonl --out " + d + "pruned.jsonl --summary " + d + "prune.json",
         {"pruned.jsonl", "prune.json"}},
        {"index-build --dk 10 --in " + d + "vecs.jsonl --out " + d + "idx --vocab " + d + "vocab.tsv",
         {"idx"}},
        {"search --qk 5 --mode dot --top 10 --queries " + d + "vecs.jsonl --index " + d + "idx --out " + d + "run.trec --vocab " + d + "vocab.tsv",
         {"run.trec"}},
        {"search --qk 5 --mode overlap --theta 0.5 --top 10 --queries " + d + "vecs.jsonl --index " + d + "idx --out " + d + "run2.trec",
         {"run2.trec"}},
        {"eval --index " + d + "idx --queries " + d + "vecs.jsonl --qrels " + d + "qrels.tsv --qk 5 --report " + d + "report.json",
         {"report.json"}},
        {"stats --in " + d + "vecs.jsonl --kind sparse --threshold 2 --report " + d + "stats.json",
         {"stats.json"}},
    };

    for (const auto& step : steps) {
        run(step.args);
        std::map<std::string, std::string> first;
        for (const auto& out : step.outputs) first[out] = slurp(dir / out);
        run(step.args);
        for (const auto& out : step.outputs)
            require(slurp(dir / out) == first[out],
                    "re-run of '" + step.args.substr(0, 20) + "...' changed " + out);
    }
    run("gradcheck --loss combined --seed 4");
    fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    std::vector<std::pair<std::string, std::function<void()>>> criteria = {
        {"masking law max(1, floor(0.15n))", criterion_masking_law},
        {"80/10/10 action frequencies within 1%", criterion_action_frequencies},
        {"head expansion oracle and linearity", criterion_head_expansion},
        {"loss gradients vs finite differences", criterion_gradient_oracles},
        {"retrieval equals brute-force oracle", criterion_retrieval_oracle},
        {"FLOPS metric oracle, additivity, monotone pruning", criterion_flops_metric},
        {"pruning idempotence, nesting, avg L0 bounds", criterion_pruning_contracts},
        {"diagnostics match dense oracles", criterion_diagnostics_oracles},
        {"postings-length variance drives FLOPS", criterion_tradeoff_direction},
        {"overlap mode theta semantics", criterion_overlap_mode},
        {"CLI determinism (byte-identical re-runs)", [&] { criterion_cli_determinism(cli); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i].second();
            std::cout << "[PASS] criterion " << (i + 1) << ": " << criteria[i].first << "\n";
        } catch (const std::exception& e) {
            std::cout << "[FAIL] criterion " << (i + 1) << ": " << criteria[i].first << " ("
                      << e.what() << ")\n";
            ++failures;
        }
    }
    if (failures) std::cout << failures << " criteria failed\n";
    return failures == 0 ? 0 : 1;
}
