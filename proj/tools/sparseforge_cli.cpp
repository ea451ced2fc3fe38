// Command line front end for the sparseforge pipeline: vocabulary and head
// construction, masking dataset generation, encoding, pruning, indexing,
// retrieval, evaluation and diagnostics.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparseforge/encode.hpp"
#include "sparseforge/index.hpp"
#include "sparseforge/losses.hpp"
#include "sparseforge/masking.hpp"
#include "sparseforge/metrics.hpp"
#include "sparseforge/prune.hpp"
#include "sparseforge/stats.hpp"
#include "sparseforge/vocab.hpp"

namespace sf = sparseforge;

namespace {

std::ifstream open_in(const std::string& path, bool binary = false) {
    std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
    if (!f) throw sf::io_error("cannot open " + path);
    return f;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f) throw sf::io_error("cannot open " + path + " for writing");
    return f;
}

sf::ExpandedVocabulary load_vocab(const std::string& path) {
    auto f = open_in(path);
    return sf::read_vocab(f);
}

sf::SubwordVocabulary load_subvocab(const std::string& path) {
    auto f = open_in(path);
    return sf::read_subword_vocab(f);
}

// ---- gradcheck -------------------------------------------------------------

sf::Batch random_batch(std::size_t n, std::size_t width, sf::Rng& rng) {
    sf::Batch b;
    for (std::size_t i = 0; i < n; ++i) {
        sf::DenseVector q(width), d(width);
        for (auto& x : q) x = rng.next_double();
        for (auto& x : d) x = rng.next_double();
        b.q_vectors.push_back(std::move(q));
        b.d_vectors.push_back(std::move(d));
    }
    return b;
}

template <typename Loss>
double finite_difference_error(const sf::Batch& batch, Loss loss, sf::Rng& rng,
                               std::size_t coords = 120, double step = 1e-5) {
    sf::LossValue analytic = loss(batch);
    double worst = 0.0;
    for (std::size_t s = 0; s < coords; ++s) {
        const bool on_q = rng.next_below(2) == 0;
        const std::size_t i = rng.next_below(batch.size());
        const std::size_t c = rng.next_below(batch.width());
        sf::Batch lo = batch, hi = batch;
        (on_q ? lo.q_vectors[i][c] : lo.d_vectors[i][c]) -= step;
        (on_q ? hi.q_vectors[i][c] : hi.d_vectors[i][c]) += step;
        const double numeric = (loss(hi).value - loss(lo).value) / (2.0 * step);
        const double exact = on_q ? analytic.q_gradients[i][c] : analytic.d_gradients[i][c];
        const double denom = std::max({std::abs(numeric), std::abs(exact), 1e-8});
        worst = std::max(worst, std::abs(numeric - exact) / denom);
    }
    return worst;
}

int run_gradcheck(const std::string& loss_name, std::uint64_t seed, double lambda) {
    double worst = 0.0;
    for (std::size_t n : {1, 2, 4, 8}) {
        for (std::size_t width : {8, 64}) {
            sf::Rng rng = sf::Rng::for_record(seed, n * 1000 + width);
            auto batch = random_batch(n, width, rng);
            double err = 0.0;
            if (loss_name == "inbatch") {
                err = finite_difference_error(batch, sf::in_batch_loss, rng);
            } else if (loss_name == "flops") {
                err = finite_difference_error(batch, [](const sf::Batch& b) {
                    auto v = sf::flops_loss(b.q_vectors);
                    v.d_gradients.assign(b.size(), sf::DenseVector(b.width(), 0.0));
                    return v;
                }, rng);
            } else if (loss_name == "jflops") {
                err = finite_difference_error(batch, [](const sf::Batch& b) {
                    return sf::joint_flops_loss(b.q_vectors, b.d_vectors);
                }, rng);
            } else {
                err = finite_difference_error(batch, [&](const sf::Batch& b) {
                    return sf::combined_objective(b, lambda);
                }, rng);
            }
            worst = std::max(worst, err);
        }
    }
    std::cout << "loss=" << loss_name << " max_relative_gradient_error=" << worst << "\n";
    return worst <= 1e-4 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparseforge: learned sparse retrieval pipeline"};
    app.require_subcommand(1);

    // vocab-build
    auto* vocab_build = app.add_subcommand("vocab-build", "build the expanded vocabulary");
    std::string vb_in, vb_subvocab, vb_out;
    std::size_t vb_target = 100000;
    bool vb_case_fold = false;
    vocab_build->add_option("--in", vb_in)->required();
    vocab_build->add_option("--subvocab", vb_subvocab)->required();
    vocab_build->add_option("--target", vb_target);
    vocab_build->add_option("--out", vb_out)->required();
    vocab_build->add_flag("--case-fold", vb_case_fold);

    // expand-head
    auto* expand = app.add_subcommand("expand-head", "mean-pool a base head onto the vocabulary");
    std::string eh_vocab, eh_base, eh_out;
    expand->add_option("--vocab", eh_vocab)->required();
    expand->add_option("--base", eh_base)->required();
    expand->add_option("--out", eh_out)->required();

    // mask-gen
    auto* mask_gen = app.add_subcommand("mask-gen", "generate masked pre-training examples");
    std::string mg_vocab, mg_subvocab, mg_in, mg_out;
    std::uint64_t mg_seed = 0;
    std::size_t mg_max_len = 64;
    bool mg_case_fold = false;
    mask_gen->add_option("--vocab", mg_vocab)->required();
    mask_gen->add_option("--subvocab", mg_subvocab)->required();
    mask_gen->add_option("--seed", mg_seed)->required();
    mask_gen->add_option("--in", mg_in)->required();
    mask_gen->add_option("--out", mg_out)->required();
    mask_gen->add_option("--max-len", mg_max_len);
    mask_gen->add_flag("--case-fold", mg_case_fold);

    // encode
    auto* encode = app.add_subcommand("encode", "mock-encode titles into sparse vectors");
    std::string en_vocab, en_head, en_in, en_out, en_style = "hash";
    std::size_t en_topk = 0;
    encode->add_option("--vocab", en_vocab)->required();
    encode->add_option("--head", en_head)->required();
    encode->add_option("--in", en_in)->required();
    encode->add_option("--out", en_out)->required();
    encode->add_option("--style", en_style)->check(CLI::IsMember({"hash", "head"}));
    encode->add_option("--topk", en_topk);

    // gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
    std::string gc_loss;
    std::uint64_t gc_seed = 0;
    double gc_lambda = 5.0;
    gradcheck->add_option("--loss", gc_loss)
        ->required()
        ->check(CLI::IsMember({"inbatch", "flops", "jflops", "combined"}));
    gradcheck->add_option("--seed", gc_seed)->required();
    gradcheck->add_option("--lambda", gc_lambda);

    // prune
    auto* prune_cmd = app.add_subcommand("prune", "static top-k pruning of sparse vectors");
    std::string pr_in, pr_out, pr_summary;
    std::size_t pr_k = 0;
    prune_cmd->add_option("--k", pr_k)->required();
    prune_cmd->add_option("--in", pr_in)->required();
    prune_cmd->add_option("--out", pr_out)->required();
    prune_cmd->add_option("--summary", pr_summary);

    // index-build
    auto* index_build = app.add_subcommand("index-build", "build an inverted index");
    std::string ib_in, ib_out, ib_vocab;
    std::size_t ib_dk = 0;
    index_build->add_option("--dk", ib_dk);
    index_build->add_option("--in", ib_in)->required();
    index_build->add_option("--out", ib_out)->required();
    index_build->add_option("--vocab", ib_vocab);

    // search
    auto* search_cmd = app.add_subcommand("search", "run queries against an index");
    std::string se_queries, se_index, se_out, se_mode = "dot", se_vocab, se_tag = "sparseforge";
    std::size_t se_qk = 0, se_top = 10;
    double se_theta = 0.0;
    search_cmd->add_option("--qk", se_qk);
    search_cmd->add_option("--mode", se_mode)->check(CLI::IsMember({"dot", "overlap"}));
    search_cmd->add_option("--theta", se_theta);
    search_cmd->add_option("--top", se_top);
    search_cmd->add_option("--queries", se_queries)->required();
    search_cmd->add_option("--index", se_index)->required();
    search_cmd->add_option("--out", se_out)->required();
    search_cmd->add_option("--vocab", se_vocab);
    search_cmd->add_option("--tag", se_tag);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "effectiveness and efficiency report");
    std::string ev_index, ev_queries, ev_qrels, ev_report;
    std::size_t ev_qk = 0, ev_top = 100;
    eval_cmd->add_option("--index", ev_index)->required();
    eval_cmd->add_option("--queries", ev_queries)->required();
    eval_cmd->add_option("--qrels", ev_qrels)->required();
    eval_cmd->add_option("--qk", ev_qk);
    eval_cmd->add_option("--top", ev_top);
    eval_cmd->add_option("--report", ev_report)->required();

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "representation diagnostics");
    std::string st_in, st_kind, st_report;
    std::uint64_t st_threshold = 1;
    stats_cmd->add_option("--in", st_in)->required();
    stats_cmd->add_option("--kind", st_kind)
        ->required()
        ->check(CLI::IsMember({"logit", "sparse"}));
    stats_cmd->add_option("--threshold", st_threshold);
    stats_cmd->add_option("--report", st_report)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*vocab_build) {
            auto sub = load_subvocab(vb_subvocab);
            auto corpus = open_in(vb_in);
            sf::UnigramConfig norm{vb_case_fold};
            auto counts = sf::count_unigrams(corpus, norm);
            auto vocab = sf::build_expanded_vocab(counts, sub, vb_target);
            auto out = open_out(vb_out);
            sf::write_vocab(out, vocab);
            std::cerr << "wrote " << vocab.size() << " terms\n";
        } else if (*expand) {
            auto vocab = load_vocab(eh_vocab);
            auto base_f = open_in(eh_base, true);
            auto base = sf::read_head(base_f);
            auto head = sf::expand_head(base, vocab);
            auto out = open_out(eh_out, true);
            sf::write_head(out, head);
        } else if (*mask_gen) {
            auto vocab = load_vocab(mg_vocab);
            auto sub = load_subvocab(mg_subvocab);
            auto in = open_in(mg_in);
            auto out = open_out(mg_out);
            sf::MaskingConfig cfg;
            cfg.max_length = mg_max_len;
            auto summary = sf::generate_masked_corpus(in, out, vocab, sub, mg_seed, cfg,
                                                      {mg_case_fold});
            std::cerr << summary.titles << " titles, " << summary.selected_terms
                      << " masked terms, " << summary.titles_without_u_terms
                      << " without U terms\n";
        } else if (*encode) {
            auto vocab = load_vocab(en_vocab);
            auto head_f = open_in(en_head, true);
            auto head = sf::read_head(head_f);
            auto in = open_in(en_in);
            auto out = open_out(en_out);
            const auto style = en_style == "hash" ? sf::MockStyle::HashProjection
                                                  : sf::MockStyle::HeadProduct;
            std::string line;
            std::uint64_t n = 0;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                auto matrix = sf::mock_encode(line, vocab, head, style);
                matrix.source_id = "t" + std::to_string(n);
                auto v = sf::pool(matrix);
                if (en_topk > 0) v = sf::topk_mask(v, en_topk);
                sf::write_sparse_vector(out, v);
                ++n;
            }
        } else if (*gradcheck) {
            return run_gradcheck(gc_loss, gc_seed, gc_lambda);
        } else if (*prune_cmd) {
            auto in = open_in(pr_in);
            auto vectors = sf::read_sparse_vectors(in);
            std::vector<sf::SparseVector> pruned;
            auto summary = sf::prune_corpus(vectors, pr_k, pruned);
            auto out = open_out(pr_out);
            for (const auto& v : pruned) sf::write_sparse_vector(out, v);
            if (!pr_summary.empty()) {
                nlohmann::ordered_json j;
                j["k"] = pr_k;
                j["count"] = summary.count;
                if (summary.avg_l0_before) {
                    j["avg_l0_before"] = *summary.avg_l0_before;
                    j["avg_l0_after"] = *summary.avg_l0_after;
                } else {
                    j["avg_l0_before"] = nullptr;
                    j["avg_l0_after"] = nullptr;
                }
                auto sf_out = open_out(pr_summary);
                sf_out << j.dump(2) << "\n";
            }
        } else if (*index_build) {
            auto in = open_in(ib_in);
            auto docs = sf::read_sparse_vectors(in);
            std::uint64_t hash = 0;
            if (!ib_vocab.empty()) hash = sf::vocab_hash(load_vocab(ib_vocab));
            auto index = sf::build_index(docs, ib_dk, hash);
            auto out = open_out(ib_out, true);
            sf::write_index(out, index);
            std::cerr << "indexed " << index.doc_count << " docs, "
                      << index.postings_total() << " postings\n";
        } else if (*search_cmd) {
            auto index_f = open_in(se_index, true);
            auto index = sf::read_index(index_f);
            auto queries_f = open_in(se_queries);
            auto queries = sf::read_sparse_vectors(queries_f);
            sf::SearchOptions opts;
            opts.qk = se_qk;
            opts.top_n = se_top;
            opts.mode = se_mode == "dot" ? sf::MatchMode::Dot : sf::MatchMode::OverlapThreshold;
            opts.theta = se_theta;
            if (!se_vocab.empty()) opts.expected_vocab_hash = sf::vocab_hash(load_vocab(se_vocab));
            auto out = open_out(se_out);
            for (const auto& q : queries) {
                auto result = sf::search(index, q, opts);
                sf::write_trec_run(out, q.source_id, result, index.manifest, se_tag);
            }
        } else if (*eval_cmd) {
            auto index_f = open_in(ev_index, true);
            auto index = sf::read_index(index_f);
            auto queries_f = open_in(ev_queries);
            auto queries = sf::read_sparse_vectors(queries_f);
            auto qrels_f = open_in(ev_qrels);
            auto qrels = sf::read_qrels(qrels_f);
            auto report = sf::evaluate(index, queries, qrels, ev_qk, ev_top);
            auto out = open_out(ev_report);
            sf::write_report(out, report);
        } else if (*stats_cmd) {
            auto in = open_in(st_in);
            nlohmann::ordered_json report;
            report["term_occ_threshold"] = st_threshold;
            if (st_kind == "sparse") {
                auto vectors = sf::read_sparse_vectors(in);
                std::vector<sf::ScoreRow> rows;
                std::vector<std::vector<double>> doc_scores;
                for (const auto& v : vectors) {
                    sf::ScoreRow row;
                    row.sparse_scores.insert(v.entries.begin(), v.entries.end());
                    rows.push_back(std::move(row));
                    std::vector<double> scores;
                    for (const auto& [t, w] : v.entries) scores.push_back(w);
                    doc_scores.push_back(std::move(scores));
                }
                auto ls = sf::logit_score_std(rows, st_threshold);
                report["logit-score-std"] = ls ? nlohmann::ordered_json(ls->std) : nullptr;
                report["logit-cnt"] = ls ? nlohmann::ordered_json(ls->logit_cnt) : nullptr;
                for (std::size_t k : {10, 100, 0}) {
                    const std::string key = k == 0 ? "all" : std::to_string(k);
                    auto ds = sf::doc_score_stats(doc_scores, k);
                    report["doc-score-avg-top" + key] = ds ? nlohmann::ordered_json(ds->avg) : nullptr;
                    report["doc-score-std-top" + key] = ds ? nlohmann::ordered_json(ds->std) : nullptr;
                }
                auto l0 = sf::l0_std(vectors);
                report["L0-std"] = l0 ? nlohmann::ordered_json(*l0) : nullptr;
                report["rows"] = "sparse";
            } else {
                // one dense token row per line: {"scores":[...]}
                std::vector<sf::ScoreRow> rows;
                std::vector<std::vector<double>> dense_rows;
                std::string line;
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    auto j = nlohmann::json::parse(line);
                    auto scores = j.at("scores").get<std::vector<double>>();
                    sf::ScoreRow row;
                    row.dense = true;
                    row.width = scores.size();
                    row.dense_scores = scores;
                    rows.push_back(std::move(row));
                    dense_rows.push_back(std::move(scores));
                }
                auto ls = sf::logit_score_std(rows, st_threshold);
                report["logit-score-std"] = ls ? nlohmann::ordered_json(ls->std) : nullptr;
                report["logit-cnt"] = ls ? nlohmann::ordered_json(ls->logit_cnt) : nullptr;
                auto nn = sf::non_neg_terms_stats(dense_rows);
                report["non-neg-terms-avg"] = nn.avg;
                report["non-neg-terms-std"] = nn.std;
                report["rows"] = "dense";
            }
            auto out = open_out(st_report);
            out << report.dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
