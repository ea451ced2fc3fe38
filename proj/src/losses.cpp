#include "sparseforge/losses.hpp"

#include <algorithm>
#include <cmath>

namespace sparseforge {

namespace {

void check_batch(const Batch& batch) {
    if (batch.q_vectors.empty()) throw validation_error("empty batch");
    if (batch.q_vectors.size() != batch.d_vectors.size())
        throw validation_error("q/d list length mismatch");
    const std::size_t w = batch.q_vectors[0].size();
    for (const auto& v : batch.q_vectors)
        if (v.size() != w) throw validation_error("query width mismatch");
    for (const auto& v : batch.d_vectors)
        if (v.size() != w) throw validation_error("document width mismatch");
}

DenseBatch zeros_like(const DenseBatch& b) {
    DenseBatch g(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) g[i].assign(b[i].size(), 0.0);
    return g;
}

}  // namespace

double similarity(const DenseVector& q, const DenseVector& d) {
    if (q.size() != d.size()) throw validation_error("similarity width mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += q[i] * d[i];
    return s;
}

LossValue in_batch_loss(const Batch& batch) {
    check_batch(batch);
    const std::size_t n = batch.size();
    const std::size_t w = batch.width();

    // similarity matrix s[i][j] = q_i . d_j
    std::vector<std::vector<double>> sim(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sim[i][j] = similarity(batch.q_vectors[i], batch.d_vectors[j]);

    LossValue out;
    out.q_gradients = zeros_like(batch.q_vectors);
    out.d_gradients = zeros_like(batch.d_vectors);

    for (std::size_t i = 0; i < n; ++i) {
        const double row_max = *std::max_element(sim[i].begin(), sim[i].end());
        double denom = 0.0;
        for (std::size_t j = 0; j < n; ++j) denom += std::exp(sim[i][j] - row_max);
        const double lse = row_max + std::log(denom);
        out.value += (lse - sim[i][i]) / static_cast<double>(n);

        for (std::size_t j = 0; j < n; ++j) {
            const double p = std::exp(sim[i][j] - lse);
            const double g = (p - (i == j ? 1.0 : 0.0)) / static_cast<double>(n);
            for (std::size_t c = 0; c < w; ++c) {
                out.q_gradients[i][c] += g * batch.d_vectors[j][c];
                out.d_gradients[j][c] += g * batch.q_vectors[i][c];
            }
        }
    }
    return out;
}

LossValue flops_loss(const DenseBatch& vectors) {
    if (vectors.empty()) throw validation_error("empty vector list");
    const std::size_t n = vectors.size();
    const std::size_t w = vectors[0].size();
    for (const auto& v : vectors)
        if (v.size() != w) throw validation_error("width mismatch");

    std::vector<double> mean(w, 0.0);
    for (const auto& v : vectors)
        for (std::size_t c = 0; c < w; ++c) mean[c] += v[c];
    for (double& m : mean) m /= static_cast<double>(n);

    LossValue out;
    for (double m : mean) out.value += m * m;
    out.q_gradients = zeros_like(vectors);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < w; ++c)
            out.q_gradients[i][c] = 2.0 * mean[c] / static_cast<double>(n);
    return out;
}

LossValue joint_flops_loss(const DenseBatch& q_vectors, const DenseBatch& d_vectors) {
    if (q_vectors.empty() || d_vectors.empty()) throw validation_error("empty batch");
    const std::size_t w = q_vectors[0].size();
    for (const auto& v : q_vectors)
        if (v.size() != w) throw validation_error("query width mismatch");
    for (const auto& v : d_vectors)
        if (v.size() != w) throw validation_error("document width mismatch");

    std::vector<double> q_mean(w, 0.0), d_mean(w, 0.0);
    for (const auto& v : q_vectors)
        for (std::size_t c = 0; c < w; ++c) q_mean[c] += v[c];
    for (const auto& v : d_vectors)
        for (std::size_t c = 0; c < w; ++c) d_mean[c] += v[c];
    for (double& m : q_mean) m /= static_cast<double>(q_vectors.size());
    for (double& m : d_mean) m /= static_cast<double>(d_vectors.size());

    LossValue out;
    for (std::size_t c = 0; c < w; ++c) out.value += q_mean[c] * d_mean[c];
    out.q_gradients = zeros_like(q_vectors);
    out.d_gradients = zeros_like(d_vectors);
    for (auto& g : out.q_gradients)
        for (std::size_t c = 0; c < w; ++c)
            g[c] = d_mean[c] / static_cast<double>(q_vectors.size());
    for (auto& g : out.d_gradients)
        for (std::size_t c = 0; c < w; ++c)
            g[c] = q_mean[c] / static_cast<double>(d_vectors.size());
    return out;
}

LossValue combined_objective(const Batch& batch, double lambda_j) {
    if (lambda_j < 0.0) throw validation_error("lambda_j must be non-negative");
    LossValue ib = in_batch_loss(batch);
    LossValue jf = joint_flops_loss(batch.q_vectors, batch.d_vectors);

    LossValue out;
    out.value = ib.value + lambda_j * jf.value;
    out.q_gradients = std::move(ib.q_gradients);
    out.d_gradients = std::move(ib.d_gradients);
    for (std::size_t i = 0; i < out.q_gradients.size(); ++i)
        for (std::size_t c = 0; c < out.q_gradients[i].size(); ++c)
            out.q_gradients[i][c] += lambda_j * jf.q_gradients[i][c];
    for (std::size_t i = 0; i < out.d_gradients.size(); ++i)
        for (std::size_t c = 0; c < out.d_gradients[i].size(); ++c)
            out.d_gradients[i][c] += lambda_j * jf.d_gradients[i][c];
    return out;
}

}  // namespace sparseforge
