#pragma once

#include <cstddef>
#include <vector>

#include "sparseforge/common.hpp"

namespace sparseforge {

using DenseVector = std::vector<double>;
using DenseBatch = std::vector<DenseVector>;

// Paired training batch: q_vectors[i] pairs with positive d_vectors[i].
struct Batch {
    DenseBatch q_vectors;
    DenseBatch d_vectors;

    std::size_t size() const { return q_vectors.size(); }
    std::size_t width() const { return q_vectors.empty() ? 0 : q_vectors[0].size(); }
};

struct LossValue {
    double value = 0.0;
    DenseBatch q_gradients;
    DenseBatch d_gradients;
};

double similarity(const DenseVector& q, const DenseVector& d);

// Softmax cross-entropy over in-batch negatives, log-sum-exp stabilized.
// The denominator runs over all batch documents, the positive counted once.
LossValue in_batch_loss(const Batch& batch);

// Squared norm of the elementwise batch mean.
LossValue flops_loss(const DenseBatch& vectors);

// Dot product of the query-batch mean and the document-batch mean.
LossValue joint_flops_loss(const DenseBatch& q_vectors, const DenseBatch& d_vectors);

// in_batch_loss + lambda_j * joint_flops_loss.
LossValue combined_objective(const Batch& batch, double lambda_j);

}  // namespace sparseforge
