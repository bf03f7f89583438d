#pragma once

#include <span>
#include <string>
#include <vector>

#include "dcrnn/tape.hpp"

namespace dcrnn {

enum class ActivationKind { Identity, Relu, Sigmoid, Tanh };

const char* activation_name(ActivationKind k);
ActivationKind activation_from_name(const std::string& name);

namespace ops {

// c[p x r] = a[p x q] * b[q x r]; dA = dC*B^T, dB = A^T*dC
NodeId matmul(Tape& t, NodeId a, NodeId b);

// Element-wise product of identically shaped tensors; dA = dC.B, dB = dC.A
NodeId hadamard(Tape& t, NodeId a, NodeId b);

NodeId add(Tape& t, NodeId a, NodeId b);
NodeId sub(Tape& t, NodeId a, NodeId b);
NodeId scale(Tape& t, NodeId a, double s);

// m[B x d] + v[d] broadcast over rows (bias add).
NodeId add_rowvec(Tape& t, NodeId m, NodeId v);

// m[B x d] scaled per row by c[B] or c[B x 1].
NodeId mul_colvec(Tape& t, NodeId m, NodeId c);

// Concatenate along `axis`; rank 1 (axis 0) or rank 2 (axis 0 or 1).
NodeId concat(Tape& t, std::span<const NodeId> parts, i64 axis);

// Half-open window [begin, end) along `axis`; backward scatters into zeros.
NodeId slice(Tape& t, NodeId a, i64 axis, i64 begin, i64 end);

NodeId reduce_sum(Tape& t, NodeId a);   // scalar
NodeId reduce_mean(Tape& t, NodeId a);  // scalar

NodeId activation(Tape& t, NodeId a, ActivationKind k);

// Row-wise softmax of a [B x k] matrix, numerically stabilized by the row max.
NodeId softmax_rows(Tape& t, NodeId a);

// Same data, new shape with equal element count.
NodeId reshape(Tape& t, NodeId a, Shape s);

// out[B x d] = table rows selected by ids; backward scatter-adds into the table.
NodeId embed_rows(Tape& t, NodeId table, std::vector<i64> ids);

// Mean over elements of the weighted binary cross-entropy
//   -[w*z*log(sigmoid(x)) + (1-z)*log(1-sigmoid(x))]
// evaluated in the shifted softplus form that is stable for large |x|.
// labels[i] in {0,1}; one label per element of `logits`.
NodeId weighted_bce_mean(Tape& t, NodeId logits, std::vector<double> labels, double pos_weight);

}  // namespace ops
}  // namespace dcrnn
