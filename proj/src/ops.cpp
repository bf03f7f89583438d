#include "dcrnn/ops.hpp"

#include <cmath>
#include <cstring>

#include "dcrnn/kernels.hpp"

namespace dcrnn {

const char* activation_name(ActivationKind k) {
    switch (k) {
        case ActivationKind::Identity: return "identity";
        case ActivationKind::Relu: return "relu";
        case ActivationKind::Sigmoid: return "sigmoid";
        case ActivationKind::Tanh: return "tanh";
    }
    return "?";
}

ActivationKind activation_from_name(const std::string& name) {
    if (name == "identity") return ActivationKind::Identity;
    if (name == "relu") return ActivationKind::Relu;
    if (name == "sigmoid") return ActivationKind::Sigmoid;
    if (name == "tanh") return ActivationKind::Tanh;
    raise(ErrorKind::Config, "unknown activation '", name, "'");
}

namespace ops {

namespace {

void require_rank2(const Tape& t, NodeId id, const char* op) {
    if (t.value(id).shape().rank() != 2)
        raise(ErrorKind::Shape, op, ": expected rank-2 tensor, got ", t.value(id).shape().str());
}

void require_same_shape(const Tape& t, NodeId a, NodeId b, const char* op) {
    if (t.value(a).shape() != t.value(b).shape())
        raise(ErrorKind::Shape, op, ": shape mismatch ", t.value(a).shape().str(), " vs ", t.value(b).shape().str());
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

NodeId matmul(Tape& t, NodeId a, NodeId b) {
    require_rank2(t, a, "matmul");
    require_rank2(t, b, "matmul");
    const Tensor& av = t.value(a);
    const Tensor& bv = t.value(b);
    if (av.cols() != bv.rows())
        raise(ErrorKind::Shape, "matmul: inner dimensions disagree: ", av.shape().str(), " vs ", bv.shape().str());
    const i64 p = av.rows(), q = av.cols(), r = bv.cols();
    Tensor out(Shape{p, r});
    kernels::matmul_nn(av.data(), bv.data(), out.data(), p, q, r, false);
    return t.emplace(std::move(out), "matmul", {a, b}, [a, b, p, q, r](Tape& tp, NodeId self) {
        const double* dc = tp.grad(self).data();
        kernels::matmul_nt(dc, tp.value(b).data(), tp.grad_buffer(a).data(), p, q, r, true);
        kernels::matmul_tn(tp.value(a).data(), dc, tp.grad_buffer(b).data(), p, q, r, true);
    });
}

NodeId hadamard(Tape& t, NodeId a, NodeId b) {
    require_same_shape(t, a, b, "hadamard");
    const Tensor& av = t.value(a);
    const Tensor& bv = t.value(b);
    Tensor out(av.shape());
    kernels::zip(av.data(), bv.data(), out.data(), av.size(), [](double x, double y) { return x * y; });
    return t.emplace(std::move(out), "hadamard", {a, b}, [a, b](Tape& tp, NodeId self) {
        const Tensor& dc = tp.grad(self);
        kernels::zip_acc(dc.data(), tp.value(b).data(), tp.grad_buffer(a).data(), dc.size(),
                         [](double g, double y) { return g * y; });
        kernels::zip_acc(dc.data(), tp.value(a).data(), tp.grad_buffer(b).data(), dc.size(),
                         [](double g, double x) { return g * x; });
    });
}

NodeId add(Tape& t, NodeId a, NodeId b) {
    require_same_shape(t, a, b, "add");
    const Tensor& av = t.value(a);
    Tensor out(av.shape());
    kernels::zip(av.data(), t.value(b).data(), out.data(), av.size(), [](double x, double y) { return x + y; });
    return t.emplace(std::move(out), "add", {a, b}, [a, b](Tape& tp, NodeId self) {
        const Tensor& dc = tp.grad(self);
        kernels::map_acc(dc.data(), tp.grad_buffer(a).data(), dc.size(), [](double g) { return g; });
        kernels::map_acc(dc.data(), tp.grad_buffer(b).data(), dc.size(), [](double g) { return g; });
    });
}

NodeId sub(Tape& t, NodeId a, NodeId b) {
    require_same_shape(t, a, b, "sub");
    const Tensor& av = t.value(a);
    Tensor out(av.shape());
    kernels::zip(av.data(), t.value(b).data(), out.data(), av.size(), [](double x, double y) { return x - y; });
    return t.emplace(std::move(out), "sub", {a, b}, [a, b](Tape& tp, NodeId self) {
        const Tensor& dc = tp.grad(self);
        kernels::map_acc(dc.data(), tp.grad_buffer(a).data(), dc.size(), [](double g) { return g; });
        kernels::map_acc(dc.data(), tp.grad_buffer(b).data(), dc.size(), [](double g) { return -g; });
    });
}

NodeId scale(Tape& t, NodeId a, double s) {
    const Tensor& av = t.value(a);
    Tensor out(av.shape());
    kernels::map(av.data(), out.data(), av.size(), [s](double x) { return s * x; });
    return t.emplace(std::move(out), "scale", {a}, [a, s](Tape& tp, NodeId self) {
        const Tensor& dc = tp.grad(self);
        kernels::map_acc(dc.data(), tp.grad_buffer(a).data(), dc.size(), [s](double g) { return s * g; });
    });
}

NodeId add_rowvec(Tape& t, NodeId m, NodeId v) {
    require_rank2(t, m, "add_rowvec");
    const Tensor& mv = t.value(m);
    const Tensor& vv = t.value(v);
    if (vv.shape().rank() != 1 || vv.size() != mv.cols())
        raise(ErrorKind::Shape, "add_rowvec: vector ", vv.shape().str(), " does not match matrix ", mv.shape().str());
    const i64 rows = mv.rows(), cols = mv.cols();
    Tensor out(mv.shape());
    for (i64 i = 0; i < rows; ++i)
        for (i64 j = 0; j < cols; ++j) out.at(i, j) = mv.at(i, j) + vv[j];
    return t.emplace(std::move(out), "add_rowvec", {m, v}, [m, v, rows, cols](Tape& tp, NodeId self) {
        const Tensor& dc = tp.grad(self);
        kernels::map_acc(dc.data(), tp.grad_buffer(m).data(), dc.size(), [](double g) { return g; });
        Tensor& dv = tp.grad_buffer(v);
        for (i64 i = 0; i < rows; ++i)
            for (i64 j = 0; j < cols; ++j) dv[j] += dc.at(i, j);
    });
}

NodeId mul_colvec(Tape& t, NodeId m, NodeId c) {
    require_rank2(t, m, "mul_colvec");
    const Tensor& mv = t.value(m);
    const Tensor& cv = t.value(c);
    if (cv.size() != mv.rows() || (cv.shape().rank() == 2 && cv.cols() != 1))
        raise(ErrorKind::Shape, "mul_colvec: column ", cv.shape().str(), " does not match matrix ", mv.shape().str());
    const i64 rows = mv.rows(), cols = mv.cols();
    Tensor out(mv.shape());
    for (i64 i = 0; i < rows; ++i)
        for (i64 j = 0; j < cols; ++j) out.at(i, j) = mv.at(i, j) * cv[i];
    return t.emplace(std::move(out), "mul_colvec", {m, c}, [m, c, rows, cols](Tape& tp, NodeId self) {
        const Tensor& dc = tp.grad(self);
        const Tensor& mval = tp.value(m);
        const Tensor& cval = tp.value(c);
        Tensor& dm = tp.grad_buffer(m);
        Tensor& dcol = tp.grad_buffer(c);
        for (i64 i = 0; i < rows; ++i) {
            double acc = 0.0;
            for (i64 j = 0; j < cols; ++j) {
                dm.at(i, j) += dc.at(i, j) * cval[i];
                acc += dc.at(i, j) * mval.at(i, j);
            }
            dcol[i] += acc;
        }
    });
}

NodeId concat(Tape& t, std::span<const NodeId> parts, i64 axis) {
    if (parts.empty()) raise(ErrorKind::Contract, "concat: no inputs");
    const i64 rank = t.value(parts[0]).shape().rank();
    if (rank < 1 || rank > 2 || axis < 0 || axis >= rank)
        raise(ErrorKind::Shape, "concat: axis ", axis, " invalid for rank-", rank, " input");
    for (NodeId p : parts) {
        const Shape& s = t.value(p).shape();
        if (s.rank() != rank) raise(ErrorKind::Shape, "concat: mixed ranks ", rank, " vs ", s.rank());
        for (i64 d = 0; d < rank; ++d)
            if (d != axis && s[d] != t.value(parts[0]).shape()[d])
                raise(ErrorKind::Shape, "concat: off-axis extent mismatch ", s.str(), " vs ",
                      t.value(parts[0]).shape().str());
    }

    std::vector<NodeId> parents(parts.begin(), parts.end());
    if (rank == 1 || axis == 0) {
        // Row-major layout makes axis-0 concat a buffer append.
        i64 total = 0;
        for (NodeId p : parts) total += t.value(p).shape()[0];
        Shape out_shape = rank == 1 ? Shape{total} : Shape{total, t.value(parts[0]).cols()};
        Tensor out(out_shape);
        i64 off = 0;
        for (NodeId p : parts) {
            const Tensor& pv = t.value(p);
            std::memcpy(out.data() + off, pv.data(), sizeof(double) * static_cast<std::size_t>(pv.size()));
            off += pv.size();
        }
        return t.emplace(std::move(out), "concat", std::move(parents), [parts = std::vector<NodeId>(parts.begin(), parts.end())](Tape& tp, NodeId self) {
            const Tensor& dc = tp.grad(self);
            i64 off = 0;
            for (NodeId p : parts) {
                Tensor& dp = tp.grad_buffer(p);
                for (i64 i = 0; i < dp.size(); ++i) dp[i] += dc[off + i];
                off += dp.size();
            }
        });
    }

    // rank 2, axis 1
    const i64 rows = t.value(parts[0]).rows();
    i64 total_cols = 0;
    for (NodeId p : parts) total_cols += t.value(p).cols();
    Tensor out(Shape{rows, total_cols});
    i64 col_off = 0;
    for (NodeId p : parts) {
        const Tensor& pv = t.value(p);
        for (i64 i = 0; i < rows; ++i)
            std::memcpy(out.data() + i * total_cols + col_off, pv.data() + i * pv.cols(),
                        sizeof(double) * static_cast<std::size_t>(pv.cols()));
        col_off += pv.cols();
    }
    return t.emplace(std::move(out), "concat", std::move(parents),
                     [parts = std::vector<NodeId>(parts.begin(), parts.end()), rows, total_cols](Tape& tp, NodeId self) {
                         const Tensor& dc = tp.grad(self);
                         i64 col_off = 0;
                         for (NodeId p : parts) {
                             Tensor& dp = tp.grad_buffer(p);
                             const i64 pc = dp.cols();
                             for (i64 i = 0; i < rows; ++i)
                                 for (i64 j = 0; j < pc; ++j) dp.at(i, j) += dc[i * total_cols + col_off + j];
                             col_off += pc;
                         }
                     });
}

NodeId slice(Tape& t, NodeId a, i64 axis, i64 begin, i64 end) {
    const Shape& s = t.value(a).shape();
    const i64 rank = s.rank();
    if (rank < 1 || rank > 2 || axis < 0 || axis >= rank)
        raise(ErrorKind::Shape, "slice: axis ", axis, " invalid for rank-", rank, " input");
    if (begin < 0 || end > s[axis] || begin >= end)
        raise(ErrorKind::Shape, "slice: window [", begin, ", ", end, ") out of bounds for extent ", s[axis],
              " of ", s.str());

    const Tensor& av = t.value(a);
    if (rank == 1 || axis == 0) {
        const i64 row_w = rank == 1 ? 1 : av.cols();
        Shape out_shape = rank == 1 ? Shape{end - begin} : Shape{end - begin, av.cols()};
        Tensor out(out_shape);
        std::memcpy(out.data(), av.data() + begin * row_w,
                    sizeof(double) * static_cast<std::size_t>((end - begin) * row_w));
        return t.emplace(std::move(out), "slice", {a}, [a, begin, row_w](Tape& tp, NodeId self) {
            const Tensor& dc = tp.grad(self);
            Tensor& da = tp.grad_buffer(a);
            double* base = da.data() + begin * row_w;
            for (i64 i = 0; i < dc.size(); ++i) base[i] += dc[i];
        });
    }

    // rank 2, axis 1
    const i64 rows = av.rows(), cols = av.cols(), w = end - begin;
    Tensor out(Shape{rows, w});
    for (i64 i = 0; i < rows; ++i)
        std::memcpy(out.data() + i * w, av.data() + i * cols + begin, sizeof(double) * static_cast<std::size_t>(w));
    return t.emplace(std::move(out), "slice", {a}, [a, begin, rows, cols, w](Tape& tp, NodeId self) {
        const Tensor& dc = tp.grad(self);
        Tensor& da = tp.grad_buffer(a);
        for (i64 i = 0; i < rows; ++i)
            for (i64 j = 0; j < w; ++j) da[i * cols + begin + j] += dc[i * w + j];
    });
}

NodeId reduce_sum(Tape& t, NodeId a) {
    const Tensor& av = t.value(a);
    double s = 0.0;
    for (i64 i = 0; i < av.size(); ++i) s += av[i];
    return t.emplace(Tensor::scalar(s), "reduce_sum", {a}, [a](Tape& tp, NodeId self) {
        const double g = tp.grad(self)[0];
        Tensor& da = tp.grad_buffer(a);
        for (i64 i = 0; i < da.size(); ++i) da[i] += g;
    });
}

NodeId reduce_mean(Tape& t, NodeId a) {
    const Tensor& av = t.value(a);
    const i64 n = av.size();
    double s = 0.0;
    for (i64 i = 0; i < n; ++i) s += av[i];
    return t.emplace(Tensor::scalar(s / static_cast<double>(n)), "reduce_mean", {a}, [a, n](Tape& tp, NodeId self) {
        const double g = tp.grad(self)[0] / static_cast<double>(n);
        Tensor& da = tp.grad_buffer(a);
        for (i64 i = 0; i < da.size(); ++i) da[i] += g;
    });
}

NodeId activation(Tape& t, NodeId a, ActivationKind k) {
    if (k == ActivationKind::Identity) return a;
    const Tensor& av = t.value(a);
    Tensor out(av.shape());
    switch (k) {
        case ActivationKind::Relu:
            kernels::map(av.data(), out.data(), av.size(), [](double x) { return x > 0.0 ? x : 0.0; });
            break;
        case ActivationKind::Sigmoid:
            kernels::map(av.data(), out.data(), av.size(), [](double x) { return sigmoid(x); });
            break;
        case ActivationKind::Tanh:
            kernels::map(av.data(), out.data(), av.size(), [](double x) { return std::tanh(x); });
            break;
        default:
            break;
    }
    return t.emplace(std::move(out), activation_name(k), {a}, [a, k](Tape& tp, NodeId self) {
        const Tensor& dc = tp.grad(self);
        const Tensor& y = tp.value(self);
        const Tensor& x = tp.value(a);
        Tensor& da = tp.grad_buffer(a);
        switch (k) {
            case ActivationKind::Relu:
                kernels::zip_acc(dc.data(), x.data(), da.data(), dc.size(),
                                 [](double g, double xi) { return xi > 0.0 ? g : 0.0; });
                break;
            case ActivationKind::Sigmoid:
                kernels::zip_acc(dc.data(), y.data(), da.data(), dc.size(),
                                 [](double g, double yi) { return g * yi * (1.0 - yi); });
                break;
            case ActivationKind::Tanh:
                kernels::zip_acc(dc.data(), y.data(), da.data(), dc.size(),
                                 [](double g, double yi) { return g * (1.0 - yi * yi); });
                break;
            default:
                break;
        }
    });
}

NodeId softmax_rows(Tape& t, NodeId a) {
    require_rank2(t, a, "softmax_rows");
    const Tensor& av = t.value(a);
    const i64 rows = av.rows(), cols = av.cols();
    Tensor out(av.shape());
    for (i64 i = 0; i < rows; ++i) {
        double mx = av.at(i, 0);
        for (i64 j = 1; j < cols; ++j) mx = std::max(mx, av.at(i, j));
        double denom = 0.0;
        for (i64 j = 0; j < cols; ++j) {
            const double e = std::exp(av.at(i, j) - mx);
            out.at(i, j) = e;
            denom += e;
        }
        for (i64 j = 0; j < cols; ++j) out.at(i, j) /= denom;
    }
    return t.emplace(std::move(out), "softmax_rows", {a}, [a, rows, cols](Tape& tp, NodeId self) {
        const Tensor& dc = tp.grad(self);
        const Tensor& y = tp.value(self);
        Tensor& da = tp.grad_buffer(a);
        for (i64 i = 0; i < rows; ++i) {
            double dot = 0.0;
            for (i64 j = 0; j < cols; ++j) dot += dc.at(i, j) * y.at(i, j);
            for (i64 j = 0; j < cols; ++j) da.at(i, j) += y.at(i, j) * (dc.at(i, j) - dot);
        }
    });
}

NodeId reshape(Tape& t, NodeId a, Shape s) {
    const Tensor& av = t.value(a);
    if (s.count() != av.size())
        raise(ErrorKind::Shape, "reshape: element count mismatch ", av.shape().str(), " -> ", s.str());
    Tensor out(s, std::vector<double>(av.data(), av.data() + av.size()));
    return t.emplace(std::move(out), "reshape", {a}, [a](Tape& tp, NodeId self) {
        const Tensor& dc = tp.grad(self);
        Tensor& da = tp.grad_buffer(a);
        for (i64 i = 0; i < da.size(); ++i) da[i] += dc[i];
    });
}

NodeId embed_rows(Tape& t, NodeId table, std::vector<i64> ids) {
    require_rank2(t, table, "embed_rows");
    const Tensor& tv = t.value(table);
    const i64 vocab = tv.rows(), dim = tv.cols();
    const i64 batch = static_cast<i64>(ids.size());
    if (batch == 0) raise(ErrorKind::Contract, "embed_rows: empty id list");
    for (i64 b = 0; b < batch; ++b)
        if (ids[static_cast<std::size_t>(b)] < 0 || ids[static_cast<std::size_t>(b)] >= vocab)
            raise(ErrorKind::Data, "embed_rows: id ", ids[static_cast<std::size_t>(b)],
                  " out of vocabulary (size ", vocab, ")");
    Tensor out(Shape{batch, dim});
    for (i64 b = 0; b < batch; ++b)
        std::memcpy(out.data() + b * dim, tv.data() + ids[static_cast<std::size_t>(b)] * dim,
                    sizeof(double) * static_cast<std::size_t>(dim));
    return t.emplace(std::move(out), "embed_rows", {table},
                     [table, ids = std::move(ids), dim](Tape& tp, NodeId self) {
                         const Tensor& dc = tp.grad(self);
                         Tensor& dt = tp.grad_buffer(table);
                         // Ids may repeat; the scatter-add stays serial so the
                         // accumulation order is fixed.
                         for (std::size_t b = 0; b < ids.size(); ++b) {
                             double* row = dt.data() + ids[b] * dim;
                             const double* g = dc.data() + static_cast<i64>(b) * dim;
                             for (i64 j = 0; j < dim; ++j) row[j] += g[j];
                         }
                     });
}

NodeId weighted_bce_mean(Tape& t, NodeId logits, std::vector<double> labels, double pos_weight) {
    if (pos_weight < 0.0) raise(ErrorKind::Contract, "weighted_bce: pos_weight must be >= 0, got ", pos_weight);
    const Tensor& xv = t.value(logits);
    const i64 n = xv.size();
    if (static_cast<i64>(labels.size()) != n)
        raise(ErrorKind::Shape, "weighted_bce: ", labels.size(), " labels for ", n, " logits");
    double total = 0.0;
    for (i64 i = 0; i < n; ++i) {
        const double x = xv[i];
        const double z = labels[static_cast<std::size_t>(i)];
        const double l = 1.0 + (pos_weight - 1.0) * z;
        // (1-z)*x + l*log(1+exp(-x)), rewritten so exp never overflows.
        total += (1.0 - z) * x + l * (std::log1p(std::exp(-std::abs(x))) + std::max(-x, 0.0));
    }
    return t.emplace(Tensor::scalar(total / static_cast<double>(n)), "weighted_bce", {logits},
                     [logits, labels = std::move(labels), pos_weight, n](Tape& tp, NodeId self) {
                         const double g = tp.grad(self)[0] / static_cast<double>(n);
                         const Tensor& xv = tp.value(logits);
                         Tensor& dx = tp.grad_buffer(logits);
                         for (i64 i = 0; i < n; ++i) {
                             const double s = sigmoid(xv[i]);
                             const double z = labels[static_cast<std::size_t>(i)];
                             dx[i] += g * (pos_weight * z * (s - 1.0) + (1.0 - z) * s);
                         }
                     });
}

}  // namespace ops
}  // namespace dcrnn
