#include "dcrnn/layers.hpp"

#include <cmath>

namespace dcrnn {

Tensor init_uniform(Shape shape, i64 fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Tensor t(std::move(shape));
    for (i64 i = 0; i < t.size(); ++i) t[i] = (2.0 * uniform01(rng) - 1.0) * bound;
    return t;
}

EmbeddingTable EmbeddingTable::create(ParamSet& ps, const std::string& group, std::span<const i64> vocab_sizes,
                                      i64 dim, Rng& rng) {
    if (vocab_sizes.empty()) raise(ErrorKind::Config, "embedding: need at least one field");
    if (dim < 1) raise(ErrorKind::Config, "embedding: dim must be >= 1, got ", dim);
    EmbeddingTable e;
    e.dim = dim;
    e.vocab_sizes.assign(vocab_sizes.begin(), vocab_sizes.end());
    for (std::size_t f = 0; f < e.vocab_sizes.size(); ++f) {
        if (e.vocab_sizes[f] < 1) raise(ErrorKind::Config, "embedding: vocab size of field ", f, " must be >= 1");
        e.field_tables.push_back(
            ps.add(group, cat("field", f), init_uniform(Shape{e.vocab_sizes[f], dim}, dim, rng)));
    }
    return e;
}

NodeId EmbeddingTable::forward(Tape& t, const TapeBinding& bind, std::span<const std::vector<i64>> ids_by_field) const {
    if (static_cast<i64>(ids_by_field.size()) != field_count())
        raise(ErrorKind::Contract, "embed: got ids for ", ids_by_field.size(), " fields, expected ", field_count());
    std::vector<NodeId> parts;
    parts.reserve(ids_by_field.size());
    for (std::size_t f = 0; f < ids_by_field.size(); ++f) {
        for (i64 id : ids_by_field[f])
            if (id < 0 || id >= vocab_sizes[f])
                raise(ErrorKind::Data, "embed: field ", f, " id ", id, " outside vocabulary of size ",
                      vocab_sizes[f]);
        parts.push_back(ops::embed_rows(t, bind[field_tables[f]], ids_by_field[f]));
    }
    if (parts.size() == 1) return parts[0];
    return ops::concat(t, parts, 1);
}

DenseLayer DenseLayer::create(ParamSet& ps, const std::string& group, const std::string& local, i64 in, i64 out,
                              ActivationKind act, Rng& rng) {
    DenseLayer d;
    d.in = in;
    d.out = out;
    d.act = act;
    d.weight = ps.add(group, local + ".weight", init_uniform(Shape{in, out}, in, rng));
    d.bias = ps.add(group, local + ".bias", init_uniform(Shape{out}, in, rng));
    return d;
}

NodeId DenseLayer::forward(Tape& t, const TapeBinding& bind, NodeId x) const {
    const Tensor& xv = t.value(x);
    if (xv.shape().rank() != 2 || xv.cols() != in)
        raise(ErrorKind::Shape, "dense: input ", xv.shape().str(), " does not match weight ", in, "x", out);
    NodeId y = ops::add_rowvec(t, ops::matmul(t, x, bind[weight]), bind[bias]);
    return ops::activation(t, y, act);
}

RnnCell RnnCell::create(ParamSet& ps, const std::string& group, const std::string& local, CellKind kind, i64 d,
                        i64 h, Rng& rng) {
    RnnCell c;
    c.kind = kind;
    c.input_dim = d;
    c.hidden_dim = h;
    const i64 g = c.gates();
    c.wx = ps.add(group, local + ".wx", init_uniform(Shape{d, g * h}, d, rng));
    c.wh = ps.add(group, local + ".wh", init_uniform(Shape{h, g * h}, h, rng));
    c.b = ps.add(group, local + ".b", init_uniform(Shape{g * h}, h, rng));
    return c;
}

RnnCell::State RnnCell::initial_state(Tape& t, i64 batch) const {
    State s;
    s.h = t.leaf(Tensor::zeros(Shape{batch, hidden_dim}));
    s.c = kind == CellKind::Lstm ? t.leaf(Tensor::zeros(Shape{batch, hidden_dim})) : s.h;
    return s;
}

RnnCell::State RnnCell::step(Tape& t, const TapeBinding& bind, NodeId x_t, State prev) const {
    const Tensor& xv = t.value(x_t);
    if (xv.shape().rank() != 2 || xv.cols() != input_dim)
        raise(ErrorKind::Shape, "rnn_step: input ", xv.shape().str(), " does not match cell input width ",
              input_dim);
    if (t.value(prev.h).cols() != hidden_dim)
        raise(ErrorKind::Shape, "rnn_step: state ", t.value(prev.h).shape().str(),
              " does not match cell hidden width ", hidden_dim);
    const i64 batch = xv.rows();
    const i64 h = hidden_dim;

    const NodeId xw = ops::matmul(t, x_t, bind[wx]);  // [B x g*h]
    const NodeId hw = ops::matmul(t, prev.h, bind[wh]);

    auto gate = [&](NodeId pre, i64 g0, ActivationKind act) {
        NodeId part = ops::slice(t, pre, 1, g0 * h, (g0 + 1) * h);
        return ops::activation(t, part, act);
    };

    if (kind == CellKind::Lstm) {
        const NodeId pre = ops::add_rowvec(t, ops::add(t, xw, hw), bind[b]);
        const NodeId in_g = gate(pre, 0, ActivationKind::Sigmoid);
        const NodeId forget_g = gate(pre, 1, ActivationKind::Sigmoid);
        const NodeId cand = gate(pre, 2, ActivationKind::Tanh);
        const NodeId out_g = gate(pre, 3, ActivationKind::Sigmoid);
        const NodeId c_next = ops::add(t, ops::hadamard(t, forget_g, prev.c), ops::hadamard(t, in_g, cand));
        const NodeId h_next = ops::hadamard(t, out_g, ops::activation(t, c_next, ActivationKind::Tanh));
        return State{h_next, c_next};
    }

    // GRU: z, r from the summed pre-activations; the candidate applies the
    // reset gate to the recurrent term only.
    const NodeId pre_x = ops::add_rowvec(t, xw, bind[b]);
    auto part = [&](NodeId m, i64 g0) { return ops::slice(t, m, 1, g0 * h, (g0 + 1) * h); };
    const NodeId z = ops::activation(t, ops::add(t, part(pre_x, 0), part(hw, 0)), ActivationKind::Sigmoid);
    const NodeId r = ops::activation(t, ops::add(t, part(pre_x, 1), part(hw, 1)), ActivationKind::Sigmoid);
    const NodeId cand =
        ops::activation(t, ops::add(t, part(pre_x, 2), ops::hadamard(t, r, part(hw, 2))), ActivationKind::Tanh);
    // h' = (1-z).cand + z.h
    const NodeId ones = t.leaf(Tensor::ones(Shape{batch, h}));
    const NodeId keep = ops::sub(t, ones, z);
    const NodeId h_next = ops::add(t, ops::hadamard(t, keep, cand), ops::hadamard(t, z, prev.h));
    return State{h_next, h_next};
}

SequenceRunner SequenceRunner::create(ParamSet& ps, const std::string& group, CellKind kind, Direction dir, i64 d,
                                      i64 h, Rng& rng) {
    SequenceRunner r;
    r.direction = dir;
    r.cell = RnnCell::create(ps, group, dir == Direction::Bidirectional ? "fwd" : "cell", kind, d, h, rng);
    if (dir == Direction::Bidirectional) r.backward_cell = RnnCell::create(ps, group, "bwd", kind, d, h, rng);
    return r;
}

NodeId SequenceRunner::run(Tape& t, const TapeBinding& bind, std::span<const NodeId> seq) const {
    if (seq.empty()) raise(ErrorKind::Contract, "run_sequence: empty sequence");
    const i64 batch = t.value(seq[0]).rows();
    for (NodeId x : seq)
        if (t.value(x).shape() != t.value(seq[0]).shape())
            raise(ErrorKind::Shape, "run_sequence: non-uniform item shapes ", t.value(x).shape().str(), " vs ",
                  t.value(seq[0]).shape().str());

    RnnCell::State s = cell.initial_state(t, batch);
    for (NodeId x : seq) s = cell.step(t, bind, x, s);
    if (direction == Direction::Forward) return s.h;

    RnnCell::State sb = backward_cell->initial_state(t, batch);
    for (std::size_t i = seq.size(); i-- > 0;) sb = backward_cell->step(t, bind, seq[i], sb);
    const NodeId parts[2] = {s.h, sb.h};
    return ops::concat(t, parts, 1);
}

}  // namespace dcrnn
