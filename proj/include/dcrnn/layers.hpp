#pragma once

#include <optional>
#include <span>

#include "dcrnn/ops.hpp"
#include "dcrnn/params.hpp"

namespace dcrnn {

// Uniform draw in [0, 1) built directly on the mt19937_64 stream, so datasets
// and initializations do not depend on the standard library's distribution
// implementations.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
Tensor init_uniform(Shape shape, i64 fan_in, Rng& rng);

// Per-field embedding blocks; forward output is the concatenation of one row
// per field, width field_count * dim.
struct EmbeddingTable {
    i64 dim = 0;
    std::vector<i64> vocab_sizes;
    std::vector<ParamId> field_tables;  // each [vocab_f x dim]

    static EmbeddingTable create(ParamSet& ps, const std::string& group, std::span<const i64> vocab_sizes, i64 dim,
                                 Rng& rng);

    i64 field_count() const { return static_cast<i64>(vocab_sizes.size()); }
    i64 output_dim() const { return field_count() * dim; }

    // ids_by_field[f][b] = feature id of example b in field f.
    NodeId forward(Tape& t, const TapeBinding& bind, std::span<const std::vector<i64>> ids_by_field) const;
};

struct DenseLayer {
    i64 in = 0, out = 0;
    ActivationKind act = ActivationKind::Identity;
    ParamId weight, bias;

    static DenseLayer create(ParamSet& ps, const std::string& group, const std::string& local, i64 in, i64 out,
                             ActivationKind act, Rng& rng);

    NodeId forward(Tape& t, const TapeBinding& bind, NodeId x) const;
};

enum class CellKind { Lstm, Gru };

// Gated recurrent cell with the standard equations; all gates sigmoid,
// candidates tanh. Weights are packed gate-major: LSTM [i|f|g|o], GRU [z|r|n].
struct RnnCell {
    CellKind kind = CellKind::Gru;
    i64 input_dim = 0, hidden_dim = 0;
    ParamId wx, wh, b;

    static RnnCell create(ParamSet& ps, const std::string& group, const std::string& local, CellKind kind, i64 d,
                          i64 h, Rng& rng);

    struct State {
        NodeId h;
        NodeId c;  // LSTM only
    };

    State initial_state(Tape& t, i64 batch) const;
    State step(Tape& t, const TapeBinding& bind, NodeId x_t, State prev) const;

    i64 gates() const { return kind == CellKind::Lstm ? 4 : 3; }
    // LSTM: 4*(h*(d+h)+h); GRU: 3*(h*(d+h)+h)
    i64 param_count() const { return gates() * (hidden_dim * (input_dim + hidden_dim) + hidden_dim); }
};

enum class Direction { Forward, Bidirectional };

// Runs a cell over a sequence of [B x d] inputs from a zero initial state and
// returns the final hidden state; bidirectional runners concatenate the final
// states of the forward and reversed passes (width 2h).
struct SequenceRunner {
    Direction direction = Direction::Forward;
    RnnCell cell;
    std::optional<RnnCell> backward_cell;

    static SequenceRunner create(ParamSet& ps, const std::string& group, CellKind kind, Direction dir, i64 d, i64 h,
                                 Rng& rng);

    i64 output_dim() const { return direction == Direction::Bidirectional ? 2 * cell.hidden_dim : cell.hidden_dim; }

    NodeId run(Tape& t, const TapeBinding& bind, std::span<const NodeId> seq) const;
};

}  // namespace dcrnn
