#pragma once

#include <ostream>

#include "dcrnn/ops.hpp"
#include "dcrnn/params.hpp"

namespace dcrnn {

// One DCN cross layer: x0 * <h_prev, w> + b + h_prev.
// x0 and h_prev are [B x d] (or rank-1 [d], treated as a single row);
// w and b are rank-1 [d]. The output minus bias minus residual is always a
// scalar multiple of x0 per row.
NodeId dcn_layer(Tape& t, NodeId x0, NodeId h_prev, NodeId w, NodeId b);

struct DcnStack {
    i64 depth = 0;
    i64 width = 0;
    std::vector<ParamId> w, b;  // per layer, each [d]

    static DcnStack create(ParamSet& ps, const std::string& group, i64 depth, i64 width, Rng& rng);
    NodeId forward(Tape& t, const TapeBinding& bind, NodeId x0) const;
    i64 param_count() const { return 2 * width * depth; }
};

// One CIN layer over field matrices: output row k is
//   sum_i sum_j W[k]_{i,j} * (h_prev_i . x0_j)
// with x0 [m x D], h_prev [r x D], and weights [r' x (r*m)] (row k holds
// W[k] flattened i-major). Feature interaction happens per field vector.
NodeId cin_layer(Tape& t, NodeId x0, NodeId h_prev, NodeId weights);

struct CinStack {
    i64 field_count = 0;  // m
    std::vector<i64> row_counts;
    std::vector<ParamId> weights;

    static CinStack create(ParamSet& ps, const std::string& group, i64 m, std::span<const i64> row_counts, Rng& rng);
    NodeId forward(Tape& t, const TapeBinding& bind, NodeId x0) const;
    i64 param_count() const;
};

// Parameter-count sweep contrasting the cross-layer families. For each
// (depth, width) pair one row per kind:
//   dcn:  width = feature width d, params = 2*d per layer, cumulative
//   cin:  width = rows per layer r (fields m fixed), cumulative
//   crnn: width = hidden h (input d fixed), constant in sequence length
struct GrowthConfig {
    std::vector<i64> depths;
    std::vector<i64> widths;
    i64 feature_width = 0;  // d for the CRNN cells
    i64 field_count = 0;    // m for CIN
};

struct GrowthRow {
    std::string kind;
    i64 depth_or_len = 0;
    i64 width = 0;
    i64 params = 0;
};

std::vector<GrowthRow> param_growth(const GrowthConfig& cfg);
std::string growth_table_text(std::span<const GrowthRow> rows);
void growth_table_csv(std::span<const GrowthRow> rows, std::ostream& os);

}  // namespace dcrnn
