#include "dcrnn/cross.hpp"

#include <cstdio>

#include "dcrnn/layers.hpp"

namespace dcrnn {

NodeId dcn_layer(Tape& t, NodeId x0, NodeId h_prev, NodeId w, NodeId b) {
    const bool vector_in = t.value(x0).shape().rank() == 1;
    if (vector_in) {
        x0 = ops::reshape(t, x0, Shape{1, t.value(x0).size()});
        h_prev = ops::reshape(t, h_prev, Shape{1, t.value(h_prev).size()});
    }
    const Tensor& xv = t.value(x0);
    const i64 d = xv.cols();
    if (t.value(h_prev).shape() != xv.shape() || t.value(w).size() != d || t.value(b).size() != d ||
        t.value(w).shape().rank() != 1 || t.value(b).shape().rank() != 1)
        raise(ErrorKind::Shape, "dcn_layer: widths disagree: x0 ", xv.shape().str(), ", h_prev ",
              t.value(h_prev).shape().str(), ", w ", t.value(w).shape().str(), ", b ", t.value(b).shape().str());

    // <h_prev, w> per row, then x0 scaled by that scalar plus bias plus residual.
    const NodeId s = ops::matmul(t, h_prev, ops::reshape(t, w, Shape{d, 1}));  // [B x 1]
    NodeId out = ops::add(t, ops::add_rowvec(t, ops::mul_colvec(t, x0, s), b), h_prev);
    if (vector_in) out = ops::reshape(t, out, Shape{d});
    return out;
}

DcnStack DcnStack::create(ParamSet& ps, const std::string& group, i64 depth, i64 width, Rng& rng) {
    if (depth < 1 || width < 1) raise(ErrorKind::Config, "dcn stack: depth and width must be >= 1");
    DcnStack s;
    s.depth = depth;
    s.width = width;
    for (i64 l = 0; l < depth; ++l) {
        s.w.push_back(ps.add(group, cat("l", l, ".w"), init_uniform(Shape{width}, width, rng)));
        s.b.push_back(ps.add(group, cat("l", l, ".b"), init_uniform(Shape{width}, width, rng)));
    }
    return s;
}

NodeId DcnStack::forward(Tape& t, const TapeBinding& bind, NodeId x0) const {
    NodeId h = x0;
    for (i64 l = 0; l < depth; ++l) h = dcn_layer(t, x0, h, bind[w[static_cast<std::size_t>(l)]], bind[b[static_cast<std::size_t>(l)]]);
    return h;
}

NodeId cin_layer(Tape& t, NodeId x0, NodeId h_prev, NodeId weights) {
    const Tensor& xv = t.value(x0);
    const Tensor& hv = t.value(h_prev);
    const Tensor& wv = t.value(weights);
    if (xv.shape().rank() != 2 || hv.shape().rank() != 2 || wv.shape().rank() != 2)
        raise(ErrorKind::Shape, "cin_layer: rank-2 inputs required");
    const i64 m = xv.rows(), D = xv.cols(), r = hv.rows();
    if (hv.cols() != D)
        raise(ErrorKind::Shape, "cin_layer: embedding width mismatch: x0 ", xv.shape().str(), " vs h_prev ",
              hv.shape().str());
    if (wv.cols() != r * m)
        raise(ErrorKind::Shape, "cin_layer: weights ", wv.shape().str(), " do not match r*m = ", r, "*", m);
    const i64 r_out = wv.rows();

    Tensor out(Shape{r_out, D});
    for (i64 k = 0; k < r_out; ++k)
        for (i64 i = 0; i < r; ++i)
            for (i64 j = 0; j < m; ++j) {
                const double wk = wv.at(k, i * m + j);
                for (i64 e = 0; e < D; ++e) out.at(k, e) += wk * hv.at(i, e) * xv.at(j, e);
            }

    return t.emplace(std::move(out), "cin_layer", {x0, h_prev, weights},
                     [x0, h_prev, weights, m, D, r, r_out](Tape& tp, NodeId self) {
                         const Tensor& dc = tp.grad(self);
                         const Tensor& xv = tp.value(x0);
                         const Tensor& hv = tp.value(h_prev);
                         const Tensor& wv = tp.value(weights);
                         Tensor& dx = tp.grad_buffer(x0);
                         Tensor& dh = tp.grad_buffer(h_prev);
                         Tensor& dw = tp.grad_buffer(weights);
                         for (i64 k = 0; k < r_out; ++k)
                             for (i64 i = 0; i < r; ++i)
                                 for (i64 j = 0; j < m; ++j) {
                                     const double wk = wv.at(k, i * m + j);
                                     double gw = 0.0;
                                     for (i64 e = 0; e < D; ++e) {
                                         const double g = dc.at(k, e);
                                         gw += g * hv.at(i, e) * xv.at(j, e);
                                         dh.at(i, e) += g * wk * xv.at(j, e);
                                         dx.at(j, e) += g * wk * hv.at(i, e);
                                     }
                                     dw.at(k, i * m + j) += gw;
                                 }
                     });
}

CinStack CinStack::create(ParamSet& ps, const std::string& group, i64 m, std::span<const i64> row_counts, Rng& rng) {
    if (m < 1 || row_counts.empty()) raise(ErrorKind::Config, "cin stack: need m >= 1 and at least one layer");
    CinStack s;
    s.field_count = m;
    s.row_counts.assign(row_counts.begin(), row_counts.end());
    i64 prev = m;
    for (std::size_t l = 0; l < s.row_counts.size(); ++l) {
        const i64 r = s.row_counts[l];
        if (r < 1) raise(ErrorKind::Config, "cin stack: layer ", l, " row count must be >= 1");
        s.weights.push_back(ps.add(group, cat("l", l, ".w"), init_uniform(Shape{r, prev * m}, prev * m, rng)));
        prev = r;
    }
    return s;
}

NodeId CinStack::forward(Tape& t, const TapeBinding& bind, NodeId x0) const {
    NodeId h = x0;
    for (ParamId w : weights) h = cin_layer(t, x0, h, bind[w]);
    return h;
}

i64 CinStack::param_count() const {
    i64 total = 0, prev = field_count;
    for (i64 r : row_counts) {
        total += r * prev * field_count;
        prev = r;
    }
    return total;
}

std::vector<GrowthRow> param_growth(const GrowthConfig& cfg) {
    if (cfg.depths.empty() || cfg.widths.empty() || cfg.feature_width < 1 || cfg.field_count < 1)
        raise(ErrorKind::Config, "param_growth: ranges must be positive and non-empty");
    for (i64 d : cfg.depths)
        if (d < 1) raise(ErrorKind::Config, "param_growth: depths must be >= 1");
    for (i64 w : cfg.widths)
        if (w < 1) raise(ErrorKind::Config, "param_growth: widths must be >= 1");

    auto cell_params = [](i64 gates, i64 d, i64 h) { return gates * (h * (d + h) + h); };

    std::vector<GrowthRow> rows;
    for (i64 depth : cfg.depths)
        for (i64 width : cfg.widths) {
            rows.push_back({"dcn", depth, width, 2 * width * depth});
            // CIN: first layer crosses X0 with itself (m rows), later layers r rows.
            const i64 m = cfg.field_count;
            const i64 cin = width * m * m + (depth - 1) * width * width * m;
            rows.push_back({"cin", depth, width, cin});
            rows.push_back({"crnn_gru", depth, width, cell_params(3, cfg.feature_width, width)});
            rows.push_back({"crnn_lstm", depth, width, cell_params(4, cfg.feature_width, width)});
        }
    return rows;
}

std::string growth_table_text(std::span<const GrowthRow> rows) {
    std::string out = cat("kind        depth_or_len  width     params\n");
    char line[96];
    for (const GrowthRow& r : rows) {
        std::snprintf(line, sizeof line, "%-10s  %12lld  %5lld  %9lld\n", r.kind.c_str(),
                      static_cast<long long>(r.depth_or_len), static_cast<long long>(r.width),
                      static_cast<long long>(r.params));
        out += line;
    }
    return out;
}

void growth_table_csv(std::span<const GrowthRow> rows, std::ostream& os) {
    os << "kind,depth_or_len,width,params\n";
    for (const GrowthRow& r : rows)
        os << r.kind << "," << r.depth_or_len << "," << r.width << "," << r.params << "\n";
}

}  // namespace dcrnn
