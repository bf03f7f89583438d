#pragma once

#include "dcrnn/data.hpp"

namespace dcrnn {

// Correlated two-task generator: each example draws a latent vector u; the
// click probability follows one latent direction, the conversion probability
// (sampled only for clicked examples, so the funnel holds by construction) a
// rho-blend of the click direction and a second one. Feature ids are
// quantile buckets of seeded random projections of u, so both labels are
// learnable from the ids alone.
struct SynthSpec {
    std::uint64_t seed = 7;
    i64 n_examples = 0;
    i64 skip_examples = 0;  // discard this many leading examples; lets a
                            // held-out set share the train set's process
    Schema schema;
    i64 latent_dim = 4;
    double noise = 0.5;  // sd of the extra noise on the click logit
    double rho = 0.8;    // conversion dependence on the click direction

    void validate() const;
};

struct SynthDiagnostics {
    std::vector<double> click_score;   // logit of the click draw, noise included
    std::vector<double> click_signal;  // the feature-derivable part (no noise)
    std::vector<double> conv_score;    // logit of the conversion draw
    double click_rate = 0.0;
    double conv_rate = 0.0;

    // Norm of the latent label directions; fixed so the oracle covariance of
    // (click_score, conv_score) is known in closed form.
    static constexpr double signal_scale = 4.0;
};

Dataset gen_synthetic(const SynthSpec& spec, SynthDiagnostics* diag = nullptr);

}  // namespace dcrnn
