#include "dcrnn/synth.hpp"

#include <algorithm>
#include <cmath>

#include "dcrnn/layers.hpp"

namespace dcrnn {

namespace {

constexpr double kSignalScale = SynthDiagnostics::signal_scale;

// Box-Muller on the raw mt19937_64 stream, one draw per call.
double normal(Rng& rng) {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::vector<double> unit_direction(Rng& rng, i64 dim, double scale) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double norm = 0.0;
    for (double& x : v) {
        x = normal(rng);
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : v) x = x / norm * scale;
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

void SynthSpec::validate() const {
    schema.validate();
    if (n_examples < 0) raise(ErrorKind::Config, "synth: n_examples must be >= 0, got ", n_examples);
    if (skip_examples < 0) raise(ErrorKind::Config, "synth: skip_examples must be >= 0, got ", skip_examples);
    if (latent_dim < 1) raise(ErrorKind::Config, "synth: latent_dim must be >= 1, got ", latent_dim);
    if (!(noise >= 0.0)) raise(ErrorKind::Config, "synth: noise must be >= 0, got ", noise);
    if (!(rho >= 0.0 && rho <= 1.0)) raise(ErrorKind::Config, "synth: rho must be in [0, 1], got ", rho);
}

Dataset gen_synthetic(const SynthSpec& spec, SynthDiagnostics* diag) {
    spec.validate();
    Rng rng(spec.seed);

    const auto v_click = unit_direction(rng, spec.latent_dim, kSignalScale);
    // Orthogonalize the conversion direction against the click direction, so
    // rho alone controls how much the two label scores correlate.
    auto v_conv = unit_direction(rng, spec.latent_dim, 1.0);
    if (spec.latent_dim > 1) {
        const double proj = dot(v_conv, v_click) / (kSignalScale * kSignalScale);
        double norm = 0.0;
        for (std::size_t i = 0; i < v_conv.size(); ++i) {
            v_conv[i] -= proj * v_click[i];
            norm += v_conv[i] * v_conv[i];
        }
        norm = std::sqrt(norm);
        for (double& x : v_conv) x = x / norm * kSignalScale;
    } else {
        for (double& x : v_conv) x *= kSignalScale;
    }
    std::vector<std::vector<double>> projections;
    for (i64 f = 0; f < spec.schema.field_count(); ++f)
        projections.push_back(unit_direction(rng, spec.latent_dim, 1.0));

    Dataset data;
    data.schema = spec.schema;
    data.examples.reserve(static_cast<std::size_t>(spec.n_examples));
    if (diag) {
        diag->click_score.reserve(static_cast<std::size_t>(spec.n_examples));
        diag->click_signal.reserve(static_cast<std::size_t>(spec.n_examples));
        diag->conv_score.reserve(static_cast<std::size_t>(spec.n_examples));
    }

    std::vector<double> u(static_cast<std::size_t>(spec.latent_dim));
    // Burn through the skipped prefix so a held-out spec continues the same
    // stream the training spec started. Draw counts must match the loop below.
    for (i64 e = 0; e < spec.skip_examples; ++e) {
        for (i64 k = 0; k < spec.latent_dim; ++k) normal(rng);
        normal(rng);
        uniform01(rng);
        uniform01(rng);
    }

    i64 clicks = 0, convs = 0;
    for (i64 e = 0; e < spec.n_examples; ++e) {
        for (double& x : u) x = normal(rng);
        const double eps = normal(rng);
        const double s_click = dot(u, v_click) + spec.noise * eps;
        const double s_conv = spec.rho * dot(u, v_click) + (1.0 - spec.rho) * dot(u, v_conv);

        Example ex;
        ex.click = uniform01(rng) < sigmoid(s_click) ? 1 : 0;
        const bool conv_draw = uniform01(rng) < sigmoid(s_conv);  // drawn unconditionally to keep the stream aligned
        ex.second = (ex.click && conv_draw) ? 1 : 0;
        clicks += ex.click;
        convs += ex.second;

        ex.ids.resize(static_cast<std::size_t>(spec.schema.field_count()));
        for (i64 f = 0; f < spec.schema.field_count(); ++f) {
            const i64 vocab = spec.schema.vocab_sizes[static_cast<std::size_t>(f)];
            const double q = normal_cdf(dot(u, projections[static_cast<std::size_t>(f)]));
            // Bucket into [1, vocab-1]; id 0 stays reserved for "unknown".
            const i64 id = vocab == 1 ? 0
                                      : std::min<i64>(1 + static_cast<i64>(q * static_cast<double>(vocab - 1)),
                                                      vocab - 1);
            ex.ids[static_cast<std::size_t>(f)] = id;
        }

        if (diag) {
            diag->click_score.push_back(s_click);
            diag->click_signal.push_back(s_click - spec.noise * eps);
            diag->conv_score.push_back(s_conv);
        }
        data.examples.push_back(std::move(ex));
    }

    if (diag && spec.n_examples > 0) {
        diag->click_rate = static_cast<double>(clicks) / static_cast<double>(spec.n_examples);
        diag->conv_rate = static_cast<double>(convs) / static_cast<double>(spec.n_examples);
    }
    return data;
}

}  // namespace dcrnn
