#ifndef VSB_SYNTH_HPP
#define VSB_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "vsb/embedding_store.hpp"

namespace vsb {

/// Knobs of the synthetic biased-corpus generator. A shared unit
/// direction b is injected into every AI video (magnitude beta) and
/// leaked into every query (magnitude gamma); that coupling is the
/// source bias the rest of the toolkit measures and removes.
struct SynthConfig {
    size_t n_items = 200;
    size_t dim = 32;
    size_t frames = 10;
    double alpha = 0.5;       // query-signal share in video frames
    double beta = 0.5;        // bias-direction magnitude in AI frames
    double gamma = 0.2;       // bias-direction leak into queries
    double noise_sigma = 0.5; // per-coordinate frame noise
    double drift = 1.0;       // temporal drift magnitude
    uint64_t seed = 42;
};

struct SynthData {
    Corpus real;
    Corpus ai;
    std::vector<QueryRecord> queries;
    RelevanceMap rel;
    std::vector<double> bias_direction; // returned so oracles can check against it
};

/// Deterministic generator. Per item i with latent unit z_i:
///   query_i      = normalize(z_i + gamma * b)
///   real frame j = normalize(alpha s_j z_i + (1-alpha) eps_ij + (j/f) drift u_i)
///   ai frame j   = normalize(alpha s_j z_i + (1-alpha) eps'_ij
///                            + beta r_j b + (j/f) drift u'_i)
/// where s_j (linear) and r_j (sixth-power) are temporal ramps with mean 1
/// over the frames. Content reveals itself over time in both corpora;
/// the bias direction is concentrated in the closing frames of AI
/// videos, so order-sensitive pooling sees much more of it than
/// uniform-mean pooling, a middle single frame sees only a quarter, and
/// shuffling AI frames measurably weakens the bias. With beta = 0 the
/// two generative processes are exchangeable.
SynthData generate_synthetic(const SynthConfig& cfg);

} // namespace vsb

#endif
