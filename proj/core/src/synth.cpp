#include "vsb/synth.hpp"

#include <cmath>
#include <cstdio>

#include "vsb/error.hpp"
#include "vsb/rng.hpp"
#include "vsb/vecmath.hpp"

namespace vsb {

namespace {

std::vector<double> gaussian_vector(Rng& rng, size_t d, double sigma = 1.0) {
    std::vector<double> v(d);
    for (auto& x : v) {
        x = sigma * rng.next_gaussian();
    }
    return v;
}

std::vector<double> unit_vector(Rng& rng, size_t d) {
    auto v = gaussian_vector(rng, d);
    return normalized(v, "synthetic unit vector");
}

std::string item_id(const char* prefix, size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%s%05zu", prefix, i);
    return buf;
}

} // namespace

SynthData generate_synthetic(const SynthConfig& cfg) {
    if (cfg.n_items == 0 || cfg.dim < 2 || cfg.frames == 0) {
        throw InputError("generate_synthetic: n_items, dim >= 2 and frames must be positive");
    }
    if (cfg.alpha <= 0.0 || cfg.alpha >= 1.0) {
        throw InputError("generate_synthetic: alpha must lie in (0, 1)");
    }
    if (cfg.beta < 0.0 || cfg.gamma < 0.0 || cfg.noise_sigma <= 0.0 || cfg.drift < 0.0) {
        throw InputError("generate_synthetic: beta/gamma/drift must be >= 0, noise_sigma > 0");
    }

    Rng rng(cfg.seed);
    const size_t d = cfg.dim;
    const size_t f = cfg.frames;

    SynthData data;
    data.bias_direction = unit_vector(rng, d);
    const auto& b = data.bias_direction;

    data.real.dim = d;
    data.ai.dim = d;
    data.real.fixed_frames = f;
    data.ai.fixed_frames = f;

    for (size_t i = 0; i < cfg.n_items; ++i) {
        const auto z = unit_vector(rng, d);
        const auto u_real = unit_vector(rng, d);
        const auto u_ai = unit_vector(rng, d);

        QueryRecord q;
        q.id = item_id("q", i);
        {
            std::vector<double> qe = z;
            axpy(cfg.gamma, b, qe);
            q.embedding = normalized(qe, "query " + q.id);
        }

        VideoRecord real_rec;
        real_rec.id = item_id("v", i);
        real_rec.source = Source::real;
        VideoRecord ai_rec;
        ai_rec.id = real_rec.id;
        ai_rec.source = Source::ai;

        // Content reveals itself over time: the semantic component rides
        // a linear temporal ramp (mean 1 over j=1..f) in both corpora.
        // The injected bias direction additionally rides a much steeper
        // sixth-power ramp (mean 1) concentrated in the closing frames of
        // AI videos: order-sensitive pooling sees well over beta of it, a
        // middle single frame sees only a quarter, and shuffling AI frames
        // measurably weakens it. With beta = 0 the two processes are
        // identical up to independent draws.
        double bias_ramp_mean = 0.0;
        for (size_t j = 1; j <= f; ++j) {
            const double x = static_cast<double>(j);
            bias_ramp_mean += std::pow(x, 6.0);
        }
        bias_ramp_mean /= static_cast<double>(f);
        auto content_ramp = [&](size_t j) {
            return 2.0 * static_cast<double>(j) / static_cast<double>(f + 1);
        };
        for (size_t j = 1; j <= f; ++j) {
            const double t = static_cast<double>(j) / static_cast<double>(f);
            std::vector<double> frame(d, 0.0);
            axpy(cfg.alpha * content_ramp(j), z, frame);
            const auto eps = gaussian_vector(rng, d, cfg.noise_sigma);
            axpy(1.0 - cfg.alpha, eps, frame);
            axpy(t * cfg.drift, u_real, frame);
            real_rec.frames.push_back(normalized(frame, "real frame"));
        }
        for (size_t j = 1; j <= f; ++j) {
            const double t = static_cast<double>(j) / static_cast<double>(f);
            const double x = static_cast<double>(j);
            const double bias_ramp = std::pow(x, 6.0) / bias_ramp_mean;
            std::vector<double> frame(d, 0.0);
            axpy(cfg.alpha * content_ramp(j), z, frame);
            const auto eps = gaussian_vector(rng, d, cfg.noise_sigma);
            axpy(1.0 - cfg.alpha, eps, frame);
            axpy(cfg.beta * bias_ramp, b, frame);
            axpy(t * cfg.drift, u_ai, frame);
            ai_rec.frames.push_back(normalized(frame, "ai frame"));
        }

        data.rel.pairs[q.id] = real_rec.id;
        data.queries.push_back(std::move(q));
        data.real.videos.push_back(std::move(real_rec));
        data.ai.videos.push_back(std::move(ai_rec));
    }
    return data;
}

} // namespace vsb
