#include "bla/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace bla {

double distance(const Vector& x, double y, const Particle& p, DistanceKind kind) {
    if (x.size() != p.x.size()) {
        throw std::invalid_argument("distance: input dim mismatch");
    }
    switch (kind) {
    case DistanceKind::SquaredL2: {
        double dy = y - p.y;
        return (x - p.x).squaredNorm() + dy * dy;
    }
    case DistanceKind::LInf: {
        double d = std::abs(y - p.y);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            d = std::max(d, std::abs(x[i] - p.x[i]));
        }
        return d;
    }
    }
    throw std::logic_error("distance: bad kind");
}

double score(double ell, ScoreKind kind) {
    if (!(ell >= 0.0)) throw std::invalid_argument("score: distance must be nonnegative");
    switch (kind) {
    case ScoreKind::ExpSquared: return std::exp(-ell * ell);
    case ScoreKind::Exp: return std::exp(-ell);
    }
    throw std::logic_error("score: bad kind");
}

std::vector<int> top_delta(const std::vector<double>& distances, int delta) {
    if (delta <= 0) throw std::invalid_argument("top_delta: delta must be positive");
    std::vector<int> idx(distances.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto cmp = [&](int a, int b) {
        if (distances[a] != distances[b]) return distances[a] < distances[b];
        return a < b;
    };
    if (delta < static_cast<int>(idx.size())) {
        std::partial_sort(idx.begin(), idx.begin() + delta, idx.end(), cmp);
        idx.resize(delta);
    } else {
        std::sort(idx.begin(), idx.end(), cmp);
    }
    return idx;
}

int sample_particle(const std::vector<double>& weights, Rng& rng) {
    if (weights.empty()) throw std::invalid_argument("sample_particle: no weights");
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw std::invalid_argument("sample_particle: weights must be finite and nonnegative");
        }
        total += w;
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (total <= 0.0) {
        // Every score underflowed: no candidate is preferable, so draw
        // uniformly rather than stalling the whole run.
        std::uniform_int_distribution<std::size_t> pick(0, weights.size() - 1);
        return static_cast<int>(pick(rng));
    }
    double u = unif(rng) * total;
    double cum = 0.0;
    int last_positive = -1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) last_positive = static_cast<int>(i);
        cum += weights[i];
        if (u < cum) return static_cast<int>(i);
    }
    return last_positive; // u landed on total through rounding
}

int draw_second_particle(const std::vector<double>& weights, Rng& rng) {
    return sample_particle(weights, rng);
}

Particle make_mixed(const Vector& x, double y, const Particle& sampled,
                    const Activation& out_act) {
    if (sampled.z.size() != 1) {
        throw std::invalid_argument("make_mixed: sampled particle must have one hidden layer");
    }
    Particle p;
    p.x = x;
    p.z = sampled.z;
    p.h = sampled.h;
    p.z_out = out_act.inverse(y);
    p.y = y;
    return p;
}

Particle make_mixed(const Vector& x, double y, const Particle& first,
                    const Particle& second, const Activation& out_act) {
    if (first.z.size() != 2 || second.z.size() != 2) {
        throw std::invalid_argument("make_mixed: particles must have two hidden layers");
    }
    Particle p;
    p.x = x;
    p.z = {first.z[0], second.z[1]};
    p.h = {first.h[0], second.h[1]};
    p.z_out = out_act.inverse(y);
    p.y = y;
    return p;
}

CandidateSet candidate_set(const Vector& x, double y, const std::vector<Particle>& particles,
                           const ResampleConfig& cfg) {
    if (particles.empty()) throw std::invalid_argument("candidate_set: no particles");
    std::vector<double> dist(particles.size());
    for (std::size_t i = 0; i < particles.size(); ++i) {
        dist[i] = distance(x, y, particles[i], cfg.dist);
    }
    CandidateSet set;
    set.indices = top_delta(dist, cfg.delta);
    double ell_min = dist[set.indices.front()];
    set.weights.resize(set.indices.size());
    for (std::size_t c = 0; c < set.indices.size(); ++c) {
        double ell = dist[set.indices[c]];
        switch (cfg.score) {
        case ScoreKind::ExpSquared:
            set.weights[c] = std::exp(-(ell * ell - ell_min * ell_min));
            break;
        case ScoreKind::Exp:
            set.weights[c] = std::exp(-(ell - ell_min));
            break;
        }
    }
    return set;
}

int resample_index(const Vector& x, double y, const std::vector<Particle>& particles,
                   const ResampleConfig& cfg, Rng& rng) {
    CandidateSet set = candidate_set(x, y, particles, cfg);
    int pick = sample_particle(set.weights, rng);
    return set.indices[pick];
}

} // namespace bla
