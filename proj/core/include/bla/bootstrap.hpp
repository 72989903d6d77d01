#pragma once

#include "bla/network.hpp"
#include "bla/rng.hpp"

#include <vector>

namespace bla {

enum class DistanceKind {
    SquaredL2, // squared euclidean norm of the concatenated (x, y) difference
    LInf,      // max absolute component difference, better scaled for wide domains
};

enum class ScoreKind {
    ExpSquared, // exp(-l^2), sharpens the selection on top of a squared distance
    Exp,        // exp(-l)
};

double distance(const Vector& x, double y, const Particle& p, DistanceKind kind);

double score(double ell, ScoreKind kind);

/// Indices of the delta smallest distances, ascending by distance with ties
/// broken toward the lower index. Returns all indices when delta >= size.
std::vector<int> top_delta(const std::vector<double>& distances, int delta);

/// Categorical draw proportional to weights, which must be nonnegative and
/// finite. An all-zero set (total score underflow) falls back to a uniform
/// draw so training keeps moving instead of aborting.
int sample_particle(const std::vector<double>& weights, Rng& rng);

/// Independent second draw from the same candidate weights. Separate name so
/// call sites for the two-hidden-layer mix read explicitly as two draws.
int draw_second_particle(const std::vector<double>& weights, Rng& rng);

/**
 * Mixed particle for a one-hidden-layer network: the datum supplies the
 * endpoints (x, y), the sampled particle supplies the hidden trace, and the
 * output pre-activation is forced to out_act.inverse(y) so the linear solves
 * below see a particle that realizes the observed output exactly.
 *
 * Throws std::domain_error when y is outside the range of out_act.
 */
Particle make_mixed(const Vector& x, double y, const Particle& sampled,
                    const Activation& out_act);

/// Two-hidden-layer mix: first supplies (z1, h1), second supplies (z2, h2).
Particle make_mixed(const Vector& x, double y, const Particle& first,
                    const Particle& second, const Activation& out_act);

struct ResampleConfig {
    DistanceKind dist = DistanceKind::SquaredL2;
    ScoreKind score = ScoreKind::ExpSquared;
    int delta = 40;
};

/**
 * Candidate particles for one datum: indices of the top-delta proposals by
 * distance plus their sampling weights.
 *
 * Weights are scores of shifted distances (candidate minimum subtracted), so
 * the best candidate always weighs one; raw exp(-l^2) underflows to an
 * all-zero weight vector once distances pass ~27. The shift cancels in the
 * normalized categorical probabilities.
 */
struct CandidateSet {
    std::vector<int> indices;
    std::vector<double> weights;
};

CandidateSet candidate_set(const Vector& x, double y, const std::vector<Particle>& particles,
                           const ResampleConfig& cfg);

/// Full per-datum pipeline: candidate_set then one categorical draw.
int resample_index(const Vector& x, double y, const std::vector<Particle>& particles,
                   const ResampleConfig& cfg, Rng& rng);

} // namespace bla
