#pragma once

#include "bla/data.hpp"
#include "bla/history.hpp"
#include "bla/metrics.hpp"
#include "bla/network.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace bla {

/**
 * Gradient of the batch mean squared error with respect to every weight,
 * bias slots included: one matrix per layer, shaped like the layer weights.
 * ReLU uses subgradient 0 at the kink, LeakyReLU its negative-side slope.
 */
std::vector<Matrix> backprop_gradients(const Network& net, const Dataset& batch);

struct GdConfig {
    NetSpec net;
    double lr = 0.001;
    Eigen::Index batch_size = 0; // 0 = full batch, one step per epoch
    Metric metric = Metric::Mse;
    double cutoff = 0.5;
    std::uint64_t seed = 0;
};

struct AdamConfig {
    NetSpec net;
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    Eigen::Index batch_size = 200;
    Metric metric = Metric::Mse;
    double cutoff = 0.5;
    std::uint64_t seed = 0;
};

/// Per-weight first/second moment accumulators plus the step count.
struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    long long step = 0;

    static AdamState zero(const Network& net);
};

/// One bias-corrected update in place. Gradients must match layer shapes.
void adam_update(Network& net, AdamState& state, const std::vector<Matrix>& grads,
                 const AdamConfig& cfg);

/// Plain gradient descent. Initialization matches the bootstrap trainer's
/// (same seed stream), so comparisons start from identical weights.
/// Throws std::runtime_error when the training loss leaves the finite range.
std::pair<Network, TrainHistory> train_gd(const Dataset& train, const Dataset& val,
                                          int epochs, const GdConfig& cfg);

std::pair<Network, TrainHistory> train_adam(const Dataset& train, const Dataset& val,
                                            int epochs, const AdamConfig& cfg);

} // namespace bla
