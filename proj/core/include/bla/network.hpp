#pragma once

#include "bla/matrix.hpp"
#include "bla/rng.hpp"

#include <string>
#include <vector>

namespace bla {

struct Activation {
    enum class Kind { Identity, Tanh, ReLU, LeakyReLU };

    Kind kind = Kind::Identity;
    double slope = 0.01; // LeakyReLU only

    static Activation identity() { return {Kind::Identity}; }
    static Activation tanh() { return {Kind::Tanh}; }
    static Activation relu() { return {Kind::ReLU}; }
    static Activation leaky_relu(double slope = 0.01) { return {Kind::LeakyReLU, slope}; }

    double apply(double z) const;
    /// Derivative a.e.; ReLU takes subgradient 0 at the kink, LeakyReLU takes slope.
    double derivative(double z) const;

    /// Identity and Tanh only; the resampling path never inverts ReLU-family
    /// activations (sampled particles carry pre-activation values instead).
    bool invertible() const { return kind == Kind::Identity || kind == Kind::Tanh; }
    /// Throws std::domain_error outside the range, std::logic_error if not invertible.
    double inverse(double y) const;

    Vector apply(const Vector& z) const;

    std::string name() const;
    static Activation parse(const std::string& name, double slope = 0.01);
};

/**
 * Fully-connected network with one or two hidden layers and a scalar output.
 *
 * Biases are absorbed into column 0 of each weight matrix and paired with a
 * constant input component of -1, so a layer with in inputs stores an
 * out x (in+1) matrix and computes z = W * [-1; v].
 */
struct Layer {
    Matrix w; // out x (in + 1)
    Activation act;
};

struct Network {
    std::vector<Layer> layers;

    Eigen::Index input_dim() const { return layers.front().w.cols() - 1; }
    Eigen::Index hidden_layers() const { return static_cast<Eigen::Index>(layers.size()) - 1; }

    void save_json(const std::string& path) const;
    static Network load_json(const std::string& path);
};

/// Prepends the constant -1 bias component.
Vector augment(const Vector& v);

/// Traced forward pass: all pre-activation and activation values plus the
/// final output. These tuples are the bootstrap particle proposals.
struct Particle {
    Vector x;
    std::vector<Vector> z; // pre-activations, one per hidden layer
    std::vector<Vector> h; // activations, one per hidden layer
    double z_out = 0.0;    // output pre-activation
    double y = 0.0;        // predicted output
};

/// i.i.d. normal(mean 0, given variance) weights and biases for every layer.
Network init_network(const std::vector<Eigen::Index>& dims,
                     const std::vector<Activation>& acts,
                     double variance, Rng& rng);

/// Same shape logic with per-layer mean/variance, used by data generators
/// that define target functions through a randomly weighted network.
Network random_network(const std::vector<Eigen::Index>& dims,
                       const std::vector<Activation>& acts,
                       const std::vector<double>& means,
                       const std::vector<double>& variances, Rng& rng);

Particle forward_trace(const Network& net, const Vector& x);
double forward(const Network& net, const Vector& x);

/// Shape and initialization shared by every trainer so comparisons start
/// from the same weight law (and, under one seed, the same realization).
struct NetSpec {
    std::vector<Eigen::Index> hidden = {100};
    std::vector<Activation> hidden_acts; // empty means tanh everywhere
    Activation out_act = Activation::identity();
    double init_variance = 0.5;
};

Network init_from_spec(const NetSpec& spec, Eigen::Index input_dim, Rng& rng);

} // namespace bla
