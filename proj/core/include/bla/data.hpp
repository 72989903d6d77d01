#pragma once

#include "bla/matrix.hpp"
#include "bla/network.hpp"
#include "bla/rng.hpp"

#include <string>
#include <utility>

namespace bla {

struct Dataset {
    Matrix x; // n rows, one per datum
    Vector y;

    Eigen::Index size() const { return x.rows(); }
    Eigen::Index dim() const { return x.cols(); }
    Vector input(Eigen::Index i) const { return x.row(i).transpose(); }
};

enum class GeneratorTag {
    F1,              // x^3 - 2x^2 + 5x - 1 on [-3, 3]
    F2,              // sin(x^2) - 0.03 x^5 on [-3, 3]
    F3,              // -(x-2)^3 (x+1)^2 (x-4) / 8 on [-1, 4]
    StochasticNet,   // randomly weighted 1-100-1 tanh network on [-5, 5]
    MultiInput,      // 2 x1^2 x2 - 6 x1 x3 on [-5,5] x [-2,2] x [0,4]
    BernoulliStep,   // piecewise-constant label probability on [0, 1]
    BernoulliCosine, // p(x) = (cos x + 1) / 2 on [0, 2pi]
};

bool is_classification(GeneratorTag tag);
std::string generator_name(GeneratorTag tag);
GeneratorTag parse_generator(const std::string& name);

struct GeneratorSpec {
    GeneratorTag tag = GeneratorTag::F1;
};

double f1(double x);
double f2(double x);
double f3(double x);
double multi_input(const Vector& x);
double bernoulli_step_p(double x);
double bernoulli_cosine_p(double x);

/// Label probability at x for classification tags; errors otherwise.
double label_probability(GeneratorTag tag, double x);

Dataset gen_regression(const GeneratorSpec& spec, Eigen::Index n, Rng& rng);

/**
 * The stochastic-network target: a frozen 1-100-1 tanh/identity network with
 * layer-1 weights and biases drawn N(5, variance 3) and layer-2 N(0, 0.5).
 * Inputs are uniform on [-5, 5]; outputs are deterministic given the draw.
 */
struct StochasticNetTarget {
    Network net;
    Dataset sample(Eigen::Index n, Rng& rng) const;
};
StochasticNetTarget gen_stochastic_net_target(Rng& rng);

Dataset gen_bernoulli_step(Eigen::Index n, Rng& rng);
Dataset gen_bernoulli_cosine(Eigen::Index n, Rng& rng);

/// Dispatcher over all tags. StochasticNet draws a fresh target network from
/// rng first, so one call must supply all points that share a target.
Dataset generate(const GeneratorSpec& spec, Eigen::Index n, Rng& rng);

/// Shuffles then splits into disjoint train/validation sets of exact sizes.
std::pair<Dataset, Dataset> split_and_shuffle(const Dataset& all, Eigen::Index n_train,
                                              Eigen::Index n_val, Rng& rng);

/// Deterministic Fisher-Yates permutation of 0..n-1.
std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, Rng& rng);

/// x columns then y, header row, shortest round-trip doubles.
void write_dataset_csv(const Dataset& d, const std::string& path);

} // namespace bla
