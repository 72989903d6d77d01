#pragma once

#include "bla/data.hpp"
#include "bla/network.hpp"
#include "bla/rng.hpp"

namespace bla {

enum class Metric { Mse, Accuracy };

double mse(const Vector& predictions, const Vector& targets);

/// Fraction where (prediction >= cutoff) agrees with (label == 1). The
/// boundary itself predicts class 1.
double accuracy(const Vector& predictions, const Vector& labels, double cutoff = 0.5);

double mse(const Network& net, const Dataset& d);
double accuracy(const Network& net, const Dataset& d, double cutoff = 0.5);
double evaluate(const Network& net, const Dataset& d, Metric metric, double cutoff = 0.5);

/// Best achievable accuracy of the rule "predict 1 iff p(x) >= 1/2", in
/// closed form: the mean of max(p(x), 1 - p(x)) over the input distribution.
double bayes_accuracy_exact(GeneratorTag tag);

/// Monte-Carlo estimate of the same quantity over fresh samples.
double bayes_accuracy_estimate(const GeneratorSpec& spec, long long trials, Rng& rng);

} // namespace bla
