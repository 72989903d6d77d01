#include "bla/metrics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace bla {

double mse(const Vector& predictions, const Vector& targets) {
    if (predictions.size() == 0) throw std::invalid_argument("mse: empty input");
    if (predictions.size() != targets.size()) {
        throw std::invalid_argument("mse: length mismatch");
    }
    return (predictions - targets).squaredNorm() / static_cast<double>(predictions.size());
}

double accuracy(const Vector& predictions, const Vector& labels, double cutoff) {
    if (predictions.size() == 0) throw std::invalid_argument("accuracy: empty input");
    if (predictions.size() != labels.size()) {
        throw std::invalid_argument("accuracy: length mismatch");
    }
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < predictions.size(); ++i) {
        bool predicted_one = predictions[i] >= cutoff;
        bool is_one = labels[i] == 1.0;
        if (predicted_one == is_one) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

static Vector predict_all(const Network& net, const Dataset& d) {
    Vector pred(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) pred[i] = forward(net, d.input(i));
    return pred;
}

double mse(const Network& net, const Dataset& d) { return mse(predict_all(net, d), d.y); }

double accuracy(const Network& net, const Dataset& d, double cutoff) {
    return accuracy(predict_all(net, d), d.y, cutoff);
}

double evaluate(const Network& net, const Dataset& d, Metric metric, double cutoff) {
    return metric == Metric::Mse ? mse(net, d) : accuracy(net, d, cutoff);
}

double bayes_accuracy_exact(GeneratorTag tag) {
    switch (tag) {
    case GeneratorTag::BernoulliStep:
        // Piecewise constant: interval length times max(p, 1-p) on each piece.
        return 0.3 * 0.95 + 0.3 * 0.75 + 0.2 * 0.75 + 0.2 * 0.95;
    case GeneratorTag::BernoulliCosine:
        // E[max(p, 1-p)] = 1/2 + E[|cos x|]/2 with E[|cos x|] = 2/pi.
        return 0.5 + 1.0 / std::numbers::pi;
    default:
        throw std::invalid_argument("bayes_accuracy_exact: " + generator_name(tag) +
                                    " is not a classification generator");
    }
}

double bayes_accuracy_estimate(const GeneratorSpec& spec, long long trials, Rng& rng) {
    if (!is_classification(spec.tag)) {
        throw std::invalid_argument("bayes_accuracy_estimate: " + generator_name(spec.tag) +
                                    " is not a classification generator");
    }
    if (trials < 1) throw std::invalid_argument("bayes_accuracy_estimate: trials must be >= 1");
    double hi = spec.tag == GeneratorTag::BernoulliCosine ? 2.0 * std::numbers::pi : 1.0;
    std::uniform_real_distribution<double> x_dist(0.0, hi);
    std::uniform_real_distribution<double> u_dist(0.0, 1.0);
    long long hits = 0;
    for (long long t = 0; t < trials; ++t) {
        double p = label_probability(spec.tag, x_dist(rng));
        int label = u_dist(rng) < p ? 1 : 0;
        int pred = p >= 0.5 ? 1 : 0;
        if (pred == label) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

} // namespace bla
