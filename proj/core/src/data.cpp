#include "bla/data.hpp"

#include "bla/history.hpp"

#include <cassert>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace bla {

bool is_classification(GeneratorTag tag) {
    return tag == GeneratorTag::BernoulliStep || tag == GeneratorTag::BernoulliCosine;
}

std::string generator_name(GeneratorTag tag) {
    switch (tag) {
    case GeneratorTag::F1: return "f1";
    case GeneratorTag::F2: return "f2";
    case GeneratorTag::F3: return "f3";
    case GeneratorTag::StochasticNet: return "stochastic_net";
    case GeneratorTag::MultiInput: return "multi_input";
    case GeneratorTag::BernoulliStep: return "bernoulli_step";
    case GeneratorTag::BernoulliCosine: return "bernoulli_cosine";
    }
    return "?";
}

GeneratorTag parse_generator(const std::string& name) {
    if (name == "f1") return GeneratorTag::F1;
    if (name == "f2") return GeneratorTag::F2;
    if (name == "f3") return GeneratorTag::F3;
    if (name == "stochastic_net") return GeneratorTag::StochasticNet;
    if (name == "multi_input") return GeneratorTag::MultiInput;
    if (name == "bernoulli_step") return GeneratorTag::BernoulliStep;
    if (name == "bernoulli_cosine") return GeneratorTag::BernoulliCosine;
    throw std::invalid_argument("parse_generator: unknown generator '" + name + "'");
}

double f1(double x) { return x * x * x - 2.0 * x * x + 5.0 * x - 1.0; }

double f2(double x) { return std::sin(x * x) - 0.03 * std::pow(x, 5); }

double f3(double x) {
    double a = x - 2.0;
    double b = x + 1.0;
    return -(a * a * a) * (b * b) * (x - 4.0) / 8.0;
}

double multi_input(const Vector& x) {
    if (x.size() != 3) throw std::invalid_argument("multi_input: need 3 components");
    return 2.0 * x[0] * x[0] * x[1] - 6.0 * x[0] * x[2];
}

double bernoulli_step_p(double x) {
    if (x < 0.3) return 0.05;
    if (x < 0.6) return 0.25;
    if (x < 0.8) return 0.75;
    return 0.95;
}

double bernoulli_cosine_p(double x) { return (std::cos(x) + 1.0) / 2.0; }

double label_probability(GeneratorTag tag, double x) {
    switch (tag) {
    case GeneratorTag::BernoulliStep: return bernoulli_step_p(x);
    case GeneratorTag::BernoulliCosine: return bernoulli_cosine_p(x);
    default:
        throw std::invalid_argument("label_probability: " + generator_name(tag) +
                                    " is not a classification generator");
    }
}

namespace {

double uniform_in(double lo, double hi, Rng& rng) {
    std::uniform_real_distribution<double> dist(lo, hi);
    double v = dist(rng);
    assert(v >= lo && v <= hi);
    return v;
}

Dataset scalar_regression(Eigen::Index n, double lo, double hi, double (*f)(double),
                          Rng& rng) {
    if (n < 1) throw std::invalid_argument("gen_regression: n must be >= 1");
    Dataset d;
    d.x = Matrix(n, 1);
    d.y = Vector(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double x = uniform_in(lo, hi, rng);
        d.x(i, 0) = x;
        d.y[i] = f(x);
    }
    return d;
}

Dataset bernoulli_dataset(Eigen::Index n, double lo, double hi,
                          double (*p)(double), Rng& rng) {
    if (n < 1) throw std::invalid_argument("bernoulli generator: n must be >= 1");
    Dataset d;
    d.x = Matrix(n, 1);
    d.y = Vector(n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        double x = uniform_in(lo, hi, rng);
        d.x(i, 0) = x;
        d.y[i] = unif(rng) < p(x) ? 1.0 : 0.0;
    }
    return d;
}

} // namespace

Dataset gen_regression(const GeneratorSpec& spec, Eigen::Index n, Rng& rng) {
    switch (spec.tag) {
    case GeneratorTag::F1: return scalar_regression(n, -3.0, 3.0, f1, rng);
    case GeneratorTag::F2: return scalar_regression(n, -3.0, 3.0, f2, rng);
    case GeneratorTag::F3: return scalar_regression(n, -1.0, 4.0, f3, rng);
    case GeneratorTag::MultiInput: {
        if (n < 1) throw std::invalid_argument("gen_regression: n must be >= 1");
        Dataset d;
        d.x = Matrix(n, 3);
        d.y = Vector(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Vector x(3);
            x[0] = uniform_in(-5.0, 5.0, rng);
            x[1] = uniform_in(-2.0, 2.0, rng);
            x[2] = uniform_in(0.0, 4.0, rng);
            d.x.row(i) = x.transpose();
            d.y[i] = multi_input(x);
        }
        return d;
    }
    default:
        throw std::invalid_argument("gen_regression: " + generator_name(spec.tag) +
                                    " is not a plain regression generator");
    }
}

StochasticNetTarget gen_stochastic_net_target(Rng& rng) {
    StochasticNetTarget t;
    t.net = random_network({1, 100, 1}, {Activation::tanh(), Activation::identity()},
                           {5.0, 0.0}, {3.0, 0.5}, rng);
    return t;
}

Dataset StochasticNetTarget::sample(Eigen::Index n, Rng& rng) const {
    if (n < 1) throw std::invalid_argument("StochasticNetTarget::sample: n must be >= 1");
    Dataset d;
    d.x = Matrix(n, 1);
    d.y = Vector(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double x = uniform_in(-5.0, 5.0, rng);
        d.x(i, 0) = x;
        Vector xv(1);
        xv[0] = x;
        d.y[i] = forward(net, xv);
    }
    return d;
}

Dataset gen_bernoulli_step(Eigen::Index n, Rng& rng) {
    return bernoulli_dataset(n, 0.0, 1.0, bernoulli_step_p, rng);
}

Dataset gen_bernoulli_cosine(Eigen::Index n, Rng& rng) {
    return bernoulli_dataset(n, 0.0, 2.0 * std::numbers::pi, bernoulli_cosine_p, rng);
}

Dataset generate(const GeneratorSpec& spec, Eigen::Index n, Rng& rng) {
    switch (spec.tag) {
    case GeneratorTag::F1:
    case GeneratorTag::F2:
    case GeneratorTag::F3:
    case GeneratorTag::MultiInput:
        return gen_regression(spec, n, rng);
    case GeneratorTag::StochasticNet:
        return gen_stochastic_net_target(rng).sample(n, rng);
    case GeneratorTag::BernoulliStep:
        return gen_bernoulli_step(n, rng);
    case GeneratorTag::BernoulliCosine:
        return gen_bernoulli_cosine(n, rng);
    }
    throw std::invalid_argument("generate: bad tag");
}

std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, Rng& rng) {
    std::vector<Eigen::Index> idx(n);
    for (Eigen::Index i = 0; i < n; ++i) idx[i] = i;
    // Fisher-Yates, spelled out so the draw sequence is pinned by this code
    // rather than by the standard library's shuffle implementation.
    for (Eigen::Index i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<Eigen::Index> pick(0, i);
        std::swap(idx[i], idx[pick(rng)]);
    }
    return idx;
}

std::pair<Dataset, Dataset> split_and_shuffle(const Dataset& all, Eigen::Index n_train,
                                              Eigen::Index n_val, Rng& rng) {
    if (n_train < 1 || n_val < 1) {
        throw std::invalid_argument("split_and_shuffle: split sizes must be >= 1");
    }
    if (all.size() < n_train + n_val) {
        throw std::invalid_argument("split_and_shuffle: dataset has fewer points than the split");
    }
    auto idx = shuffled_indices(all.size(), rng);
    auto take = [&](Eigen::Index offset, Eigen::Index count) {
        Dataset d;
        d.x = Matrix(count, all.dim());
        d.y = Vector(count);
        for (Eigen::Index i = 0; i < count; ++i) {
            d.x.row(i) = all.x.row(idx[offset + i]);
            d.y[i] = all.y[idx[offset + i]];
        }
        return d;
    };
    return {take(0, n_train), take(n_train, n_val)};
}

void write_dataset_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_dataset_csv: cannot open " + path);
    for (Eigen::Index c = 0; c < d.dim(); ++c) out << 'x' << c + 1 << ',';
    out << "y\n";
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        for (Eigen::Index c = 0; c < d.dim(); ++c) out << format_double(d.x(i, c)) << ',';
        out << format_double(d.y[i]) << '\n';
    }
    if (!out) throw std::runtime_error("write_dataset_csv: write failed for " + path);
}

} // namespace bla
