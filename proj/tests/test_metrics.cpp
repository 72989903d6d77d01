#include "bla/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bla;

TEST_CASE("mse matches hand computation and a naive loop") {
    Vector pred(2), target(2);
    pred << 1.0, 0.0;
    target << 2.0, 3.0;
    CHECK(mse(pred, target) == doctest::Approx((1.0 + 9.0) / 2.0).epsilon(1e-15));

    Rng rng = make_rng(4, "data");
    std::normal_distribution<double> gauss(0.0, 2.0);
    Vector p(37), t(37);
    for (Eigen::Index i = 0; i < 37; ++i) {
        p[i] = gauss(rng);
        t[i] = gauss(rng);
    }
    double naive = 0.0;
    for (Eigen::Index i = 0; i < 37; ++i) {
        naive += (p[i] - t[i]) * (p[i] - t[i]);
    }
    naive /= 37.0;
    CHECK(std::abs(mse(p, t) - naive) <= 1e-12 * std::max(1.0, naive));

    Vector empty(0);
    CHECK_THROWS_AS(mse(empty, empty), std::invalid_argument);
    Vector three(3);
    CHECK_THROWS_AS(mse(p, three), std::invalid_argument);
}

TEST_CASE("accuracy counts boundary predictions as class one") {
    Vector pred(4), labels(4);
    pred << 0.5, 0.49, 0.51, 0.2;
    labels << 1.0, 1.0, 0.0, 0.0;
    // 0.5 -> 1 (hit), 0.49 -> 0 (miss), 0.51 -> 1 (miss), 0.2 -> 0 (hit)
    CHECK(accuracy(pred, labels) == doctest::Approx(0.5).epsilon(1e-15));
    // Cutoff 0.6 sends all four to class 0: right on the two 0-labels only.
    CHECK(accuracy(pred, labels, 0.6) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(accuracy(pred, labels, 0.2) == doctest::Approx(0.5).epsilon(1e-15));

    Rng rng = make_rng(8, "data");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector p(101), l(101);
    for (Eigen::Index i = 0; i < 101; ++i) {
        p[i] = unif(rng);
        l[i] = unif(rng) < 0.5 ? 0.0 : 1.0;
    }
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < 101; ++i) {
        bool predicted_one = p[i] >= 0.5;
        bool is_one = l[i] == 1.0;
        if (predicted_one == is_one) ++hits;
    }
    CHECK(accuracy(p, l) == doctest::Approx(static_cast<double>(hits) / 101.0).epsilon(1e-15));
}

TEST_CASE("network-level metrics agree with predictions taken by hand") {
    Network net;
    Layer l1;
    l1.w = Matrix(1, 2);
    l1.w << 0.0, 1.0;
    l1.act = Activation::identity();
    Layer l2;
    l2.w = Matrix(1, 2);
    l2.w << 0.0, 1.0;
    l2.act = Activation::identity();
    net.layers = {l1, l2}; // the identity map

    Dataset d;
    d.x = Matrix(3, 1);
    d.x << 0.0, 0.5, 1.0;
    d.y = Vector(3);
    d.y << 0.0, 1.0, 1.0;
    CHECK(mse(net, d) == doctest::Approx(0.25 / 3.0).epsilon(1e-12));
    // Predictions 0, 0.5, 1 vs labels 0, 1, 1: the boundary point counts as 1.
    CHECK(accuracy(net, d) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(evaluate(net, d, Metric::Mse) == mse(net, d));
    CHECK(evaluate(net, d, Metric::Accuracy) == accuracy(net, d));
    CHECK(evaluate(net, d, Metric::Accuracy, 0.75) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("exact best-rule accuracy for both label models") {
    // Step: segment widths 0.3, 0.3, 0.2, 0.2 with p = .05, .25, .75, .95;
    // the best rule is right with probability max(p, 1-p) on each.
    double step = 0.3 * 0.95 + 0.3 * 0.75 + 0.2 * 0.75 + 0.2 * 0.95;
    CHECK(bayes_accuracy_exact(GeneratorTag::BernoulliStep) ==
          doctest::Approx(step).epsilon(1e-15));
    CHECK(step == doctest::Approx(0.85).epsilon(1e-15));

    // Cosine: mean of max(p, 1-p) = 1/2 + E|cos x|/2 = 1/2 + 1/pi.
    CHECK(bayes_accuracy_exact(GeneratorTag::BernoulliCosine) ==
          doctest::Approx(0.5 + 1.0 / std::numbers::pi).epsilon(1e-15));

    CHECK_THROWS_AS(bayes_accuracy_exact(GeneratorTag::F1), std::invalid_argument);
}

TEST_CASE("sampled best-rule accuracy converges to the closed form") {
    GeneratorSpec spec;
    spec.tag = GeneratorTag::BernoulliStep;
    Rng rng = make_rng(10, "data");
    double est = bayes_accuracy_estimate(spec, 1000000, rng);
    CHECK(std::abs(est - 0.85) <= 0.003);

    spec.tag = GeneratorTag::BernoulliCosine;
    double est2 = bayes_accuracy_estimate(spec, 1000000, rng);
    CHECK(std::abs(est2 - (0.5 + 1.0 / std::numbers::pi)) <= 0.003);

    spec.tag = GeneratorTag::F1;
    CHECK_THROWS_AS(bayes_accuracy_estimate(spec, 100, rng), std::invalid_argument);
    spec.tag = GeneratorTag::BernoulliStep;
    CHECK_THROWS_AS(bayes_accuracy_estimate(spec, 0, rng), std::invalid_argument);
}
