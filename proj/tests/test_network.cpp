#include "bla/network.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace bla;

TEST_CASE("activation values and derivatives") {
    Activation id = Activation::identity();
    CHECK(id.apply(-2.5) == -2.5);
    CHECK(id.derivative(7.0) == 1.0);

    Activation th = Activation::tanh();
    CHECK(th.apply(0.7) == doctest::Approx(std::tanh(0.7)));
    double t = std::tanh(0.7);
    CHECK(th.derivative(0.7) == doctest::Approx(1.0 - t * t));

    Activation re = Activation::relu();
    CHECK(re.apply(3.0) == 3.0);
    CHECK(re.apply(-3.0) == 0.0);
    CHECK(re.derivative(2.0) == 1.0);
    CHECK(re.derivative(-2.0) == 0.0);
    CHECK(re.derivative(0.0) == 0.0); // subgradient at the kink

    Activation lk = Activation::leaky_relu();
    CHECK(lk.slope == 0.01);
    CHECK(lk.apply(-2.0) == doctest::Approx(-0.02));
    CHECK(lk.derivative(-2.0) == 0.01);
    CHECK(lk.derivative(5.0) == 1.0);
}

TEST_CASE("activation inverses") {
    CHECK(Activation::identity().inverse(-4.0) == -4.0);
    CHECK(Activation::tanh().inverse(std::tanh(1.3)) == doctest::Approx(1.3));
    CHECK_THROWS_AS(Activation::tanh().inverse(1.0), std::domain_error);
    CHECK_THROWS_AS(Activation::tanh().inverse(-2.0), std::domain_error);
    CHECK_THROWS_AS(Activation::relu().inverse(0.5), std::logic_error);
    CHECK(Activation::identity().invertible());
    CHECK(Activation::tanh().invertible());
    CHECK_FALSE(Activation::relu().invertible());
    CHECK_FALSE(Activation::leaky_relu().invertible());
}

TEST_CASE("activation names round-trip") {
    for (auto a : {Activation::identity(), Activation::tanh(), Activation::relu(),
                   Activation::leaky_relu(0.05)}) {
        Activation back = Activation::parse(a.name(), a.slope);
        CHECK(back.kind == a.kind);
        CHECK(back.slope == a.slope);
    }
    CHECK_THROWS_AS(Activation::parse("sigmoid"), std::invalid_argument);
}

TEST_CASE("augment prepends the bias input") {
    Vector v(2);
    v << 3.0, -1.0;
    Vector a = augment(v);
    REQUIRE(a.size() == 3);
    CHECK(a[0] == -1.0);
    CHECK(a[1] == 3.0);
    CHECK(a[2] == -1.0);
}

TEST_CASE("init network shapes and validation") {
    Rng rng(1);
    Network net = init_network({1, 100, 1}, {Activation::tanh(), Activation::identity()},
                               0.5, rng);
    REQUIRE(net.layers.size() == 2);
    CHECK(net.layers[0].w.rows() == 100);
    CHECK(net.layers[0].w.cols() == 2);
    CHECK(net.layers[1].w.rows() == 1);
    CHECK(net.layers[1].w.cols() == 101);
    CHECK(net.input_dim() == 1);
    CHECK(net.hidden_layers() == 1);

    CHECK_THROWS_AS(init_network({1, 2, 1}, {Activation::tanh(), Activation::identity()},
                                 0.0, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(init_network({1}, {}, 0.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(init_network({1, 2, 1}, {Activation::tanh()}, 0.5, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(init_network({1, 0, 1}, {Activation::tanh(), Activation::identity()},
                                 0.5, rng),
                    std::invalid_argument);
}

TEST_CASE("forward trace on a hand-computed network") {
    Network net;
    Layer l1;
    l1.w = Matrix(2, 2);
    l1.w << 1.0, 2.0, 0.0, -1.0;
    l1.act = Activation::identity();
    Layer l2;
    l2.w = Matrix(1, 3);
    l2.w << 1.0, 0.5, 0.5;
    l2.act = Activation::identity();
    net.layers = {l1, l2};

    Vector x(1);
    x << 3.0;
    // z1 = W1 (-1, 3) = (5, -3); z_out = W2 (-1, 5, -3) = -1 + 2.5 - 1.5 = 0
    Particle p = forward_trace(net, x);
    CHECK(p.x[0] == 3.0);
    REQUIRE(p.z.size() == 1);
    CHECK(p.z[0][0] == doctest::Approx(5.0));
    CHECK(p.z[0][1] == doctest::Approx(-3.0));
    CHECK(p.h[0][0] == doctest::Approx(5.0));
    CHECK(p.z_out == doctest::Approx(0.0));
    CHECK(p.y == doctest::Approx(0.0));
    CHECK(forward(net, x) == doctest::Approx(p.y));

    Vector bad(2);
    CHECK_THROWS_AS(forward_trace(net, bad), std::invalid_argument);
}

TEST_CASE("forward trace records every hidden layer of a deeper network") {
    Rng rng(7);
    Network net = init_network(
        {2, 4, 3, 1},
        {Activation::tanh(), Activation::tanh(), Activation::identity()}, 0.5, rng);
    Vector x(2);
    x << 0.3, -0.9;
    Particle p = forward_trace(net, x);
    REQUIRE(p.z.size() == 2);
    REQUIRE(p.h.size() == 2);
    CHECK(p.z[0].size() == 4);
    CHECK(p.z[1].size() == 3);
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(p.h[0][i] == doctest::Approx(std::tanh(p.z[0][i])));
    }
    CHECK(p.y == doctest::Approx(p.z_out)); // identity output
}

TEST_CASE("network json round trip preserves weights exactly") {
    Rng rng(11);
    Network net = init_network({2, 5, 1}, {Activation::leaky_relu(0.02), Activation::tanh()},
                               0.5, rng);
    std::string path = (std::filesystem::temp_directory_path() / "bla_net_roundtrip.json").string();
    net.save_json(path);
    Network back = Network::load_json(path);
    REQUIRE(back.layers.size() == net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        CHECK(back.layers[l].w == net.layers[l].w);
        CHECK(back.layers[l].act.kind == net.layers[l].act.kind);
        CHECK(back.layers[l].act.slope == net.layers[l].act.slope);
    }
    std::remove(path.c_str());
    CHECK_THROWS_AS(Network::load_json("/nonexistent/net.json"), std::runtime_error);
}

TEST_CASE("init_from_spec builds the configured stack") {
    NetSpec spec;
    spec.hidden = {20, 20};
    spec.out_act = Activation::identity();
    Rng rng(3);
    Network net = init_from_spec(spec, 1, rng);
    REQUIRE(net.layers.size() == 3);
    CHECK(net.layers[0].w.rows() == 20);
    CHECK(net.layers[0].w.cols() == 2);
    CHECK(net.layers[1].w.cols() == 21);
    CHECK(net.layers[2].w.cols() == 21);
    CHECK(net.layers[0].act.kind == Activation::Kind::Tanh); // default fill

    NetSpec bad;
    bad.hidden = {};
    CHECK_THROWS_AS(init_from_spec(bad, 1, rng), std::invalid_argument);
}
