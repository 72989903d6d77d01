#include "bla/baselines.hpp"

#include "bla/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace bla;

namespace {

Dataset line_data(Eigen::Index n, double slope, double intercept, double x0, double dx) {
    Dataset d;
    d.x = Matrix(n, 1);
    d.y = Vector(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double x = x0 + dx * static_cast<double>(i);
        d.x(i, 0) = x;
        d.y[i] = slope * x + intercept;
    }
    return d;
}

double batch_mse(const Network& net, const Dataset& d) { return mse(net, d); }

// Central differences on every weight entry. h balances truncation against
// cancellation for weights of order one.
std::vector<Matrix> fd_gradients(Network net, const Dataset& d, double h = 1e-5) {
    std::vector<Matrix> grads;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Matrix g(net.layers[l].w.rows(), net.layers[l].w.cols());
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
            for (Eigen::Index c = 0; c < g.cols(); ++c) {
                double saved = net.layers[l].w(r, c);
                net.layers[l].w(r, c) = saved + h;
                double up = batch_mse(net, d);
                net.layers[l].w(r, c) = saved - h;
                double down = batch_mse(net, d);
                net.layers[l].w(r, c) = saved;
                g(r, c) = (up - down) / (2.0 * h);
            }
        }
        grads.push_back(std::move(g));
    }
    return grads;
}

Network small_net(Activation hidden, Activation out, std::uint64_t seed) {
    Rng rng = make_rng(seed, "init");
    return init_network({1, 5, 1}, {hidden, out}, 0.5, rng);
}

bool near_relu_kink(const Network& net, const Dataset& d, double margin) {
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        Particle p = forward_trace(net, d.input(i));
        for (const auto& z : p.z) {
            for (Eigen::Index j = 0; j < z.size(); ++j) {
                if (std::abs(z[j]) < margin) return true;
            }
        }
    }
    return false;
}

} // namespace

TEST_CASE("gradient vanishes when the network already fits the batch") {
    Network net;
    Layer l1;
    l1.w = Matrix(1, 2);
    l1.w << 0.0, 1.0; // h = x
    l1.act = Activation::identity();
    Layer l2;
    l2.w = Matrix(1, 2);
    l2.w << -1.0, 2.0; // y = 2h + 1
    l2.act = Activation::identity();
    net.layers = {l1, l2};
    Dataset d = line_data(6, 2.0, 1.0, -1.0, 0.4);
    auto grads = backprop_gradients(net, d);
    for (const auto& g : grads) {
        CHECK(g.norm() <= 1e-12);
    }
}

TEST_CASE("single-datum gradient matches the hand-worked chain") {
    // 1-1-1 identity network: y_hat = w2 (w1 x - b1) - b2, squared error.
    Network net;
    Layer l1;
    l1.w = Matrix(1, 2);
    l1.w << 0.5, 2.0; // b1 = 0.5, w1 = 2
    l1.act = Activation::identity();
    Layer l2;
    l2.w = Matrix(1, 2);
    l2.w << -0.25, 3.0; // b2 = -0.25, w2 = 3
    l2.act = Activation::identity();
    net.layers = {l1, l2};

    Dataset d;
    d.x = Matrix(1, 1);
    d.x(0, 0) = 1.5;
    d.y = Vector(1);
    d.y[0] = 2.0;

    double z1 = 2.0 * 1.5 - 0.5;        // 2.5
    double y_hat = 3.0 * z1 + 0.25;     // 7.75
    double resid = 2.0 * (y_hat - 2.0); // d err / d y_hat = 11.5
    auto grads = backprop_gradients(net, d);
    // Output layer: d/d b2 = -resid, d/d w2 = resid * z1.
    CHECK(grads[1](0, 0) == doctest::Approx(-resid).epsilon(1e-12));
    CHECK(grads[1](0, 1) == doctest::Approx(resid * z1).epsilon(1e-12));
    // Hidden layer: delta1 = resid * w2, d/d b1 = -delta1, d/d w1 = delta1 * x.
    CHECK(grads[0](0, 0) == doctest::Approx(-resid * 3.0).epsilon(1e-12));
    CHECK(grads[0](0, 1) == doctest::Approx(resid * 3.0 * 1.5).epsilon(1e-12));
}

TEST_CASE("backprop matches central finite differences") {
    Dataset d = line_data(9, 1.3, -0.7, -1.0, 0.25);
    struct Case {
        Activation hidden;
        Activation out;
        std::uint64_t seed;
    };
    std::vector<Case> cases = {
        {Activation::tanh(), Activation::identity(), 3},
        {Activation::identity(), Activation::identity(), 4},
        {Activation::leaky_relu(), Activation::identity(), 5},
        {Activation::tanh(), Activation::tanh(), 6},
        {Activation::relu(), Activation::identity(), 7},
    };
    for (const auto& c : cases) {
        CAPTURE(c.hidden.name());
        CAPTURE(c.out.name());
        Network net = small_net(c.hidden, c.out, c.seed);
        if (c.hidden.kind == Activation::Kind::ReLU && near_relu_kink(net, d, 1e-3)) {
            // The subgradient choice at 0 is arbitrary; skip seeds that land
            // a preactivation on the kink instead of asserting there.
            continue;
        }
        if (c.out.kind == Activation::Kind::Tanh) {
            for (Eigen::Index i = 0; i < d.size(); ++i) d.y[i] = std::tanh(d.y[i]);
        }
        auto analytic = backprop_gradients(net, d);
        auto numeric = fd_gradients(net, d);
        for (std::size_t l = 0; l < analytic.size(); ++l) {
            for (Eigen::Index r = 0; r < analytic[l].rows(); ++r) {
                for (Eigen::Index cidx = 0; cidx < analytic[l].cols(); ++cidx) {
                    double a = analytic[l](r, cidx);
                    double b = numeric[l](r, cidx);
                    double scale = std::max({1.0, std::abs(a), std::abs(b)});
                    CHECK(std::abs(a - b) <= 1e-4 * scale);
                }
            }
        }
        if (c.out.kind == Activation::Kind::Tanh) {
            for (Eigen::Index i = 0; i < d.size(); ++i) d.y[i] = std::atanh(d.y[i]);
        }
    }
}

TEST_CASE("zero learning rate leaves the initialization untouched") {
    Dataset d = line_data(12, 1.0, 0.0, -1.0, 0.2);
    GdConfig cfg;
    cfg.net.hidden = {5};
    cfg.lr = 0.0;
    cfg.seed = 11;
    auto [net, history] = train_gd(d, d, 3, cfg);
    Rng rng = make_rng(cfg.seed, "init");
    Network expected = init_from_spec(cfg.net, 1, rng);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        CHECK(net.layers[l].w == expected.layers[l].w);
    }
    REQUIRE(history.records.size() == 3);
    CHECK(history.records[0].metric == history.records[2].metric);
}

TEST_CASE("gradient descent fits a line with identity activations") {
    Dataset train = line_data(20, 0.8, 0.3, -1.0, 0.1);
    GdConfig cfg;
    cfg.net.hidden = {3};
    cfg.net.hidden_acts = {Activation::identity()};
    cfg.lr = 0.05;
    cfg.seed = 2;
    auto [net, history] = train_gd(train, train, 5000, cfg);
    CHECK(history.records.back().metric <= 1e-4);
    CHECK(history.records.back().metric < history.records.front().metric);
}

TEST_CASE("adam update is a no-op on zero gradients") {
    Network net = small_net(Activation::tanh(), Activation::identity(), 8);
    Network before = net;
    AdamState state = AdamState::zero(net);
    AdamConfig cfg;
    std::vector<Matrix> zeros;
    for (const auto& layer : net.layers) {
        zeros.push_back(Matrix::Zero(layer.w.rows(), layer.w.cols()));
    }
    adam_update(net, state, zeros, cfg);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        CHECK(net.layers[l].w == before.layers[l].w);
    }
    CHECK(state.step == 1);
}

TEST_CASE("adam steps are bounded by lr over one minus beta1") {
    Network net = small_net(Activation::tanh(), Activation::identity(), 13);
    AdamState state = AdamState::zero(net);
    AdamConfig cfg;
    cfg.lr = 0.01;
    Rng rng = make_rng(99, "grads");
    std::normal_distribution<double> gauss(0.0, 10.0);
    double bound = cfg.lr / (1.0 - cfg.beta1) + 1e-12;
    for (int step = 0; step < 50; ++step) {
        std::vector<Matrix> grads;
        for (const auto& layer : net.layers) {
            Matrix g(layer.w.rows(), layer.w.cols());
            for (Eigen::Index r = 0; r < g.rows(); ++r) {
                for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = gauss(rng);
            }
            grads.push_back(std::move(g));
        }
        std::vector<Matrix> before;
        for (const auto& layer : net.layers) before.push_back(layer.w);
        adam_update(net, state, grads, cfg);
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            CHECK((net.layers[l].w - before[l]).cwiseAbs().maxCoeff() <= bound);
        }
    }
}

TEST_CASE("adam drives a tanh network below its starting loss") {
    Dataset train = line_data(64, 0.4, -0.1, -1.0, 0.03);
    AdamConfig cfg;
    cfg.net.hidden = {8};
    cfg.lr = 0.01;
    cfg.batch_size = 16;
    cfg.seed = 3;
    auto [net, history] = train_adam(train, train, 200, cfg);
    CHECK(history.records.back().metric < 0.1 * history.records.front().metric);
}

TEST_CASE("baseline training is deterministic for a fixed seed") {
    Dataset train = line_data(50, -0.6, 0.2, -1.0, 0.04);
    AdamConfig cfg;
    cfg.net.hidden = {6};
    cfg.batch_size = 12;
    cfg.seed = 21;
    auto [net_a, hist_a] = train_adam(train, train, 5, cfg);
    auto [net_b, hist_b] = train_adam(train, train, 5, cfg);
    for (std::size_t l = 0; l < net_a.layers.size(); ++l) {
        CHECK(net_a.layers[l].w == net_b.layers[l].w);
    }
    for (std::size_t i = 0; i < hist_a.records.size(); ++i) {
        CHECK(hist_a.records[i].metric == hist_b.records[i].metric);
    }

    GdConfig gd;
    gd.net.hidden = {6};
    gd.batch_size = 12;
    gd.seed = 21;
    auto [gnet_a, ghist_a] = train_gd(train, train, 5, gd);
    auto [gnet_b, ghist_b] = train_gd(train, train, 5, gd);
    for (std::size_t l = 0; l < gnet_a.layers.size(); ++l) {
        CHECK(gnet_a.layers[l].w == gnet_b.layers[l].w);
    }
}

TEST_CASE("divergent training aborts with an error") {
    Dataset train = line_data(16, 2.0, 0.0, -2.0, 0.25);
    GdConfig cfg;
    cfg.net.hidden = {5};
    cfg.lr = 1e15;
    cfg.seed = 1;
    CHECK_THROWS_AS(train_gd(train, train, 10, cfg), std::runtime_error);
}

TEST_CASE("baselines reject empty data and bad epoch counts") {
    Dataset train = line_data(10, 1.0, 0.0, 0.0, 0.1);
    Dataset empty;
    empty.x = Matrix(0, 1);
    empty.y = Vector(0);
    GdConfig gd;
    gd.net.hidden = {4};
    CHECK_THROWS_AS(train_gd(train, train, 0, gd), std::invalid_argument);
    CHECK_THROWS_AS(train_gd(empty, train, 1, gd), std::invalid_argument);
    AdamConfig ad;
    ad.net.hidden = {4};
    CHECK_THROWS_AS(train_adam(train, empty, 1, ad), std::invalid_argument);
}
