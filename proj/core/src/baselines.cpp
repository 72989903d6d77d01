#include "bla/baselines.hpp"

#include "bla/rng.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bla {

std::vector<Matrix> backprop_gradients(const Network& net, const Dataset& batch) {
    if (net.layers.empty()) throw std::invalid_argument("backprop_gradients: empty network");
    if (batch.size() < 1) throw std::invalid_argument("backprop_gradients: empty batch");
    if (batch.dim() != net.input_dim()) {
        throw std::invalid_argument("backprop_gradients: input dim mismatch");
    }
    const int n_layers = static_cast<int>(net.layers.size());
    std::vector<Matrix> grads;
    for (const auto& layer : net.layers) {
        grads.push_back(Matrix::Zero(layer.w.rows(), layer.w.cols()));
    }
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (Eigen::Index i = 0; i < batch.size(); ++i) {
        Particle p = forward_trace(net, batch.input(i));
        // d(mean sq error)/d z_out
        double delta_out =
            2.0 * (p.y - batch.y[i]) * inv_n * net.layers.back().act.derivative(p.z_out);
        Vector delta(1);
        delta[0] = delta_out;
        for (int l = n_layers - 1; l >= 0; --l) {
            const Vector& input = l == 0 ? p.x : p.h[l - 1];
            grads[l].noalias() += delta * augment(input).transpose();
            if (l == 0) break;
            // Drop the bias column: the -1 slot feeds no earlier layer.
            Vector back = net.layers[l].w.rightCols(net.layers[l].w.cols() - 1).transpose() * delta;
            const Vector& z = p.z[l - 1];
            delta = Vector(back.size());
            for (Eigen::Index j = 0; j < back.size(); ++j) {
                delta[j] = back[j] * net.layers[l - 1].act.derivative(z[j]);
            }
        }
    }
    return grads;
}

AdamState AdamState::zero(const Network& net) {
    AdamState s;
    for (const auto& layer : net.layers) {
        s.m.push_back(Matrix::Zero(layer.w.rows(), layer.w.cols()));
        s.v.push_back(Matrix::Zero(layer.w.rows(), layer.w.cols()));
    }
    return s;
}

void adam_update(Network& net, AdamState& state, const std::vector<Matrix>& grads,
                 const AdamConfig& cfg) {
    if (grads.size() != net.layers.size() || state.m.size() != net.layers.size()) {
        throw std::invalid_argument("adam_update: shape mismatch");
    }
    state.step += 1;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        state.m[l] = cfg.beta1 * state.m[l] + (1.0 - cfg.beta1) * grads[l];
        state.v[l] = cfg.beta2 * state.v[l] + (1.0 - cfg.beta2) * grads[l].cwiseProduct(grads[l]);
        Matrix m_hat = state.m[l] / bc1;
        Matrix v_hat = state.v[l] / bc2;
        net.layers[l].w.array() -=
            cfg.lr * m_hat.array() / (v_hat.array().sqrt() + cfg.eps);
    }
}

namespace {

Dataset slice(const Dataset& d, const std::vector<Eigen::Index>& idx, Eigen::Index off,
              Eigen::Index len) {
    Dataset out;
    out.x = Matrix(len, d.dim());
    out.y = Vector(len);
    for (Eigen::Index i = 0; i < len; ++i) {
        out.x.row(i) = d.x.row(idx[off + i]);
        out.y[i] = d.y[idx[off + i]];
    }
    return out;
}

void check_finite_loss(const Network& net, const Dataset& train, int epoch,
                       const char* who) {
    double loss = mse(net, train);
    if (!std::isfinite(loss)) {
        throw std::runtime_error(std::string(who) + ": loss is not finite at epoch " +
                                 std::to_string(epoch) + " (diverged)");
    }
}

EpochRecord make_record(int epoch, double metric, double wall_ms, int n_layers) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.metric = metric;
    rec.wall_ms = wall_ms;
    rec.inner_iters.assign(n_layers, 0);
    rec.cond.assign(n_layers, 0.0);
    return rec;
}

} // namespace

std::pair<Network, TrainHistory> train_gd(const Dataset& train, const Dataset& val,
                                          int epochs, const GdConfig& cfg) {
    if (epochs < 1) throw std::invalid_argument("train_gd: epochs must be >= 1");
    if (cfg.lr < 0.0) throw std::invalid_argument("train_gd: lr must be >= 0");
    if (train.size() < 1 || val.size() < 1) {
        throw std::invalid_argument("train_gd: empty train or validation set");
    }
    Rng init_rng = make_rng(cfg.seed, "init");
    Network net = init_from_spec(cfg.net, train.dim(), init_rng);
    TrainHistory history;
    history.solve_layers = static_cast<int>(net.layers.size());

    for (int epoch = 1; epoch <= epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        if (cfg.batch_size <= 0 || cfg.batch_size >= train.size()) {
            auto grads = backprop_gradients(net, train);
            for (std::size_t l = 0; l < net.layers.size(); ++l) {
                net.layers[l].w.noalias() -= cfg.lr * grads[l];
            }
        } else {
            Rng shuffle_rng =
                make_rng(cfg.seed, "shuffle", {static_cast<std::uint64_t>(epoch)});
            auto idx = shuffled_indices(train.size(), shuffle_rng);
            for (Eigen::Index off = 0; off < train.size(); off += cfg.batch_size) {
                Eigen::Index len = std::min<Eigen::Index>(cfg.batch_size, train.size() - off);
                auto grads = backprop_gradients(net, slice(train, idx, off, len));
                for (std::size_t l = 0; l < net.layers.size(); ++l) {
                    net.layers[l].w.noalias() -= cfg.lr * grads[l];
                }
            }
        }
        check_finite_loss(net, train, epoch, "train_gd");
        double wall = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        history.records.push_back(make_record(
            epoch, evaluate(net, val, cfg.metric, cfg.cutoff), wall, history.solve_layers));
    }
    return {std::move(net), std::move(history)};
}

std::pair<Network, TrainHistory> train_adam(const Dataset& train, const Dataset& val,
                                            int epochs, const AdamConfig& cfg) {
    if (epochs < 1) throw std::invalid_argument("train_adam: epochs must be >= 1");
    if (cfg.lr < 0.0) throw std::invalid_argument("train_adam: lr must be >= 0");
    if (train.size() < 1 || val.size() < 1) {
        throw std::invalid_argument("train_adam: empty train or validation set");
    }
    Rng init_rng = make_rng(cfg.seed, "init");
    Network net = init_from_spec(cfg.net, train.dim(), init_rng);
    AdamState state = AdamState::zero(net);
    TrainHistory history;
    history.solve_layers = static_cast<int>(net.layers.size());
    Eigen::Index batch = cfg.batch_size <= 0 ? train.size() : cfg.batch_size;

    for (int epoch = 1; epoch <= epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        Rng shuffle_rng = make_rng(cfg.seed, "shuffle", {static_cast<std::uint64_t>(epoch)});
        auto idx = shuffled_indices(train.size(), shuffle_rng);
        for (Eigen::Index off = 0; off < train.size(); off += batch) {
            Eigen::Index len = std::min<Eigen::Index>(batch, train.size() - off);
            auto grads = backprop_gradients(net, slice(train, idx, off, len));
            adam_update(net, state, grads, cfg);
        }
        check_finite_loss(net, train, epoch, "train_adam");
        double wall = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        history.records.push_back(make_record(
            epoch, evaluate(net, val, cfg.metric, cfg.cutoff), wall, history.solve_layers));
    }
    return {std::move(net), std::move(history)};
}

} // namespace bla
