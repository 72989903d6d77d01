#include "bla/trainer.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

namespace bla {

int delta_schedule(int global_batch_index, const BlaConfig& cfg) {
    if (global_batch_index < 1) {
        throw std::invalid_argument("delta_schedule: index must be >= 1");
    }
    return std::max(cfg.delta_start - (global_batch_index - 1), cfg.delta_floor);
}

std::uint64_t r_policy(int epoch, int batch_in_epoch, Eigen::Index n_batch,
                       const BlaConfig& cfg) {
    if (epoch < 1 || batch_in_epoch < 1 || n_batch < 1) {
        throw std::invalid_argument("r_policy: invalid indices");
    }
    bool zero = cfg.r_policy == RPolicy::FirstBatchZero
                    ? (epoch == 1 && batch_in_epoch == 1)
                    : epoch == 1;
    return zero ? 0 : static_cast<std::uint64_t>(n_batch);
}

int batches_for_epoch(int epoch, const BlaConfig& cfg, Eigen::Index n) {
    if (epoch < 1) throw std::invalid_argument("batches_for_epoch: epoch must be >= 1");
    if (n < 1) throw std::invalid_argument("batches_for_epoch: empty dataset");
    auto it = cfg.batches_per_epoch.find(epoch);
    int count = it != cfg.batches_per_epoch.end() ? it->second : 1;
    if (count < 1) throw std::invalid_argument("batches_for_epoch: count must be >= 1");
    return static_cast<int>(std::min<Eigen::Index>(count, n));
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> batch_ranges(Eigen::Index n, int count) {
    if (count < 1 || n < count) throw std::invalid_argument("batch_ranges: bad count");
    Eigen::Index base = n / count;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> ranges;
    Eigen::Index off = 0;
    for (int b = 0; b < count; ++b) {
        Eigen::Index len = b + 1 < count ? base : n - off;
        ranges.emplace_back(off, len);
        off += len;
    }
    return ranges;
}

namespace {

void validate_config(const BlaConfig& cfg) {
    // epochs == 0 is allowed: train_bla then returns the bare initialization.
    if (cfg.epochs < 0) throw std::invalid_argument("BlaConfig: epochs must be >= 0");
    if (cfg.delta_floor < 1 || cfg.delta_floor > cfg.delta_start) {
        throw std::invalid_argument("BlaConfig: need 1 <= delta_floor <= delta_start");
    }
    if (cfg.inner_max_iters < 1 || cfg.inner_tol <= 0.0) {
        throw std::invalid_argument("BlaConfig: bad inner-solve parameters");
    }
    if (!cfg.net.out_act.invertible()) {
        throw std::invalid_argument("BlaConfig: output activation must be invertible");
    }
}

struct LayerDims {
    Eigen::Index in;  // includes the bias slot
    Eigen::Index out;
};

std::vector<LayerDims> solve_dims(const Network& net) {
    std::vector<LayerDims> dims;
    for (const auto& layer : net.layers) dims.push_back({layer.w.cols(), layer.w.rows()});
    return dims;
}

} // namespace

EpochRecord train_epoch(Network& net, const Dataset& data,
                        std::vector<MomentState>& state, int epoch,
                        const BlaConfig& cfg) {
    validate_config(cfg);
    if (data.size() < 1) throw std::invalid_argument("train_epoch: empty dataset");
    const int n_layers = static_cast<int>(net.layers.size());
    const int hidden = n_layers - 1;
    if (hidden != 1 && hidden != 2) {
        throw std::invalid_argument("train_epoch: supported depths are one or two hidden layers");
    }
    if (static_cast<int>(state.size()) != n_layers) {
        throw std::invalid_argument("train_epoch: state size does not match network depth");
    }
    auto t0 = std::chrono::steady_clock::now();
    auto dims = solve_dims(net);

    Rng shuffle_rng = make_rng(cfg.seed, "shuffle", {static_cast<std::uint64_t>(epoch)});
    auto perm = shuffled_indices(data.size(), shuffle_rng);

    int count = batches_for_epoch(epoch, cfg, data.size());
    auto ranges = batch_ranges(data.size(), count);
    int global_offset = 0;
    for (int e = 1; e < epoch; ++e) global_offset += batches_for_epoch(e, cfg, data.size());

    EpochRecord rec;
    rec.epoch = epoch;
    rec.metric = std::numeric_limits<double>::quiet_NaN();
    rec.inner_iters.assign(n_layers, 0);
    rec.cond.assign(n_layers, 0.0);

    for (int b = 0; b < count; ++b) {
        const int global_m = global_offset + b + 1;
        const auto [off, len] = ranges[b];
        ResampleConfig rcfg{cfg.dist, cfg.score, delta_schedule(global_m, cfg)};

        std::vector<Particle> proposals(len);
        for (Eigen::Index i = 0; i < len; ++i) {
            proposals[i] = forward_trace(net, data.input(perm[off + i]));
        }

        std::vector<SymMatrix> sum_a;
        std::vector<Matrix> sum_b;
        for (const auto& d : dims) {
            sum_a.push_back(SymMatrix::zero(d.in));
            sum_b.push_back(Matrix::Zero(d.in, d.out));
        }

        // Accumulation order is the datum order, fixed for reproducibility.
        for (Eigen::Index i = 0; i < len; ++i) {
            Vector x = data.input(perm[off + i]);
            double y = data.y[perm[off + i]];
            Rng rng = make_rng(cfg.seed, "sample",
                               {static_cast<std::uint64_t>(epoch),
                                static_cast<std::uint64_t>(b + 1),
                                static_cast<std::uint64_t>(i)});
            CandidateSet cand = candidate_set(x, y, proposals, rcfg);
            Particle mixed;
            if (hidden == 1) {
                int k = cand.indices[sample_particle(cand.weights, rng)];
                mixed = make_mixed(x, y, proposals[k], cfg.net.out_act);
            } else {
                int kj = cand.indices[sample_particle(cand.weights, rng)];
                int ku = cand.indices[draw_second_particle(cand.weights, rng)];
                mixed = make_mixed(x, y, proposals[kj], proposals[ku], cfg.net.out_act);
            }
            Vector in = augment(mixed.x);
            sum_a[0].add_outer(in);
            sum_b[0].noalias() += in * mixed.z[0].transpose();
            for (int l = 1; l < n_layers; ++l) {
                Vector h = augment(mixed.h[l - 1]);
                sum_a[l].add_outer(h);
                if (l + 1 < n_layers) {
                    sum_b[l].noalias() += h * mixed.z[l].transpose();
                } else {
                    sum_b[l].noalias() += h * mixed.z_out;
                }
            }
        }

        std::uint64_t r = r_policy(epoch, b + 1, len, cfg);
        for (int l = 0; l < n_layers; ++l) {
            state[l] = weighted_moment_update(state[l], sum_a[l], sum_b[l], r,
                                              static_cast<std::uint64_t>(len));
        }

        for (int l = 0; l < n_layers; ++l) {
            EigenBounds eb;
            try {
                eb = extreme_eigenvalues(state[l].a_hat);
            } catch (const EigenConvergenceError& e) {
                throw std::runtime_error("train_epoch: epoch " + std::to_string(epoch) +
                                         " batch " + std::to_string(b + 1) + " layer " +
                                         std::to_string(l + 1) +
                                         ": eigenvalue bounds failed: " + e.what());
            }
            if (eb.lambda_min < 1e-12 * eb.lambda_max) {
                std::cerr << "train_epoch: near-singular moment matrix at epoch " << epoch
                          << " batch " << b + 1 << " layer " << l + 1
                          << " (lambda_min " << eb.lambda_min << ", lambda_max "
                          << eb.lambda_max << ")\n";
            }
            double mu = step_size(eb.lambda_min, eb.lambda_max, cfg.step_factor);
            Matrix w0 = global_m == 1 ? Matrix::Zero(dims[l].in, dims[l].out)
                                      : Matrix(net.layers[l].w.transpose());
            RichardsonResult res = richardson_solve(state[l].a_hat, state[l].b_hat, w0, mu,
                                                    cfg.inner_max_iters, cfg.inner_tol);
            net.layers[l].w = res.w.transpose();
            rec.inner_iters[l] += res.iters;
            rec.cond[l] = eb.lambda_min > 0.0
                              ? eb.lambda_max / eb.lambda_min
                              : std::numeric_limits<double>::infinity();
        }
    }

    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    return rec;
}

namespace {

std::pair<Network, TrainHistory> train_bla_impl(const Dataset& train, const Dataset& val,
                                                const BlaConfig& cfg, int want_hidden) {
    validate_config(cfg);
    if (static_cast<int>(cfg.net.hidden.size()) != want_hidden) {
        throw std::invalid_argument("train_bla: config has " +
                                    std::to_string(cfg.net.hidden.size()) +
                                    " hidden layers, expected " + std::to_string(want_hidden));
    }
    if (train.size() < 1 || val.size() < 1) {
        throw std::invalid_argument("train_bla: empty train or validation set");
    }
    if (train.dim() != val.dim()) {
        throw std::invalid_argument("train_bla: train/validation dim mismatch");
    }

    Rng init_rng = make_rng(cfg.seed, "init");
    Network net = init_from_spec(cfg.net, train.dim(), init_rng);
    if (cfg.zero_output_init) net.layers.back().w.setZero();

    // Unit-variance targets during training, exact unscale at the end.
    double scale = 1.0;
    Dataset train_scaled, val_scaled;
    const Dataset* tr = &train;
    const Dataset* va = &val;
    if (cfg.standardize_target) {
        if (cfg.metric != Metric::Mse) {
            throw std::invalid_argument("train_bla: standardize_target requires the mse metric");
        }
        if (cfg.net.out_act.kind != Activation::Kind::Identity) {
            throw std::invalid_argument(
                "train_bla: standardize_target requires an identity output activation");
        }
        double mean = train.y.mean();
        double sd = std::sqrt((train.y.array() - mean).square().mean());
        if (sd > 0.0) scale = sd;
        train_scaled = train;
        train_scaled.y /= scale;
        val_scaled = val;
        val_scaled.y /= scale;
        tr = &train_scaled;
        va = &val_scaled;
    }

    std::vector<MomentState> state;
    for (const auto& layer : net.layers) {
        state.push_back(MomentState::zero(layer.w.cols(), layer.w.rows()));
    }

    TrainHistory history;
    history.solve_layers = static_cast<int>(net.layers.size());
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        EpochRecord rec = train_epoch(net, *tr, state, epoch, cfg);
        rec.metric = evaluate(net, *va, cfg.metric, cfg.cutoff);
        if (cfg.standardize_target) rec.metric *= scale * scale;
        history.records.push_back(std::move(rec));
    }
    if (cfg.standardize_target) net.layers.back().w *= scale;
    return {std::move(net), std::move(history)};
}

} // namespace

std::pair<Network, TrainHistory> train_bla(const Dataset& train, const Dataset& val,
                                           const BlaConfig& cfg) {
    return train_bla_impl(train, val, cfg, 1);
}

std::pair<Network, TrainHistory> train_bla_two_hidden(const Dataset& train,
                                                      const Dataset& val,
                                                      const BlaConfig& cfg) {
    return train_bla_impl(train, val, cfg, 2);
}

} // namespace bla
