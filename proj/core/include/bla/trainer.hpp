#pragma once

#include "bla/bootstrap.hpp"
#include "bla/data.hpp"
#include "bla/history.hpp"
#include "bla/linalg.hpp"
#include "bla/metrics.hpp"
#include "bla/network.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace bla {

/// When the carried-over moments get zero weight: only the very first batch
/// (the prose choice) or every batch of the first epoch (the pseudocode one).
enum class RPolicy { FirstBatchZero, FirstEpochZero };

struct BlaConfig {
    NetSpec net;
    int epochs = 50;
    int delta_start = 40;
    int delta_floor = 8;
    RPolicy r_policy = RPolicy::FirstBatchZero;
    double step_factor = 1.95;
    int inner_max_iters = 100000;
    double inner_tol = 1e-10;
    DistanceKind dist = DistanceKind::SquaredL2;
    ScoreKind score = ScoreKind::ExpSquared;
    /// Zero the output layer after random init. The first candidate ranking
    /// then depends only on input proximity; with a random output layer the
    /// initial prediction spread competes with the target spread in the
    /// distance and convergence becomes a per-seed lottery.
    bool zero_output_init = true;
    /// Train on targets divided by their standard deviation, then scale the
    /// output layer back so the returned network and the recorded metrics
    /// stay in original units. Keeps the resampling distance from being
    /// dominated by the output coordinate when the target amplitude dwarfs
    /// the input range. Requires the mse metric and an identity output
    /// activation. train_bla-level: train_epoch itself never rescales.
    bool standardize_target = false;
    std::uint64_t seed = 0;
    Metric metric = Metric::Mse;
    double cutoff = 0.5;
    /// Epochs without an entry run a single batch.
    std::map<int, int> batches_per_epoch = {{1, 10}, {2, 5}, {3, 3}, {4, 2}};
};

/// Candidate-set size for the given 1-based global batch index:
/// max(delta_start - (index - 1), delta_floor).
int delta_schedule(int global_batch_index, const BlaConfig& cfg);

/// Weight of the carried-over moments for this batch under cfg.r_policy.
std::uint64_t r_policy(int epoch, int batch_in_epoch, Eigen::Index n_batch,
                       const BlaConfig& cfg);

/// Scheduled batch count clamped to the dataset size.
int batches_for_epoch(int epoch, const BlaConfig& cfg, Eigen::Index n);

/// Equal (offset, length) slices of floor(n/count), remainder folded into
/// the last slice.
std::vector<std::pair<Eigen::Index, Eigen::Index>> batch_ranges(Eigen::Index n, int count);

/**
 * One pass over the training data: per-epoch shuffle, then per batch
 * propose particles by forward traces, resample a mixed particle per datum,
 * blend the per-layer moment sums into state, and re-solve every layer's
 * weights by Richardson iteration warm-started from the previous batch
 * (zero at the very first global batch).
 *
 * Mutates net and state in place. The returned record carries the epoch's
 * diagnostics; its metric field is left NaN for the caller to fill.
 *
 * Throws std::runtime_error with epoch/batch context when a moment solve
 * fails, std::domain_error when a target lies outside the output
 * activation's range.
 */
EpochRecord train_epoch(Network& net, const Dataset& data,
                        std::vector<MomentState>& state, int epoch,
                        const BlaConfig& cfg);

/// Full run for a one-hidden-layer network: init, epochs, per-epoch
/// validation metric. All randomness derives from cfg.seed.
std::pair<Network, TrainHistory> train_bla(const Dataset& train, const Dataset& val,
                                           const BlaConfig& cfg);

/// Two-hidden-layer variant: per datum two independent candidate draws, the
/// first supplying the (z1, h1) trace and the second (z2, h2); three moment
/// states instead of two. Otherwise the identical loop.
std::pair<Network, TrainHistory> train_bla_two_hidden(const Dataset& train,
                                                      const Dataset& val,
                                                      const BlaConfig& cfg);

} // namespace bla
