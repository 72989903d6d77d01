#pragma once

#include <string>
#include <vector>

namespace bla {

struct EpochRecord {
    int epoch = 0;
    double metric = 0.0;  // validation MSE or accuracy
    double wall_ms = 0.0;
    std::vector<int> inner_iters; // richardson iterations per solved layer
    std::vector<double> cond;     // condition estimate per moment matrix
};

struct TrainHistory {
    std::vector<EpochRecord> records;
    int solve_layers = 2; // layer column count in the CSV
};

/// Shortest round-trip decimal representation, locale independent.
std::string format_double(double v);

/**
 * Columns: epoch, metric, wall_ms, inner_iters_layer<k>, cond_A<k> for
 * k = 1..solve_layers. Baseline trainers fill the layer columns with zeros.
 * With include_timing false the wall_ms column is written as 0 so reruns of
 * the same configuration produce byte-identical files.
 */
void write_history_csv(const TrainHistory& h, const std::string& path,
                       bool include_timing = false);

/// Reads back (epoch, metric) pairs from a history CSV.
std::vector<std::pair<int, double>> read_history_metric(const std::string& path);

} // namespace bla
