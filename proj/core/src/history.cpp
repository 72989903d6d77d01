#include "bla/history.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bla {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
    return std::string(buf, ptr);
}

void write_history_csv(const TrainHistory& h, const std::string& path,
                       bool include_timing) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_history_csv: cannot open " + path);
    out << "epoch,metric,wall_ms";
    for (int k = 1; k <= h.solve_layers; ++k) out << ",inner_iters_layer" << k;
    for (int k = 1; k <= h.solve_layers; ++k) out << ",cond_A" << k;
    out << '\n';
    for (const auto& rec : h.records) {
        out << rec.epoch << ',' << format_double(rec.metric) << ','
            << format_double(include_timing ? rec.wall_ms : 0.0);
        for (int k = 0; k < h.solve_layers; ++k) {
            out << ',' << (k < static_cast<int>(rec.inner_iters.size()) ? rec.inner_iters[k] : 0);
        }
        for (int k = 0; k < h.solve_layers; ++k) {
            out << ',' << format_double(k < static_cast<int>(rec.cond.size()) ? rec.cond[k] : 0.0);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_history_csv: write failed for " + path);
}

std::vector<std::pair<int, double>> read_history_metric(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_history_metric: cannot open " + path);
    std::vector<std::pair<int, double>> rows;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("read_history_metric: empty file " + path);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string epoch_s, metric_s;
        if (!std::getline(ls, epoch_s, ',') || !std::getline(ls, metric_s, ',')) {
            throw std::runtime_error("read_history_metric: malformed row in " + path);
        }
        rows.emplace_back(std::stoi(epoch_s), std::stod(metric_s));
    }
    return rows;
}

} // namespace bla
