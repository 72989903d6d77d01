#include "bla/network.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace bla {

double Activation::apply(double z) const {
    switch (kind) {
    case Kind::Identity: return z;
    case Kind::Tanh: return std::tanh(z);
    case Kind::ReLU: return z > 0.0 ? z : 0.0;
    case Kind::LeakyReLU: return z > 0.0 ? z : slope * z;
    }
    throw std::logic_error("Activation::apply: bad kind");
}

double Activation::derivative(double z) const {
    switch (kind) {
    case Kind::Identity: return 1.0;
    case Kind::Tanh: {
        double t = std::tanh(z);
        return 1.0 - t * t;
    }
    case Kind::ReLU: return z > 0.0 ? 1.0 : 0.0;
    case Kind::LeakyReLU: return z > 0.0 ? 1.0 : slope;
    }
    throw std::logic_error("Activation::derivative: bad kind");
}

double Activation::inverse(double y) const {
    switch (kind) {
    case Kind::Identity: return y;
    case Kind::Tanh:
        if (y <= -1.0 || y >= 1.0) {
            throw std::domain_error("Activation::inverse: tanh range is (-1, 1)");
        }
        return std::atanh(y);
    default:
        throw std::logic_error("Activation::inverse: " + name() + " is not invertible");
    }
}

Vector Activation::apply(const Vector& z) const {
    Vector out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = apply(z[i]);
    return out;
}

std::string Activation::name() const {
    switch (kind) {
    case Kind::Identity: return "identity";
    case Kind::Tanh: return "tanh";
    case Kind::ReLU: return "relu";
    case Kind::LeakyReLU: return "leaky_relu";
    }
    return "?";
}

Activation Activation::parse(const std::string& name, double slope) {
    if (name == "identity") return identity();
    if (name == "tanh") return tanh();
    if (name == "relu") return relu();
    if (name == "leaky_relu") return leaky_relu(slope);
    throw std::invalid_argument("Activation::parse: unknown activation '" + name + "'");
}

Vector augment(const Vector& v) {
    Vector out(v.size() + 1);
    out[0] = -1.0;
    out.tail(v.size()) = v;
    return out;
}

static void check_shape(const std::vector<Eigen::Index>& dims,
                        const std::vector<Activation>& acts) {
    if (dims.size() < 2) {
        throw std::invalid_argument("init_network: need at least input and output dims");
    }
    if (acts.size() != dims.size() - 1) {
        throw std::invalid_argument("init_network: need one activation per layer");
    }
    for (auto d : dims) {
        if (d <= 0) throw std::invalid_argument("init_network: dims must be positive");
    }
}

Network random_network(const std::vector<Eigen::Index>& dims,
                       const std::vector<Activation>& acts,
                       const std::vector<double>& means,
                       const std::vector<double>& variances, Rng& rng) {
    check_shape(dims, acts);
    if (means.size() != acts.size() || variances.size() != acts.size()) {
        throw std::invalid_argument("random_network: need one mean/variance per layer");
    }
    Network net;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        if (variances[l] <= 0.0) {
            throw std::invalid_argument("random_network: variance must be positive");
        }
        std::normal_distribution<double> dist(means[l], std::sqrt(variances[l]));
        Layer layer;
        layer.w = Matrix(dims[l + 1], dims[l] + 1);
        for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
                layer.w(r, c) = dist(rng);
            }
        }
        layer.act = acts[l];
        net.layers.push_back(std::move(layer));
    }
    return net;
}

Network init_network(const std::vector<Eigen::Index>& dims,
                     const std::vector<Activation>& acts,
                     double variance, Rng& rng) {
    if (variance <= 0.0) {
        throw std::invalid_argument("init_network: variance must be positive");
    }
    std::vector<double> means(acts.size(), 0.0);
    std::vector<double> variances(acts.size(), variance);
    return random_network(dims, acts, means, variances, rng);
}

Particle forward_trace(const Network& net, const Vector& x) {
    if (net.layers.empty()) throw std::invalid_argument("forward_trace: empty network");
    if (x.size() != net.input_dim()) {
        throw std::invalid_argument("forward_trace: input dim mismatch");
    }
    Particle p;
    p.x = x;
    Vector v = x;
    for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
        Vector z = net.layers[l].w * augment(v);
        Vector h = net.layers[l].act.apply(z);
        p.z.push_back(z);
        p.h.push_back(h);
        v = std::move(h);
    }
    const Layer& out = net.layers.back();
    Vector z = out.w * augment(v);
    if (z.size() != 1) throw std::invalid_argument("forward_trace: output dim must be 1");
    p.z_out = z[0];
    p.y = out.act.apply(z[0]);
    return p;
}

double forward(const Network& net, const Vector& x) {
    if (net.layers.empty()) throw std::invalid_argument("forward: empty network");
    Vector v = x;
    for (const auto& layer : net.layers) {
        v = layer.act.apply(layer.w * augment(v));
    }
    if (v.size() != 1) throw std::invalid_argument("forward: output dim must be 1");
    return v[0];
}

Network init_from_spec(const NetSpec& spec, Eigen::Index input_dim, Rng& rng) {
    if (spec.hidden.empty()) {
        throw std::invalid_argument("init_from_spec: need at least one hidden layer");
    }
    std::vector<Eigen::Index> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
    dims.push_back(1);
    std::vector<Activation> acts = spec.hidden_acts;
    if (acts.empty()) acts.assign(spec.hidden.size(), Activation::tanh());
    if (acts.size() != spec.hidden.size()) {
        throw std::invalid_argument("init_from_spec: need one activation per hidden layer");
    }
    acts.push_back(spec.out_act);
    return init_network(dims, acts, spec.init_variance, rng);
}

void Network::save_json(const std::string& path) const {
    nlohmann::json j;
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : layers) {
        nlohmann::json jl;
        jl["rows"] = layer.w.rows();
        jl["cols"] = layer.w.cols();
        std::vector<double> flat(layer.w.size());
        Eigen::Map<Matrix>(flat.data(), layer.w.rows(), layer.w.cols()) = layer.w;
        jl["w"] = flat;
        jl["activation"] = layer.act.name();
        if (layer.act.kind == Activation::Kind::LeakyReLU) jl["slope"] = layer.act.slope;
        j["layers"].push_back(std::move(jl));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_json: cannot open " + path);
    out << j.dump(2) << '\n';
}

Network Network::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_json: cannot open " + path);
    nlohmann::json j;
    in >> j;
    Network net;
    for (const auto& jl : j.at("layers")) {
        Layer layer;
        Eigen::Index rows = jl.at("rows").get<Eigen::Index>();
        Eigen::Index cols = jl.at("cols").get<Eigen::Index>();
        auto flat = jl.at("w").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(flat.size()) != rows * cols) {
            throw std::runtime_error("load_json: weight count mismatch in " + path);
        }
        layer.w = Eigen::Map<Matrix>(flat.data(), rows, cols);
        layer.act = Activation::parse(jl.at("activation").get<std::string>(),
                                      jl.value("slope", 0.01));
        net.layers.push_back(std::move(layer));
    }
    if (net.layers.empty()) throw std::runtime_error("load_json: no layers in " + path);
    return net;
}

} // namespace bla
