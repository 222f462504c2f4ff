#include "hybrid_drive/mlp.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace hybrid_drive {

namespace {

void apply_activation(Eigen::MatrixXd& z, Activation act)
{
    switch (act) {
    case Activation::Relu: z = z.cwiseMax(0.0); break;
    case Activation::Tanh: z = z.array().tanh().matrix(); break;
    case Activation::Identity: break;
    }
}

/// Derivative of the activation expressed through its output.
Eigen::MatrixXd activation_derivative(const Eigen::MatrixXd& out, Activation act)
{
    switch (act) {
    case Activation::Relu: return (out.array() > 0.0).cast<double>().matrix();
    case Activation::Tanh: return (1.0 - out.array().square()).matrix();
    case Activation::Identity: break;
    }
    return Eigen::MatrixXd::Ones(out.rows(), out.cols());
}

double evaluate(const NetworkParams& params, const Eigen::VectorXd& input,
                const Eigen::VectorXd& upstream)
{
    return upstream.dot(mlp_predict(params, input));
}

/// Sign pattern of every relu pre-activation, used to detect kink crossings.
std::vector<bool> relu_pattern(const NetworkParams& params, const Eigen::VectorXd& input)
{
    std::vector<bool> pattern;
    Eigen::VectorXd x = input;
    for (const auto& layer : params.layers) {
        Eigen::VectorXd z = layer.weights * x + layer.bias;
        if (layer.activation == Activation::Relu)
            for (Eigen::Index i = 0; i < z.size(); ++i) pattern.push_back(z[i] > 0.0);
        Eigen::MatrixXd zm = z;
        apply_activation(zm, layer.activation);
        x = zm.col(0);
    }
    return pattern;
}

void write_double(std::ostream& out, double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

} // namespace

std::string_view to_string(Activation act)
{
    switch (act) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
    }
    return "identity";
}

Activation parse_activation(std::string_view name)
{
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

std::size_t NetworkParams::parameter_count() const
{
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

NetworkParams make_mlp(std::size_t input_width, std::span<const LayerSpec> layers,
                       std::mt19937_64& rng, double output_scale)
{
    if (input_width == 0 || layers.empty())
        throw std::invalid_argument("network needs an input and at least one layer");
    NetworkParams params;
    std::size_t fan_in = input_width;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const bool is_output = i + 1 == layers.size();
        const double limit = is_output ? output_scale : 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-limit, limit);
        DenseLayer layer;
        layer.activation = layers[i].activation;
        const auto out = static_cast<Eigen::Index>(layers[i].units);
        const auto in = static_cast<Eigen::Index>(fan_in);
        layer.weights.resize(out, in);
        layer.bias.resize(out);
        // row-major draw order keeps the stream independent of Eigen's storage order
        for (Eigen::Index r = 0; r < out; ++r)
            for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = dist(rng);
        for (Eigen::Index r = 0; r < out; ++r) layer.bias[r] = dist(rng);
        params.layers.push_back(std::move(layer));
        fan_in = layers[i].units;
    }
    return params;
}

ForwardTape mlp_forward(const NetworkParams& params, const Eigen::MatrixXd& inputs)
{
    if (params.layers.empty()) throw std::invalid_argument("empty network");
    if (static_cast<std::size_t>(inputs.rows()) != params.input_width())
        throw std::invalid_argument("input width " + std::to_string(inputs.rows())
                                    + " does not match network input "
                                    + std::to_string(params.input_width()));
    ForwardTape tape;
    tape.activations.reserve(params.layers.size() + 1);
    tape.activations.push_back(inputs);
    for (const auto& layer : params.layers) {
        Eigen::MatrixXd z = layer.weights * tape.activations.back();
        z.colwise() += layer.bias;
        apply_activation(z, layer.activation);
        tape.activations.push_back(std::move(z));
    }
    return tape;
}

Eigen::VectorXd mlp_predict(const NetworkParams& params, const Eigen::VectorXd& input)
{
    return mlp_forward(params, input).output().col(0);
}

Gradients Gradients::zeros_like(const NetworkParams& params)
{
    Gradients g;
    for (const auto& l : params.layers)
        g.layers.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                            Eigen::VectorXd::Zero(l.bias.size())});
    g.input_grad = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(params.input_width()), 1);
    return g;
}

Gradients& Gradients::operator*=(double scale)
{
    for (auto& l : layers) {
        l.weights *= scale;
        l.bias *= scale;
    }
    input_grad *= scale;
    return *this;
}

bool Gradients::all_finite() const
{
    for (const auto& l : layers)
        if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
    return true;
}

Gradients mlp_backward(const NetworkParams& params, const ForwardTape& tape,
                       const Eigen::MatrixXd& upstream)
{
    if (tape.activations.size() != params.layers.size() + 1)
        throw std::invalid_argument("tape does not match network depth");
    const Eigen::MatrixXd& out = tape.output();
    if (upstream.rows() != out.rows() || upstream.cols() != out.cols())
        throw std::invalid_argument("upstream shape does not match network output");

    Gradients grads;
    grads.layers.resize(params.layers.size());
    Eigen::MatrixXd delta = upstream;
    for (std::size_t i = params.layers.size(); i-- > 0;) {
        const DenseLayer& layer = params.layers[i];
        delta.array() *= activation_derivative(tape.activations[i + 1], layer.activation).array();
        grads.layers[i].weights = delta * tape.activations[i].transpose();
        grads.layers[i].bias = delta.rowwise().sum();
        delta = layer.weights.transpose() * delta;
    }
    grads.input_grad = std::move(delta);
    return grads;
}

AdamState AdamState::zeros_like(const NetworkParams& params)
{
    AdamState s;
    const Gradients z = Gradients::zeros_like(params);
    s.first_moment = z.layers;
    s.second_moment = z.layers;
    return s;
}

void adam_step(NetworkParams& params, const Gradients& grads, double lr, AdamState& state,
               const AdamConfig& cfg)
{
    if (grads.layers.size() != params.layers.size())
        throw std::invalid_argument("gradient shape does not match network");
    if (!grads.all_finite()) throw std::domain_error("non-finite gradient in adam_step");
    if (state.first_moment.empty()) state = AdamState::zeros_like(params);

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correct1 = 1.0 - std::pow(cfg.beta1, t);
    const double correct2 = 1.0 - std::pow(cfg.beta2, t);

    const auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
        param.array() -= lr * (m.array() / correct1)
                         / ((v.array() / correct2).sqrt() + cfg.epsilon);
    };
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        auto& layer = params.layers[i];
        const auto& g = grads.layers[i];
        if (g.weights.rows() != layer.weights.rows() || g.weights.cols() != layer.weights.cols()
            || g.bias.size() != layer.bias.size())
            throw std::invalid_argument("gradient shape does not match layer "
                                        + std::to_string(i));
        update(layer.weights, g.weights, state.first_moment[i].weights,
               state.second_moment[i].weights);
        update(layer.bias, g.bias, state.first_moment[i].bias, state.second_moment[i].bias);
    }
}

double relative_error(double analytic, double numeric)
{
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    return std::abs(analytic - numeric) / scale;
}

GradientCheck finite_diff_check(const NetworkParams& params, const Eigen::VectorXd& input,
                                double h, const Eigen::VectorXd& upstream)
{
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    const ForwardTape tape = mlp_forward(params, input);
    const Gradients analytic = mlp_backward(params, tape, upstream);
    const std::vector<bool> base_pattern = relu_pattern(params, input);

    GradientCheck result;
    NetworkParams probe = params;
    const auto check = [&](double& coord, double analytic_value, const Eigen::VectorXd& x) {
        const double saved = coord;
        coord = saved + h;
        const double plus = evaluate(probe, x, upstream);
        const bool kink_plus = relu_pattern(probe, x) != base_pattern;
        coord = saved - h;
        const double minus = evaluate(probe, x, upstream);
        const bool kink_minus = relu_pattern(probe, x) != base_pattern;
        coord = saved;
        if (kink_plus || kink_minus) {
            ++result.skipped_at_kink;
            return;
        }
        const double numeric = (plus - minus) / (2.0 * h);
        result.max_relative_error =
            std::max(result.max_relative_error, relative_error(analytic_value, numeric));
        ++result.checked;
    };

    for (std::size_t i = 0; i < probe.layers.size(); ++i) {
        auto& layer = probe.layers[i];
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
                check(layer.weights(r, c), analytic.layers[i].weights(r, c), input);
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r)
            check(layer.bias[r], analytic.layers[i].bias[r], input);
    }
    Eigen::VectorXd x = input;
    for (Eigen::Index k = 0; k < x.size(); ++k) check(x[k], analytic.input_grad(k, 0), x);
    return result;
}

void save_mlp(std::ostream& out, const NetworkParams& params)
{
    out << "mlpv1 " << params.layers.size() << '\n';
    for (const auto& layer : params.layers) {
        out << layer.weights.rows() << ' ' << layer.weights.cols() << ' '
            << to_string(layer.activation) << '\n';
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
                if (c) out << ' ';
                write_double(out, layer.weights(r, c));
            }
            out << '\n';
        }
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
            if (r) out << ' ';
            write_double(out, layer.bias[r]);
        }
        out << '\n';
    }
}

NetworkParams load_mlp(std::istream& in)
{
    std::string magic;
    std::size_t count = 0;
    if (!(in >> magic >> count) || magic != "mlpv1")
        throw std::invalid_argument("not an mlpv1 weight file");
    NetworkParams params;
    std::size_t prev_out = 0;
    for (std::size_t i = 0; i < count; ++i) {
        Eigen::Index rows = 0;
        Eigen::Index cols = 0;
        std::string act;
        if (!(in >> rows >> cols >> act) || rows <= 0 || cols <= 0)
            throw std::invalid_argument("bad layer header in weight file");
        if (i > 0 && static_cast<std::size_t>(cols) != prev_out)
            throw std::invalid_argument("layer dimensions do not chain");
        DenseLayer layer;
        layer.activation = parse_activation(act);
        layer.weights.resize(rows, cols);
        layer.bias.resize(rows);
        std::string token;
        const auto read_value = [&]() {
            if (!(in >> token)) throw std::invalid_argument("truncated weight file");
            double v = 0.0;
            const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (ec != std::errc{} || end != token.data() + token.size() || !std::isfinite(v))
                throw std::invalid_argument("bad weight value '" + token + "'");
            return v;
        };
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) layer.weights(r, c) = read_value();
        for (Eigen::Index r = 0; r < rows; ++r) layer.bias[r] = read_value();
        prev_out = static_cast<std::size_t>(rows);
        params.layers.push_back(std::move(layer));
    }
    return params;
}

void save_mlp(const std::filesystem::path& path, const NetworkParams& params)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    save_mlp(out, params);
}

NetworkParams load_mlp(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open weight file " + path.string());
    return load_mlp(in);
}

} // namespace hybrid_drive
