#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace hybrid_drive {

enum class Activation { Relu, Tanh, Identity };

std::string_view to_string(Activation act);
Activation parse_activation(std::string_view name);

struct DenseLayer
{
    Eigen::MatrixXd weights; ///< out x in
    Eigen::VectorXd bias;
    Activation activation = Activation::Identity;
};

/// Dense feed-forward network in 64-bit floats.
struct NetworkParams
{
    std::vector<DenseLayer> layers;

    std::size_t input_width() const { return layers.empty() ? 0 : layers.front().weights.cols(); }
    std::size_t output_width() const { return layers.empty() ? 0 : layers.back().weights.rows(); }
    std::size_t parameter_count() const;
};

struct LayerSpec
{
    std::size_t units = 0;
    Activation activation = Activation::Relu;
};

/// Hidden layers draw from U(-1/sqrt(fan_in), 1/sqrt(fan_in)); the output
/// layer from U(-output_scale, output_scale).
NetworkParams make_mlp(std::size_t input_width, std::span<const LayerSpec> layers,
                       std::mt19937_64& rng, double output_scale = 3e-3);

/// Activations cached by a forward pass: `activations[0]` is the input batch,
/// `activations[i + 1]` the output of layer i. Columns are samples.
struct ForwardTape
{
    std::vector<Eigen::MatrixXd> activations;

    const Eigen::MatrixXd& output() const { return activations.back(); }
};

/// Batched forward pass; throws std::invalid_argument on a width mismatch.
ForwardTape mlp_forward(const NetworkParams& params, const Eigen::MatrixXd& inputs);

Eigen::VectorXd mlp_predict(const NetworkParams& params, const Eigen::VectorXd& input);

struct LayerGradient
{
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias;
};

/// Gradients of sum over samples of (upstream . output). `input_grad` keeps
/// one column per sample.
struct Gradients
{
    std::vector<LayerGradient> layers;
    Eigen::MatrixXd input_grad;

    static Gradients zeros_like(const NetworkParams& params);
    Gradients& operator*=(double scale);
    bool all_finite() const;
};

/// Reverse-mode pass. The relu derivative at exactly zero is taken as 0.
Gradients mlp_backward(const NetworkParams& params, const ForwardTape& tape,
                       const Eigen::MatrixXd& upstream);

struct AdamConfig
{
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState
{
    std::vector<LayerGradient> first_moment;
    std::vector<LayerGradient> second_moment;
    std::uint64_t step = 0;

    static AdamState zeros_like(const NetworkParams& params);
};

/// One bias-corrected Adam descent step, in place. Throws
/// std::domain_error when any gradient is non-finite (params untouched).
void adam_step(NetworkParams& params, const Gradients& grads, double lr, AdamState& state,
               const AdamConfig& cfg = {});

struct GradientCheck
{
    double max_relative_error = 0.0;
    std::size_t checked = 0;
    /// Coordinates skipped because the perturbation moved a relu across its kink.
    std::size_t skipped_at_kink = 0;
};

/// Relative error |a - n| / max(|a|, |n|, 1e-6).
double relative_error(double analytic, double numeric);

/// Compares mlp_backward against central differences of (upstream . output)
/// on every weight, bias and input coordinate.
GradientCheck finite_diff_check(const NetworkParams& params, const Eigen::VectorXd& input,
                                double h, const Eigen::VectorXd& upstream);

/// `mlpv1` text format; values written with 17 significant digits.
void save_mlp(std::ostream& out, const NetworkParams& params);
NetworkParams load_mlp(std::istream& in);
void save_mlp(const std::filesystem::path& path, const NetworkParams& params);
NetworkParams load_mlp(const std::filesystem::path& path);

} // namespace hybrid_drive
