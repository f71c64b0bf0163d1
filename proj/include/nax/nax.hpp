#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nax/types.hpp"

namespace nax {

enum class Activation { Softmax, Sigmoid };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Hyper-parameters of one training run. batch_size == 0 means the whole
/// series forms a single batch.
struct NaxConfig {
    int hidden_neurons = 3;
    Activation activation = Activation::Softmax;
    double learning_rate = 0.003;
    int batch_size = 50;
    double l2 = 1e-4;
    int train_window_years = 3;
    int epochs = 500;
    int patience = 50;  // early-stop patience on validation NLL, 0 disables
    std::uint64_t seed = 0;
};

/// Weights of the one-hidden-layer recurrent density network.
/// Two outputs (mu, sigma) feed back as next-step inputs.
struct NaxParams {
    Matrix w;   // N x I, exogenous input weights
    Vector w0;  // N, hidden bias
    Matrix f;   // N x 2, feedback weights
    Matrix l;   // 2 x N, output weights
    Vector l0;  // 2, output bias

    int hidden() const { return static_cast<int>(w.rows()); }
    int inputs() const { return static_cast<int>(w.cols()); }

    /// Symmetric uniform init in +-sqrt(6/(fan_in+fan_out)), zero biases.
    static NaxParams init(int hidden, int inputs, std::uint64_t seed);
    static NaxParams zeros(int hidden, int inputs);

    bool all_finite() const;
    std::string to_json() const;
    static NaxParams from_json(const std::string& json);
};

/// Gradients mirror the parameter shapes.
using NaxGrads = NaxParams;

inline constexpr double kSigmaFloor = 1e-6;

/// softplus with a floor; keeps the likelihood defined for any raw output.
inline double sigma_link(double raw) {
    double sp = raw > 0 ? raw + std::log1p(std::exp(-raw)) : std::log1p(std::exp(raw));
    return sp + kSigmaFloor;
}
inline double sigma_link_derivative(double raw) {
    return 1.0 / (1.0 + std::exp(-raw));
}

/// Everything backward() needs from the recurrence.
struct ForwardPass {
    Matrix hidden;    // N x T activations
    Matrix raw;       // 2 x T pre-link outputs
    Vector mu;        // T
    Vector sigma;     // T, > 0
    Matrix feedback;  // 2 x (T+1); column 0 is P_0, column t+1 is P_t
};

/// Run the recurrence over inputs (rows = steps, cols = exogenous inputs).
/// Throws on a non-finite intermediate, reporting the step index.
ForwardPass forward(const NaxParams& params, Activation activation,
                    const Matrix& inputs, const Eigen::Vector2d& p0);

double gaussian_nll(double mu, double sigma, double r);

/// Mean NLL over the steps plus the L2 penalty on weight arrays (not biases).
double batch_loss(const ForwardPass& fp, const Vector& targets,
                  const NaxParams& params, double l2);

double l2_penalty(const NaxParams& params, double l2);

/// Exact gradients of batch_loss via backpropagation through time.
NaxGrads backward(const NaxParams& params, Activation activation,
                  const Matrix& inputs, const ForwardPass& fp,
                  const Vector& targets, double l2);

struct AdamState {
    NaxParams m;  // first moments
    NaxParams v;  // second moments
    long step = 0;

    static AdamState init(int hidden, int inputs);
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

void adam_step(NaxParams& params, const NaxGrads& grads, AdamState& state,
               double learning_rate);

struct TrainResult {
    NaxParams params;
    std::vector<double> loss_history;        // training loss per epoch
    std::vector<double> validation_history;  // validation NLL per epoch (if any)
    int best_epoch = -1;
    Eigen::Vector2d final_feedback{0, 0};  // P at the end of the training series
};

/// Mini-batch training: contiguous windows of batch_size days, window order
/// shuffled per epoch, recurrence state reset to P_0 = (0,0) at each window
/// start. Early stop on validation NLL when validation data is supplied.
/// Throws on divergence (non-finite loss), naming the epoch.
TrainResult train(const NaxConfig& config, const Matrix& inputs,
                  const Vector& targets,
                  const Matrix* validation_inputs = nullptr,
                  const Vector* validation_targets = nullptr);

}  // namespace nax
