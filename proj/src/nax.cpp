#include "nax/nax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "nax/rng.hpp"

namespace nax {

std::string to_string(Activation a) {
    return a == Activation::Softmax ? "softmax" : "sigmoid";
}

Activation activation_from_string(const std::string& s) {
    if (s == "softmax") return Activation::Softmax;
    if (s == "sigmoid") return Activation::Sigmoid;
    throw std::invalid_argument("unknown activation: " + s);
}

NaxParams NaxParams::zeros(int hidden, int inputs) {
    NaxParams p;
    p.w = Matrix::Zero(hidden, inputs);
    p.w0 = Vector::Zero(hidden);
    p.f = Matrix::Zero(hidden, 2);
    p.l = Matrix::Zero(2, hidden);
    p.l0 = Vector::Zero(2);
    return p;
}

NaxParams NaxParams::init(int hidden, int inputs, std::uint64_t seed) {
    auto rng = make_rng(seed, "nax-init");
    auto uniform_fill = [&rng](Matrix& m, int fan_in, int fan_out) {
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> u(-bound, bound);
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = u(rng);
    };
    NaxParams p = zeros(hidden, inputs);
    uniform_fill(p.w, inputs, hidden);
    uniform_fill(p.f, 2, hidden);
    uniform_fill(p.l, hidden, 2);
    return p;
}

bool NaxParams::all_finite() const {
    return w.allFinite() && w0.allFinite() && f.allFinite() && l.allFinite() &&
           l0.allFinite();
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto flat = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
        throw std::runtime_error("matrix json: shape/data mismatch");
    Matrix m(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[i++];
    return m;
}

}  // namespace

std::string NaxParams::to_json() const {
    nlohmann::json j;
    j["w"] = matrix_to_json(w);
    j["w0"] = matrix_to_json(w0);
    j["f"] = matrix_to_json(f);
    j["l"] = matrix_to_json(l);
    j["l0"] = matrix_to_json(l0);
    return j.dump(2);
}

NaxParams NaxParams::from_json(const std::string& json) {
    auto j = nlohmann::json::parse(json);
    NaxParams p;
    p.w = matrix_from_json(j.at("w"));
    p.w0 = matrix_from_json(j.at("w0"));
    p.f = matrix_from_json(j.at("f"));
    p.l = matrix_from_json(j.at("l"));
    p.l0 = matrix_from_json(j.at("l0"));
    return p;
}

namespace {

Vector activate(const Vector& z, Activation activation) {
    if (activation == Activation::Sigmoid)
        return z.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    // Softmax across the hidden neurons, max-shifted.
    const double zmax = z.maxCoeff();
    Vector e = (z.array() - zmax).exp();
    return e / e.sum();
}

/// Jacobian-vector product dL/dz given dL/dh.
Vector activation_backward(const Vector& h, const Vector& dh,
                           Activation activation) {
    if (activation == Activation::Sigmoid)
        return dh.array() * h.array() * (1.0 - h.array());
    const double dot = dh.dot(h);
    return h.array() * (dh.array() - dot);
}

}  // namespace

ForwardPass forward(const NaxParams& params, Activation activation,
                    const Matrix& inputs, const Eigen::Vector2d& p0) {
    const Eigen::Index T = inputs.rows();
    const int N = params.hidden();
    if (inputs.cols() != params.inputs())
        throw std::invalid_argument("forward: input dimension mismatch");

    ForwardPass fp;
    fp.hidden.resize(N, T);
    fp.raw.resize(2, T);
    fp.mu.resize(T);
    fp.sigma.resize(T);
    fp.feedback.resize(2, T + 1);
    fp.feedback.col(0) = p0;

    for (Eigen::Index t = 0; t < T; ++t) {
        Vector z = params.w * inputs.row(t).transpose() +
                   params.f * fp.feedback.col(t) + params.w0;
        Vector h = activate(z, activation);
        Eigen::Vector2d o = params.l * h + params.l0;
        if (!h.allFinite() || !o.allFinite())
            throw std::runtime_error("forward: non-finite value at step " +
                                     std::to_string(t));
        fp.hidden.col(t) = h;
        fp.raw.col(t) = o;
        fp.mu[t] = o[0];
        fp.sigma[t] = sigma_link(o[1]);
        fp.feedback.col(t + 1) = Eigen::Vector2d{fp.mu[t], fp.sigma[t]};
    }
    return fp;
}

double gaussian_nll(double mu, double sigma, double r) {
    if (!(sigma > 0)) throw std::domain_error("gaussian_nll: sigma must be positive");
    const double z = (r - mu) / sigma;
    return 0.5 * std::log(2.0 * M_PI * sigma * sigma) + 0.5 * z * z;
}

double l2_penalty(const NaxParams& params, double l2) {
    if (l2 == 0.0) return 0.0;
    return l2 * (params.w.squaredNorm() + params.f.squaredNorm() +
                 params.l.squaredNorm());
}

double batch_loss(const ForwardPass& fp, const Vector& targets,
                  const NaxParams& params, double l2) {
    const Eigen::Index T = fp.mu.size();
    if (targets.size() != T)
        throw std::invalid_argument("batch_loss: target length mismatch");
    double sum = 0;
    for (Eigen::Index t = 0; t < T; ++t)
        sum += gaussian_nll(fp.mu[t], fp.sigma[t], targets[t]);
    return sum / static_cast<double>(T) + l2_penalty(params, l2);
}

NaxGrads backward(const NaxParams& params, Activation activation,
                  const Matrix& inputs, const ForwardPass& fp,
                  const Vector& targets, double l2) {
    const Eigen::Index T = inputs.rows();
    const int N = params.hidden();
    if (fp.mu.size() != T || targets.size() != T)
        throw std::invalid_argument("backward: cache/target mismatch with inputs");

    NaxGrads g = NaxParams::zeros(N, params.inputs());
    const double invT = 1.0 / static_cast<double>(T);

    // carry = dL/dP_t flowing back from step t+1 through the feedback weights.
    Eigen::Vector2d carry{0, 0};

    for (Eigen::Index t = T - 1; t >= 0; --t) {
        const double mu = fp.mu[t];
        const double sigma = fp.sigma[t];
        const double d = targets[t] - mu;

        // Direct loss derivatives at step t plus the recurrent carry.
        const double dmu = -d / (sigma * sigma) * invT + carry[0];
        const double dsigma =
            (1.0 / sigma - d * d / (sigma * sigma * sigma)) * invT + carry[1];

        Eigen::Vector2d dout;
        dout[0] = dmu;
        dout[1] = dsigma * sigma_link_derivative(fp.raw(1, t));

        const Vector h = fp.hidden.col(t);
        g.l += dout * h.transpose();
        g.l0 += dout;

        Vector dh = params.l.transpose() * dout;
        Vector dz = activation_backward(h, dh, activation);

        g.w += dz * inputs.row(t);
        g.w0 += dz;
        g.f += dz * fp.feedback.col(t).transpose();

        carry = params.f.transpose() * dz;  // dL/dP_{t-1}
    }

    if (l2 != 0.0) {
        g.w += 2.0 * l2 * params.w;
        g.f += 2.0 * l2 * params.f;
        g.l += 2.0 * l2 * params.l;
    }
    return g;
}

AdamState AdamState::init(int hidden, int inputs) {
    AdamState s;
    s.m = NaxParams::zeros(hidden, inputs);
    s.v = NaxParams::zeros(hidden, inputs);
    s.step = 0;
    return s;
}

void adam_step(NaxParams& params, const NaxGrads& grads, AdamState& state,
               double learning_rate) {
    ++state.step;
    const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
    auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
        m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * g;
        v = (kAdamBeta2 * v.array() + (1.0 - kAdamBeta2) * g.array().square())
                .matrix();
        p.array() -=
            learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + kAdamEps);
    };
    update(params.w, grads.w, state.m.w, state.v.w);
    update(params.w0, grads.w0, state.m.w0, state.v.w0);
    update(params.f, grads.f, state.m.f, state.v.f);
    update(params.l, grads.l, state.m.l, state.v.l);
    update(params.l0, grads.l0, state.m.l0, state.v.l0);
}

TrainResult train(const NaxConfig& config, const Matrix& inputs,
                  const Vector& targets, const Matrix* validation_inputs,
                  const Vector* validation_targets) {
    const Eigen::Index T = inputs.rows();
    if (T == 0) throw std::invalid_argument("train: empty training window");
    if (targets.size() != T)
        throw std::invalid_argument("train: target length mismatch");
    if (config.batch_size == 1)
        throw std::invalid_argument("train: batch size must be >= 2 or full-series");

    const int B = config.batch_size > 0 ? config.batch_size
                                        : static_cast<int>(T);

    // Contiguous windows; state resets to P_0 at each window start.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> windows;  // (start, len)
    for (Eigen::Index s = 0; s < T; s += B)
        windows.emplace_back(s, std::min<Eigen::Index>(B, T - s));

    TrainResult result;
    result.params = NaxParams::init(config.hidden_neurons,
                                    static_cast<int>(inputs.cols()), config.seed);
    AdamState state = AdamState::init(config.hidden_neurons,
                                      static_cast<int>(inputs.cols()));
    auto shuffle_rng = make_rng(config.seed, "nax-batch-order");
    const Eigen::Vector2d p0{0, 0};

    NaxParams best_params = result.params;
    Eigen::Vector2d best_feedback{0, 0};
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;
    const bool use_validation =
        validation_inputs != nullptr && validation_targets != nullptr &&
        config.patience > 0;

    std::vector<std::size_t> order(windows.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t wi : order) {
            const auto [start, len] = windows[wi];
            const Matrix xb = inputs.middleRows(start, len);
            const Vector rb = targets.segment(start, len);
            ForwardPass fp = forward(result.params, config.activation, xb, p0);
            NaxGrads g = backward(result.params, config.activation, xb, fp, rb,
                                  config.l2);
            adam_step(result.params, g, state, config.learning_rate);
        }

        // Epoch-level loss over the full series (single recurrence pass).
        ForwardPass full = forward(result.params, config.activation, inputs, p0);
        const double loss = batch_loss(full, targets, result.params, config.l2);
        if (!std::isfinite(loss))
            throw std::runtime_error("train: diverged (non-finite loss) at epoch " +
                                     std::to_string(epoch));
        result.loss_history.push_back(loss);

        if (use_validation) {
            ForwardPass vp = forward(result.params, config.activation,
                                     *validation_inputs,
                                     full.feedback.col(T));
            const double vloss = batch_loss(vp, *validation_targets,
                                            result.params, 0.0);
            result.validation_history.push_back(vloss);
            if (vloss < best_val) {
                best_val = vloss;
                best_params = result.params;
                best_feedback = full.feedback.col(T);
                result.best_epoch = epoch;
                since_best = 0;
            } else if (++since_best >= config.patience) {
                break;
            }
        } else {
            result.best_epoch = epoch;
            best_params = result.params;
            best_feedback = full.feedback.col(T);
        }
    }

    result.params = best_params;
    result.final_feedback = best_feedback;
    return result;
}

}  // namespace nax
