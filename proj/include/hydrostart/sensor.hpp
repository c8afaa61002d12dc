#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <vector>

#include "hydrostart/envelope.hpp"
#include "hydrostart/errors.hpp"
#include "hydrostart/rng.hpp"

namespace hydrostart {

/// Training hyperparameters for one virtual-sensor ensemble.
struct TrainConfig {
    int epochs = 3;
    double learning_rate = 1e-3;
    int batch_size = 32;
    double beta = 0.5;  // beta-NLL exponent
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double sigma_min = 1e-4;  // floor on predicted sigma, normalized strain units
    double bn_momentum = 0.1;
    double bn_eps = 1e-5;
    uint64_t seed = 0;
};

inline void validate(const TrainConfig& c) {
    if (c.epochs < 1) throw ValidationError("train config: epochs must be >= 1");
    if (c.beta < 0.0 || c.beta > 1.0) throw ValidationError("train config: beta must be in [0,1]");
    if (!(c.learning_rate > 0.0) || c.batch_size < 2)
        throw ValidationError("train config: bad learning rate or batch size");
}

inline uint64_t config_hash(const TrainConfig& c) {
    // FNV-1a over the fields that affect training
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    auto mixd = [&](double v) {
        uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        mix(bits);
    };
    mix(static_cast<uint64_t>(c.epochs));
    mixd(c.learning_rate);
    mix(static_cast<uint64_t>(c.batch_size));
    mixd(c.beta);
    mixd(c.adam_beta1);
    mixd(c.adam_beta2);
    mixd(c.adam_eps);
    mixd(c.sigma_min);
    mixd(c.bn_momentum);
    mixd(c.bn_eps);
    mix(c.seed);
    return h;
}

/// Shared dataset statistics: inputs standardized on the way in, targets
/// standardized for training and de-standardized on the way out. Computed
/// once per dataset and frozen, so the model is invariant to affine
/// rescaling of the raw channels.
struct Normalization {
    std::array<double, 2> in_mean{0.0, 0.0};
    std::array<double, 2> in_std{1.0, 1.0};
    std::array<double, 2> t_mean{0.0, 0.0};  // targets: [upper, lower]
    std::array<double, 2> t_std{1.0, 1.0};
};

/// Per-member prediction in raw strain units.
struct HeadOutput {
    double mu_u, sigma_u, mu_l, sigma_l;
};

/// Ensemble prediction: means of the member outputs, means of the member
/// (mu + sigma) sums, and the sampled standard deviation of those sums
/// across members as the epistemic spread.
struct EnvelopePrediction {
    double mu_u, sigma_u, mu_l, sigma_l;
    double sum_u, sum_l;
    double sigma_ep_u, sigma_ep_l;
};

namespace nn {

constexpr int kIn = 2, kHidden = 32, kOut = 4;

// flat parameter layout
constexpr int kW1 = 0;
constexpr int kB1 = kW1 + kHidden * kIn;
constexpr int kG1 = kB1 + kHidden;
constexpr int kBe1 = kG1 + kHidden;
constexpr int kW2 = kBe1 + kHidden;
constexpr int kB2 = kW2 + kHidden * kHidden;
constexpr int kG2 = kB2 + kHidden;
constexpr int kBe2 = kG2 + kHidden;
constexpr int kW3 = kBe2 + kHidden;
constexpr int kB3 = kW3 + kOut * kHidden;
constexpr int kParamCount = kB3 + kOut;

inline double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace nn

/// Feed-forward regressor 2 -> 32 -> 32 -> 4 with batch normalization on the
/// hidden layers and rectifier nonlinearities. Outputs parameterize normal
/// envelope distributions: (mu_u, raw sigma_u, mu_l, raw sigma_l); raw sigma
/// channels go through softplus plus a positive floor.
class SensorNet {
public:
    std::vector<double> params;
    std::array<std::vector<double>, 2> run_mean;
    std::array<std::vector<double>, 2> run_var;
    bool stats_ready = false;
    Normalization norm;
    double sigma_min = 1e-4;
    double bn_eps = 1e-5;
    uint64_t seed = 0;

    SensorNet() {
        params.assign(nn::kParamCount, 0.0);
        for (auto& v : run_mean) v.assign(nn::kHidden, 0.0);
        for (auto& v : run_var) v.assign(nn::kHidden, 1.0);
    }

    void init_weights(Rng& rng) {
        using namespace nn;
        auto he = [&rng](double* w, int fan_in, int count) {
            const double s = std::sqrt(2.0 / fan_in);
            for (int i = 0; i < count; ++i) w[i] = s * rng.normal();
        };
        std::fill(params.begin(), params.end(), 0.0);
        he(&params[kW1], kIn, kHidden * kIn);
        he(&params[kW2], kHidden, kHidden * kHidden);
        he(&params[kW3], kHidden, kOut * kHidden);
        std::fill_n(&params[kG1], kHidden, 1.0);
        std::fill_n(&params[kG2], kHidden, 1.0);
        stats_ready = false;
    }

    // sigma floor in standardized target space
    double floor_std(int head) const { return sigma_min / norm.t_std[head]; }

    struct Cache {
        int b = 0;
        std::vector<double> x;            // b x 2 standardized inputs
        std::vector<double> z1, xh1, y1, a1;  // b x 32
        std::vector<double> z2, xh2, y2, a2;  // b x 32
        std::vector<double> z3;           // b x 4
        std::array<std::vector<double>, 2> mean, var;  // batch stats in train mode
    };

    /// Trunk forward over a batch of standardized inputs. In train mode the
    /// hidden layers normalize with batch statistics and update the running
    /// ones; in infer mode the frozen running statistics are used.
    void trunk(const std::vector<double>& x_std, int b, bool train, double bn_momentum,
               Cache& c) {
        using namespace nn;
        if (!train && !stats_ready)
            throw UntrainedNet("sensor net queried before any training batch");
        c.b = b;
        c.x = x_std;
        linear(x_std, b, kIn, kHidden, &params[kW1], &params[kB1], c.z1);
        batchnorm(0, c.z1, b, train, bn_momentum, c.mean[0], c.var[0], c.xh1, c.y1);
        relu(c.y1, c.a1);
        linear(c.a1, b, kHidden, kHidden, &params[kW2], &params[kB2], c.z2);
        batchnorm(1, c.z2, b, train, bn_momentum, c.mean[1], c.var[1], c.xh2, c.y2);
        relu(c.y2, c.a2);
        linear(c.a2, b, kHidden, kOut, &params[kW3], &params[kB3], c.z3);
    }

    /// Heads in standardized target space.
    HeadOutput heads_std(const double* z3_row) const {
        return {z3_row[0], floor_std(0) + nn::softplus(z3_row[1]), z3_row[2],
                floor_std(1) + nn::softplus(z3_row[3])};
    }

    /// Single-point inference in raw units.
    HeadOutput infer(double omega, double o) const {
        if (!std::isfinite(omega) || !std::isfinite(o))
            throw ValidationError("sensor: non-finite input");
        Cache c;
        std::vector<double> x{(omega - norm.in_mean[0]) / norm.in_std[0],
                              (o - norm.in_mean[1]) / norm.in_std[1]};
        const_cast<SensorNet*>(this)->trunk(x, 1, false, 0.0, c);
        const auto h = heads_std(c.z3.data());
        return {h.mu_u * norm.t_std[0] + norm.t_mean[0], h.sigma_u * norm.t_std[0],
                h.mu_l * norm.t_std[1] + norm.t_mean[1], h.sigma_l * norm.t_std[1]};
    }

private:
    static void linear(const std::vector<double>& x, int b, int in, int out, const double* w,
                       const double* bias, std::vector<double>& z) {
        z.assign(static_cast<size_t>(b) * out, 0.0);
        for (int s = 0; s < b; ++s) {
            const double* xs = &x[static_cast<size_t>(s) * in];
            double* zs = &z[static_cast<size_t>(s) * out];
            for (int u = 0; u < out; ++u) {
                double acc = bias[u];
                const double* wu = &w[static_cast<size_t>(u) * in];
                for (int i = 0; i < in; ++i) acc += wu[i] * xs[i];
                zs[u] = acc;
            }
        }
    }

    void batchnorm(int layer, const std::vector<double>& z, int b, bool train, double momentum,
                   std::vector<double>& mean, std::vector<double>& var, std::vector<double>& xhat,
                   std::vector<double>& y) {
        using namespace nn;
        const double* g = &params[layer == 0 ? kG1 : kG2];
        const double* be = &params[layer == 0 ? kBe1 : kBe2];
        xhat.assign(z.size(), 0.0);
        y.assign(z.size(), 0.0);
        if (train) {
            mean.assign(kHidden, 0.0);
            var.assign(kHidden, 0.0);
            for (int s = 0; s < b; ++s)
                for (int u = 0; u < kHidden; ++u) mean[u] += z[static_cast<size_t>(s) * kHidden + u];
            for (int u = 0; u < kHidden; ++u) mean[u] /= b;
            for (int s = 0; s < b; ++s)
                for (int u = 0; u < kHidden; ++u) {
                    const double d = z[static_cast<size_t>(s) * kHidden + u] - mean[u];
                    var[u] += d * d;
                }
            for (int u = 0; u < kHidden; ++u) var[u] /= b;
            for (int u = 0; u < kHidden; ++u) {
                run_mean[layer][u] = (1.0 - momentum) * run_mean[layer][u] + momentum * mean[u];
                run_var[layer][u] = (1.0 - momentum) * run_var[layer][u] + momentum * var[u];
            }
            stats_ready = true;
        } else {
            mean = run_mean[layer];
            var = run_var[layer];
        }
        for (int s = 0; s < b; ++s)
            for (int u = 0; u < kHidden; ++u) {
                const size_t idx = static_cast<size_t>(s) * kHidden + u;
                xhat[idx] = (z[idx] - mean[u]) / std::sqrt(var[u] + bn_eps);
                y[idx] = g[u] * xhat[idx] + be[u];
            }
    }

    static void relu(const std::vector<double>& y, std::vector<double>& a) {
        a.resize(y.size());
        for (size_t i = 0; i < y.size(); ++i) a[i] = y[i] > 0.0 ? y[i] : 0.0;
    }
};

/// beta-NLL term for one head and one sample: sigma^(2 beta), taken as a
/// constant, times the Gaussian negative log-likelihood (up to the constant
/// half-log-2-pi). The optional weight override is how the stop-gradient is
/// realized: training recomputes it from the current sigma but never
/// differentiates through it.
inline double beta_nll_term(double mu, double sigma, double target, double beta,
                            std::optional<double> weight = std::nullopt) {
    if (!(sigma > 0.0)) throw NonPositiveSigma("beta_nll: sigma must be positive");
    const double w = weight ? *weight : std::pow(sigma, 2.0 * beta);
    const double r = target - mu;
    return w * (r * r / (2.0 * sigma * sigma) + std::log(sigma));
}

/// Batch loss: mean over samples of the sum of the u and l head terms.
inline double beta_nll_loss(const std::vector<HeadOutput>& pred,
                            const std::vector<std::array<double, 2>>& targets, double beta) {
    if (pred.empty() || pred.size() != targets.size())
        throw ValidationError("beta_nll_loss: batch size mismatch");
    double loss = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        loss += beta_nll_term(pred[i].mu_u, pred[i].sigma_u, targets[i][0], beta);
        loss += beta_nll_term(pred[i].mu_l, pred[i].sigma_l, targets[i][1], beta);
    }
    return loss / static_cast<double>(pred.size());
}

namespace nn {

/// Forward + backward of the beta-NLL objective over one batch, in
/// standardized target space. Returns the loss; writes d(loss)/d(params)
/// into grad (dense, same layout as params). When fixed_weights is given the
/// sigma^(2 beta) factors are taken from it instead of being recomputed; the
/// gradient path is identical either way, which is what makes the factor a
/// stop-gradient.
inline double loss_and_grad(SensorNet& net, SensorNet::Cache& c,
                            const std::vector<std::array<double, 2>>& targets_std, double beta,
                            const std::vector<std::array<double, 2>>* fixed_weights,
                            std::vector<double>& grad) {
    const int b = c.b;
    grad.assign(kParamCount, 0.0);
    std::vector<double> dz3(static_cast<size_t>(b) * kOut, 0.0);

    double loss = 0.0;
    for (int s = 0; s < b; ++s) {
        const double* z3 = &c.z3[static_cast<size_t>(s) * kOut];
        const auto h = net.heads_std(z3);
        const double heads_mu[2] = {h.mu_u, h.mu_l};
        const double heads_sigma[2] = {h.sigma_u, h.sigma_l};
        for (int head = 0; head < 2; ++head) {
            const double mu = heads_mu[head], sigma = heads_sigma[head];
            const double t = targets_std[s][head];
            const double w = fixed_weights ? (*fixed_weights)[s][head]
                                           : std::pow(sigma, 2.0 * beta);
            const double r = t - mu;
            loss += w * (r * r / (2.0 * sigma * sigma) + std::log(sigma));
            const double dmu = w * (-r / (sigma * sigma)) / b;
            const double dsigma = w * (1.0 / sigma - r * r / (sigma * sigma * sigma)) / b;
            dz3[static_cast<size_t>(s) * kOut + 2 * head] = dmu;
            dz3[static_cast<size_t>(s) * kOut + 2 * head + 1] =
                dsigma * sigmoid(z3[2 * head + 1]);
        }
    }
    loss /= b;

    // ---- backward through the trunk ----
    auto linear_bwd = [b](const std::vector<double>& dz, const std::vector<double>& x, int in,
                          int out, const double* w, double* dw, double* db,
                          std::vector<double>* dx) {
        for (int s = 0; s < b; ++s) {
            const double* dzs = &dz[static_cast<size_t>(s) * out];
            const double* xs = &x[static_cast<size_t>(s) * in];
            for (int u = 0; u < out; ++u) {
                db[u] += dzs[u];
                double* dwu = &dw[static_cast<size_t>(u) * in];
                for (int i = 0; i < in; ++i) dwu[i] += dzs[u] * xs[i];
            }
        }
        if (dx) {
            dx->assign(static_cast<size_t>(b) * in, 0.0);
            for (int s = 0; s < b; ++s) {
                const double* dzs = &dz[static_cast<size_t>(s) * out];
                double* dxs = &(*dx)[static_cast<size_t>(s) * in];
                for (int u = 0; u < out; ++u) {
                    const double* wu = &w[static_cast<size_t>(u) * in];
                    for (int i = 0; i < in; ++i) dxs[i] += dzs[u] * wu[i];
                }
            }
        }
    };

    auto bn_bwd = [&](const std::vector<double>& dy, const std::vector<double>& z,
                      const std::vector<double>& xhat, const std::vector<double>& mean,
                      const std::vector<double>& var, const double* g, double* dg, double* dbe,
                      std::vector<double>& dz) {
        dz.assign(z.size(), 0.0);
        for (int u = 0; u < kHidden; ++u) {
            const double istd = 1.0 / std::sqrt(var[u] + net.bn_eps);
            double sum_dxhat = 0.0, sum_dxhat_zc = 0.0;
            for (int s = 0; s < b; ++s) {
                const size_t idx = static_cast<size_t>(s) * kHidden + u;
                dg[u] += dy[idx] * xhat[idx];
                dbe[u] += dy[idx];
                const double dxhat = dy[idx] * g[u];
                sum_dxhat += dxhat;
                sum_dxhat_zc += dxhat * (z[idx] - mean[u]);
            }
            const double dvar = sum_dxhat_zc * (-0.5) * istd * istd * istd;
            const double dmean = -sum_dxhat * istd;
            for (int s = 0; s < b; ++s) {
                const size_t idx = static_cast<size_t>(s) * kHidden + u;
                const double dxhat = dy[idx] * g[u];
                dz[idx] = dxhat * istd + dvar * 2.0 * (z[idx] - mean[u]) / b + dmean / b;
            }
        }
    };

    auto relu_bwd = [](const std::vector<double>& da, const std::vector<double>& y,
                       std::vector<double>& dy) {
        dy.resize(da.size());
        for (size_t i = 0; i < da.size(); ++i) dy[i] = y[i] > 0.0 ? da[i] : 0.0;
    };

    std::vector<double> da2, dy2, dz2, da1, dy1, dz1;
    linear_bwd(dz3, c.a2, kHidden, kOut, &net.params[kW3], &grad[kW3], &grad[kB3], &da2);
    relu_bwd(da2, c.y2, dy2);
    bn_bwd(dy2, c.z2, c.xh2, c.mean[1], c.var[1], &net.params[kG2], &grad[kG2], &grad[kBe2], dz2);
    linear_bwd(dz2, c.a1, kHidden, kHidden, &net.params[kW2], &grad[kW2], &grad[kB2], &da1);
    relu_bwd(da1, c.y1, dy1);
    bn_bwd(dy1, c.z1, c.xh1, c.mean[0], c.var[0], &net.params[kG1], &grad[kG1], &grad[kBe1], dz1);
    linear_bwd(dz1, c.x, kIn, kHidden, &net.params[kW1], &grad[kW1], &grad[kB1], nullptr);
    return loss;
}

struct AdamState {
    std::vector<double> m, v;
    long t = 0;
    AdamState() : m(kParamCount, 0.0), v(kParamCount, 0.0) {}

    void step(std::vector<double>& params, const std::vector<double>& grad,
              const TrainConfig& cfg) {
        ++t;
        const double bc1 = 1.0 - std::pow(cfg.adam_beta1, t);
        const double bc2 = 1.0 - std::pow(cfg.adam_beta2, t);
        for (int i = 0; i < kParamCount; ++i) {
            m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * grad[i];
            v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
            params[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.adam_eps);
        }
    }
};

}  // namespace nn

/// Flat training rows extracted from a dataset of enveloped trajectories.
struct SensorRows {
    std::vector<std::array<double, 2>> inputs;   // (omega, o)
    std::vector<std::array<double, 2>> targets;  // (s_u, s_l)
};

inline SensorRows flatten_dataset(const std::vector<EnvelopedTrajectory>& dataset) {
    SensorRows rows;
    for (const auto& traj : dataset)
        for (const auto& s : traj.samples) {
            rows.inputs.push_back({s.omega, s.o});
            rows.targets.push_back({s.s_u, s.s_l});
        }
    return rows;
}

inline Normalization compute_normalization(const SensorRows& rows) {
    Normalization n;
    const double count = static_cast<double>(rows.inputs.size());
    for (int c = 0; c < 2; ++c) {
        double m = 0.0, t = 0.0;
        for (const auto& r : rows.inputs) m += r[c];
        for (const auto& r : rows.targets) t += r[c];
        n.in_mean[c] = m / count;
        n.t_mean[c] = t / count;
        double vm = 0.0, vt = 0.0;
        for (const auto& r : rows.inputs) vm += (r[c] - n.in_mean[c]) * (r[c] - n.in_mean[c]);
        for (const auto& r : rows.targets) vt += (r[c] - n.t_mean[c]) * (r[c] - n.t_mean[c]);
        n.in_std[c] = std::sqrt(vm / count);
        n.t_std[c] = std::sqrt(vt / count);
        if (!(n.in_std[c] > 1e-12)) n.in_std[c] = 1.0;
        if (!(n.t_std[c] > 1e-12)) n.t_std[c] = 1.0;
    }
    return n;
}

/// Five independently initialized members trained on the same rows in
/// member-specific shuffle orders.
struct SensorEnsemble {
    static constexpr int kMembers = 5;
    std::vector<SensorNet> members;
    Normalization norm;
    TrainConfig config;

    bool trained() const {
        if (members.size() != kMembers) return false;
        for (const auto& m : members)
            if (!m.stats_ready) return false;
        return true;
    }
};

namespace detail {

inline void train_member(SensorNet& net, const SensorRows& rows, const TrainConfig& cfg,
                         uint64_t member_seed) {
    using namespace nn;
    Rng rng(member_seed);
    net.seed = member_seed;
    net.sigma_min = cfg.sigma_min;
    net.bn_eps = cfg.bn_eps;
    net.init_weights(rng);

    const size_t n = rows.inputs.size();
    std::vector<size_t> order(n);
    AdamState adam;
    SensorNet::Cache cache;
    std::vector<double> grad;
    std::vector<double> x_std;
    std::vector<std::array<double, 2>> t_std;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (size_t i = 0; i < n; ++i) order[i] = i;
        rng.shuffle(order);
        const size_t batches = n / static_cast<size_t>(cfg.batch_size);  // drop the remainder
        for (size_t bi = 0; bi < batches; ++bi) {
            const int b = cfg.batch_size;
            x_std.assign(static_cast<size_t>(b) * kIn, 0.0);
            t_std.assign(b, {0.0, 0.0});
            for (int s = 0; s < b; ++s) {
                const size_t row = order[bi * b + s];
                for (int c = 0; c < 2; ++c) {
                    x_std[static_cast<size_t>(s) * kIn + c] =
                        (rows.inputs[row][c] - net.norm.in_mean[c]) / net.norm.in_std[c];
                    t_std[s][c] = (rows.targets[row][c] - net.norm.t_mean[c]) / net.norm.t_std[c];
                }
            }
            net.trunk(x_std, b, true, cfg.bn_momentum, cache);
            nn::loss_and_grad(net, cache, t_std, cfg.beta, nullptr, grad);
            adam.step(net.params, grad, cfg);
        }
    }
}

}  // namespace detail

/// Trains a fresh five-member ensemble on a dataset of enveloped
/// trajectories. Members share the dataset and its normalization constants
/// but are initialized and shuffled from independent seeds derived from
/// cfg.seed, so retraining with the same seed is bit-identical.
inline SensorEnsemble train_ensemble(const std::vector<EnvelopedTrajectory>& dataset,
                                     const TrainConfig& cfg) {
    validate(cfg);
    if (dataset.empty()) throw EmptyDataset("train_ensemble: no trajectories");
    auto rows = flatten_dataset(dataset);
    if (rows.inputs.size() < static_cast<size_t>(cfg.batch_size))
        throw EmptyDataset("train_ensemble: fewer rows than one mini-batch");
    for (const auto& r : rows.inputs)
        if (!std::isfinite(r[0]) || !std::isfinite(r[1]))
            throw ValidationError("train_ensemble: non-finite input");
    for (const auto& r : rows.targets)
        if (!std::isfinite(r[0]) || !std::isfinite(r[1]))
            throw ValidationError("train_ensemble: non-finite target");

    SensorEnsemble e;
    e.norm = compute_normalization(rows);
    e.config = cfg;
    e.members.resize(SensorEnsemble::kMembers);
    for (int m = 0; m < SensorEnsemble::kMembers; ++m) {
        e.members[m].norm = e.norm;
        detail::train_member(e.members[m], rows, cfg, derive_seed(cfg.seed, m));
    }
    return e;
}

/// Spec-level single-point forward of one member (infer mode).
inline HeadOutput forward(const SensorNet& net, double omega, double o) {
    return net.infer(omega, o);
}

inline EnvelopePrediction predict(const SensorEnsemble& ensemble, double omega, double o) {
    if (!ensemble.trained()) throw UntrainedNet("predict: ensemble not trained");
    const int n = SensorEnsemble::kMembers;
    double mu_u = 0, sigma_u = 0, mu_l = 0, sigma_l = 0;
    std::array<double, SensorEnsemble::kMembers> sums_u{}, sums_l{};
    for (int m = 0; m < n; ++m) {
        const auto h = ensemble.members[m].infer(omega, o);
        mu_u += h.mu_u;
        sigma_u += h.sigma_u;
        mu_l += h.mu_l;
        sigma_l += h.sigma_l;
        sums_u[m] = h.mu_u + h.sigma_u;
        sums_l[m] = h.mu_l + h.sigma_l;
    }
    auto mean_of = [n](const auto& a) {
        double s = 0;
        for (double v : a) s += v;
        return s / n;
    };
    auto sample_std = [n](const auto& a, double mean) {
        double s = 0;
        for (double v : a) s += (v - mean) * (v - mean);
        return std::sqrt(s / (n - 1));
    };
    EnvelopePrediction p{};
    p.mu_u = mu_u / n;
    p.sigma_u = sigma_u / n;
    p.mu_l = mu_l / n;
    p.sigma_l = sigma_l / n;
    p.sum_u = mean_of(sums_u);
    p.sum_l = mean_of(sums_l);
    p.sigma_ep_u = sample_std(sums_u, p.sum_u);
    p.sigma_ep_l = sample_std(sums_l, p.sum_l);
    return p;
}

}  // namespace hydrostart
