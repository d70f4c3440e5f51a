#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attribkit/policy.hpp"

namespace attribkit::po {

enum class Method { dpo, ipo, slic, kto, progressive };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

/// One tokenized preference pair. Boundaries are statement end-offsets
/// into each sequence (strictly increasing, last == length).
struct PreferenceExample {
    int context = 0;
    std::vector<int> chosen;
    std::vector<int> rejected;
    std::vector<std::size_t> chosen_boundaries;
    std::vector<std::size_t> rejected_boundaries;
};

using PreferenceBatch = std::vector<PreferenceExample>;

struct SftExample {
    int context = 0;
    std::vector<int> tokens;
};

/// Loss selection plus training hyperparameters.
struct LossConfig {
    Method method = Method::progressive;
    double beta = 0.1;
    double slic_margin = 1.0;          // delta
    double kto_lambda_desirable = 1.0;
    double kto_lambda_undesirable = 1.0;
    int replay_interval = 10;          // every R-th step runs SFT instead
    double learning_rate = 0.5;
    int steps = 2000;
    std::uint64_t seed = 0;
    int batch_size = 32;
    double holdout_fraction = 0.2;

    void validate() const;  // beta > 0, replay_interval >= 1, ...
};

double sigmoid(double x);

/// -log sigmoid(beta * ((lw_t - lw_r) - (ll_t - ll_r))); ln 2 at theta = ref.
double dpo_loss(double lw_theta, double ll_theta, double lw_ref, double ll_ref, double beta);

/// (h - 1/(2 beta))^2 with h the log-ratio difference; 1/(4 beta^2) at theta = ref.
double ipo_loss(double lw_theta, double ll_theta, double lw_ref, double ll_ref, double beta);

/// Hinge on the policy margin: max(0, delta - (lw_theta - ll_theta)).
double slic_loss(double lw_theta, double ll_theta, double delta);

/// Prospect-theoretic utility loss. r = beta * (l_theta - l_ref), z_ref
/// is the batch-mean clamp-at-zero KL estimate supplied by the caller
/// and treated as a constant for the step.
double kto_loss(double l_theta, double l_ref, bool desirable, double beta, double lambda_d,
                double lambda_u, double z_ref);

/// Mean of per-statement DPO terms over aligned statement log-prob
/// vectors. Collapses to dpo_loss when n = 1.
double progressive_loss(const std::vector<double>& stmt_lw_theta,
                        const std::vector<double>& stmt_ll_theta,
                        const std::vector<double>& stmt_lw_ref,
                        const std::vector<double>& stmt_ll_ref, double beta);

/// sigmoid(beta * (ratio_w - ratio_l)); dpo_loss == -ln(predicted_preference).
double predicted_preference(double lw_theta, double ll_theta, double lw_ref, double ll_ref,
                            double beta);

/// Mean negative sequence log-probability over the batch.
double sft_loss(const Policy& policy, const std::vector<SftExample>& batch);

/// Clamp-at-zero batch-mean estimate of KL(policy || ref) over all
/// sequences in the batch (chosen and rejected sides).
double kto_z_ref(const Policy& policy, const Policy& ref, const PreferenceBatch& batch);

/// Mean loss over the batch for the configured method. Pairs with
/// mismatched statement counts fall back to the response-level term
/// under the progressive method. For KTO, `kto_z` fixes the reference
/// point (computed from the batch when absent).
double batch_loss(const LossConfig& config, const Policy& policy, const Policy& ref,
                  const PreferenceBatch& batch, std::optional<double> kto_z = std::nullopt);

/// Exact analytic gradient of batch_loss w.r.t. the policy parameters.
/// The reference policy receives no gradient.
std::vector<double> loss_gradient(const LossConfig& config, const Policy& policy,
                                  const Policy& ref, const PreferenceBatch& batch);

std::vector<double> sft_gradient(const Policy& policy, const std::vector<SftExample>& batch);

/// Mean policy margin (lw_theta - ll_theta) over the batch.
double mean_margin(const Policy& policy, const PreferenceBatch& batch);

/// Fraction of pairs ranked correctly by predicted_preference; exact
/// ties count half, so an untrained policy scores 0.5.
double pair_accuracy(const Policy& policy, const Policy& ref, const PreferenceBatch& batch,
                     double beta);

}  // namespace attribkit::po
