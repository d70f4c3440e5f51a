#include "attribkit/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace attribkit::po {

const char* method_name(Method m) {
    switch (m) {
        case Method::dpo: return "dpo";
        case Method::ipo: return "ipo";
        case Method::slic: return "slic";
        case Method::kto: return "kto";
        case Method::progressive: return "progressive";
    }
    return "unknown";
}

Method method_from_name(const std::string& name) {
    if (name == "dpo") return Method::dpo;
    if (name == "ipo") return Method::ipo;
    if (name == "slic") return Method::slic;
    if (name == "kto") return Method::kto;
    if (name == "progressive") return Method::progressive;
    throw std::invalid_argument("unknown loss method \"" + name + "\"");
}

void LossConfig::validate() const {
    if (beta <= 0.0) throw std::invalid_argument("loss config: beta must be > 0");
    if (slic_margin <= 0.0) throw std::invalid_argument("loss config: slic margin must be > 0");
    if (kto_lambda_desirable <= 0.0 || kto_lambda_undesirable <= 0.0) {
        throw std::invalid_argument("loss config: kto weights must be > 0");
    }
    if (replay_interval < 1) throw std::invalid_argument("loss config: replay interval must be >= 1");
    if (steps < 1) throw std::invalid_argument("loss config: steps must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("loss config: batch size must be >= 1");
    if (holdout_fraction < 0.0 || holdout_fraction >= 1.0) {
        throw std::invalid_argument("loss config: holdout fraction must be in [0, 1)");
    }
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace {

// -log sigmoid(x), computed as softplus(-x) for stability
double neg_log_sigmoid(double x) {
    if (x > 0.0) return std::log1p(std::exp(-x));
    return -x + std::log1p(std::exp(x));
}

}  // namespace

double dpo_loss(double lw_theta, double ll_theta, double lw_ref, double ll_ref, double beta) {
    const double u = beta * ((lw_theta - lw_ref) - (ll_theta - ll_ref));
    return neg_log_sigmoid(u);
}

double ipo_loss(double lw_theta, double ll_theta, double lw_ref, double ll_ref, double beta) {
    const double h = (lw_theta - lw_ref) - (ll_theta - ll_ref);
    const double d = h - 1.0 / (2.0 * beta);
    return d * d;
}

double slic_loss(double lw_theta, double ll_theta, double delta) {
    return std::max(0.0, delta - (lw_theta - ll_theta));
}

double kto_loss(double l_theta, double l_ref, bool desirable, double beta, double lambda_d,
                double lambda_u, double z_ref) {
    const double r = beta * (l_theta - l_ref);
    if (desirable) return lambda_d * (1.0 - sigmoid(r - z_ref));
    return lambda_u * (1.0 - sigmoid(z_ref - r));
}

double progressive_loss(const std::vector<double>& stmt_lw_theta,
                        const std::vector<double>& stmt_ll_theta,
                        const std::vector<double>& stmt_lw_ref,
                        const std::vector<double>& stmt_ll_ref, double beta) {
    const std::size_t n = stmt_lw_theta.size();
    if (n == 0 || stmt_ll_theta.size() != n || stmt_lw_ref.size() != n ||
        stmt_ll_ref.size() != n) {
        throw std::invalid_argument("progressive_loss: statement vectors must share length >= 1");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += dpo_loss(stmt_lw_theta[i], stmt_ll_theta[i], stmt_lw_ref[i], stmt_ll_ref[i], beta);
    }
    return total / static_cast<double>(n);
}

double predicted_preference(double lw_theta, double ll_theta, double lw_ref, double ll_ref,
                            double beta) {
    return sigmoid(beta * ((lw_theta - lw_ref) - (ll_theta - ll_ref)));
}

double sft_loss(const Policy& policy, const std::vector<SftExample>& batch) {
    if (batch.empty()) throw std::invalid_argument("sft_loss: empty batch");
    double total = 0.0;
    for (const auto& ex : batch) total -= policy.seq_logprob(ex.context, ex.tokens);
    return total / static_cast<double>(batch.size());
}

double kto_z_ref(const Policy& policy, const Policy& ref, const PreferenceBatch& batch) {
    if (batch.empty()) return 0.0;
    double total = 0.0;
    for (const auto& ex : batch) {
        total += policy.seq_logprob(ex.context, ex.chosen) - ref.seq_logprob(ex.context, ex.chosen);
        total +=
            policy.seq_logprob(ex.context, ex.rejected) - ref.seq_logprob(ex.context, ex.rejected);
    }
    return std::max(0.0, total / (2.0 * static_cast<double>(batch.size())));
}

namespace {

bool progressive_aligned(const PreferenceExample& ex) {
    return !ex.chosen_boundaries.empty() &&
           ex.chosen_boundaries.size() == ex.rejected_boundaries.size();
}

}  // namespace

double batch_loss(const LossConfig& config, const Policy& policy, const Policy& ref,
                  const PreferenceBatch& batch, std::optional<double> kto_z) {
    if (batch.empty()) throw std::invalid_argument("batch_loss: empty batch");
    const double n = static_cast<double>(batch.size());
    double total = 0.0;

    if (config.method == Method::kto) {
        const double z = kto_z.has_value() ? *kto_z : kto_z_ref(policy, ref, batch);
        for (const auto& ex : batch) {
            total += kto_loss(policy.seq_logprob(ex.context, ex.chosen),
                              ref.seq_logprob(ex.context, ex.chosen), true, config.beta,
                              config.kto_lambda_desirable, config.kto_lambda_undesirable, z);
            total += kto_loss(policy.seq_logprob(ex.context, ex.rejected),
                              ref.seq_logprob(ex.context, ex.rejected), false, config.beta,
                              config.kto_lambda_desirable, config.kto_lambda_undesirable, z);
        }
        return total / (2.0 * n);
    }

    for (const auto& ex : batch) {
        const double lw = policy.seq_logprob(ex.context, ex.chosen);
        const double ll = policy.seq_logprob(ex.context, ex.rejected);
        switch (config.method) {
            case Method::dpo:
                total += dpo_loss(lw, ll, ref.seq_logprob(ex.context, ex.chosen),
                                  ref.seq_logprob(ex.context, ex.rejected), config.beta);
                break;
            case Method::ipo:
                total += ipo_loss(lw, ll, ref.seq_logprob(ex.context, ex.chosen),
                                  ref.seq_logprob(ex.context, ex.rejected), config.beta);
                break;
            case Method::slic:
                total += slic_loss(lw, ll, config.slic_margin);
                break;
            case Method::progressive: {
                if (progressive_aligned(ex)) {
                    total += progressive_loss(
                        policy.statement_logprobs(ex.context, ex.chosen, ex.chosen_boundaries),
                        policy.statement_logprobs(ex.context, ex.rejected, ex.rejected_boundaries),
                        ref.statement_logprobs(ex.context, ex.chosen, ex.chosen_boundaries),
                        ref.statement_logprobs(ex.context, ex.rejected, ex.rejected_boundaries),
                        config.beta);
                } else {
                    // response-level fallback for mismatched statement counts
                    total += dpo_loss(lw, ll, ref.seq_logprob(ex.context, ex.chosen),
                                      ref.seq_logprob(ex.context, ex.rejected), config.beta);
                }
                break;
            }
            case Method::kto: break;  // handled above
        }
    }
    return total / n;
}

std::vector<double> loss_gradient(const LossConfig& config, const Policy& policy,
                                  const Policy& ref, const PreferenceBatch& batch) {
    if (batch.empty()) throw std::invalid_argument("loss_gradient: empty batch");
    std::vector<double> grad(policy.params().size(), 0.0);
    const double n = static_cast<double>(batch.size());

    if (config.method == Method::kto) {
        const double z = kto_z_ref(policy, ref, batch);
        const double scale = 1.0 / (2.0 * n);
        for (const auto& ex : batch) {
            {
                const double r = config.beta * (policy.seq_logprob(ex.context, ex.chosen) -
                                                ref.seq_logprob(ex.context, ex.chosen));
                const double s = sigmoid(r - z);
                const double w = -config.kto_lambda_desirable * config.beta * s * (1.0 - s) * scale;
                policy.accumulate_range_grad(ex.context, ex.chosen, 0, ex.chosen.size(), w, grad);
            }
            {
                const double r = config.beta * (policy.seq_logprob(ex.context, ex.rejected) -
                                                ref.seq_logprob(ex.context, ex.rejected));
                const double s = sigmoid(z - r);
                const double w = config.kto_lambda_undesirable * config.beta * s * (1.0 - s) * scale;
                policy.accumulate_range_grad(ex.context, ex.rejected, 0, ex.rejected.size(), w,
                                             grad);
            }
        }
        return grad;
    }

    for (const auto& ex : batch) {
        switch (config.method) {
            case Method::dpo: {
                const double u = config.beta *
                                 ((policy.seq_logprob(ex.context, ex.chosen) -
                                   ref.seq_logprob(ex.context, ex.chosen)) -
                                  (policy.seq_logprob(ex.context, ex.rejected) -
                                   ref.seq_logprob(ex.context, ex.rejected)));
                const double w = config.beta * (sigmoid(u) - 1.0) / n;
                policy.accumulate_range_grad(ex.context, ex.chosen, 0, ex.chosen.size(), w, grad);
                policy.accumulate_range_grad(ex.context, ex.rejected, 0, ex.rejected.size(), -w,
                                             grad);
                break;
            }
            case Method::ipo: {
                const double h = (policy.seq_logprob(ex.context, ex.chosen) -
                                  ref.seq_logprob(ex.context, ex.chosen)) -
                                 (policy.seq_logprob(ex.context, ex.rejected) -
                                  ref.seq_logprob(ex.context, ex.rejected));
                const double w = 2.0 * (h - 1.0 / (2.0 * config.beta)) / n;
                policy.accumulate_range_grad(ex.context, ex.chosen, 0, ex.chosen.size(), w, grad);
                policy.accumulate_range_grad(ex.context, ex.rejected, 0, ex.rejected.size(), -w,
                                             grad);
                break;
            }
            case Method::slic: {
                const double margin = policy.seq_logprob(ex.context, ex.chosen) -
                                      policy.seq_logprob(ex.context, ex.rejected);
                if (config.slic_margin - margin > 0.0) {
                    policy.accumulate_range_grad(ex.context, ex.chosen, 0, ex.chosen.size(),
                                                 -1.0 / n, grad);
                    policy.accumulate_range_grad(ex.context, ex.rejected, 0, ex.rejected.size(),
                                                 1.0 / n, grad);
                }
                break;
            }
            case Method::progressive: {
                if (progressive_aligned(ex)) {
                    const auto lw =
                        policy.statement_logprobs(ex.context, ex.chosen, ex.chosen_boundaries);
                    const auto ll =
                        policy.statement_logprobs(ex.context, ex.rejected, ex.rejected_boundaries);
                    const auto rw =
                        ref.statement_logprobs(ex.context, ex.chosen, ex.chosen_boundaries);
                    const auto rl =
                        ref.statement_logprobs(ex.context, ex.rejected, ex.rejected_boundaries);
                    const auto count = static_cast<double>(lw.size());
                    std::size_t cb = 0;
                    std::size_t rb = 0;
                    for (std::size_t i = 0; i < lw.size(); ++i) {
                        const double u = config.beta * ((lw[i] - rw[i]) - (ll[i] - rl[i]));
                        const double w = config.beta * (sigmoid(u) - 1.0) / (count * n);
                        policy.accumulate_range_grad(ex.context, ex.chosen, cb,
                                                     ex.chosen_boundaries[i], w, grad);
                        policy.accumulate_range_grad(ex.context, ex.rejected, rb,
                                                     ex.rejected_boundaries[i], -w, grad);
                        cb = ex.chosen_boundaries[i];
                        rb = ex.rejected_boundaries[i];
                    }
                } else {
                    const double u = config.beta *
                                     ((policy.seq_logprob(ex.context, ex.chosen) -
                                       ref.seq_logprob(ex.context, ex.chosen)) -
                                      (policy.seq_logprob(ex.context, ex.rejected) -
                                       ref.seq_logprob(ex.context, ex.rejected)));
                    const double w = config.beta * (sigmoid(u) - 1.0) / n;
                    policy.accumulate_range_grad(ex.context, ex.chosen, 0, ex.chosen.size(), w,
                                                 grad);
                    policy.accumulate_range_grad(ex.context, ex.rejected, 0, ex.rejected.size(),
                                                 -w, grad);
                }
                break;
            }
            case Method::kto: break;  // handled above
        }
    }
    return grad;
}

std::vector<double> sft_gradient(const Policy& policy, const std::vector<SftExample>& batch) {
    if (batch.empty()) throw std::invalid_argument("sft_gradient: empty batch");
    std::vector<double> grad(policy.params().size(), 0.0);
    const double w = -1.0 / static_cast<double>(batch.size());
    for (const auto& ex : batch) {
        policy.accumulate_range_grad(ex.context, ex.tokens, 0, ex.tokens.size(), w, grad);
    }
    return grad;
}

double mean_margin(const Policy& policy, const PreferenceBatch& batch) {
    if (batch.empty()) return 0.0;
    double total = 0.0;
    for (const auto& ex : batch) {
        total += policy.seq_logprob(ex.context, ex.chosen) -
                 policy.seq_logprob(ex.context, ex.rejected);
    }
    return total / static_cast<double>(batch.size());
}

double pair_accuracy(const Policy& policy, const Policy& ref, const PreferenceBatch& batch,
                     double beta) {
    if (batch.empty()) return 0.0;
    double correct = 0.0;
    for (const auto& ex : batch) {
        const double p = predicted_preference(policy.seq_logprob(ex.context, ex.chosen),
                                              policy.seq_logprob(ex.context, ex.rejected),
                                              ref.seq_logprob(ex.context, ex.chosen),
                                              ref.seq_logprob(ex.context, ex.rejected), beta);
        if (p > 0.5) {
            correct += 1.0;
        } else if (p == 0.5) {
            correct += 0.5;
        }
    }
    return correct / static_cast<double>(batch.size());
}

}  // namespace attribkit::po
