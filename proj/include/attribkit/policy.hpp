#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace attribkit::po {

enum class Parameterization { tabular, feedforward };

const char* parameterization_name(Parameterization p);
Parameterization parameterization_from_name(const std::string& name);

/// A tiny autoregressive categorical sequence model. Sequences are
/// conditioned on a context id and factorize over next-token
/// distributions given the previous token (begin-of-sequence for the
/// first position). Parameters are exposed as one flat vector so
/// gradient descent and finite-difference probes can treat every
/// parameterization uniformly.
class Policy {
public:
    virtual ~Policy() = default;

    virtual int vocab() const = 0;
    virtual int contexts() const = 0;
    virtual Parameterization parameterization() const = 0;

    virtual std::vector<double>& params() = 0;
    virtual const std::vector<double>& params() const = 0;
    virtual std::unique_ptr<Policy> clone() const = 0;

    /// Next-token distribution; sums to 1 within 1e-9.
    virtual std::vector<double> next_token_probs(int context, int prev_token) const = 0;

    /// Log-probability of tokens[begin, end) given the context and the
    /// token history before `begin`.
    virtual double range_logprob(int context, const std::vector<int>& tokens, std::size_t begin,
                                 std::size_t end) const = 0;

    /// Adds weight * d(range_logprob)/dtheta into grad (sized like params).
    virtual void accumulate_range_grad(int context, const std::vector<int>& tokens,
                                       std::size_t begin, std::size_t end, double weight,
                                       std::vector<double>& grad) const = 0;

    /// Sum over positions of log softmax(logits(context, prev))[token].
    /// Always <= 0 up to rounding. Empty sequences and out-of-range
    /// tokens are errors.
    double seq_logprob(int context, const std::vector<int>& tokens) const;

    /// Per-statement conditional log-probabilities for end-offset
    /// boundaries (strictly increasing, last == tokens.size()). The
    /// components sum to seq_logprob.
    std::vector<double> statement_logprobs(int context, const std::vector<int>& tokens,
                                           const std::vector<std::size_t>& boundaries) const;

protected:
    void validate_tokens(const std::vector<int>& tokens) const;
};

/// Conditional logits table indexed by (context, previous token); the
/// default parameterization. Zero-initialized, i.e. uniform.
std::unique_ptr<Policy> make_tabular_policy(int vocab, int contexts);

/// Two-layer tanh network over (context embedding, previous-token
/// one-hot). Exercises the same contracts under nonlinearity.
std::unique_ptr<Policy> make_feedforward_policy(int vocab, int contexts, int embed_dim,
                                                int hidden_dim, std::uint64_t init_seed);

/// Versioned textual checkpoint; parameters stored as hexfloats so a
/// load reproduces the dump bit-exactly.
void save_policy(const Policy& policy, std::uint64_t seed, const std::filesystem::path& path);

struct LoadedPolicy {
    std::unique_ptr<Policy> policy;
    std::uint64_t seed = 0;
};

LoadedPolicy load_policy(const std::filesystem::path& path);

}  // namespace attribkit::po
