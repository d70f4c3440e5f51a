#include "attribkit/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "attribkit/jsonl.hpp"

namespace attribkit::po {

const char* parameterization_name(Parameterization p) {
    return p == Parameterization::tabular ? "tabular" : "feedforward";
}

Parameterization parameterization_from_name(const std::string& name) {
    if (name == "tabular") return Parameterization::tabular;
    if (name == "feedforward") return Parameterization::feedforward;
    throw std::invalid_argument("unknown parameterization \"" + name + "\"");
}

void Policy::validate_tokens(const std::vector<int>& tokens) const {
    if (tokens.empty()) throw std::invalid_argument("seq_logprob: empty token sequence");
    for (int t : tokens) {
        if (t < 0 || t >= vocab()) {
            throw std::invalid_argument("seq_logprob: token " + std::to_string(t) +
                                        " out of range [0, " + std::to_string(vocab()) + ")");
        }
    }
}

double Policy::seq_logprob(int context, const std::vector<int>& tokens) const {
    validate_tokens(tokens);
    return range_logprob(context, tokens, 0, tokens.size());
}

std::vector<double> Policy::statement_logprobs(int context, const std::vector<int>& tokens,
                                               const std::vector<std::size_t>& boundaries) const {
    validate_tokens(tokens);
    if (boundaries.empty() || boundaries.back() != tokens.size()) {
        throw std::invalid_argument("statement_logprobs: boundaries must end at sequence length");
    }
    std::size_t prev = 0;
    std::vector<double> out;
    out.reserve(boundaries.size());
    for (std::size_t b : boundaries) {
        if (b <= prev || b > tokens.size()) {
            throw std::invalid_argument("statement_logprobs: boundaries must be strictly increasing");
        }
        out.push_back(range_logprob(context, tokens, prev, b));
        prev = b;
    }
    return out;
}

namespace {

double log_sum_exp(const double* logits, int n) {
    double m = logits[0];
    for (int i = 1; i < n; ++i) m = std::max(m, logits[i]);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::exp(logits[i] - m);
    return m + std::log(s);
}

class TabularPolicy final : public Policy {
public:
    TabularPolicy(int vocab, int contexts)
        : vocab_(vocab), contexts_(contexts),
          theta_(static_cast<std::size_t>(contexts) * (vocab + 1) * vocab, 0.0) {
        if (vocab < 2) throw std::invalid_argument("policy: vocab must be >= 2");
        if (contexts < 1) throw std::invalid_argument("policy: contexts must be >= 1");
    }

    int vocab() const override { return vocab_; }
    int contexts() const override { return contexts_; }
    Parameterization parameterization() const override { return Parameterization::tabular; }
    std::vector<double>& params() override { return theta_; }
    const std::vector<double>& params() const override { return theta_; }
    std::unique_ptr<Policy> clone() const override { return std::make_unique<TabularPolicy>(*this); }

    std::vector<double> next_token_probs(int context, int prev_token) const override {
        const double* row = row_at(context, prev_token);
        const double lz = log_sum_exp(row, vocab_);
        std::vector<double> probs(static_cast<std::size_t>(vocab_));
        for (int i = 0; i < vocab_; ++i) probs[static_cast<std::size_t>(i)] = std::exp(row[i] - lz);
        return probs;
    }

    double range_logprob(int context, const std::vector<int>& tokens, std::size_t begin,
                         std::size_t end) const override {
        double lp = 0.0;
        for (std::size_t t = begin; t < end; ++t) {
            const int prev = t == 0 ? vocab_ : tokens[t - 1];
            const double* row = row_at(context, prev);
            lp += row[tokens[t]] - log_sum_exp(row, vocab_);
        }
        return lp;
    }

    void accumulate_range_grad(int context, const std::vector<int>& tokens, std::size_t begin,
                               std::size_t end, double weight,
                               std::vector<double>& grad) const override {
        for (std::size_t t = begin; t < end; ++t) {
            const int prev = t == 0 ? vocab_ : tokens[t - 1];
            const std::size_t offset = row_offset(context, prev);
            const double* row = theta_.data() + offset;
            const double lz = log_sum_exp(row, vocab_);
            for (int i = 0; i < vocab_; ++i) {
                grad[offset + static_cast<std::size_t>(i)] -= weight * std::exp(row[i] - lz);
            }
            grad[offset + static_cast<std::size_t>(tokens[t])] += weight;
        }
    }

private:
    std::size_t row_offset(int context, int prev) const {
        if (context < 0 || context >= contexts_) {
            throw std::invalid_argument("policy: context " + std::to_string(context) +
                                        " out of range");
        }
        return (static_cast<std::size_t>(context) * static_cast<std::size_t>(vocab_ + 1) +
                static_cast<std::size_t>(prev)) *
               static_cast<std::size_t>(vocab_);
    }

    const double* row_at(int context, int prev) const {
        if (prev < 0 || prev > vocab_) throw std::invalid_argument("policy: bad previous token");
        return theta_.data() + row_offset(context, prev);
    }

    int vocab_;
    int contexts_;
    std::vector<double> theta_;
};

// layout: [embeddings | W1 | b1 | W2 | b2]
class FeedforwardPolicy final : public Policy {
public:
    FeedforwardPolicy(int vocab, int contexts, int embed, int hidden, std::uint64_t seed)
        : vocab_(vocab), contexts_(contexts), embed_(embed), hidden_(hidden) {
        if (vocab < 2) throw std::invalid_argument("policy: vocab must be >= 2");
        if (contexts < 1) throw std::invalid_argument("policy: contexts must be >= 1");
        if (embed < 1 || hidden < 1) throw std::invalid_argument("policy: bad dimensions");
        theta_.resize(param_count(), 0.0);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> dist(0.0, 0.1);
        for (auto& p : theta_) p = dist(rng);
    }

    int vocab() const override { return vocab_; }
    int contexts() const override { return contexts_; }
    int embed_dim() const { return embed_; }
    int hidden_dim() const { return hidden_; }
    Parameterization parameterization() const override { return Parameterization::feedforward; }
    std::vector<double>& params() override { return theta_; }
    const std::vector<double>& params() const override { return theta_; }
    std::unique_ptr<Policy> clone() const override {
        return std::make_unique<FeedforwardPolicy>(*this);
    }

    std::vector<double> next_token_probs(int context, int prev_token) const override {
        Forward f = forward(context, prev_token);
        const double lz = log_sum_exp(f.logits.data(), vocab_);
        std::vector<double> probs(static_cast<std::size_t>(vocab_));
        for (int i = 0; i < vocab_; ++i) {
            probs[static_cast<std::size_t>(i)] = std::exp(f.logits[static_cast<std::size_t>(i)] - lz);
        }
        return probs;
    }

    double range_logprob(int context, const std::vector<int>& tokens, std::size_t begin,
                         std::size_t end) const override {
        double lp = 0.0;
        for (std::size_t t = begin; t < end; ++t) {
            const int prev = t == 0 ? vocab_ : tokens[t - 1];
            Forward f = forward(context, prev);
            lp += f.logits[static_cast<std::size_t>(tokens[t])] - log_sum_exp(f.logits.data(), vocab_);
        }
        return lp;
    }

    void accumulate_range_grad(int context, const std::vector<int>& tokens, std::size_t begin,
                               std::size_t end, double weight,
                               std::vector<double>& grad) const override {
        const int in = embed_ + vocab_ + 1;
        for (std::size_t t = begin; t < end; ++t) {
            const int prev = t == 0 ? vocab_ : tokens[t - 1];
            Forward f = forward(context, prev);
            const double lz = log_sum_exp(f.logits.data(), vocab_);

            // d logprob / d logits = onehot(token) - softmax
            std::vector<double> dlogits(static_cast<std::size_t>(vocab_));
            for (int i = 0; i < vocab_; ++i) {
                dlogits[static_cast<std::size_t>(i)] =
                    -std::exp(f.logits[static_cast<std::size_t>(i)] - lz);
            }
            dlogits[static_cast<std::size_t>(tokens[t])] += 1.0;

            // W2 (vocab x hidden), b2
            for (int i = 0; i < vocab_; ++i) {
                const double di = weight * dlogits[static_cast<std::size_t>(i)];
                for (int h = 0; h < hidden_; ++h) {
                    grad[w2_off() + idx(i, h, hidden_)] += di * f.z[static_cast<std::size_t>(h)];
                }
                grad[b2_off() + static_cast<std::size_t>(i)] += di;
            }
            // back through tanh
            std::vector<double> da(static_cast<std::size_t>(hidden_), 0.0);
            for (int h = 0; h < hidden_; ++h) {
                double dz = 0.0;
                for (int i = 0; i < vocab_; ++i) {
                    dz += dlogits[static_cast<std::size_t>(i)] * theta_[w2_off() + idx(i, h, hidden_)];
                }
                const double zh = f.z[static_cast<std::size_t>(h)];
                da[static_cast<std::size_t>(h)] = dz * (1.0 - zh * zh);
            }
            // W1 (hidden x in), b1, embedding
            for (int h = 0; h < hidden_; ++h) {
                const double dh = weight * da[static_cast<std::size_t>(h)];
                for (int j = 0; j < in; ++j) {
                    grad[w1_off() + idx(h, j, in)] += dh * f.x[static_cast<std::size_t>(j)];
                }
                grad[b1_off() + static_cast<std::size_t>(h)] += dh;
            }
            for (int e = 0; e < embed_; ++e) {
                double dx = 0.0;
                for (int h = 0; h < hidden_; ++h) {
                    dx += da[static_cast<std::size_t>(h)] * theta_[w1_off() + idx(h, e, in)];
                }
                grad[emb_off(context) + static_cast<std::size_t>(e)] += weight * dx;
            }
        }
    }

private:
    struct Forward {
        std::vector<double> x;       // input: [embedding | onehot(prev)]
        std::vector<double> z;       // tanh activations
        std::vector<double> logits;  // output
    };

    static std::size_t idx(int row, int col, int cols) {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) +
               static_cast<std::size_t>(col);
    }

    std::size_t param_count() const {
        const int in = embed_ + vocab_ + 1;
        return static_cast<std::size_t>(contexts_ * embed_) +
               static_cast<std::size_t>(hidden_ * in) + static_cast<std::size_t>(hidden_) +
               static_cast<std::size_t>(vocab_ * hidden_) + static_cast<std::size_t>(vocab_);
    }

    std::size_t emb_off(int context) const {
        if (context < 0 || context >= contexts_) {
            throw std::invalid_argument("policy: context out of range");
        }
        return static_cast<std::size_t>(context) * static_cast<std::size_t>(embed_);
    }
    std::size_t w1_off() const { return static_cast<std::size_t>(contexts_ * embed_); }
    std::size_t b1_off() const {
        return w1_off() + static_cast<std::size_t>(hidden_ * (embed_ + vocab_ + 1));
    }
    std::size_t w2_off() const { return b1_off() + static_cast<std::size_t>(hidden_); }
    std::size_t b2_off() const { return w2_off() + static_cast<std::size_t>(vocab_ * hidden_); }

    Forward forward(int context, int prev) const {
        if (prev < 0 || prev > vocab_) throw std::invalid_argument("policy: bad previous token");
        const int in = embed_ + vocab_ + 1;
        Forward f;
        f.x.assign(static_cast<std::size_t>(in), 0.0);
        for (int e = 0; e < embed_; ++e) {
            f.x[static_cast<std::size_t>(e)] = theta_[emb_off(context) + static_cast<std::size_t>(e)];
        }
        f.x[static_cast<std::size_t>(embed_ + prev)] = 1.0;

        f.z.assign(static_cast<std::size_t>(hidden_), 0.0);
        for (int h = 0; h < hidden_; ++h) {
            double a = theta_[b1_off() + static_cast<std::size_t>(h)];
            for (int j = 0; j < in; ++j) {
                a += theta_[w1_off() + idx(h, j, in)] * f.x[static_cast<std::size_t>(j)];
            }
            f.z[static_cast<std::size_t>(h)] = std::tanh(a);
        }
        f.logits.assign(static_cast<std::size_t>(vocab_), 0.0);
        for (int i = 0; i < vocab_; ++i) {
            double a = theta_[b2_off() + static_cast<std::size_t>(i)];
            for (int h = 0; h < hidden_; ++h) {
                a += theta_[w2_off() + idx(i, h, hidden_)] * f.z[static_cast<std::size_t>(h)];
            }
            f.logits[static_cast<std::size_t>(i)] = a;
        }
        return f;
    }

    int vocab_;
    int contexts_;
    int embed_;
    int hidden_;
    std::vector<double> theta_;
};

std::string to_hexfloat(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double from_hexfloat(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

}  // namespace

std::unique_ptr<Policy> make_tabular_policy(int vocab, int contexts) {
    return std::make_unique<TabularPolicy>(vocab, contexts);
}

std::unique_ptr<Policy> make_feedforward_policy(int vocab, int contexts, int embed_dim,
                                                int hidden_dim, std::uint64_t init_seed) {
    return std::make_unique<FeedforwardPolicy>(vocab, contexts, embed_dim, hidden_dim, init_seed);
}

void save_policy(const Policy& policy, std::uint64_t seed, const std::filesystem::path& path) {
    nlohmann::json j;
    j["format"] = "attribkit-policy";
    j["version"] = 1;
    j["vocab"] = policy.vocab();
    j["contexts"] = policy.contexts();
    j["parameterization"] = parameterization_name(policy.parameterization());
    j["seed"] = seed;
    if (policy.parameterization() == Parameterization::feedforward) {
        const auto& ff = dynamic_cast<const FeedforwardPolicy&>(policy);
        j["embed_dim"] = ff.embed_dim();
        j["hidden_dim"] = ff.hidden_dim();
    }
    nlohmann::json params = nlohmann::json::array();
    for (double p : policy.params()) params.push_back(to_hexfloat(p));
    j["params"] = params;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

LoadedPolicy load_policy(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw jsonl::InputError("cannot open " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || j.value("format", "") != "attribkit-policy") {
        throw jsonl::InputError(path.string() + ": not a policy checkpoint");
    }
    if (j.value("version", 0) != 1) {
        throw jsonl::InputError(path.string() + ": unsupported checkpoint version");
    }

    LoadedPolicy loaded;
    loaded.seed = j.value("seed", 0ULL);
    const auto param = parameterization_from_name(j.at("parameterization").get<std::string>());
    const int vocab = j.at("vocab").get<int>();
    const int contexts = j.at("contexts").get<int>();
    if (param == Parameterization::tabular) {
        loaded.policy = make_tabular_policy(vocab, contexts);
    } else {
        loaded.policy = make_feedforward_policy(vocab, contexts, j.at("embed_dim").get<int>(),
                                                j.at("hidden_dim").get<int>(), 0);
    }
    const auto& params = j.at("params");
    if (params.size() != loaded.policy->params().size()) {
        throw jsonl::InputError(path.string() + ": parameter count mismatch");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        loaded.policy->params()[i] = from_hexfloat(params[i].get<std::string>());
    }
    return loaded;
}

}  // namespace attribkit::po
