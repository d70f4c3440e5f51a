#include "attribkit/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "attribkit/markup.hpp"
#include "attribkit/text.hpp"

namespace attribkit::po {

TrainResult train(const LossConfig& config, const PreferenceBatch& pairs,
                  const std::vector<SftExample>& sft_buffer, const Policy& policy_init) {
    config.validate();
    if (pairs.empty()) throw std::invalid_argument("train: no preference pairs");

    auto policy = policy_init.clone();
    const auto ref = policy_init.clone();

    // deterministic shuffle, trailing slice held out
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(config.seed);
    std::shuffle(order.begin(), order.end(), rng);

    const auto holdout_count = static_cast<std::size_t>(
        std::floor(config.holdout_fraction * static_cast<double>(pairs.size())));
    PreferenceBatch train_set;
    PreferenceBatch holdout;
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto& dest = i + holdout_count >= order.size() ? holdout : train_set;
        dest.push_back(pairs[order[i]]);
    }
    const PreferenceBatch& eval_set = holdout.empty() ? train_set : holdout;

    TrainResult result;
    result.holdout = holdout;
    result.history.reserve(static_cast<std::size_t>(config.steps));

    std::size_t pair_cursor = 0;
    std::size_t sft_cursor = 0;
    auto next_po_batch = [&]() {
        PreferenceBatch batch;
        const auto size = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size),
                                                train_set.size());
        for (std::size_t i = 0; i < size; ++i) {
            batch.push_back(train_set[pair_cursor]);
            pair_cursor = (pair_cursor + 1) % train_set.size();
        }
        return batch;
    };
    auto next_sft_batch = [&]() {
        std::vector<SftExample> batch;
        const auto size = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size),
                                                sft_buffer.size());
        for (std::size_t i = 0; i < size; ++i) {
            batch.push_back(sft_buffer[sft_cursor]);
            sft_cursor = (sft_cursor + 1) % sft_buffer.size();
        }
        return batch;
    };

    for (int step = 1; step <= config.steps; ++step) {
        const bool replay = step % config.replay_interval == 0 && !sft_buffer.empty();
        double loss = 0.0;
        std::vector<double> grad;
        if (replay) {
            const auto batch = next_sft_batch();
            loss = sft_loss(*policy, batch);
            grad = sft_gradient(*policy, batch);
        } else {
            const auto batch = next_po_batch();
            loss = batch_loss(config, *policy, *ref, batch);
            grad = loss_gradient(config, *policy, *ref, batch);
        }
        if (!std::isfinite(loss)) {
            throw DivergenceError(step, "train: non-finite loss at step " + std::to_string(step));
        }
        auto& theta = policy->params();
        for (std::size_t i = 0; i < theta.size(); ++i) {
            theta[i] -= config.learning_rate * grad[i];
        }

        HistoryRow row;
        row.step = step;
        row.loss = loss;
        row.replay = replay;
        row.margin = mean_margin(*policy, eval_set);
        row.holdout_accuracy = pair_accuracy(*policy, *ref, eval_set, config.beta);
        result.history.push_back(row);
    }

    result.policy = std::move(policy);
    return result;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryRow>& history) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "step,loss,margin,holdout_accuracy,replay\n";
    out.precision(17);
    for (const auto& row : history) {
        out << row.step << ',' << row.loss << ',' << row.margin << ',' << row.holdout_accuracy
            << ',' << (row.replay ? 1 : 0) << '\n';
    }
}

int encode_token(const std::string& word, int vocab) {
    if (!word.empty() && word.size() <= 6 &&
        std::all_of(word.begin(), word.end(),
                    [](unsigned char c) { return std::isdigit(c) != 0; })) {
        const long value = std::stol(word);
        if (value < vocab) return static_cast<int>(value);
    }
    return static_cast<int>(text::fnv1a(word) % static_cast<std::uint64_t>(vocab));
}

std::vector<int> encode_text(const std::string& text_in, int vocab) {
    std::vector<int> tokens;
    for (const auto& word : text::tokenize(text_in)) tokens.push_back(encode_token(word, vocab));
    return tokens;
}

namespace {

// statement-wise encoding: tokens for each sentence, boundary after each
void append_statements(const std::string& statement_text, int vocab, std::vector<int>& tokens,
                       std::vector<std::size_t>& boundaries) {
    for (const auto& sentence : markup::segment_statements(statement_text)) {
        auto encoded = encode_text(sentence, vocab);
        if (encoded.empty()) encoded.push_back(0);
        tokens.insert(tokens.end(), encoded.begin(), encoded.end());
        boundaries.push_back(tokens.size());
    }
}

}  // namespace

PreferenceExample encode_pair(const synth::PreferencePair& pair, int vocab, int contexts) {
    PreferenceExample ex;
    ex.context = static_cast<int>(text::fnv1a(pair.query) %
                                  static_cast<std::uint64_t>(contexts));
    for (const auto& stmt : pair.prefix) {
        append_statements(stmt.text, vocab, ex.chosen, ex.chosen_boundaries);
        append_statements(stmt.text, vocab, ex.rejected, ex.rejected_boundaries);
    }
    append_statements(pair.chosen.text, vocab, ex.chosen, ex.chosen_boundaries);
    append_statements(pair.rejected.text, vocab, ex.rejected, ex.rejected_boundaries);
    if (ex.chosen.empty()) {
        ex.chosen.push_back(0);
        ex.chosen_boundaries.push_back(1);
    }
    if (ex.rejected.empty()) {
        ex.rejected.push_back(0);
        ex.rejected_boundaries.push_back(1);
    }
    return ex;
}

SftExample encode_sft_record(const std::string& question, const std::string& answer, int vocab,
                             int contexts) {
    SftExample ex;
    ex.context =
        static_cast<int>(text::fnv1a(question) % static_cast<std::uint64_t>(contexts));
    ex.tokens = encode_text(answer, vocab);
    if (ex.tokens.empty()) ex.tokens.push_back(0);
    return ex;
}

}  // namespace attribkit::po
