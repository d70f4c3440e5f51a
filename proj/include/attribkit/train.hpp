#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <vector>

#include "attribkit/losses.hpp"
#include "attribkit/synthgen.hpp"

namespace attribkit::po {

struct HistoryRow {
    int step = 0;
    double loss = 0.0;
    double margin = 0.0;             // mean (lw_theta - ll_theta) on the eval split
    double holdout_accuracy = 0.0;   // predicted-preference accuracy on the eval split
    bool replay = false;             // SFT step taken instead of the PO step
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int step, const std::string& what)
        : std::runtime_error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

struct TrainResult {
    std::unique_ptr<Policy> policy;
    std::vector<HistoryRow> history;
    PreferenceBatch holdout;
};

/// Plain gradient descent on the configured preference loss, with the
/// reference policy frozen at policy_init. Every replay_interval-th step
/// runs one SFT step on a batch drawn round-robin from sft_buffer
/// instead of the PO step. Pairs are shuffled once with the config seed;
/// the trailing holdout_fraction becomes the held-out evaluation split.
/// A non-finite loss aborts with the offending step index.
TrainResult train(const LossConfig& config, const PreferenceBatch& pairs,
                  const std::vector<SftExample>& sft_buffer, const Policy& policy_init);

void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryRow>& history);

/// Word-level encoder for pair text: a token that is a decimal integer
/// below the vocab size maps to itself, anything else hashes into the
/// vocabulary. Deterministic across platforms.
int encode_token(const std::string& word, int vocab);
std::vector<int> encode_text(const std::string& text, int vocab);

/// Tokenizes a synthesized pair: both sequences are the shared prefix
/// followed by the chosen (or rejected) statement, with statement
/// boundaries taken from sentence segmentation. The context id hashes
/// from the query.
PreferenceExample encode_pair(const synth::PreferencePair& pair, int vocab, int contexts);

SftExample encode_sft_record(const std::string& question, const std::string& answer, int vocab,
                             int contexts);

}  // namespace attribkit::po
