#pragma once

#include <string>
#include <vector>

#include "scst/decoding.hpp"

namespace scst {

// Levenshtein distance over token ids, unit-cost insert/delete/substitute.
int edit_distance(const std::vector<int>& a, const std::vector<int>& b);

// Hypothesis tokens with EOS removed; rewards never count the terminator.
std::vector<int> strip_eos(const std::vector<int>& tokens);

// Whole-sequence reward: -ED(hyp, ref) after EOS stripping. Always <= 0,
// and 0 exactly when the stripped hypothesis equals the reference.
double reward_sequence(const Hypothesis& hyp, const std::vector<int>& ref);

// Per-step edit-distance deltas: r_t = -[ED(Y_t, ref) - ED(Y_{t-1}, ref)]
// where Y_t is the EOS-stripped prefix of hyp_tokens through position t and
// Y_{-1} is empty. One DP row is extended per token, O(T * |ref|) total.
// Telescoping: sum(r) = |ref| - ED(stripped hyp, ref), exactly.
std::vector<int> step_rewards(const std::vector<int>& hyp_tokens,
                              const std::vector<int>& ref);

// Step-weighted reward: sum_t r_t * P_t with P_t = hyp.step_probs[t]. The
// probabilities are plain numbers; no gradient flows through the reward.
double reward_stepwise(const Hypothesis& hyp, const std::vector<int>& ref);

enum class RewardKind {
  kSequenceLevel,  // negative whole-sequence edit distance
  kStepWeighted,   // probability-weighted per-step deltas
};

const char* to_string(RewardKind kind);
RewardKind reward_kind_from_string(const std::string& name);  // "I" or "II"

// Arithmetic mean of the N-best rewards (the REINFORCE baseline).
double baseline(const std::vector<double>& rewards);

struct RewardReport {
  std::vector<double> per_hypothesis_reward;
  std::vector<std::vector<int>> step_rewards;  // one r-sequence per hypothesis
  double baseline = 0.0;
  std::vector<double> advantages;  // reward - baseline; sums to zero
};

RewardReport compute_rewards(const NBestList& nbest, const std::vector<int>& ref,
                             RewardKind kind);

}  // namespace scst
