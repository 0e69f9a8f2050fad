#include "scst/rewards.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace scst {

int edit_distance(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = b.size();
  std::vector<int> prev(n + 1), cur(n + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= n; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

std::vector<int> strip_eos(const std::vector<int>& tokens) {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (int t : tokens)
    if (t != kEos) out.push_back(t);
  return out;
}

double reward_sequence(const Hypothesis& hyp, const std::vector<int>& ref) {
  return -static_cast<double>(edit_distance(strip_eos(hyp.tokens), ref));
}

std::vector<int> step_rewards(const std::vector<int>& hyp_tokens,
                              const std::vector<int>& ref) {
  // row[j] = ED(current stripped prefix, ref[0..j))
  std::vector<int> row(ref.size() + 1);
  std::iota(row.begin(), row.end(), 0);  // ED(empty, .) = |.|
  std::vector<int> rewards;
  rewards.reserve(hyp_tokens.size());
  std::vector<int> next(ref.size() + 1);
  int prefix_len = 0;
  for (int tok : hyp_tokens) {
    if (tok == kEos) {
      rewards.push_back(0);  // stripped prefix unchanged
      continue;
    }
    ++prefix_len;
    next[0] = prefix_len;
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      const int sub = row[j - 1] + (tok == ref[j - 1] ? 0 : 1);
      next[j] = std::min({row[j] + 1, next[j - 1] + 1, sub});
    }
    rewards.push_back(-(next.back() - row.back()));
    std::swap(row, next);
  }
  return rewards;
}

double reward_stepwise(const Hypothesis& hyp, const std::vector<int>& ref) {
  if (hyp.step_probs.size() != hyp.tokens.size())
    throw std::invalid_argument(
        "reward_stepwise: step_probs length " +
        std::to_string(hyp.step_probs.size()) + " does not match tokens length " +
        std::to_string(hyp.tokens.size()));
  const std::vector<int> r = step_rewards(hyp.tokens, ref);
  double total = 0.0;
  for (std::size_t t = 0; t < r.size(); ++t) total += r[t] * hyp.step_probs[t];
  return total;
}

const char* to_string(RewardKind kind) {
  return kind == RewardKind::kSequenceLevel ? "I" : "II";
}

RewardKind reward_kind_from_string(const std::string& name) {
  if (name == "I" || name == "i" || name == "1") return RewardKind::kSequenceLevel;
  if (name == "II" || name == "ii" || name == "2") return RewardKind::kStepWeighted;
  throw std::invalid_argument("unknown reward kind '" + name + "' (use I or II)");
}

double baseline(const std::vector<double>& rewards) {
  if (rewards.empty()) throw std::invalid_argument("baseline: empty reward list");
  double sum = 0.0;
  for (double r : rewards) sum += r;
  return sum / static_cast<double>(rewards.size());
}

RewardReport compute_rewards(const NBestList& nbest, const std::vector<int>& ref,
                             RewardKind kind) {
  if (nbest.hypotheses.empty())
    throw std::invalid_argument("compute_rewards: empty N-best list");
  RewardReport report;
  for (const auto& hyp : nbest.hypotheses) {
    report.step_rewards.push_back(step_rewards(hyp.tokens, ref));
    report.per_hypothesis_reward.push_back(kind == RewardKind::kSequenceLevel
                                               ? reward_sequence(hyp, ref)
                                               : reward_stepwise(hyp, ref));
  }
  report.baseline = baseline(report.per_hypothesis_reward);
  for (double r : report.per_hypothesis_reward)
    report.advantages.push_back(r - report.baseline);
  return report;
}

}  // namespace scst
