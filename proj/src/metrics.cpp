#include "scst/metrics.hpp"

#include <stdexcept>

namespace scst {

std::pair<int, int> utterance_error(const std::vector<int>& hyp_tokens,
                                    const std::vector<int>& ref) {
  if (ref.empty()) throw std::invalid_argument("utterance_error: empty reference");
  return {edit_distance(strip_eos(hyp_tokens), ref),
          static_cast<int>(ref.size())};
}

EvalSummary corpus_wer(const std::vector<ScoredPair>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("corpus_wer: empty corpus");
  EvalSummary summary;
  for (const auto& pair : pairs) {
    auto [ed, ref_len] = utterance_error(pair.hyp_tokens, pair.ref);
    summary.total_edit_ops += ed;
    summary.total_ref_tokens += ref_len;
    summary.per_utterance.push_back({pair.id, ed, ref_len});
  }
  summary.wer = static_cast<double>(summary.total_edit_ops) /
                static_cast<double>(summary.total_ref_tokens);
  return summary;
}

double relative_improvement(double baseline_wer, double new_wer) {
  if (baseline_wer <= 0)
    throw std::invalid_argument("relative_improvement: baseline WER must be > 0");
  return 100.0 * (baseline_wer - new_wer) / baseline_wer;
}

}  // namespace scst
