#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scst/rewards.hpp"

namespace scst {

struct UtteranceError {
  std::string id;
  int edit_ops = 0;
  int ref_len = 0;
};

struct EvalSummary {
  long long total_edit_ops = 0;
  long long total_ref_tokens = 0;
  double wer = 0.0;  // pooled: total_edit_ops / total_ref_tokens
  std::vector<UtteranceError> per_utterance;
};

// (edit distance, reference length) for one hypothesis/reference pair.
std::pair<int, int> utterance_error(const std::vector<int>& hyp_tokens,
                                    const std::vector<int>& ref);

struct ScoredPair {
  std::string id;
  std::vector<int> hyp_tokens;  // EOS allowed; stripped before scoring
  std::vector<int> ref;
};

// Pooled corpus WER: sum of edit ops over sum of reference lengths (not the
// mean of per-utterance rates). Can exceed 1 when insertions dominate.
EvalSummary corpus_wer(const std::vector<ScoredPair>& pairs);

// 100 * (baseline - new) / baseline.
double relative_improvement(double baseline_wer, double new_wer);

}  // namespace scst
