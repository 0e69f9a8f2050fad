#pragma once

#include <vector>

#include "scst/model.hpp"

namespace scst {

struct Hypothesis {
  std::vector<int> tokens;        // emitted tokens; ends with EOS unless truncated
  std::vector<double> step_probs; // P_t of each emitted token, one per token
  double log_prob = 0.0;          // sum of log step_probs
  bool truncated = false;         // hit max_len without emitting EOS
};

struct NBestList {
  std::vector<Hypothesis> hypotheses;  // descending log_prob, no duplicates
  int beam_size = 0;
};

// Beam search over the inference-mode model. Protocol: each step expands
// every live beam by all V tokens; an EOS extension that ranks within the
// step's top-N candidates retires to the finished pool (finished hypotheses
// do not occupy live width); the next live set is the top-N non-EOS
// candidates. Decoding stops once N hypotheses have finished or max_len is
// reached; if fewer than N finished, the best truncated live beams fill the
// list. Scores are raw cumulative log-probabilities (no length
// normalization). Ties break toward the lexicographically smaller token
// sequence.
NBestList beam_search(const ModelParams& params,
                      const std::vector<std::vector<double>>& features,
                      int beam_n, int max_len);

// Greedy argmax decode; identical to beam_search with beam_n = 1.
Hypothesis greedy_decode(const ModelParams& params,
                         const std::vector<std::vector<double>>& features,
                         int max_len);

// Softmax over the hypotheses' log_probs (stable log-sum-exp form); the
// probabilities the SCST loss re-normalizes over the N-best list.
std::vector<double> renormalize(const NBestList& nbest);

}  // namespace scst
