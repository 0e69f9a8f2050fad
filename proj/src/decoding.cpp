#include "scst/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace scst {

namespace {

struct Beam {
  std::vector<int> tokens;
  std::vector<double> step_probs;
  double log_prob = 0.0;
  std::vector<double> state;  // hidden state after consuming tokens
};

struct Candidate {
  int parent = 0;
  int token = 0;
  double log_prob = 0.0;
  double step_prob = 0.0;
};

// log_prob descending, then lexicographically smaller full token sequence.
bool candidate_less(const std::vector<Beam>& live, const Candidate& a,
                    const Candidate& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  const auto& ta = live[a.parent].tokens;
  const auto& tb = live[b.parent].tokens;
  const std::size_t na = ta.size() + 1, nb = tb.size() + 1;
  for (std::size_t i = 0; i < std::min(na, nb); ++i) {
    const int va = i < ta.size() ? ta[i] : a.token;
    const int vb = i < tb.size() ? tb[i] : b.token;
    if (va != vb) return va < vb;
  }
  return na < nb;
}

bool hypothesis_less(const Hypothesis& a, const Hypothesis& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return a.tokens < b.tokens;
}

Hypothesis finish(const Beam& parent, const Candidate& c, bool truncated) {
  Hypothesis h;
  h.tokens = parent.tokens;
  h.tokens.push_back(c.token);
  h.step_probs = parent.step_probs;
  h.step_probs.push_back(c.step_prob);
  h.log_prob = c.log_prob;
  h.truncated = truncated;
  return h;
}

}  // namespace

NBestList beam_search(const ModelParams& params,
                      const std::vector<std::vector<double>>& features,
                      int beam_n, int max_len) {
  if (beam_n < 1) throw std::invalid_argument("beam_search: beam_n must be >= 1");
  if (max_len < 1) throw std::invalid_argument("beam_search: max_len must be >= 1");
  const int vocab = params.config.vocab_size;
  const auto context = encode_values(params, features);

  std::vector<Beam> live;
  live.push_back(Beam{{}, {}, 0.0,
                      std::vector<double>(params.config.hidden_dim, 0.0)});
  std::vector<Hypothesis> finished;

  for (int step = 0; step < max_len && !live.empty(); ++step) {
    std::vector<Candidate> candidates;
    candidates.reserve(live.size() * vocab);
    std::vector<std::vector<double>> next_states(live.size());
    for (std::size_t b = 0; b < live.size(); ++b) {
      const int prev = live[b].tokens.empty() ? kBos : live[b].tokens.back();
      StepValues sv = decoder_step_values(params, context, prev, live[b].state);
      next_states[b] = std::move(sv.state);
      for (int v = 0; v < vocab; ++v) {
        candidates.push_back(Candidate{static_cast<int>(b), v,
                                       live[b].log_prob + sv.log_probs[v],
                                       std::exp(sv.log_probs[v])});
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](const Candidate& a, const Candidate& b) {
                return candidate_less(live, a, b);
              });

    const bool last_step = step + 1 == max_len;
    std::vector<Beam> next_live;
    for (std::size_t rank = 0; rank < candidates.size(); ++rank) {
      const Candidate& c = candidates[rank];
      if (c.token == kEos) {
        if (rank < static_cast<std::size_t>(beam_n))
          finished.push_back(finish(live[c.parent], c, false));
        continue;
      }
      if (static_cast<int>(next_live.size()) >= beam_n) continue;
      Beam nb;
      nb.tokens = live[c.parent].tokens;
      nb.tokens.push_back(c.token);
      nb.step_probs = live[c.parent].step_probs;
      nb.step_probs.push_back(c.step_prob);
      nb.log_prob = c.log_prob;
      nb.state = next_states[c.parent];
      next_live.push_back(std::move(nb));
    }
    live = std::move(next_live);
    if (static_cast<int>(finished.size()) >= beam_n) {
      live.clear();
      break;
    }
    if (last_step) {
      // Out of budget: surviving beams become truncated hypotheses.
      for (const Beam& b : live) {
        Hypothesis h;
        h.tokens = b.tokens;
        h.step_probs = b.step_probs;
        h.log_prob = b.log_prob;
        h.truncated = true;
        finished.push_back(std::move(h));
      }
      live.clear();
    }
  }

  std::sort(finished.begin(), finished.end(), hypothesis_less);
  NBestList nbest;
  nbest.beam_size = beam_n;
  std::set<std::vector<int>> seen;
  for (auto& h : finished) {
    if (static_cast<int>(nbest.hypotheses.size()) >= beam_n) break;
    if (!seen.insert(h.tokens).second) continue;  // keep the higher-scoring path
    nbest.hypotheses.push_back(std::move(h));
  }
  return nbest;
}

Hypothesis greedy_decode(const ModelParams& params,
                         const std::vector<std::vector<double>>& features,
                         int max_len) {
  NBestList one = beam_search(params, features, 1, max_len);
  return one.hypotheses.front();
}

std::vector<double> renormalize(const NBestList& nbest) {
  if (nbest.hypotheses.empty())
    throw std::invalid_argument("renormalize: empty N-best list");
  std::vector<double> logps;
  logps.reserve(nbest.hypotheses.size());
  for (const auto& h : nbest.hypotheses) logps.push_back(h.log_prob);
  const double lz = kernels::log_sum_exp(logps);
  std::vector<double> probs(logps.size());
  for (std::size_t i = 0; i < logps.size(); ++i)
    probs[i] = std::exp(logps[i] - lz);
  return probs;
}

}  // namespace scst
