#include "scst/scst.hpp"

#include <stdexcept>
#include <string>

namespace scst {

namespace {

void check_hypotheses(const ModelParams& params, const NBestList& nbest) {
  if (nbest.hypotheses.empty())
    throw std::invalid_argument("scst_loss: empty N-best list");
  for (const auto& hyp : nbest.hypotheses) {
    for (int t : hyp.tokens) {
      if (t < 0 || t >= params.config.vocab_size)
        throw std::invalid_argument("scst_loss: hypothesis token " +
                                    std::to_string(t) +
                                    " out of vocabulary range");
    }
  }
}

}  // namespace

Tensor scst_loss(Tape& tape, const ModelParams& params, const Utterance& utt,
                 const NBestList& nbest, RewardKind kind) {
  check_hypotheses(params, nbest);
  const RewardReport rewards = compute_rewards(nbest, utt.reference, kind);

  Tensor context = encode(tape, params, utt.features);
  std::vector<Tensor> log_probs;
  log_probs.reserve(nbest.hypotheses.size());
  for (const auto& hyp : nbest.hypotheses)
    log_probs.push_back(sequence_log_prob(tape, params, context, hyp.tokens));

  // log P_hat over the N-best: log P - logsumexp(log P), differentiable.
  Tensor log_p_hat = tape.log_softmax(tape.concat(log_probs));

  Tensor loss = tape.constant({1}, {0.0});
  for (std::size_t n = 0; n < nbest.hypotheses.size(); ++n) {
    Tensor term = tape.scale(
        tape.index_select(log_p_hat, {static_cast<int>(n)}),
        -rewards.advantages[n]);
    loss = tape.add(loss, term);
  }
  return loss;
}

LossTerms combined_loss(Tape& tape, const ModelParams& params,
                        const Utterance& utt, const NBestList& nbest,
                        RewardKind kind, double lambda) {
  if (lambda < 0) throw std::invalid_argument("combined_loss: lambda must be >= 0");
  LossTerms terms;
  terms.lambda = lambda;
  terms.scst_loss = scst_loss(tape, params, utt, nbest, kind);
  terms.ce_loss = ce_loss(tape, params, utt);
  terms.combined = tape.add(terms.scst_loss, tape.scale(terms.ce_loss, lambda));
  return terms;
}

LossTerms scst_step(ModelParams& params, const Utterance& utt,
                    const ScstStepConfig& config) {
  const int max_len = config.max_decode_len > 0 ? config.max_decode_len
                                                : params.config.max_decode_len;
  NBestList nbest = beam_search(params, utt.features, config.beam_n, max_len);

  Tape tape;
  LossTerms terms =
      combined_loss(tape, params, utt, nbest, config.reward, config.lambda);
  tape.backward(terms.combined);
  if (config.learning_rate != 0.0) {
    for (Tensor& p : params.all()) {
      auto& v = p.mutable_values();
      const auto& g = p.grad();
      for (std::size_t i = 0; i < v.size(); ++i)
        v[i] -= config.learning_rate * g[i];
    }
  }
  return terms;
}

std::vector<double> hypothesis_log_probs(const ModelParams& params,
                                         const std::vector<std::vector<double>>& features,
                                         const NBestList& nbest) {
  std::vector<double> out;
  out.reserve(nbest.hypotheses.size());
  for (const auto& hyp : nbest.hypotheses)
    out.push_back(sequence_log_prob_values(params, features, hyp.tokens));
  return out;
}

}  // namespace scst
