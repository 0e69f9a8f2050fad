#pragma once

#include "scst/decoding.hpp"
#include "scst/rewards.hpp"

namespace scst {

struct LossTerms {
  Tensor scst_loss;
  Tensor ce_loss;
  Tensor combined;  // scst_loss + lambda * ce_loss
  double lambda = 0.0;
};

// The baselined REINFORCE loss over the re-normalized N-best list:
//   L = -sum_n log P_hat(Y^n | X) * [R(Y^n, Y*) - mean R]
// Each hypothesis's log P is recomputed by teacher-forcing the model on the
// hypothesis's own tokens so the tape sees the full dependence on the
// parameters; log P_hat is log_softmax over those N log-probabilities, so the
// re-normalization is differentiated too. Rewards and the baseline are
// detached constants.
Tensor scst_loss(Tape& tape, const ModelParams& params, const Utterance& utt,
                 const NBestList& nbest, RewardKind kind);

// scst_loss + lambda * ce_loss on one tape; ce_loss conditions on the
// ground-truth reference, not the hypotheses.
LossTerms combined_loss(Tape& tape, const ModelParams& params,
                        const Utterance& utt, const NBestList& nbest,
                        RewardKind kind, double lambda);

struct ScstStepConfig {
  int beam_n = 5;
  RewardKind reward = RewardKind::kSequenceLevel;
  double lambda = 0.001;
  double learning_rate = 0.01;
  int max_decode_len = 0;  // 0: use params.config.max_decode_len
};

// One SCST update: beam-search N-best in inference mode, combined loss,
// backward, one SGD step. Params are updated in place; the returned terms
// are the loss values observed before the update.
LossTerms scst_step(ModelParams& params, const Utterance& utt,
                    const ScstStepConfig& config);

// Teacher-forced log P(Y^n | X) for every hypothesis under the given
// parameters (inference path); used to evaluate P_hat on a frozen list.
std::vector<double> hypothesis_log_probs(const ModelParams& params,
                                         const std::vector<std::vector<double>>& features,
                                         const NBestList& nbest);

}  // namespace scst
