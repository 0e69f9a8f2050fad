#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "scst/data.hpp"
#include "scst/tensor.hpp"

namespace scst {

struct ModelConfig {
  int vocab_size = 12;   // includes BOS and EOS
  int feature_dim = 6;
  int hidden_dim = 8;
  int embed_dim = 8;
  int max_decode_len = 16;
};

void validate(const ModelConfig& config);

// Mean-pooled encoder + Elman decoder:
//   context  = tanh(W_enc * mean(features) + b_enc)
//   h'       = tanh(W_h h + W_e Emb[prev] + W_c context + b_h)
//   log_prob = log_softmax(W_o h' + b_o)
struct ModelParams {
  ModelConfig config;
  Tensor w_enc;  // H x F
  Tensor b_enc;  // H
  Tensor emb;    // V x E
  Tensor w_h;    // H x H
  Tensor w_e;    // H x E
  Tensor w_c;    // H x H
  Tensor b_h;    // H
  Tensor w_o;    // V x H
  Tensor b_o;    // V

  std::vector<std::pair<std::string, Tensor>> named() const;
  std::vector<Tensor> all() const;
  ModelParams clone() const;
};

// Weights uniform in [-0.1, 0.1] from a seeded generator, biases zero.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

// ---- Differentiable (taped) path ----

struct DecoderState {
  Tensor h;  // hidden vector, zero at sequence start
};

DecoderState initial_state(Tape& tape, const ModelParams& params);

Tensor encode(Tape& tape, const ModelParams& params,
              const std::vector<std::vector<double>>& features);

// Returns (log_probs over V, new state) after consuming prev_token.
std::pair<Tensor, DecoderState> decoder_step(Tape& tape,
                                             const ModelParams& params,
                                             const Tensor& context,
                                             int prev_token,
                                             const DecoderState& state);

// Teacher-forced cross-entropy: sum over steps of -log P(y*_t | y*_<t, X),
// with BOS prepended and EOS as the final target.
Tensor ce_loss(Tape& tape, const ModelParams& params, const Utterance& utt);

// Teacher-forced sum of log P(tokens[t] | tokens[<t], X) for an arbitrary
// token sequence (no EOS appended; tokens are consumed exactly as given).
// Reuses a precomputed context so several sequences can share one encode.
Tensor sequence_log_prob(Tape& tape, const ModelParams& params,
                         const Tensor& context,
                         const std::vector<int>& tokens);

// ---- Inference (value) path; same kernels, no tape ----

std::vector<double> encode_values(const ModelParams& params,
                                  const std::vector<std::vector<double>>& features);

struct StepValues {
  std::vector<double> log_probs;
  std::vector<double> state;
};

StepValues decoder_step_values(const ModelParams& params,
                               const std::vector<double>& context,
                               int prev_token,
                               const std::vector<double>& state);

// log P of a token sequence under teacher forcing; optionally records the
// per-step probabilities of the consumed tokens.
double sequence_log_prob_values(const ModelParams& params,
                                const std::vector<std::vector<double>>& features,
                                const std::vector<int>& tokens,
                                std::vector<double>* step_probs = nullptr);

// ---- Checkpoints ----
// Text container: magic line "SCSTCKPT1", config fields, then each named
// tensor as (name, rank, dims..., row-major values). Values are printed with
// enough digits to round-trip doubles exactly.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace scst
