#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace scst {

// Token id conventions used throughout: 0 is BOS, 1 is EOS, content tokens
// start at 2. Corpus references carry content tokens only.
inline constexpr int kBos = 0;
inline constexpr int kEos = 1;
inline constexpr int kFirstContentToken = 2;

struct Utterance {
  std::string id;
  std::vector<std::vector<double>> features;  // frames x feature_dim
  std::vector<int> reference;                 // content tokens, non-empty
};

using Corpus = std::vector<Utterance>;

// Prototype-plus-noise generator: each content token owns a fixed prototype
// vector in [-1,1]^F; an utterance's features are frames_per_token noisy
// copies of each reference token's prototype. noise_sigma is the single
// difficulty dial (0 = exactly invertible by nearest prototype).
struct SynthConfig {
  int vocab_size = 20;  // includes BOS/EOS
  int feature_dim = 8;
  int frames_per_token = 2;
  double noise_sigma = 0.0;
  int min_len = 3;
  int max_len = 8;
  int num_utterances = 100;
  std::uint64_t seed = 1;
};

Corpus synth_generate(const SynthConfig& config);

// The per-token prototypes the generator would draw for this config; row v-2
// belongs to content token v. Exposed for oracle decoding in evaluations.
std::vector<std::vector<double>> synth_prototypes(const SynthConfig& config);

// JSON Lines, one {"id","features","reference"} object per line. Floats
// round-trip exactly (shortest-round-trip decimal form). Malformed lines and
// ragged feature rows are rejected with the offending line number.
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

}  // namespace scst
