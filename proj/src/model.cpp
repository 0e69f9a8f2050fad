#include "scst/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace scst {

void validate(const ModelConfig& c) {
  if (c.vocab_size < 3)
    throw std::invalid_argument("model: vocab_size must be >= 3 (BOS, EOS, content)");
  if (c.feature_dim < 1 || c.hidden_dim < 1 || c.embed_dim < 1 ||
      c.max_decode_len < 1)
    throw std::invalid_argument("model: all dimensions must be >= 1");
}

std::vector<std::pair<std::string, Tensor>> ModelParams::named() const {
  return {{"W_enc", w_enc}, {"b_enc", b_enc}, {"Emb", emb},
          {"W_h", w_h},     {"W_e", w_e},     {"W_c", w_c},
          {"b_h", b_h},     {"W_o", w_o},     {"b_o", b_o}};
}

std::vector<Tensor> ModelParams::all() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named()) out.push_back(t);
  return out;
}

ModelParams ModelParams::clone() const {
  ModelParams copy;
  copy.config = config;
  copy.w_enc = w_enc.clone();
  copy.b_enc = b_enc.clone();
  copy.emb = emb.clone();
  copy.w_h = w_h.clone();
  copy.w_e = w_e.clone();
  copy.w_c = w_c.clone();
  copy.b_h = b_h.clone();
  copy.w_o = w_o.clone();
  copy.b_o = b_o.clone();
  return copy;
}

namespace {

Tensor draw_weight(std::vector<int> shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return Tensor::leaf(std::move(shape), std::move(v), true);
}

Tensor zero_bias(int n) {
  return Tensor::leaf({n}, std::vector<double>(n, 0.0), true);
}

}  // namespace

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  validate(config);
  std::mt19937_64 rng(seed);
  const int v = config.vocab_size, f = config.feature_dim,
            h = config.hidden_dim, e = config.embed_dim;
  ModelParams p;
  p.config = config;
  p.w_enc = draw_weight({h, f}, rng);
  p.b_enc = zero_bias(h);
  p.emb = draw_weight({v, e}, rng);
  p.w_h = draw_weight({h, h}, rng);
  p.w_e = draw_weight({h, e}, rng);
  p.w_c = draw_weight({h, h}, rng);
  p.b_h = zero_bias(h);
  p.w_o = draw_weight({v, h}, rng);
  p.b_o = zero_bias(v);
  return p;
}

namespace {

std::vector<double> mean_frames(const std::vector<std::vector<double>>& features,
                                int feature_dim) {
  if (features.empty())
    throw std::invalid_argument("encode: empty feature sequence");
  std::vector<double> mean(feature_dim, 0.0);
  for (const auto& frame : features) {
    if (static_cast<int>(frame.size()) != feature_dim)
      throw std::invalid_argument(
          "encode: frame width " + std::to_string(frame.size()) +
          " does not match feature_dim " + std::to_string(feature_dim));
    for (int i = 0; i < feature_dim; ++i) mean[i] += frame[i];
  }
  const double inv = 1.0 / static_cast<double>(features.size());
  for (double& v : mean) v *= inv;
  return mean;
}

void check_token(int token, int vocab_size, const char* where) {
  if (token < 0 || token >= vocab_size)
    throw std::invalid_argument(std::string(where) + ": token id " +
                                std::to_string(token) +
                                " out of range for vocab " +
                                std::to_string(vocab_size));
}

}  // namespace

DecoderState initial_state(Tape& tape, const ModelParams& params) {
  return DecoderState{tape.zeros({params.config.hidden_dim})};
}

Tensor encode(Tape& tape, const ModelParams& params,
              const std::vector<std::vector<double>>& features) {
  Tensor mean = tape.constant({params.config.feature_dim},
                              mean_frames(features, params.config.feature_dim));
  return tape.tanh(tape.add(tape.matmul(params.w_enc, mean), params.b_enc));
}

std::pair<Tensor, DecoderState> decoder_step(Tape& tape,
                                             const ModelParams& params,
                                             const Tensor& context,
                                             int prev_token,
                                             const DecoderState& state) {
  check_token(prev_token, params.config.vocab_size, "decoder_step");
  Tensor e = tape.embedding_lookup(params.emb, prev_token);
  Tensor pre = tape.add(
      tape.add(tape.add(tape.matmul(params.w_h, state.h),
                        tape.matmul(params.w_e, e)),
               tape.matmul(params.w_c, context)),
      params.b_h);
  Tensor h = tape.tanh(pre);
  Tensor log_probs =
      tape.log_softmax(tape.add(tape.matmul(params.w_o, h), params.b_o));
  return {log_probs, DecoderState{h}};
}

Tensor sequence_log_prob(Tape& tape, const ModelParams& params,
                         const Tensor& context,
                         const std::vector<int>& tokens) {
  for (int t : tokens) check_token(t, params.config.vocab_size, "sequence_log_prob");
  DecoderState state = initial_state(tape, params);
  int prev = kBos;
  std::vector<Tensor> picked;
  picked.reserve(tokens.size());
  for (int target : tokens) {
    auto [log_probs, next] = decoder_step(tape, params, context, prev, state);
    picked.push_back(tape.index_select(log_probs, {target}));
    state = next;
    prev = target;
  }
  if (picked.empty()) return tape.constant({1}, {0.0});
  return tape.sum(tape.concat(picked));
}

Tensor ce_loss(Tape& tape, const ModelParams& params, const Utterance& utt) {
  if (utt.reference.empty())
    throw std::invalid_argument("ce_loss: empty reference");
  std::vector<int> targets = utt.reference;
  targets.push_back(kEos);
  Tensor context = encode(tape, params, utt.features);
  return tape.scale(sequence_log_prob(tape, params, context, targets), -1.0);
}

std::vector<double> encode_values(const ModelParams& params,
                                  const std::vector<std::vector<double>>& features) {
  const auto mean = mean_frames(features, params.config.feature_dim);
  const int h = params.config.hidden_dim, f = params.config.feature_dim;
  return kernels::vec_tanh(kernels::vec_add(
      kernels::matvec(params.w_enc.values(), h, f, mean), params.b_enc.values()));
}

StepValues decoder_step_values(const ModelParams& params,
                               const std::vector<double>& context,
                               int prev_token,
                               const std::vector<double>& state) {
  check_token(prev_token, params.config.vocab_size, "decoder_step");
  const int h = params.config.hidden_dim, e = params.config.embed_dim,
            v = params.config.vocab_size;
  std::vector<double> embedded(
      params.emb.values().begin() + static_cast<std::size_t>(prev_token) * e,
      params.emb.values().begin() + static_cast<std::size_t>(prev_token + 1) * e);
  // Accumulation order mirrors the taped decoder_step exactly.
  std::vector<double> pre = kernels::vec_add(
      kernels::vec_add(
          kernels::vec_add(kernels::matvec(params.w_h.values(), h, h, state),
                           kernels::matvec(params.w_e.values(), h, e, embedded)),
          kernels::matvec(params.w_c.values(), h, h, context)),
      params.b_h.values());
  std::vector<double> hidden = kernels::vec_tanh(pre);
  std::vector<double> logits = kernels::vec_add(
      kernels::matvec(params.w_o.values(), v, h, hidden), params.b_o.values());
  return StepValues{kernels::log_softmax(logits), std::move(hidden)};
}

double sequence_log_prob_values(const ModelParams& params,
                                const std::vector<std::vector<double>>& features,
                                const std::vector<int>& tokens,
                                std::vector<double>* step_probs) {
  const auto context = encode_values(params, features);
  std::vector<double> state(params.config.hidden_dim, 0.0);
  int prev = kBos;
  double total = 0.0;
  if (step_probs) step_probs->clear();
  for (int target : tokens) {
    check_token(target, params.config.vocab_size, "sequence_log_prob");
    StepValues step = decoder_step_values(params, context, prev, state);
    total += step.log_probs[target];
    if (step_probs) step_probs->push_back(std::exp(step.log_probs[target]));
    state = std::move(step.state);
    prev = target;
  }
  return total;
}

namespace {

void write_values(std::ostream& out, const std::vector<double>& values) {
  char buf[40];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    out << (i ? " " : "") << buf;
  }
  out << "\n";
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << "SCSTCKPT1\n";
  const auto& c = params.config;
  out << "vocab_size " << c.vocab_size << "\n";
  out << "feature_dim " << c.feature_dim << "\n";
  out << "hidden_dim " << c.hidden_dim << "\n";
  out << "embed_dim " << c.embed_dim << "\n";
  out << "max_decode_len " << c.max_decode_len << "\n";
  for (const auto& [name, t] : params.named()) {
    out << "tensor " << name << " " << t.shape().size();
    for (int d : t.shape()) out << " " << d;
    out << "\n";
    write_values(out, t.values());
  }
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::string magic;
  if (!std::getline(in, magic) || magic != "SCSTCKPT1")
    throw std::runtime_error("load_checkpoint: " + path +
                             " is not an SCSTCKPT1 checkpoint");
  ModelConfig config;
  for (int i = 0; i < 5; ++i) {
    std::string key;
    int value;
    if (!(in >> key >> value))
      throw std::runtime_error("load_checkpoint: truncated config in " + path);
    if (key == "vocab_size") config.vocab_size = value;
    else if (key == "feature_dim") config.feature_dim = value;
    else if (key == "hidden_dim") config.hidden_dim = value;
    else if (key == "embed_dim") config.embed_dim = value;
    else if (key == "max_decode_len") config.max_decode_len = value;
    else throw std::runtime_error("load_checkpoint: unknown config key '" + key + "'");
  }
  validate(config);

  std::map<std::string, Tensor> loaded;
  std::string tag;
  while (in >> tag) {
    if (tag != "tensor")
      throw std::runtime_error("load_checkpoint: expected 'tensor', got '" + tag + "'");
    std::string name;
    int rank;
    if (!(in >> name >> rank) || rank < 1 || rank > 2)
      throw std::runtime_error("load_checkpoint: bad tensor header in " + path);
    std::vector<int> shape(rank);
    std::size_t n = 1;
    for (int& d : shape) {
      if (!(in >> d) || d < 1)
        throw std::runtime_error("load_checkpoint: bad tensor shape in " + path);
      n *= static_cast<std::size_t>(d);
    }
    std::vector<double> values(n);
    for (double& v : values) {
      if (!(in >> v))
        throw std::runtime_error("load_checkpoint: truncated values for tensor " +
                                 name);
    }
    loaded.emplace(name, Tensor::leaf(std::move(shape), std::move(values), true));
  }

  auto take = [&](const std::string& name, std::vector<int> expect) {
    auto it = loaded.find(name);
    if (it == loaded.end())
      throw std::runtime_error("load_checkpoint: missing tensor " + name);
    if (it->second.shape() != expect)
      throw std::runtime_error("load_checkpoint: tensor " + name + " has shape " +
                               shape_to_string(it->second.shape()) +
                               ", expected " + shape_to_string(expect));
    return it->second;
  };

  const int v = config.vocab_size, f = config.feature_dim, h = config.hidden_dim,
            e = config.embed_dim;
  ModelParams p;
  p.config = config;
  p.w_enc = take("W_enc", {h, f});
  p.b_enc = take("b_enc", {h});
  p.emb = take("Emb", {v, e});
  p.w_h = take("W_h", {h, h});
  p.w_e = take("W_e", {h, e});
  p.w_c = take("W_c", {h, h});
  p.b_h = take("b_h", {h});
  p.w_o = take("W_o", {v, h});
  p.b_o = take("b_o", {v});
  return p;
}

}  // namespace scst
