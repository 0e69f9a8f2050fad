#include "scst/data.hpp"

#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace scst {

namespace {

void validate_config(const SynthConfig& c) {
  if (c.vocab_size < 3) throw std::invalid_argument("synth: vocab_size must be >= 3");
  if (c.feature_dim < 1) throw std::invalid_argument("synth: feature_dim must be >= 1");
  if (c.frames_per_token < 1)
    throw std::invalid_argument("synth: frames_per_token must be >= 1");
  if (c.noise_sigma < 0) throw std::invalid_argument("synth: noise_sigma must be >= 0");
  if (c.min_len < 1 || c.min_len > c.max_len)
    throw std::invalid_argument("synth: need 1 <= min_len <= max_len");
  if (c.num_utterances < 0)
    throw std::invalid_argument("synth: num_utterances must be >= 0");
}

std::vector<std::vector<double>> draw_prototypes(const SynthConfig& c,
                                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::vector<double>> protos(c.vocab_size - kFirstContentToken);
  for (auto& p : protos) {
    p.resize(c.feature_dim);
    for (double& v : p) v = unit(rng);
  }
  return protos;
}

}  // namespace

std::vector<std::vector<double>> synth_prototypes(const SynthConfig& config) {
  validate_config(config);
  std::mt19937_64 rng(config.seed);
  return draw_prototypes(config, rng);
}

Corpus synth_generate(const SynthConfig& config) {
  validate_config(config);
  std::mt19937_64 rng(config.seed);
  const auto protos = draw_prototypes(config, rng);

  std::uniform_int_distribution<int> len_dist(config.min_len, config.max_len);
  std::uniform_int_distribution<int> tok_dist(kFirstContentToken,
                                              config.vocab_size - 1);
  std::normal_distribution<double> noise(0.0, config.noise_sigma > 0
                                                  ? config.noise_sigma
                                                  : 1.0);

  Corpus corpus;
  corpus.reserve(config.num_utterances);
  for (int u = 0; u < config.num_utterances; ++u) {
    Utterance utt;
    std::ostringstream id;
    id << "u" << std::setw(6) << std::setfill('0') << u;
    utt.id = id.str();

    const int len = len_dist(rng);
    utt.reference.resize(len);
    for (int& t : utt.reference) t = tok_dist(rng);

    utt.features.reserve(static_cast<std::size_t>(len) * config.frames_per_token);
    for (int t : utt.reference) {
      const auto& proto = protos[t - kFirstContentToken];
      for (int f = 0; f < config.frames_per_token; ++f) {
        std::vector<double> frame = proto;
        if (config.noise_sigma > 0) {
          for (double& v : frame) v += noise(rng);
        }
        utt.features.push_back(std::move(frame));
      }
    }
    corpus.push_back(std::move(utt));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_corpus: cannot open " + path);
  for (const auto& utt : corpus) {
    nlohmann::json j;
    j["id"] = utt.id;
    j["features"] = utt.features;
    j["reference"] = utt.reference;
    out << j.dump() << "\n";
  }
  if (!out) throw std::runtime_error("save_corpus: write failed for " + path);
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_corpus: cannot open " + path);
  Corpus corpus;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("load_corpus: " + path + " line " +
                               std::to_string(line_no) + ": " + e.what());
    }
    Utterance utt;
    try {
      utt.id = j.at("id").get<std::string>();
      utt.features = j.at("features").get<std::vector<std::vector<double>>>();
      utt.reference = j.at("reference").get<std::vector<int>>();
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("load_corpus: " + path + " line " +
                               std::to_string(line_no) + ": " + e.what());
    }
    if (utt.features.empty()) {
      throw std::runtime_error("load_corpus: " + path + " line " +
                               std::to_string(line_no) + ": no feature frames");
    }
    const std::size_t width = utt.features.front().size();
    for (const auto& row : utt.features) {
      if (row.size() != width) {
        throw std::runtime_error("load_corpus: " + path + " line " +
                                 std::to_string(line_no) +
                                 ": inconsistent feature dimensions");
      }
    }
    if (utt.reference.empty()) {
      throw std::runtime_error("load_corpus: " + path + " line " +
                               std::to_string(line_no) + ": empty reference");
    }
    for (int t : utt.reference) {
      if (t < kFirstContentToken) {
        throw std::runtime_error("load_corpus: " + path + " line " +
                                 std::to_string(line_no) +
                                 ": reserved token id " + std::to_string(t) +
                                 " in reference");
      }
    }
    corpus.push_back(std::move(utt));
  }
  return corpus;
}

}  // namespace scst
