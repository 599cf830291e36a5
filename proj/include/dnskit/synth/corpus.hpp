#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dnskit/dsp/stft.hpp"
#include "dnskit/synth/rir.hpp"

namespace dnskit::synth {

// Recipe manifest: whitespace-separated "key value" lines plus one
// "pair <clean.wav> <noise.wav>" line per utterance. '#' starts a comment.
struct CorpusRecipe {
  std::uint64_t seed = 0;
  double reverb_fraction = 0.0;
  double snr_db_min = 0.0;
  double snr_db_max = 20.0;
  double target_dbov = -26.0;
  int max_image_order = 8;
  std::vector<std::pair<std::string, std::string>> pairs;  // clean, noise

  static CorpusRecipe load(const std::string& path);
  void validate() const;
};

struct UtteranceRecord {
  std::string id;
  dsp::Waveform clean;               // level-normalized target s(n)
  dsp::Waveform reverberated_clean;  // s(n)*h(n); equals clean when no reverb
  dsp::Waveform noise;               // scaled noise component
  dsp::Waveform mixture;             // reverberated_clean + noise, sample-exact
  double snr_db = 0.0;
  std::optional<std::string> rir_id;
  double level_dbov = 0.0;
};

struct CorpusIndexRow {
  std::string id;
  std::string clean_wav, revclean_wav, noise_wav, mix_wav;
  double snr_db = 0.0;
  bool reverb = false;
  std::string rir_id;  // "-" when absent
  double level_dbov = 0.0;
  std::string rir_spec;  // provenance only
};

// Synthesizes every record, writes the four WAVs per record plus index.tsv
// under out_dir, and returns the records. Deterministic for a fixed seed;
// each record draws from its own (seed, index) stream.
std::vector<UtteranceRecord> build_corpus(const CorpusRecipe& recipe,
                                          const std::string& out_dir);

std::vector<CorpusIndexRow> read_corpus_index(const std::string& index_path);
void write_corpus_index(const std::string& index_path,
                        const std::vector<CorpusIndexRow>& rows);

// Loads records back from an index.tsv produced by build_corpus.
std::vector<UtteranceRecord> load_records(const std::string& index_path);

}  // namespace dnskit::synth
