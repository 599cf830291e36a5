#include "dnskit/synth/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dnskit/dsp/wav.hpp"
#include "dnskit/synth/level.hpp"
#include "dnskit/util/csvio.hpp"
#include "dnskit/util/rng.hpp"

namespace fs = std::filesystem;

namespace dnskit::synth {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream iss(line);
  std::vector<std::string> out;
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

std::string record_id(std::size_t idx) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "utt_%04zu", idx);
  return buf;
}

dsp::Waveform noise_segment(const dsp::Waveform& noise, std::size_t len,
                            Rng& rng) {
  require(!noise.samples.empty(), "empty noise file");
  dsp::Waveform seg;
  seg.sample_rate = noise.sample_rate;
  seg.samples.resize(len);
  const std::size_t n = noise.size();
  const std::size_t off = static_cast<std::size_t>(
      rng.randint(static_cast<std::int64_t>(n)));
  for (std::size_t i = 0; i < len; ++i) {
    seg.samples[i] = noise.samples[(off + i) % n];
  }
  return seg;
}

// Room geometry per configured ranges: mic at room center, source on a
// sphere of radius r in [0.1,1] m around it, clipped inside the walls.
RoomSpec sample_room(Rng& rng, int max_image_order) {
  RoomSpec room;
  room.length = rng.uniform(3.0, 10.0);
  room.width = rng.uniform(3.0, 10.0);
  room.height = rng.uniform(2.5, 3.5);
  room.absorption = rng.uniform(0.1, 0.3);
  room.mic_pos = {room.length / 2.0, room.width / 2.0, room.height / 2.0};
  const double r = rng.uniform(0.1, 1.0);
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * M_PI);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  std::array<double, 3> src = {room.mic_pos[0] + r * s * std::cos(phi),
                               room.mic_pos[1] + r * s * std::sin(phi),
                               room.mic_pos[2] + r * z};
  const std::array<double, 3> dims{room.length, room.width, room.height};
  for (int a = 0; a < 3; ++a) {
    src[a] = std::clamp(src[a], 0.05, dims[a] - 0.05);
  }
  room.source_pos = src;
  room.max_image_order = max_image_order;
  return room;
}

std::string room_spec_string(const RoomSpec& room) {
  std::ostringstream os;
  os << "room=" << format_double(room.length) << "x"
     << format_double(room.width) << "x" << format_double(room.height)
     << ";abs=" << format_double(room.absorption)
     << ";src=" << format_double(room.source_pos[0]) << ","
     << format_double(room.source_pos[1]) << ","
     << format_double(room.source_pos[2])
     << ";order=" << room.max_image_order;
  return os.str();
}

void quantize_wave(dsp::Waveform& w) {
  for (double& x : w.samples) x = dsp::quantize16(x);
}

}  // namespace

CorpusRecipe CorpusRecipe::load(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), "cannot open manifest: ", path);
  CorpusRecipe r;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& key = toks[0];
    auto expect = [&](std::size_t n) {
      require(toks.size() == n, path, ":", lineno, ": '", key, "' expects ",
              n - 1, " value(s)");
    };
    if (key == "pair") {
      expect(3);
      r.pairs.emplace_back(toks[1], toks[2]);
    } else if (key == "seed") {
      expect(2);
      r.seed = static_cast<std::uint64_t>(parse_long(toks[1]));
    } else if (key == "reverb_fraction") {
      expect(2);
      r.reverb_fraction = parse_double(toks[1]);
    } else if (key == "snr_db_min") {
      expect(2);
      r.snr_db_min = parse_double(toks[1]);
    } else if (key == "snr_db_max") {
      expect(2);
      r.snr_db_max = parse_double(toks[1]);
    } else if (key == "target_dbov") {
      expect(2);
      r.target_dbov = parse_double(toks[1]);
    } else if (key == "max_image_order") {
      expect(2);
      r.max_image_order = static_cast<int>(parse_long(toks[1]));
    } else {
      fail(path, ":", lineno, ": unknown manifest key '", key, "'");
    }
  }
  r.validate();
  return r;
}

void CorpusRecipe::validate() const {
  require(!pairs.empty(), "manifest lists no clean/noise pairs");
  require(reverb_fraction >= 0.0 && reverb_fraction <= 1.0,
          "reverb_fraction must be in [0,1]");
  require(snr_db_min <= snr_db_max, "snr_db_min must be <= snr_db_max");
  require(max_image_order >= 0, "max_image_order must be >= 0");
}

std::vector<UtteranceRecord> build_corpus(const CorpusRecipe& recipe,
                                          const std::string& out_dir) {
  recipe.validate();

  std::vector<std::string> missing;
  for (const auto& [clean, noise] : recipe.pairs) {
    if (!fs::exists(clean)) missing.push_back(clean);
    if (!fs::exists(noise)) missing.push_back(noise);
  }
  if (!missing.empty()) {
    std::ostringstream os;
    os << "missing input files:";
    for (const auto& p : missing) os << " " << p;
    fail(os.str());
  }

  fs::create_directories(out_dir);

  const std::size_t n = recipe.pairs.size();
  // exactly round(fraction*n) records get reverberated, chosen by a
  // seed-derived permutation
  const std::size_t n_reverb = static_cast<std::size_t>(
      std::llround(recipe.reverb_fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng select_rng(splitmix64(recipe.seed) ^ 0xc0ffee);
  select_rng.shuffle(order);
  std::vector<bool> reverb_flag(n, false);
  for (std::size_t i = 0; i < n_reverb; ++i) reverb_flag[order[i]] = true;

  std::vector<UtteranceRecord> records(n);
  std::vector<CorpusIndexRow> rows(n);

  for (std::size_t idx = 0; idx < n; ++idx) {
    Rng rng = Rng::for_stream(recipe.seed, idx);
    const auto& [clean_path, noise_path] = recipe.pairs[idx];
    const dsp::Waveform clean_raw = dsp::read_wav(clean_path);
    const dsp::Waveform noise_raw = dsp::read_wav(noise_path);

    UtteranceRecord rec;
    rec.id = record_id(idx);
    rec.clean = normalize_level(clean_raw, recipe.target_dbov);
    rec.level_dbov = measure_active_level(rec.clean).level_dbov;

    const dsp::Waveform noise_seg =
        noise_segment(noise_raw, rec.clean.size(), rng);
    rec.snr_db = rng.uniform(recipe.snr_db_min, recipe.snr_db_max);

    std::string rir_spec = "-";
    if (reverb_flag[idx]) {
      const RoomSpec room = sample_room(rng, recipe.max_image_order);
      const dsp::Waveform rir = simulate_rir(room, rec.clean.sample_rate);
      const int delay = direct_path_delay(room, rec.clean.sample_rate);
      const double direct_amp = 1.0 / room.source_mic_distance();
      const dsp::Waveform aligned = align_rir(rir, delay, direct_amp);
      rec.reverberated_clean = reverberate(rec.clean, aligned);
      rec.rir_id = "rir_" + record_id(idx);
      rir_spec = room_spec_string(room);
    } else {
      rec.reverberated_clean = rec.clean;
    }

    MixResult mix = mix_at_snr(rec.reverberated_clean, noise_seg, rec.snr_db);
    rec.noise = std::move(mix.scaled_noise);

    // quantize components to the 16-bit grid first, then form the mixture by
    // exact addition so Eq-style additivity holds bit-exactly on disk too
    quantize_wave(rec.clean);
    quantize_wave(rec.reverberated_clean);
    quantize_wave(rec.noise);
    rec.mixture = rec.reverberated_clean;
    for (std::size_t i = 0; i < rec.mixture.size(); ++i) {
      rec.mixture.samples[i] += rec.noise.samples[i];
      require(std::abs(rec.mixture.samples[i]) < 1.0,
              rec.id, ": mixture clips at sample ", i,
              "; lower target_dbov or SNR range");
    }

    CorpusIndexRow row;
    row.id = rec.id;
    row.clean_wav = rec.id + "_clean.wav";
    row.revclean_wav = rec.id + "_revclean.wav";
    row.noise_wav = rec.id + "_noise.wav";
    row.mix_wav = rec.id + "_mix.wav";
    row.snr_db = rec.snr_db;
    row.reverb = reverb_flag[idx];
    row.rir_id = rec.rir_id.value_or("-");
    row.level_dbov = rec.level_dbov;
    row.rir_spec = rir_spec;

    dsp::write_wav((fs::path(out_dir) / row.clean_wav).string(), rec.clean);
    dsp::write_wav((fs::path(out_dir) / row.revclean_wav).string(),
                   rec.reverberated_clean);
    dsp::write_wav((fs::path(out_dir) / row.noise_wav).string(), rec.noise);
    dsp::write_wav((fs::path(out_dir) / row.mix_wav).string(), rec.mixture);

    records[idx] = std::move(rec);
    rows[idx] = std::move(row);
  }

  write_corpus_index((fs::path(out_dir) / "index.tsv").string(), rows);
  return records;
}

void write_corpus_index(const std::string& index_path,
                        const std::vector<CorpusIndexRow>& rows) {
  std::ofstream os(index_path, std::ios::binary);
  require(os.good(), "cannot open for writing: ", index_path);
  os << "id\tclean\trevclean\tnoise\tmix\tsnr_db\treverb\trir_id\t"
        "level_dbov\trir_spec\n";
  for (const auto& r : rows) {
    os << r.id << '\t' << r.clean_wav << '\t' << r.revclean_wav << '\t'
       << r.noise_wav << '\t' << r.mix_wav << '\t' << format_double(r.snr_db)
       << '\t' << (r.reverb ? 1 : 0) << '\t' << r.rir_id << '\t'
       << format_double(r.level_dbov) << '\t' << r.rir_spec << '\n';
  }
  os.close();
  require(os.good(), "write failed: ", index_path);
}

std::vector<CorpusIndexRow> read_corpus_index(const std::string& index_path) {
  std::ifstream is(index_path);
  require(is.good(), "cannot open corpus index: ", index_path);
  std::vector<CorpusIndexRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = split(line, '\t');
    require(f.size() == 10, index_path, ": malformed index row: ", line);
    CorpusIndexRow r;
    r.id = f[0];
    r.clean_wav = f[1];
    r.revclean_wav = f[2];
    r.noise_wav = f[3];
    r.mix_wav = f[4];
    r.snr_db = parse_double(f[5]);
    r.reverb = f[6] == "1";
    r.rir_id = f[7];
    r.level_dbov = parse_double(f[8]);
    r.rir_spec = f[9];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<UtteranceRecord> load_records(const std::string& index_path) {
  const auto rows = read_corpus_index(index_path);
  const fs::path dir = fs::path(index_path).parent_path();
  std::vector<UtteranceRecord> records;
  records.reserve(rows.size());
  for (const auto& row : rows) {
    UtteranceRecord rec;
    rec.id = row.id;
    rec.clean = dsp::read_wav((dir / row.clean_wav).string());
    rec.reverberated_clean = dsp::read_wav((dir / row.revclean_wav).string());
    rec.noise = dsp::read_wav((dir / row.noise_wav).string());
    rec.mixture = dsp::read_wav((dir / row.mix_wav).string());
    rec.snr_db = row.snr_db;
    if (row.rir_id != "-") rec.rir_id = row.rir_id;
    rec.level_dbov = row.level_dbov;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace dnskit::synth
