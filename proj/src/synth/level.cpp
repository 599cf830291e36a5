#include "dnskit/synth/level.hpp"

#include <cmath>

namespace dnskit::synth {

namespace {
constexpr int kFrameSamples = 512;  // 32 ms at 16 kHz
constexpr double kActiveRangeDb = 35.0;
constexpr double kSilencePower = 1e-12;
}  // namespace

ActiveLevel measure_active_level(const dsp::Waveform& w) {
  require(!w.samples.empty(), "cannot measure level of an empty signal");
  const std::size_t n = w.size();
  std::vector<double> frame_power;
  for (std::size_t off = 0; off < n; off += kFrameSamples) {
    const std::size_t end = std::min(n, off + kFrameSamples);
    double e = 0.0;
    for (std::size_t i = off; i < end; ++i) e += w.samples[i] * w.samples[i];
    frame_power.push_back(e / static_cast<double>(end - off));
  }
  double peak = 0.0;
  for (const double p : frame_power) peak = std::max(peak, p);
  require(peak > kSilencePower, "all-silent signal: active level undefined");

  const double thresh = peak * std::pow(10.0, -kActiveRangeDb / 10.0);
  double sum = 0.0;
  int active = 0;
  for (const double p : frame_power) {
    if (p >= thresh) {
      sum += p;
      ++active;
    }
  }
  ActiveLevel out;
  out.active_power = sum / active;
  out.level_dbov = 10.0 * std::log10(out.active_power);
  out.active_frames = active;
  out.total_frames = static_cast<int>(frame_power.size());
  return out;
}

dsp::Waveform normalize_level(const dsp::Waveform& w, double target_dbov) {
  const ActiveLevel lvl = measure_active_level(w);
  const double scale = std::pow(10.0, (target_dbov - lvl.level_dbov) / 20.0);
  dsp::Waveform out = w;
  for (double& x : out.samples) x *= scale;
  return out;
}

double full_power(const dsp::Waveform& w) {
  require(!w.samples.empty(), "empty signal");
  double e = 0.0;
  for (const double x : w.samples) e += x * x;
  return e / static_cast<double>(w.size());
}

MixResult mix_at_snr(const dsp::Waveform& speech, const dsp::Waveform& noise,
                     double snr_db) {
  require(speech.size() == noise.size(), "mix_at_snr: length mismatch (",
          speech.size(), " vs ", noise.size(), ")");
  const ActiveLevel sp = measure_active_level(speech);
  const double pn = full_power(noise);
  require(pn > kSilencePower, "mix_at_snr: zero-power noise");

  MixResult out;
  out.noise_scale =
      std::sqrt(sp.active_power / (pn * std::pow(10.0, snr_db / 10.0)));
  out.scaled_noise = noise;
  for (double& x : out.scaled_noise.samples) x *= out.noise_scale;
  out.mixture = speech;
  for (std::size_t i = 0; i < out.mixture.size(); ++i) {
    out.mixture.samples[i] += out.scaled_noise.samples[i];
  }
  return out;
}

double measure_snr_db(const dsp::Waveform& speech, const dsp::Waveform& noise) {
  const ActiveLevel sp = measure_active_level(speech);
  const double pn = full_power(noise);
  require(pn > kSilencePower, "zero-power noise");
  return 10.0 * std::log10(sp.active_power / pn);
}

}  // namespace dnskit::synth
