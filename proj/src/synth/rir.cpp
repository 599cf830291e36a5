#include "dnskit/synth/rir.hpp"

#include <cmath>

namespace dnskit::synth {

namespace {

double dist3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

void RoomSpec::validate() const {
  require(length > 0 && width > 0 && height > 0,
          "room dimensions must be positive");
  require(absorption > 0.0 && absorption <= 1.0,
          "absorption must be in (0,1], got ", absorption);
  const std::array<double, 3> dims{length, width, height};
  for (int a = 0; a < 3; ++a) {
    require(source_pos[a] > 0 && source_pos[a] < dims[a],
            "source must be strictly inside the room");
    require(mic_pos[a] > 0 && mic_pos[a] < dims[a],
            "microphone must be strictly inside the room");
  }
  require(max_image_order >= 0, "max_image_order must be >= 0");
  require(source_mic_distance() > 1e-6,
          "degenerate geometry: source and microphone coincide");
}

double RoomSpec::source_mic_distance() const {
  return dist3(source_pos, mic_pos);
}

int direct_path_delay(const RoomSpec& room, int sample_rate, double c) {
  return static_cast<int>(
      std::lround(room.source_mic_distance() / c * sample_rate));
}

dsp::Waveform simulate_rir(const RoomSpec& room, int sample_rate, double c) {
  room.validate();
  const double beta = std::sqrt(1.0 - room.absorption);
  const std::array<double, 3> dims{room.length, room.width, room.height};
  const int order = room.max_image_order;
  // bounces along one axis are at least 2|m|-1, so |m| beyond this cannot
  // satisfy the order bound
  const int reach = (order + 1) / 2 + 1;

  std::vector<double> taps;
  auto deposit = [&](double delay_samples, double amp) {
    const std::size_t idx =
        static_cast<std::size_t>(std::lround(delay_samples));
    if (taps.size() <= idx) taps.resize(idx + 1, 0.0);
    taps[idx] += amp;
  };

  for (int px = 0; px <= 1; ++px)
    for (int py = 0; py <= 1; ++py)
      for (int pz = 0; pz <= 1; ++pz)
        for (int mx = -reach; mx <= reach; ++mx)
          for (int my = -reach; my <= reach; ++my)
            for (int mz = -reach; mz <= reach; ++mz) {
              const int p[3] = {px, py, pz};
              const int m[3] = {mx, my, mz};
              int bounces = 0;
              std::array<double, 3> img{};
              for (int a = 0; a < 3; ++a) {
                bounces += std::abs(m[a] - p[a]) + std::abs(m[a]);
                img[a] = 2.0 * m[a] * dims[a] +
                         (p[a] == 0 ? room.source_pos[a] : -room.source_pos[a]);
              }
              if (bounces > order) continue;
              const double d = std::max(dist3(img, room.mic_pos), 1e-6);
              const double amp = std::pow(beta, bounces) / d;
              deposit(d / c * sample_rate, amp);
            }

  dsp::Waveform rir;
  rir.sample_rate = sample_rate;
  rir.samples = std::move(taps);
  return rir;
}

dsp::Waveform align_rir(const dsp::Waveform& rir, int direct_delay,
                        double direct_amplitude) {
  require(direct_delay >= 0 &&
              static_cast<std::size_t>(direct_delay) < rir.size(),
          "direct delay outside RIR");
  require(direct_amplitude > 0, "direct amplitude must be positive");
  dsp::Waveform out;
  out.sample_rate = rir.sample_rate;
  out.samples.assign(rir.samples.begin() + direct_delay, rir.samples.end());
  for (double& x : out.samples) x /= direct_amplitude;
  return out;
}

dsp::Waveform reverberate(const dsp::Waveform& speech,
                          const dsp::Waveform& rir) {
  require(!speech.samples.empty(), "empty speech input");
  require(!rir.samples.empty(), "empty RIR");
  dsp::Waveform out;
  out.sample_rate = speech.sample_rate;
  out.samples.assign(speech.size(), 0.0);
  const std::size_t n = speech.size();
  for (std::size_t j = 0; j < rir.size(); ++j) {
    const double h = rir.samples[j];
    if (h == 0.0) continue;
    const std::size_t limit = n - std::min(n, j);
    for (std::size_t i = 0; i < limit; ++i) {
      out.samples[i + j] += h * speech.samples[i];
    }
  }
  return out;
}

}  // namespace dnskit::synth
