#pragma once

#include "dnskit/dsp/stft.hpp"

namespace dnskit::synth {

// Active speech level, approximated: 32 ms non-overlapping frames, frames
// within 35 dB of the peak frame count as active, RMS over active frames.
// 0 dBov corresponds to RMS 1.0 on the [-1,1] sample scale.
struct ActiveLevel {
  double level_dbov = 0.0;
  double active_power = 0.0;  // linear mean power over active frames
  int active_frames = 0;
  int total_frames = 0;
};

ActiveLevel measure_active_level(const dsp::Waveform& w);

// Pure scaling so the measured active level hits target_dbov.
// All-silent input is an error (the scale is undefined).
dsp::Waveform normalize_level(const dsp::Waveform& w, double target_dbov);

// Scales noise so active-speech power over full noise power matches snr_db,
// then mixes sample-exactly: mixture = speech + scaled_noise.
struct MixResult {
  dsp::Waveform mixture;
  dsp::Waveform scaled_noise;
  double noise_scale = 0.0;
};

MixResult mix_at_snr(const dsp::Waveform& speech, const dsp::Waveform& noise,
                     double snr_db);

// Mean power over all samples.
double full_power(const dsp::Waveform& w);

// Measured SNR (dB) of active speech power vs full noise power.
double measure_snr_db(const dsp::Waveform& speech, const dsp::Waveform& noise);

}  // namespace dnskit::synth
