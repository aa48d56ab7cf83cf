// include/easr/dsp.h

// Copyright 2026 The easraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Audio I/O and the signal-level transforms: resampling, speed perturbation,
// the log-mel front end and time/frequency masking on top of it.

#ifndef EASR_DSP_H_
#define EASR_DSP_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace easr {

inline constexpr int kTargetSampleRate = 16000;

/// Mono waveform, samples nominally in [-1, 1].
struct AudioClip {
  std::vector<float> samples;
  int sample_rate = kTargetSampleRate;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

struct WavInfo {
  int sample_rate = 0;
  int channels = 0;
  int bits_per_sample = 0;
  bool is_float = false;
  std::size_t frames = 0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(frames) / sample_rate : 0.0;
  }
};

// RIFF WAV, PCM16 or IEEE float (32/64 bit), one or two channels. Stereo is
// downmixed by averaging. All readers throw DataError naming the source.
WavInfo probe_wav(const std::filesystem::path& path);
AudioClip read_wav(const std::filesystem::path& path);
AudioClip decode_wav(std::string_view bytes, const std::string& name);

/// Mono PCM16 encoding. Samples are clipped to [-1, 1).
std::string encode_wav(const AudioClip& clip);
void write_wav(const AudioClip& clip, const std::filesystem::path& path);

/// Band-limited rational-ratio resampling with a Kaiser-windowed sinc
/// (beta 8.6, 32 taps per phase at the lower of the two rates). Output
/// length is round(len * target / source). Identity when rates match.
AudioClip resample(const AudioClip& clip, int target_rate);

/// Core of resample(): rate change by up/down (reduced or not), producing
/// exactly out_len samples.
std::vector<float> resample_ratio(std::span<const float> in, std::int64_t up,
                                  std::int64_t down, std::size_t out_len);

inline constexpr double kMinSpeedFactor = 0.5;
inline constexpr double kMaxSpeedFactor = 2.0;

/// Tempo+pitch change: resamples by 1/factor and keeps the rate label.
/// Output length is round(len / factor). factor must lie in [0.5, 2].
AudioClip speed_perturb(const AudioClip& clip, double factor);

// ---------------------------------------------------------------------------
// Log-mel front end.

inline const double kLogFloor = std::log(1e-10);

struct MelSpectrogram {
  std::size_t n_frames = 0;
  std::size_t n_mels = 0;
  double win_s = 0.0;
  double hop_s = 0.0;
  std::vector<float> values;  // row-major [n_frames x n_mels]

  float at(std::size_t frame, std::size_t mel) const {
    return values[frame * n_mels + mel];
  }
  float& at(std::size_t frame, std::size_t mel) {
    return values[frame * n_mels + mel];
  }
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// 1 + floor((len - win) / hop), or 0 when len < win.
std::size_t mel_frame_count(std::size_t len, std::size_t win, std::size_t hop);

/// Smallest power of two >= win.
std::size_t fft_size_for(std::size_t win);

/// Triangular HTK-scale filters spanning 0 Hz to Nyquist, row-major
/// [n_mels x (n_fft/2 + 1)], unnormalized (peak weight 1).
std::vector<double> mel_filterbank(std::size_t n_mels, std::size_t n_fft,
                                   int sample_rate);

/// Center frequency in Hz of each mel filter.
std::vector<double> mel_center_frequencies(std::size_t n_mels,
                                           int sample_rate);

/// Hann-windowed magnitude STFT (no padding), mel filterbank, natural log
/// with floor ln(1e-10).
MelSpectrogram log_mel(const AudioClip& clip, std::size_t n_mels = 80,
                       double win_s = 0.025, double hop_s = 0.010);

// ---------------------------------------------------------------------------
// Masking.

enum class MaskValue { kLogFloor, kUtteranceMean };

struct MaskPolicy {
  int freq_mask_param = 15;  // F: max width in mel bins
  int n_freq_masks = 2;
  int time_mask_param = 50;  // T: max width in frames
  int n_time_masks = 2;
  MaskValue mask_value = MaskValue::kLogFloor;
  std::uint64_t seed = 0;
};

struct MaskRegion {
  enum class Axis { kFrequency, kTime };
  Axis axis;
  std::size_t start;
  std::size_t width;  // may be zero
};

/// Replaces n_freq_masks frequency bands and n_time_masks time spans with
/// the mask value. Per mask the width is uniform on [0, param] and the start
/// uniform over valid positions. Cells outside the regions are untouched.
/// Throws std::invalid_argument if F > n_mels or a count is negative.
MelSpectrogram spec_augment(const MelSpectrogram& spec,
                            const MaskPolicy& policy,
                            std::vector<MaskRegion>* regions = nullptr);

/// Waveform approximation for audio-only trainers: zeroes the time spans
/// the policy would mask on a spectrogram with the given hop. Frequency
/// masks are ignored.
AudioClip mask_waveform_time(const AudioClip& clip, const MaskPolicy& policy,
                             double hop_s = 0.010, double win_s = 0.025);

// ---------------------------------------------------------------------------
// Feature files: 16-byte little-endian header (magic "EAFT", n_frames,
// n_mels, flags; each u32) then row-major float32 values.

inline constexpr std::uint32_t kFeatureFlagMasked = 1u;

void write_features(const MelSpectrogram& spec,
                    const std::filesystem::path& path, std::uint32_t flags);
MelSpectrogram read_features(const std::filesystem::path& path,
                             std::uint32_t* flags = nullptr);

}  // namespace easr

#endif  // EASR_DSP_H_
