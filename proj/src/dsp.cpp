// src/dsp.cpp

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

#include "easr/dsp.h"

#include <algorithm>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "easr/errors.h"
#include "easr/util.h"

namespace easr {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct ParsedWav {
  WavInfo info;
  const unsigned char* data = nullptr;  // first sample byte
};

// Walks the RIFF chunk list. Sample data is not copied.
ParsedWav parse_wav(std::string_view bytes, const std::string& name) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 ||
      std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw DataError(name + ": malformed WAV header (missing RIFF/WAVE)");
  }
  ParsedWav out;
  bool have_fmt = false;
  std::uint16_t format = 0;
  std::uint16_t block_align = 0;
  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const unsigned char* chunk = p + pos;
    const std::uint32_t size = get_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + 16 > n) {
        throw DataError(name + ": malformed WAV header (short fmt chunk)");
      }
      format = get_u16(p + body);
      out.info.channels = get_u16(p + body + 2);
      out.info.sample_rate = static_cast<int>(get_u32(p + body + 4));
      block_align = get_u16(p + body + 12);
      out.info.bits_per_sample = get_u16(p + body + 14);
      if (format == kFormatExtensible) {
        if (size < 40 || body + 40 > n) {
          throw DataError(name + ": malformed WAV header (short extensible fmt)");
        }
        format = get_u16(p + body + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) {
        throw DataError(name + ": malformed WAV header (data before fmt)");
      }
      std::size_t avail = std::min<std::size_t>(size, n - body);
      if (format != kFormatPcm && format != kFormatFloat) {
        throw DataError(name + ": unsupported WAV codec " + std::to_string(format));
      }
      const int bits = out.info.bits_per_sample;
      if (!((format == kFormatPcm && bits == 16) ||
            (format == kFormatFloat && (bits == 32 || bits == 64)))) {
        throw DataError(name + ": unsupported WAV sample format (" +
                        std::to_string(bits) + " bit)");
      }
      if (out.info.channels < 1 || out.info.channels > 2) {
        throw DataError(name + ": unsupported channel count " +
                        std::to_string(out.info.channels));
      }
      if (out.info.sample_rate <= 0) {
        throw DataError(name + ": malformed WAV header (sample rate 0)");
      }
      const std::size_t frame_bytes =
          static_cast<std::size_t>(out.info.channels) * (bits / 8);
      if (block_align != 0 && block_align != frame_bytes) {
        throw DataError(name + ": malformed WAV header (block align)");
      }
      out.info.is_float = format == kFormatFloat;
      out.info.frames = avail / frame_bytes;
      out.data = p + body;
      if (out.info.frames == 0) throw DataError(name + ": zero-length audio");
      return out;
    }
    pos = body + size + (size & 1);
  }
  throw DataError(have_fmt ? name + ": malformed WAV (no data chunk)"
                           : name + ": malformed WAV header (no fmt chunk)");
}

AudioClip decode_parsed(const ParsedWav& w) {
  AudioClip clip;
  clip.sample_rate = w.info.sample_rate;
  clip.samples.resize(w.info.frames);
  const int ch = w.info.channels;
  const int bytes = w.info.bits_per_sample / 8;
  for (std::size_t f = 0; f < w.info.frames; ++f) {
    double acc = 0.0;
    for (int c = 0; c < ch; ++c) {
      const unsigned char* s = w.data + (f * ch + c) * bytes;
      double v;
      if (!w.info.is_float) {
        v = static_cast<std::int16_t>(get_u16(s)) / 32768.0;
      } else if (bytes == 4) {
        std::uint32_t bits = get_u32(s);
        float x;
        std::memcpy(&x, &bits, 4);
        v = x;
      } else {
        std::uint64_t bits = static_cast<std::uint64_t>(get_u32(s)) |
                             (static_cast<std::uint64_t>(get_u32(s + 4)) << 32);
        double x;
        std::memcpy(&x, &bits, 8);
        v = x;
      }
      acc += v;
    }
    clip.samples[f] = static_cast<float>(acc / ch);
  }
  return clip;
}

}  // namespace

WavInfo probe_wav(const std::filesystem::path& path) {
  // Headers sit in the first few KiB for every writer we care about, but
  // odd files can carry large LIST chunks, so fall back to a full read.
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open audio file: " + path.string());
  std::string head(65536, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  const auto total = std::filesystem::file_size(path);
  try {
    ParsedWav w = parse_wav(head, path.string());
    const std::size_t data_offset =
        static_cast<std::size_t>(w.data - reinterpret_cast<const unsigned char*>(head.data()));
    // Recount frames from the real file size and the declared chunk size.
    const std::uint32_t declared = get_u32(w.data - 4);
    const std::size_t avail =
        std::min<std::size_t>(declared, static_cast<std::size_t>(total) - data_offset);
    w.info.frames = avail / (static_cast<std::size_t>(w.info.channels) *
                             (w.info.bits_per_sample / 8));
    if (w.info.frames == 0) throw DataError(path.string() + ": zero-length audio");
    return w.info;
  } catch (const DataError&) {
    if (head.size() == total) throw;
  }
  return parse_wav(read_file(path), path.string()).info;
}

AudioClip decode_wav(std::string_view bytes, const std::string& name) {
  return decode_parsed(parse_wav(bytes, name));
}

AudioClip read_wav(const std::filesystem::path& path) {
  std::string bytes = read_file(path);
  return decode_wav(bytes, path.string());
}

std::string encode_wav(const AudioClip& clip) {
  if (clip.sample_rate <= 0) throw std::invalid_argument("encode_wav: bad sample rate");
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (float s : clip.samples) {
    double v = std::isfinite(s) ? std::lround(static_cast<double>(s) * 32768.0) : 0.0;
    v = std::clamp(v, -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  return out;
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path) {
  atomic_write_file(path, encode_wav(clip));
}

// ---------------------------------------------------------------------------
// Resampling.

namespace {

constexpr double kKaiserBeta = 8.6;
constexpr double kTapsPerPhase = 32.0;
// Passband edge as a fraction of the lower Nyquist frequency. Leaves room
// for the transition band so images and aliases land in the stopband.
constexpr double kCutoff = 0.9;

double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

class PolyphaseKernel {
 public:
  PolyphaseKernel(std::int64_t up, std::int64_t down) : up_(up) {
    const double scale = std::min(1.0, static_cast<double>(up) / down);
    const double half_width = kTapsPerPhase / 2.0 / scale;  // input samples
    half_ = static_cast<std::int64_t>(std::ceil(half_width));
    taps_ = static_cast<std::size_t>(2 * half_);
    const double fc = scale * kCutoff;
    const double i0_beta = bessel_i0(kKaiserBeta);
    coeffs_.resize(static_cast<std::size_t>(up) * taps_);
    for (std::int64_t p = 0; p < up; ++p) {
      const double frac = static_cast<double>(p) / up;
      double* row = &coeffs_[static_cast<std::size_t>(p) * taps_];
      double sum = 0.0;
      for (std::size_t t = 0; t < taps_; ++t) {
        // Tap t reads input sample base + (t - half_ + 1).
        const double tau = static_cast<double>(static_cast<std::int64_t>(t) - half_ + 1) - frac;
        const double u = tau / half_width;
        double w = 0.0;
        if (std::abs(u) < 1.0) {
          w = bessel_i0(kKaiserBeta * std::sqrt(1.0 - u * u)) / i0_beta;
        }
        row[t] = fc * sinc(fc * tau) * w;
        sum += row[t];
      }
      // Unity DC gain per phase.
      if (sum != 0.0) {
        for (std::size_t t = 0; t < taps_; ++t) row[t] /= sum;
      }
    }
  }

  std::int64_t half() const { return half_; }
  std::size_t taps() const { return taps_; }
  const double* phase(std::int64_t p) const {
    return &coeffs_[static_cast<std::size_t>(p) * taps_];
  }

 private:
  std::int64_t up_;
  std::int64_t half_ = 0;
  std::size_t taps_ = 0;
  std::vector<double> coeffs_;
};

}  // namespace

std::vector<float> resample_ratio(std::span<const float> in, std::int64_t up,
                                  std::int64_t down, std::size_t out_len) {
  if (up <= 0 || down <= 0) throw std::invalid_argument("resample_ratio: bad ratio");
  const std::int64_t g = std::gcd(up, down);
  up /= g;
  down /= g;
  std::vector<float> out(out_len, 0.0f);
  if (up == down) {
    std::copy_n(in.begin(), std::min(in.size(), out_len), out.begin());
    return out;
  }
  const PolyphaseKernel kernel(up, down);
  const auto n_in = static_cast<std::int64_t>(in.size());
  for (std::size_t n = 0; n < out_len; ++n) {
    const std::int64_t num = static_cast<std::int64_t>(n) * down;
    const std::int64_t base = num / up;
    const std::int64_t ph = num % up;
    const double* h = kernel.phase(ph);
    const std::int64_t first = base - kernel.half() + 1;
    double acc = 0.0;
    const std::int64_t t_lo = std::max<std::int64_t>(0, -first);
    const std::int64_t t_hi =
        std::min<std::int64_t>(static_cast<std::int64_t>(kernel.taps()), n_in - first);
    for (std::int64_t t = t_lo; t < t_hi; ++t) acc += h[t] * in[first + t];
    out[n] = static_cast<float>(acc);
  }
  return out;
}

AudioClip resample(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0) throw std::invalid_argument("resample: target rate must be > 0");
  if (clip.sample_rate <= 0) throw std::invalid_argument("resample: source rate must be > 0");
  if (clip.sample_rate == target_rate) return clip;
  const std::int64_t g = std::gcd<std::int64_t>(target_rate, clip.sample_rate);
  const std::int64_t up = target_rate / g;
  const std::int64_t down = clip.sample_rate / g;
  const auto len = static_cast<std::int64_t>(clip.samples.size());
  const auto out_len = static_cast<std::size_t>((2 * len * up + down) / (2 * down));
  AudioClip out;
  out.sample_rate = target_rate;
  out.samples = resample_ratio(clip.samples, up, down, out_len);
  return out;
}

AudioClip speed_perturb(const AudioClip& clip, double factor) {
  if (!(factor >= kMinSpeedFactor && factor <= kMaxSpeedFactor)) {
    throw std::invalid_argument("speed_perturb: factor must lie in [0.5, 2.0]");
  }
  if (factor == 1.0) return clip;
  // factor ~= down/up with a denominator of at most 1000.
  constexpr std::int64_t kDen = 1000;
  const std::int64_t down = std::llround(factor * kDen);
  const std::int64_t up = kDen;
  const auto out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(clip.samples.size()) / factor));
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples = resample_ratio(clip.samples, up, down, out_len);
  return out;
}

// ---------------------------------------------------------------------------
// Log-mel.

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::size_t mel_frame_count(std::size_t len, std::size_t win, std::size_t hop) {
  if (hop == 0) throw std::invalid_argument("mel_frame_count: hop is 0");
  if (len < win || win == 0) return 0;
  return 1 + (len - win) / hop;
}

std::size_t fft_size_for(std::size_t win) {
  std::size_t n = 1;
  while (n < win) n <<= 1;
  return n;
}

namespace {

std::vector<double> mel_edges_hz(std::size_t n_mels, int sample_rate) {
  const double lo = hz_to_mel(0.0);
  const double hi = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / (n_mels + 1));
  }
  return edges;
}

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

}  // namespace

std::vector<double> mel_center_frequencies(std::size_t n_mels, int sample_rate) {
  auto edges = mel_edges_hz(n_mels, sample_rate);
  return {edges.begin() + 1, edges.end() - 1};
}

std::vector<double> mel_filterbank(std::size_t n_mels, std::size_t n_fft,
                                   int sample_rate) {
  const std::size_t n_bins = n_fft / 2 + 1;
  const auto edges = mel_edges_hz(n_mels, sample_rate);
  std::vector<double> fb(n_mels * n_bins, 0.0);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
      double w = 0.0;
      if (f > left && f <= center) {
        w = (f - left) / (center - left);
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      fb[m * n_bins + k] = w;
    }
  }
  return fb;
}

MelSpectrogram log_mel(const AudioClip& clip, std::size_t n_mels, double win_s,
                       double hop_s) {
  if (n_mels == 0) throw std::invalid_argument("log_mel: n_mels must be > 0");
  if (clip.sample_rate <= 0) throw std::invalid_argument("log_mel: bad sample rate");
  const auto win = static_cast<std::size_t>(std::llround(win_s * clip.sample_rate));
  const auto hop = static_cast<std::size_t>(std::llround(hop_s * clip.sample_rate));
  if (win == 0 || hop == 0) throw std::invalid_argument("log_mel: window/hop too short");
  if (clip.samples.size() < win) {
    throw std::invalid_argument("log_mel: clip shorter than one window");
  }
  const std::size_t n_fft = fft_size_for(win);
  const std::size_t n_bins = n_fft / 2 + 1;
  const auto fb = mel_filterbank(n_mels, n_fft, clip.sample_rate);

  std::vector<double> window(win);
  for (std::size_t i = 0; i < win; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                      static_cast<double>(win));
  }

  MelSpectrogram spec;
  spec.n_frames = mel_frame_count(clip.samples.size(), win, hop);
  spec.n_mels = n_mels;
  spec.win_s = win_s;
  spec.hop_s = hop_s;
  spec.values.resize(spec.n_frames * n_mels);

  std::vector<std::complex<double>> buf(n_fft);
  std::vector<double> mag(n_bins);
  for (std::size_t t = 0; t < spec.n_frames; ++t) {
    const std::size_t off = t * hop;
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
    for (std::size_t i = 0; i < win; ++i) buf[i] = clip.samples[off + i] * window[i];
    fft(buf);
    for (std::size_t k = 0; k < n_bins; ++k) mag[k] = std::abs(buf[k]);
    for (std::size_t m = 0; m < n_mels; ++m) {
      const double* w = &fb[m * n_bins];
      double e = 0.0;
      for (std::size_t k = 0; k < n_bins; ++k) e += w[k] * mag[k];
      spec.at(t, m) = static_cast<float>(std::max(std::log(std::max(e, 1e-10)), kLogFloor));
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Masking.

namespace {

void check_policy(const MaskPolicy& policy) {
  if (policy.freq_mask_param < 0 || policy.time_mask_param < 0 ||
      policy.n_freq_masks < 0 || policy.n_time_masks < 0) {
    throw std::invalid_argument("mask policy: counts and widths must be >= 0");
  }
}

std::vector<MaskRegion> draw_regions(const MaskPolicy& policy, std::size_t n_frames,
                                     std::size_t n_mels) {
  Rng rng(policy.seed);
  std::vector<MaskRegion> regions;
  for (int i = 0; i < policy.n_freq_masks; ++i) {
    const auto f = static_cast<std::size_t>(rng.uniform_int(0, policy.freq_mask_param));
    const auto f0 = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(n_mels - f)));
    regions.push_back({MaskRegion::Axis::kFrequency, f0, f});
  }
  const auto t_max = static_cast<std::int64_t>(
      std::min<std::size_t>(static_cast<std::size_t>(policy.time_mask_param), n_frames));
  for (int i = 0; i < policy.n_time_masks; ++i) {
    const auto t = static_cast<std::size_t>(rng.uniform_int(0, t_max));
    const auto t0 = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(n_frames - t)));
    regions.push_back({MaskRegion::Axis::kTime, t0, t});
  }
  return regions;
}

}  // namespace

MelSpectrogram spec_augment(const MelSpectrogram& spec, const MaskPolicy& policy,
                            std::vector<MaskRegion>* regions) {
  check_policy(policy);
  if (static_cast<std::size_t>(policy.freq_mask_param) > spec.n_mels &&
      policy.n_freq_masks > 0) {
    throw std::invalid_argument("mask policy: F exceeds n_mels");
  }
  auto drawn = draw_regions(policy, spec.n_frames, spec.n_mels);
  MelSpectrogram out = spec;
  float value = static_cast<float>(kLogFloor);
  if (policy.mask_value == MaskValue::kUtteranceMean && !spec.values.empty()) {
    const double sum = std::accumulate(spec.values.begin(), spec.values.end(), 0.0);
    value = static_cast<float>(sum / static_cast<double>(spec.values.size()));
  }
  for (const auto& r : drawn) {
    if (r.axis == MaskRegion::Axis::kFrequency) {
      for (std::size_t t = 0; t < out.n_frames; ++t) {
        for (std::size_t m = r.start; m < r.start + r.width; ++m) out.at(t, m) = value;
      }
    } else {
      for (std::size_t t = r.start; t < r.start + r.width; ++t) {
        for (std::size_t m = 0; m < out.n_mels; ++m) out.at(t, m) = value;
      }
    }
  }
  if (regions) *regions = std::move(drawn);
  return out;
}

AudioClip mask_waveform_time(const AudioClip& clip, const MaskPolicy& policy,
                             double hop_s, double win_s) {
  check_policy(policy);
  const auto hop = static_cast<std::size_t>(std::llround(hop_s * clip.sample_rate));
  const auto win = static_cast<std::size_t>(std::llround(win_s * clip.sample_rate));
  const std::size_t n_frames = mel_frame_count(clip.samples.size(), win, hop);
  MaskPolicy time_only = policy;
  time_only.n_freq_masks = 0;
  AudioClip out = clip;
  for (const auto& r : draw_regions(time_only, n_frames, 1)) {
    if (r.width == 0) continue;
    const std::size_t s0 = r.start * hop;
    const std::size_t s1 = std::min(out.samples.size(), (r.start + r.width - 1) * hop + win);
    std::fill(out.samples.begin() + static_cast<std::ptrdiff_t>(s0),
              out.samples.begin() + static_cast<std::ptrdiff_t>(s1), 0.0f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Feature files.

void write_features(const MelSpectrogram& spec, const std::filesystem::path& path,
                    std::uint32_t flags) {
  std::string out;
  out.reserve(16 + spec.values.size() * 4);
  out += "EAFT";
  put_u32(out, static_cast<std::uint32_t>(spec.n_frames));
  put_u32(out, static_cast<std::uint32_t>(spec.n_mels));
  put_u32(out, flags);
  for (float v : spec.values) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
  }
  atomic_write_file(path, out);
}

MelSpectrogram read_features(const std::filesystem::path& path, std::uint32_t* flags) {
  const std::string bytes = read_file(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 16 || std::memcmp(p, "EAFT", 4) != 0) {
    throw DataError(path.string() + ": not a feature file");
  }
  MelSpectrogram spec;
  spec.n_frames = get_u32(p + 4);
  spec.n_mels = get_u32(p + 8);
  if (flags) *flags = get_u32(p + 12);
  const std::size_t count = spec.n_frames * spec.n_mels;
  if (bytes.size() != 16 + count * 4) {
    throw DataError(path.string() + ": feature file size does not match header");
  }
  spec.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t bits = get_u32(p + 16 + 4 * i);
    std::memcpy(&spec.values[i], &bits, 4);
  }
  return spec;
}

}  // namespace easr
