#include "ambisphere/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace ambisphere {

namespace {

constexpr uint64_t kVisualSalt = 0x76697375616C3031ULL;  // "visual01"
constexpr uint64_t kAudioSalt = 0x617564696F303031ULL;   // "audio001"

constexpr int kStages = 5;
constexpr int kStageChannels[kStages + 1] = {3, 16, 32, 64, 128, 512};
constexpr int kInputSize = 224;

// planar float image, [channel][y][x]
struct Tensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    Tensor(int c, int h, int w)
        : channels(c), height(h), width(w),
          data(static_cast<size_t>(c) * h * w, 0.0f) {}

    float* plane(int c) { return data.data() + static_cast<size_t>(c) * height * width; }
    const float* plane(int c) const {
        return data.data() + static_cast<size_t>(c) * height * width;
    }
};

Tensor resize_bilinear_224(const Image& img) {
    Tensor out(3, kInputSize, kInputSize);
    const double sx = static_cast<double>(img.width) / kInputSize;
    const double sy = static_cast<double>(img.height) / kInputSize;
    for (int y = 0; y < kInputSize; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const float wy = static_cast<float>(fy - y0);
        for (int x = 0; x < kInputSize; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const float wx = static_cast<float>(fx - x0);
            for (int c = 0; c < 3; ++c) {
                const float v00 = img.rgb[img.offset(x0, y0) + c];
                const float v10 = img.rgb[img.offset(x1, y0) + c];
                const float v01 = img.rgb[img.offset(x0, y1) + c];
                const float v11 = img.rgb[img.offset(x1, y1) + c];
                const float top = v00 + wx * (v10 - v00);
                const float bot = v01 + wx * (v11 - v01);
                out.plane(c)[static_cast<size_t>(y) * kInputSize + x] =
                    (top + wy * (bot - top)) / 255.0f;
            }
        }
    }
    return out;
}

// 3x3, stride 2, zero padding 1, then ReLU. Halves even spatial dims.
Tensor conv3x3_s2_relu(const Tensor& in, const std::vector<float>& w, int out_channels) {
    const int oh = in.height / 2;
    const int ow = in.width / 2;
    Tensor out(out_channels, oh, ow);
    const size_t kplane = static_cast<size_t>(in.channels) * 9;
    for (int k = 0; k < out_channels; ++k) {
        float* dst = out.plane(k);
        const float* wk = w.data() + static_cast<size_t>(k) * kplane;
        for (int c = 0; c < in.channels; ++c) {
            const float* src = in.plane(c);
            const float* wc = wk + static_cast<size_t>(c) * 9;
            for (int oy = 0; oy < oh; ++oy) {
                const int cy = 2 * oy;
                for (int ky = 0; ky < 3; ++ky) {
                    const int iy = cy + ky - 1;
                    if (iy < 0 || iy >= in.height) continue;
                    const float* row = src + static_cast<size_t>(iy) * in.width;
                    float* drow = dst + static_cast<size_t>(oy) * ow;
                    for (int kx = 0; kx < 3; ++kx) {
                        const float wv = wc[ky * 3 + kx];
                        if (wv == 0.0f) continue;
                        const int off = kx - 1;
                        for (int ox = 0; ox < ow; ++ox) {
                            const int ix = 2 * ox + off;
                            if (ix < 0 || ix >= in.width) continue;
                            drow[ox] += wv * row[ix];
                        }
                    }
                }
            }
        }
    }
    for (float& v : out.data) v = std::max(v, 0.0f);
    return out;
}

std::vector<float> seeded_uniform(SplitMix64& rng, size_t n, double scale) {
    std::vector<float> w(n);
    for (float& v : w) v = static_cast<float>(rng.next_uniform(-0.05, 0.05) * scale);
    return w;
}

}  // namespace

EmbeddingParams EmbeddingParams::from_seed(uint64_t seed) {
    EmbeddingParams p;
    p.seed = seed;
    SplitMix64 vis(derive_seed(seed, kVisualSalt));
    for (int s = 0; s < kStages; ++s) {
        const size_t n = static_cast<size_t>(kStageChannels[s + 1]) * kStageChannels[s] * 9;
        p.conv_weights[static_cast<size_t>(s)] = seeded_uniform(vis, n, 1.0);
    }
    SplitMix64 aud(derive_seed(seed, kAudioSalt));
    const size_t flat = static_cast<size_t>(kMelFrames) * kMelBands;
    // fan-in scaled so audio features stay comparable in magnitude to the
    // unit-scale visual features downstream
    p.audio_projection = seeded_uniform(aud, static_cast<size_t>(kAudioFeatureDim) * flat,
                                        1.0 / std::sqrt(static_cast<double>(flat)));
    return p;
}

VisualFeature embed_visual(const FrameSecond& fs, const EmbeddingParams& p) {
    if (fs.frames.size() != kFramesPerSecond) {
        throw std::invalid_argument("embed_visual: expected exactly 15 frames");
    }
    VisualFeature avg;
    for (const Image& frame : fs.frames) {
        Tensor t = resize_bilinear_224(frame);
        for (int s = 0; s < kStages; ++s) {
            t = conv3x3_s2_relu(t, p.conv_weights[static_cast<size_t>(s)],
                                kStageChannels[s + 1]);
        }
        // t is 512x7x7; accumulate into [row][col][channel] layout
        for (int ch = 0; ch < kVisualChannels; ++ch) {
            const float* plane = t.plane(ch);
            for (int r = 0; r < kFeatureGrid; ++r) {
                for (int c = 0; c < kFeatureGrid; ++c) {
                    avg.at(r, c, ch) += plane[r * kFeatureGrid + c];
                }
            }
        }
    }
    for (float& v : avg.data) v /= static_cast<float>(kFramesPerSecond);
    return avg;
}

namespace {

constexpr int kFftSize = 2048;

// iterative radix-2, in-place
void fft(std::vector<std::complex<double>>& a) {
    const int n = static_cast<int>(a.size());
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[static_cast<size_t>(i)], a[static_cast<size_t>(j)]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * kPi / len;
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (int k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[static_cast<size_t>(i + k)];
                const std::complex<double> v = a[static_cast<size_t>(i + k + len / 2)] * w;
                a[static_cast<size_t>(i + k)] = u + v;
                a[static_cast<size_t>(i + k + len / 2)] = u - v;
                w *= wl;
            }
        }
    }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// 64 triangular filters over FFT bins 0..1024, 0 Hz .. Nyquist
std::vector<std::vector<std::pair<int, double>>> mel_filterbank() {
    const int bins = kFftSize / 2 + 1;
    const double nyquist = kAudioSampleRate / 2.0;
    std::vector<double> edges(kMelBands + 2);
    const double mel_max = hz_to_mel(nyquist);
    for (int i = 0; i < kMelBands + 2; ++i) {
        edges[static_cast<size_t>(i)] = mel_to_hz(mel_max * i / (kMelBands + 1));
    }
    std::vector<std::vector<std::pair<int, double>>> filters(kMelBands);
    for (int m = 0; m < kMelBands; ++m) {
        const double lo = edges[static_cast<size_t>(m)];
        const double mid = edges[static_cast<size_t>(m) + 1];
        const double hi = edges[static_cast<size_t>(m) + 2];
        for (int k = 0; k < bins; ++k) {
            const double f = static_cast<double>(k) * kAudioSampleRate / kFftSize;
            double w = 0.0;
            if (f > lo && f < mid) {
                w = (f - lo) / (mid - lo);
            } else if (f >= mid && f < hi) {
                w = (hi - f) / (hi - mid);
            }
            if (w > 0.0) filters[static_cast<size_t>(m)].push_back({k, w});
        }
    }
    return filters;
}

}  // namespace

std::vector<double> log_mel_spectrogram(const std::vector<double>& mono_second) {
    const long n = static_cast<long>(mono_second.size());
    if (std::labs(n - kAudioSampleRate) > 1) {
        throw std::invalid_argument("embed_audio: expected one second of 48 kHz audio");
    }
    static const auto filters = mel_filterbank();
    std::vector<double> hann(kMelWindow);
    for (int i = 0; i < kMelWindow; ++i) {
        hann[static_cast<size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (kMelWindow - 1));
    }
    std::vector<double> out(static_cast<size_t>(kMelFrames) * kMelBands, 0.0);
    std::vector<std::complex<double>> buf(kFftSize);
    for (int fr = 0; fr < kMelFrames; ++fr) {
        const long start = static_cast<long>(fr) * kMelHop;
        std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
        for (int i = 0; i < kMelWindow; ++i) {
            const long idx = start + i;
            const double s = idx < n ? mono_second[static_cast<size_t>(idx)] : 0.0;
            buf[static_cast<size_t>(i)] = s * hann[static_cast<size_t>(i)];
        }
        fft(buf);
        for (int m = 0; m < kMelBands; ++m) {
            double e = 0.0;
            for (const auto& [k, w] : filters[static_cast<size_t>(m)]) {
                e += w * std::norm(buf[static_cast<size_t>(k)]);
            }
            out[static_cast<size_t>(fr) * kMelBands + m] =
                std::log(std::max(e, 1e-10));
        }
    }
    return out;
}

AudioFeature embed_audio(const std::vector<double>& mono_second, const EmbeddingParams& p) {
    std::vector<double> mel = log_mel_spectrogram(mono_second);
    // standardize the flattened spectrogram before the projection
    double mean = 0.0;
    for (double v : mel) mean += v;
    mean /= static_cast<double>(mel.size());
    double var = 0.0;
    for (double v : mel) var += (v - mean) * (v - mean);
    var /= static_cast<double>(mel.size());
    const double sd = std::sqrt(var);
    if (sd > 1e-12) {
        for (double& v : mel) v = (v - mean) / sd;
    } else {
        std::fill(mel.begin(), mel.end(), 0.0);
    }
    AudioFeature out;
    const size_t flat = mel.size();
    for (int k = 0; k < kAudioFeatureDim; ++k) {
        double acc = 0.0;
        const float* row = p.audio_projection.data() + static_cast<size_t>(k) * flat;
        for (size_t j = 0; j < flat; ++j) acc += row[j] * mel[j];
        out.values[static_cast<size_t>(k)] = static_cast<float>(acc);
    }
    return out;
}

VisualFeature oracle_embed_visual(const FrameSecond& fs) {
    if (fs.frames.size() != kFramesPerSecond) {
        throw std::invalid_argument("oracle_embed_visual: expected exactly 15 frames");
    }
    VisualFeature out;
    for (const Image& frame : fs.frames) {
        for (int r = 0; r < kFeatureGrid; ++r) {
            const int y0 = r * frame.height / kFeatureGrid;
            const int y1 = (r + 1) * frame.height / kFeatureGrid;
            for (int c = 0; c < kFeatureGrid; ++c) {
                const int x0 = c * frame.width / kFeatureGrid;
                const int x1 = (c + 1) * frame.width / kFeatureGrid;
                double acc = 0.0;
                for (int y = y0; y < y1; ++y) {
                    for (int x = x0; x < x1; ++x) {
                        const size_t o = frame.offset(x, y);
                        acc += frame.rgb[o] + frame.rgb[o + 1] + frame.rgb[o + 2];
                    }
                }
                const double count = static_cast<double>(y1 - y0) * (x1 - x0) * 3.0 * 255.0;
                out.at(r, c, 0) += static_cast<float>(count > 0.0 ? acc / count : 0.0);
            }
        }
    }
    for (int r = 0; r < kFeatureGrid; ++r) {
        for (int c = 0; c < kFeatureGrid; ++c) {
            out.at(r, c, 0) /= static_cast<float>(kFramesPerSecond);
        }
    }
    return out;
}

}  // namespace ambisphere
