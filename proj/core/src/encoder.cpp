#include "ambisphere/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ambisphere {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

struct Gains {
    double w = 0.0, x = 0.0, y = 0.0, z = 0.0;
};

Gains direction_gains(const std::vector<SourceEstimate>& sources) {
    Gains g;
    double total_mass = 0.0;
    for (const SourceEstimate& s : sources) total_mass += s.mass;
    for (const SourceEstimate& s : sources) {
        const double weight = total_mass > 0.0
                                  ? s.mass / total_mass
                                  : 1.0 / static_cast<double>(sources.size());
        const double cp = std::cos(s.direction.phi);
        const double sp = std::sin(s.direction.phi);
        const double ct = std::cos(s.direction.theta);
        const double st = std::sin(s.direction.theta);
        g.w += weight * kInvSqrt2;
        g.x += weight * cp * ct;
        g.y += weight * sp * ct;
        g.z += weight * st;
    }
    return g;
}

}  // namespace

std::vector<LocalizedSource> split_sources(const std::vector<double>& mono_second,
                                           const std::vector<SourceEstimate>& sources) {
    std::vector<LocalizedSource> out;
    if (sources.empty()) return out;
    double total = 0.0;
    for (const SourceEstimate& s : sources) total += s.mass;
    out.reserve(sources.size());
    for (const SourceEstimate& s : sources) {
        const double weight = total > 0.0 ? s.mass / total
                                          : 1.0 / static_cast<double>(sources.size());
        LocalizedSource ls;
        ls.direction = s.direction;
        ls.weight = weight;
        ls.signal.resize(mono_second.size());
        for (size_t i = 0; i < mono_second.size(); ++i) ls.signal[i] = weight * mono_second[i];
        out.push_back(std::move(ls));
    }
    return out;
}

BFormatSignal encode_bformat(const std::vector<LocalizedSource>& sources,
                             size_t length, int sample_rate) {
    for (const LocalizedSource& s : sources) {
        if (s.signal.size() != length) {
            throw std::invalid_argument("encode_bformat: source signal length mismatch");
        }
    }
    BFormatSignal b;
    b.sample_rate = sample_rate;
    b.w.assign(length, 0.0);
    b.x.assign(length, 0.0);
    b.y.assign(length, 0.0);
    b.z.assign(length, 0.0);
    for (const LocalizedSource& s : sources) {
        const double cp = std::cos(s.direction.phi);
        const double sp = std::sin(s.direction.phi);
        const double ct = std::cos(s.direction.theta);
        const double st = std::sin(s.direction.theta);
        for (size_t t = 0; t < length; ++t) {
            const double v = s.signal[t];
            b.w[t] += v * kInvSqrt2;
            b.x[t] += v * cp * ct;
            b.y[t] += v * sp * ct;
            b.z[t] += v * st;
        }
    }
    return b;
}

SphericalDirection decode_direction(const BFormatSignal& b) {
    double xw = 0.0, yw = 0.0, zw = 0.0, ww = 0.0;
    for (size_t t = 0; t < b.length(); ++t) {
        xw += b.x[t] * b.w[t];
        yw += b.y[t] * b.w[t];
        zw += b.z[t] * b.w[t];
        ww += b.w[t] * b.w[t];
    }
    if (ww <= 0.0) throw std::domain_error("decode_direction: zero-energy signal");
    const double phi = std::atan2(yw, xw);
    const double theta = std::atan2(zw, std::hypot(xw, yw));
    return SphericalDirection::normalized(phi, theta);
}

BFormatSignal encode_clip(const AudioSignal& audio,
                          const std::vector<std::vector<SourceEstimate>>& per_second) {
    const size_t n = audio.length();
    const int rate = audio.sample_rate;
    if (rate <= 0) throw std::invalid_argument("encode_clip: non-positive sample rate");
    const size_t seconds = (n + static_cast<size_t>(rate) - 1) / static_cast<size_t>(rate);
    if (per_second.size() != seconds) {
        throw std::invalid_argument("encode_clip: regions list does not match audio duration");
    }
    const std::vector<double> mono = mono_mix(audio);

    std::vector<Gains> gains(seconds);
    for (size_t s = 0; s < seconds; ++s) gains[s] = direction_gains(per_second[s]);

    BFormatSignal b;
    b.sample_rate = rate;
    b.w.assign(n, 0.0);
    b.x.assign(n, 0.0);
    b.y.assign(n, 0.0);
    b.z.assign(n, 0.0);

    const size_t fade = static_cast<size_t>(std::lround(kCrossfadeSeconds * rate));
    for (size_t t = 0; t < n; ++t) {
        const size_t s = t / static_cast<size_t>(rate);
        Gains g = gains[s];
        const size_t into = t - s * static_cast<size_t>(rate);
        if (s > 0 && fade > 0 && into < fade) {
            // linear ramp from the previous second's gains
            const double alpha = static_cast<double>(into + 1) / static_cast<double>(fade);
            const Gains& prev = gains[s - 1];
            g.w = prev.w + alpha * (g.w - prev.w);
            g.x = prev.x + alpha * (g.x - prev.x);
            g.y = prev.y + alpha * (g.y - prev.y);
            g.z = prev.z + alpha * (g.z - prev.z);
        }
        const double v = mono[t];
        b.w[t] = v * g.w;
        b.x[t] = v * g.x;
        b.y[t] = v * g.y;
        b.z[t] = v * g.z;
    }
    return b;
}

std::vector<std::vector<double>> to_ambix_channels(const BFormatSignal& b) {
    std::vector<double> w = b.w;
    for (double& v : w) v *= std::sqrt(2.0);
    return {std::move(w), b.y, b.z, b.x};
}

}  // namespace ambisphere
