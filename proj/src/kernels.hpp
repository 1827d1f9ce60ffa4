#pragma once

// Shared 1-D resampling taps for the [1,4,6,4,1]/16 pyramid kernel with
// reflect-101 borders. The difference forms keep constant signals exact, so
// Laplacian bands of flat images are exactly zero. Both the full-image
// pyramid passes and the windowed per-coefficient evaluation go through
// these, which keeps the two bit-identical.

namespace llf::kernels {

// reflect-101: mirror without repeating the edge sample. Preserves parity,
// so expanded (zero-inserted) indices always map back onto real samples.
inline int reflect(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n - 2;
    i = ((i % period) + period) % period;
    return i < n ? i : period - i;
}

inline int half_ceil(int n) { return (n + 1) / 2; }

// Decimating 5-tap sample centered on fine index i2 of a signal of length n.
template <typename Fetch>
inline double down_tap_f(Fetch&& s, int i2, int n) {
    const double c = s(i2);
    const double l1 = s(reflect(i2 - 1, n));
    const double l2 = s(reflect(i2 - 2, n));
    const double r1 = s(reflect(i2 + 1, n));
    const double r2 = s(reflect(i2 + 2, n));
    return c + ((l2 - c) + (r2 - c) + 4.0 * ((l1 - c) + (r1 - c))) * (1.0 / 16.0);
}

// Zero-insert + [1,4,6,4,1]/8 expansion sample at fine index f (fine length
// n); fetch takes coarse indices.
template <typename Fetch>
inline double up_tap_f(Fetch&& coarse, int f, int n) {
    if ((f & 1) == 0) {
        const double c = coarse(f / 2);
        const double l = coarse(reflect(f - 2, n) / 2);
        const double r = coarse(reflect(f + 2, n) / 2);
        return c + ((l - c) + (r - c)) * 0.125;
    }
    const double l = coarse(reflect(f - 1, n) / 2);
    const double r = coarse(reflect(f + 1, n) / 2);
    return (l + r) * 0.5;
}

constexpr double kDown[5] = {1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0};
constexpr double kUpEven[3] = {1.0 / 8.0, 6.0 / 8.0, 1.0 / 8.0};
constexpr double kUpOdd = 0.5;

}  // namespace llf::kernels
