#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

namespace vtraj {

/// Shape-preserving (Fritsch-Carlson / Fritsch-Butland) node slope from the
/// secants on either side, weighted by the spacings h0 (left) and h1 (right).
template <typename Scalar>
Scalar pchip_interior_slope(Scalar h0, Scalar h1, Scalar d0, Scalar d1) {
  if (d0 == Scalar(0) || d1 == Scalar(0) || (d0 > Scalar(0)) != (d1 > Scalar(0))) return Scalar(0);
  const Scalar w1 = Scalar(2) * h1 + h0;
  const Scalar w2 = h1 + Scalar(2) * h0;
  return (w1 + w2) / (w1 / d0 + w2 / d1);
}

/// One-sided three-point end slope, limited so the end interval stays monotone.
/// h0/d0 belong to the end interval, h1/d1 to its neighbor.
template <typename Scalar>
Scalar pchip_end_slope(Scalar h0, Scalar h1, Scalar d0, Scalar d1) {
  using std::abs;
  const Scalar d = ((Scalar(2) * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  const auto sign = [](Scalar v) { return (v > Scalar(0)) - (v < Scalar(0)); };
  if (sign(d) != sign(d0)) return Scalar(0);
  if (sign(d0) != sign(d1) && abs(d) > abs(Scalar(3) * d0)) return Scalar(3) * d0;
  return d;
}

/// Monotone piecewise-cubic Hermite interpolation through (xs, ys), xs strictly
/// increasing. x is clamped to [xs.front(), xs.back()]. Slopes at the two
/// nodes bracketing x only depend on their immediate neighbors, so a 4-point
/// stencil around x gives the same value as the full data set.
template <typename Scalar>
Scalar pchip_eval(std::span<const Scalar> xs, std::span<const Scalar> ys, Scalar x) {
  const std::size_t n = xs.size();
  if (n == 0) return Scalar(0);
  if (n == 1) return ys[0];
  x = std::clamp(x, xs.front(), xs.back());
  std::size_t k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
  k = std::clamp<std::size_t>(k, 1, n - 1) - 1;

  const auto h = [&](std::size_t i) { return xs[i + 1] - xs[i]; };
  const auto secant = [&](std::size_t i) { return (ys[i + 1] - ys[i]) / h(i); };

  const auto slope = [&](std::size_t i) -> Scalar {
    if (n == 2) return secant(0);
    if (i == 0) return pchip_end_slope(h(0), h(1), secant(0), secant(1));
    if (i == n - 1) return pchip_end_slope(h(n - 2), h(n - 3), secant(n - 2), secant(n - 3));
    return pchip_interior_slope(h(i - 1), h(i), secant(i - 1), secant(i));
  };

  const Scalar hk = h(k);
  const Scalar s = (x - xs[k]) / hk;
  const Scalar s2 = s * s, s3 = s2 * s;
  const Scalar v = (Scalar(2) * s3 - Scalar(3) * s2 + Scalar(1)) * ys[k] + (s3 - Scalar(2) * s2 + s) * hk * slope(k) +
                   (Scalar(-2) * s3 + Scalar(3) * s2) * ys[k + 1] + (s3 - s2) * hk * slope(k + 1);
  // Monotone on each interval; clamp only removes round-off.
  return std::clamp(v, std::min(ys[k], ys[k + 1]), std::max(ys[k], ys[k + 1]));
}

}  // namespace vtraj
