#pragma once

#include <span>
#include <vector>

namespace balloonscope::estimation {

/// Uniformly sampled scalar series.
struct Signal {
  std::vector<double> samples;
  double period_s = 0.0;
};

/// Weights that evaluate the least-squares polynomial of `order` through a
/// `window`-point block at position `at` (0 .. window-1). The centred window-7
/// order-2 weights are (-2, 3, 6, 7, 6, 3, -2) / 21.
std::vector<double> savgol_weights(int window, int order, int at);

/// Savitzky-Golay smoothing. Interior samples use the centred weights; the
/// first and last half-window samples evaluate the polynomial fitted to the
/// first and last `window` samples. Throws Error when the series is shorter
/// than the window, or the window is even or not larger than the order.
std::vector<double> savgol_smooth(std::span<const double> samples, int window = 7, int order = 2);
Signal savgol_smooth(const Signal& signal, int window = 7, int order = 2);

}  // namespace balloonscope::estimation
