#include "balloonscope/estimation/savgol.hpp"

#include <Eigen/Dense>
#include <string>

#include "balloonscope/errors.hpp"

namespace balloonscope::estimation {
namespace {

void check_shape(int window, int order) {
  if (window < 1 || window % 2 == 0) throw Error("savgol window must be odd and positive");
  if (order < 0 || order >= window) throw Error("savgol order must be in [0, window)");
}

}  // namespace

std::vector<double> savgol_weights(int window, int order, int at) {
  check_shape(window, order);
  if (at < 0 || at >= window) throw Error("savgol evaluation position outside the window");
  const int half = window / 2;
  // Row `at` of the hat matrix V (V^T V)^-1 V^T, positions centred on zero.
  Eigen::MatrixXd vander(window, order + 1);
  for (int i = 0; i < window; ++i) {
    double p = 1.0;
    for (int j = 0; j <= order; ++j) {
      vander(i, j) = p;
      p *= static_cast<double>(i - half);
    }
  }
  const Eigen::MatrixXd gram = vander.transpose() * vander;
  const Eigen::MatrixXd projector = gram.ldlt().solve(vander.transpose());
  const Eigen::RowVectorXd weights = vander.row(at) * projector;
  return {weights.data(), weights.data() + weights.size()};
}

std::vector<double> savgol_smooth(std::span<const double> samples, int window, int order) {
  check_shape(window, order);
  const auto n = samples.size();
  const auto w = static_cast<std::size_t>(window);
  if (n < w)
    throw Error("savgol: series of length " + std::to_string(n) + " is shorter than window " + std::to_string(window));
  const int half = window / 2;
  std::vector<std::vector<double>> table;
  table.reserve(w);
  for (int at = 0; at < window; ++at) table.push_back(savgol_weights(window, order, at));

  std::vector<double> out(n, 0.0);
  auto apply = [&](const std::vector<double>& wts, std::size_t start) {
    double acc = 0.0;
    for (std::size_t k = 0; k < w; ++k) acc += wts[k] * samples[start + k];
    return acc;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto h = static_cast<std::size_t>(half);
    if (i < h) {
      out[i] = apply(table[i], 0);
    } else if (i + h >= n) {
      out[i] = apply(table[w - (n - i)], n - w);
    } else {
      out[i] = apply(table[h], i - h);
    }
  }
  return out;
}

Signal savgol_smooth(const Signal& signal, int window, int order) {
  return {savgol_smooth(std::span<const double>(signal.samples), window, order), signal.period_s};
}

}  // namespace balloonscope::estimation
