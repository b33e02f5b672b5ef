#pragma once

#include "balloonscope/harness/experiments.hpp"

namespace fixtures {

/// Noise-free tool-free calibration of the default config, computed once.
inline const balloonscope::estimation::Calibration& default_calibration() {
  static const auto cal = balloonscope::harness::obtain_calibration(balloonscope::harness::Scenario{});
  return cal;
}

}  // namespace fixtures
