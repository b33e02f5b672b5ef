#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace balloonscope {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query fell outside the domain a model was characterised on.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// Commanded motor speed exceeds the driver's range, or a non-positive step.
class ActuationError : public Error {
 public:
  using Error::Error;
};

/// Configuration, script, or data file problem. Carries file and line when known.
class ConfigError : public Error {
 public:
  ConfigError(std::string file, int line, const std::string& what)
      : Error(format(file, line, what)), file_(std::move(file)), line_(line) {}
  explicit ConfigError(const std::string& what) : Error(what) {}

  const std::string& file() const noexcept { return file_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& file, int line, const std::string& what) {
    std::string out = file.empty() ? std::string("<config>") : file;
    if (line > 0) out += ":" + std::to_string(line);
    return out + ": " + what;
  }

  std::string file_;
  int line_ = 0;
};

/// Sensing could not find the working channel in the frame.
class ChannelLostError : public Error {
 public:
  ChannelLostError(std::size_t largest_component_px, std::size_t min_required_px)
      : Error("channel lost: largest component " + std::to_string(largest_component_px) +
              " px < " + std::to_string(min_required_px) + " px"),
        largest_(largest_component_px) {}

  std::size_t largest_component_px() const noexcept { return largest_; }

 private:
  std::size_t largest_;
};

class InsufficientSamplesError : public Error {
 public:
  using Error::Error;
};

}  // namespace balloonscope
