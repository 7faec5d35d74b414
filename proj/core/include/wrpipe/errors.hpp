#pragma once

#include <stdexcept>
#include <string>

namespace wrpipe {

/// Invalid problem, grid, decomposition or solver parameters.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Message-passing failure: closed endpoint, receive timeout.
class TransportError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A worker tried to consume data that the schedule never produced.
class ScheduleError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

}  // namespace wrpipe
