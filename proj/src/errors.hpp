#pragma once

#include <stdexcept>

namespace lrsense {

// Shape mismatches between matrices, vectors, and ensembles.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Arguments outside an operation's mathematical domain (q < 1, negative
// thresholds, non-finite entries, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Experiment configuration problems (bad JSON, unknown keys, invalid grid).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lrsense
