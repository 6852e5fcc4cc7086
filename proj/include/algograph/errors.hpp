#pragma once

#include <stdexcept>
#include <string>

namespace algograph {

/// Invalid parameters or configuration (k = 0, m > m_bar, empty grid, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transport or protocol failure talking to an LLM backend.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Graph execution aborted; the message names the failing node.
class ExecutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace algograph
