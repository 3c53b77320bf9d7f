#pragma once

#include <stdexcept>
#include <string>

namespace cyber_range {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid topology document or a query naming a host that does not exist.
class TopologyError : public Error {
 public:
  using Error::Error;
};

// Address that was not issued by the episode's address book.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Malformed red or blue action.
class ActionError : public Error {
 public:
  using Error::Error;
};

// Run configuration, CLI argument, or persisted-file validation failure.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bandit table misuse, e.g. an update for a key that was never predicted.
class ControllerError : public Error {
 public:
  using Error::Error;
};

}  // namespace cyber_range
