#pragma once

#include <stdexcept>
#include <string>

namespace quadftc {

/// Input outside an operation's mathematical domain (negative speed, NaN angle, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Attitude too close to the Euler singularity (|theta| -> pi/2, cos(phi)cos(theta) -> 0).
class SingularityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite state produced during integration. Carries the simulation time.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
  double time() const noexcept { return time_; }

private:
  double time_;
};

/// The effectiveness-weighted mixing matrix cannot be inverted reliably.
class AllocationInfeasible : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad scenario/config document. `key()` names the offending dotted key.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

}  // namespace quadftc
