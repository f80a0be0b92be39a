#pragma once

#include <stdexcept>
#include <string>

namespace evac {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

class MissingKey : public ConfigError {
public:
  explicit MissingKey(const std::string& key)
      : ConfigError("missing required key: " + key) {}
};

class GeometryViolation : public ConfigError {
public:
  using ConfigError::ConfigError;
};

class NonPositiveParameter : public ConfigError {
public:
  explicit NonPositiveParameter(const std::string& name)
      : ConfigError("parameter must be positive: " + name) {}
};

/// Failures that happen while a simulation is running.
class SimulationError : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public SimulationError {
public:
  using SimulationError::SimulationError;
};

class NoExit : public SimulationError {
public:
  NoExit() : SimulationError("eikonal solve requires at least one exit cell") {}
};

class AllUnreachable : public SimulationError {
public:
  AllUnreachable() : SimulationError("no walkable cell can reach an exit") {}
};

class OutOfDomain : public SimulationError {
public:
  using SimulationError::SimulationError;
};

class UnstableTimestep : public SimulationError {
public:
  using SimulationError::SimulationError;
};

class NegativeDensity : public SimulationError {
public:
  using SimulationError::SimulationError;
};

class Overfull : public SimulationError {
public:
  using SimulationError::SimulationError;
};

class EmptySystem : public SimulationError {
public:
  EmptySystem() : SimulationError("total transition rate is zero") {}
};

class ZeroTime : public SimulationError {
public:
  ZeroTime() : SimulationError("particle current undefined at t <= 0") {}
};

}  // namespace evac
