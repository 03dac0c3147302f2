#pragma once

#include <stdexcept>
#include <string>

namespace cfear {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& m) : std::runtime_error(m) {}
};

struct MalformedRow : std::runtime_error {
  explicit MalformedRow(const std::string& m) : std::runtime_error(m) {}
};

struct NonMonotoneTimestamps : std::runtime_error {
  explicit NonMonotoneTimestamps(const std::string& m) : std::runtime_error(m) {}
};

struct EmptyScan : std::runtime_error {
  explicit EmptyScan(const std::string& m) : std::runtime_error(m) {}
};

struct InvalidScan : std::runtime_error {
  explicit InvalidScan(const std::string& m) : std::runtime_error(m) {}
};

// Programming error: the 3x3-neighborhood search contract requires radius <= cell size.
struct RadiusExceedsCell : std::logic_error {
  explicit RadiusExceedsCell(const std::string& m) : std::logic_error(m) {}
};

struct DegenerateRegistration : std::runtime_error {
  explicit DegenerateRegistration(const std::string& m) : std::runtime_error(m) {}
};

struct TooShort : std::runtime_error {
  explicit TooShort(const std::string& m) : std::runtime_error(m) {}
};

struct NoTimeOverlap : std::runtime_error {
  explicit NoTimeOverlap(const std::string& m) : std::runtime_error(m) {}
};

struct UnknownPreset : std::runtime_error {
  explicit UnknownPreset(const std::string& m) : std::runtime_error(m) {}
};

struct UnknownScenario : std::runtime_error {
  explicit UnknownScenario(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace cfear
