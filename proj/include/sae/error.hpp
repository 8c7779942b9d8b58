#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sae {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct ShapeMismatch : Error {
  using Error::Error;
};

struct ZeroColumn : Error {
  std::size_t index;
  explicit ZeroColumn(std::size_t col)
      : Error("column " + std::to_string(col) + " has near-zero norm"), index(col) {}
};

struct EmptyBatch : Error {
  EmptyBatch() : Error("batch must contain at least one sample") {}
};

struct NotNormalized : Error {
  using Error::Error;
};

struct FamilyMismatch : Error {
  using Error::Error;
};

struct InvalidModel : Error {
  using Error::Error;
};

struct InvalidConfig : Error {
  using Error::Error;
};

struct MissingGroundTruth : Error {
  MissingGroundTruth() : Error("initialization scheme requires the ground-truth dictionary") {}
};

struct MissingData : Error {
  MissingData() : Error("initialization scheme requires a data batch") {}
};

// Config-file parse failure; carries the offending line for CLI diagnostics.
struct ConfigError : Error {
  std::size_t line;
  ConfigError(std::size_t line_no, const std::string& what_arg)
      : Error("config line " + std::to_string(line_no) + ": " + what_arg), line(line_no) {}
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace sae
