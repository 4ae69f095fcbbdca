#pragma once

#include <stdexcept>
#include <string>

namespace tennis {

// Caller broke a documented precondition (programming error, not data error).
struct ContractViolation : std::logic_error {
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// The chain fails to absorb: total absorption mass differs from 1 beyond tolerance.
struct NonAbsorbingError : std::runtime_error {
  explicit NonAbsorbingError(const std::string& what) : std::runtime_error(what) {}
};

struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& column)
      : std::runtime_error("missing mapped column: " + column), column(column) {}
  std::string column;
};

struct EmptyInputError : std::runtime_error {
  explicit EmptyInputError(const std::string& what) : std::runtime_error(what) {}
};

struct SegmentationError : std::runtime_error {
  SegmentationError(const std::string& match_id, int set_no, int game_no, const std::string& what)
      : std::runtime_error("match " + match_id + " set " + std::to_string(set_no) + " game " +
                           std::to_string(game_no) + ": " + what),
        match_id(match_id),
        set_no(set_no),
        game_no(game_no) {}
  std::string match_id;
  int set_no;
  int game_no;
};

struct EstimationError : std::runtime_error {
  explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

// Residual sum of squares is exactly zero; information criteria are undefined.
struct DegenerateFitError : std::runtime_error {
  explicit DegenerateFitError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateSampleError : std::runtime_error {
  explicit DegenerateSampleError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A pipeline stage was invoked before the stage it depends on.
struct StageDependencyError : std::runtime_error {
  explicit StageDependencyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tennis
