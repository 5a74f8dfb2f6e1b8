#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emothaw {

enum class Errc {
  MalformedRow,
  TimestampViolation,
  RangeViolation,
  EmptyInput,
  ScoreOutOfRange,
  DegenerateMarginal,
  MissingTask,
  EmptyCorpus,
  EmptySplit,
  SingleClassInput,
  ShapeMismatch,
  NoOobCoverage,
  NoOobVotes,
  KTooLarge,
  TooFewRows,
  InvalidConfig,
  IoError,
  IdMismatch,
};

constexpr std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::TimestampViolation: return "TimestampViolation";
    case Errc::RangeViolation: return "RangeViolation";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::ScoreOutOfRange: return "ScoreOutOfRange";
    case Errc::DegenerateMarginal: return "DegenerateMarginal";
    case Errc::MissingTask: return "MissingTask";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::EmptySplit: return "EmptySplit";
    case Errc::SingleClassInput: return "SingleClassInput";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NoOobCoverage: return "NoOobCoverage";
    case Errc::NoOobVotes: return "NoOobVotes";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::IoError: return "IoError";
    case Errc::IdMismatch: return "IdMismatch";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable error code. what() is prefixed
/// with the code name, e.g. "MissingTask: participant p007 lacks clock".
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Recoverable diagnostic attached to results produced in lenient mode.
struct Warning {
  std::size_t line = 0;  // 0 when not tied to an input line
  std::string message;

  bool operator==(const Warning&) const = default;
};

}  // namespace emothaw
