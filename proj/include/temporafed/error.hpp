#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace temporafed {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class EmptyCorpusError : public Error {
  public:
    using Error::Error;
};

/// A temporal sample that cannot support a bandwidth or density estimate
/// (fewer than two points, zero spread, or nothing retrieved).
class DegenerateSampleError : public Error {
  public:
    using Error::Error;
};

class EmptySelectionError : public Error {
  public:
    using Error::Error;
};

/// Malformed input; carries the file and 1-based line number when known.
class ParseError : public Error {
  public:
    ParseError(std::string file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), file_(std::move(file)), line_(line) {}

    [[nodiscard]] const std::string& file() const noexcept { return file_; }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::string file_;
    std::size_t line_;
};

/// Non-fatal conditions collected along the pipeline (skipped records,
/// duplicate ids, unknown query terms, dropped queries).
struct Diagnostics {
    std::vector<std::string> warnings;
    std::size_t malformed_records = 0;
    std::size_t duplicate_ids = 0;
    std::size_t skipped_query_terms = 0;

    void warn(std::string message) { warnings.push_back(std::move(message)); }
};

}  // namespace temporafed
