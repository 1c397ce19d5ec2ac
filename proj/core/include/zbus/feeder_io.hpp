#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "zbus/errors.hpp"
#include "zbus/feeder.hpp"
#include "zbus/linalg.hpp"

namespace zbus {

inline constexpr std::string_view kSchemaVersion = "1";

/// Feeder file rejected by the parser. The message starts with
/// "<source>:<line>:<column>:" whenever the offending value can be located.
class FeederFormatError : public InputError {
  public:
    FeederFormatError(std::string const& what, std::string pointer, std::size_t line, std::size_t column)
        : InputError(what), pointer_(std::move(pointer)), line_(line), column_(column) {}

    /// JSON pointer of the offending value ("" for the document or a syntax error).
    std::string const& pointer() const noexcept { return pointer_; }
    /// 1-based; 0 when unknown.
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::string pointer_;
    std::size_t line_;
    std::size_t column_;
};

Feeder parse_feeder(std::string_view text, std::string_view source = "<feeder>");
/// Throws InputError when the file cannot be read.
Feeder parse_feeder_file(std::filesystem::path const& path);

/// Pretty-printed feeder document; parse_feeder(emit_feeder(f)) rebuilds f.
std::string emit_feeder(Feeder const& feeder);

/// Complex vector file: either a bare array of [re, im] pairs or
/// {"schema_version": "1", "values": [...]}. Used for custom Λ and v[0].
CVector parse_complex_vector(std::string_view text, std::string_view source = "<vector>");
CVector parse_complex_vector_file(std::filesystem::path const& path);
std::string emit_complex_vector(std::span<Complex const> values);

/// Reads a whole file; throws InputError naming the path on failure.
std::string read_text_file(std::filesystem::path const& path);

}  // namespace zbus
