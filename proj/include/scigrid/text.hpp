#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace scigrid {

/// Canonical form used for every identity comparison on names: Unicode NFC,
/// full case folding, leading/trailing whitespace trimmed, inner whitespace
/// runs collapsed to one space. Invalid UTF-8 sequences are replaced by U+FFFD.
std::string normalize_text(std::string_view text);

/// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field only when it contains a comma, quote, or line break.
std::string csv_field(std::string_view value);

/// Reads one line, stripping a trailing '\r'. Returns false at end of stream.
bool read_line(std::istream& in, std::string& line);

}  // namespace scigrid
