#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// All span offsets in this toolkit count Unicode scalar values, never bytes.
// Text is carried around as UTF-8; these helpers convert between the two
// views. Decoding is strict: ill-formed UTF-8 raises DataError.

namespace propspan::unicode {

/// Decodes strict UTF-8 into a sequence of scalar values.
std::u32string to_u32(std::string_view utf8);

/// Encodes scalar values back to UTF-8.
std::string to_utf8(std::u32string_view scalars);

/// Number of scalar values in a UTF-8 string.
std::size_t scalar_length(std::string_view utf8);

/// Byte offset of each scalar, plus one trailing entry equal to the byte
/// length. offsets[i] is where scalar i starts; offsets.size() == n+1.
std::vector<std::size_t> scalar_byte_offsets(std::string_view utf8);

/// UTF-8 substring covering scalar range [start, end).
std::string slice(std::string_view utf8, std::size_t start, std::size_t end);

/// True for Unicode white-space scalars (the White_Space property set).
bool is_space(char32_t c);

}  // namespace propspan::unicode
