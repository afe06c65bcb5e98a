#include "propspan/unicode.hpp"

#include "propspan/errors.hpp"

namespace propspan::unicode {

namespace {

// Decodes one scalar starting at byte i; advances i past it.
char32_t decode_one(std::string_view s, std::size_t& i) {
  const auto fail = [&] {
    throw DataError("ill-formed UTF-8 at byte offset " + std::to_string(i));
  };
  const unsigned char b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len;
  char32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    fail();
    return 0;
  }
  if (i + len > s.size()) fail();
  for (int k = 1; k < len; ++k) {
    const unsigned char b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) fail();
    cp = (cp << 6) | (b & 0x3F);
  }
  // Reject overlong forms, surrogates and out-of-range values.
  static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail();
  i += len;
  return cp;
}

}  // namespace

std::u32string to_u32(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) out.push_back(decode_one(utf8, i));
  return out;
}

std::string to_utf8(std::u32string_view scalars) {
  std::string out;
  out.reserve(scalars.size());
  for (char32_t cp : scalars) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::size_t scalar_length(std::string_view utf8) {
  std::size_t n = 0, i = 0;
  while (i < utf8.size()) {
    decode_one(utf8, i);
    ++n;
  }
  return n;
}

std::vector<std::size_t> scalar_byte_offsets(std::string_view utf8) {
  std::vector<std::size_t> offsets;
  offsets.reserve(utf8.size() + 1);
  std::size_t i = 0;
  while (i < utf8.size()) {
    offsets.push_back(i);
    decode_one(utf8, i);
  }
  offsets.push_back(utf8.size());
  return offsets;
}

std::string slice(std::string_view utf8, std::size_t start, std::size_t end) {
  if (start > end) throw DataError("slice: start > end");
  std::size_t i = 0, n = 0;
  std::size_t byte_start = utf8.size();
  while (i < utf8.size() && n < end) {
    if (n == start) byte_start = i;
    decode_one(utf8, i);
    ++n;
  }
  if (n < end) throw DataError("slice: range past end of text");
  if (start == end) return {};
  return std::string(utf8.substr(byte_start, i - byte_start));
}

bool is_space(char32_t c) {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

}  // namespace propspan::unicode
