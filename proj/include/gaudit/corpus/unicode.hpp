#pragma once

#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace gaudit::corpus::unicode {

// One decoded code point. cp < 0 marks an ill-formed byte sequence; such
// bytes are treated as separators by every caller.
struct CodePoint {
  UChar32 cp;
  std::size_t begin;
  std::size_t end;
};

inline CodePoint decode_at(std::string_view text, std::size_t pos) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  int32_t i = static_cast<int32_t>(pos);
  const auto length = static_cast<int32_t>(text.size());
  UChar32 c;
  U8_NEXT(s, i, length, c);
  return {c, pos, static_cast<std::size_t>(i)};
}

inline bool is_word_char(UChar32 c) {
  if (c < 0) return false;
  if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  // Combining marks stay attached to the letter they decorate.
  return u_isalpha(c) || u_isdigit(c) || (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0;
}

// Characters that join two word characters into one token: apostrophes and
// hyphens ("they'll", "two-spirit").
inline bool is_joiner(UChar32 c) {
  switch (c) {
    case 0x0027:  // '
    case 0x2019:  // right single quotation mark
    case 0x002D:  // -
    case 0x2010:  // hyphen
    case 0x2011:  // non-breaking hyphen
      return true;
    default:
      return false;
  }
}

inline bool is_upper(UChar32 c) {
  if (c < 0) return false;
  if (c < 0x80) return c >= 'A' && c <= 'Z';
  return u_isupper(c) || u_istitle(c);
}

inline bool is_space(UChar32 c) {
  if (c < 0) return false;
  if (c < 0x80) return c == ' ' || (c >= '\t' && c <= '\r');
  return u_isUWhiteSpace(c);
}

inline bool is_ascii(std::string_view s) {
  for (unsigned char ch : s)
    if (ch >= 0x80) return false;
  return true;
}

// Full Unicode case folding (default mapping, not Turkic).
inline void fold_case_into(std::string_view s, std::string& out) {
  out.clear();
  if (is_ascii(s)) {
    out.reserve(s.size());
    for (char ch : s) out.push_back((ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : ch);
    return;
  }
  icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())))
      .foldCase(U_FOLD_CASE_DEFAULT)
      .toUTF8String(out);
}

inline std::string fold_case(std::string_view s) {
  std::string out;
  fold_case_into(s, out);
  return out;
}

inline bool is_valid_utf8(std::string_view text) {
  for (std::size_t pos = 0; pos < text.size();) {
    const auto cp = decode_at(text, pos);
    if (cp.cp < 0) return false;
    pos = cp.end;
  }
  return true;
}

}  // namespace gaudit::corpus::unicode
