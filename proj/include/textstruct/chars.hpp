#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace textstruct {

enum class CharClass : uint8_t { Alpha, Numeric, Symbol, Space };

enum class PositionRole : uint8_t { Border, Body, Blank };

// Decodes UTF-8 into code points, one per display column. Invalid bytes fall
// back to one column per byte so legacy single-byte files keep their layout.
inline std::vector<char32_t> decode_columns(std::string_view line) {
  std::vector<char32_t> cols;
  cols.reserve(line.size());
  size_t i = 0;
  while (i < line.size()) {
    unsigned char b = static_cast<unsigned char>(line[i]);
    if (b < 0x80) {
      cols.push_back(b);
      ++i;
      continue;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b & 0xE0) == 0xC0) { len = 2; cp = b & 0x1F; }
    else if ((b & 0xF0) == 0xE0) { len = 3; cp = b & 0x0F; }
    else if ((b & 0xF8) == 0xF0) { len = 4; cp = b & 0x07; }
    bool ok = len > 0 && i + len <= line.size();
    for (int k = 1; ok && k < len; ++k) {
      unsigned char c = static_cast<unsigned char>(line[i + k]);
      if ((c & 0xC0) != 0x80) ok = false;
      else cp = (cp << 6) | (c & 0x3F);
    }
    if (ok) {
      cols.push_back(cp);
      i += static_cast<size_t>(len);
    } else {
      cols.push_back(b);  // byte fallback
      ++i;
    }
  }
  return cols;
}

inline std::string encode_utf8(const std::vector<char32_t>& cols, size_t begin, size_t end) {
  std::string out;
  for (size_t i = begin; i < end && i < cols.size(); ++i) {
    char32_t cp = cols[i];
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

inline bool is_space_cp(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\f' || c == U'\v' || c == U'\r';
}

inline CharClass classify_char(char32_t c) {
  if (is_space_cp(c)) return CharClass::Space;
  if ((c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z')) return CharClass::Alpha;
  if (c >= U'0' && c <= U'9') return CharClass::Numeric;
  // Latin-1 letters; anything else non-ASCII counts as Symbol.
  if (c >= 0xC0 && c <= 0xFF && c != 0xD7 && c != 0xF7) return CharClass::Alpha;
  return CharClass::Symbol;
}

inline CharClass classify_char(char c) { return classify_char(static_cast<char32_t>(static_cast<unsigned char>(c))); }

// One role per column: first/last column of a word is Border, interior is
// Body, columns outside words are Blank. A one-character word is Border.
inline std::vector<PositionRole> position_roles(const std::vector<char32_t>& cols) {
  std::vector<PositionRole> roles(cols.size(), PositionRole::Blank);
  size_t i = 0;
  while (i < cols.size()) {
    if (is_space_cp(cols[i])) { ++i; continue; }
    size_t j = i;
    while (j < cols.size() && !is_space_cp(cols[j])) ++j;
    roles[i] = PositionRole::Border;
    roles[j - 1] = PositionRole::Border;
    for (size_t k = i + 1; k + 1 < j; ++k) roles[k] = PositionRole::Body;
    i = j;
  }
  return roles;
}

inline std::vector<PositionRole> position_roles(std::string_view line) {
  return position_roles(decode_columns(line));
}

inline std::string rstrip(std::string_view s) {
  size_t end = s.size();
  while (end > 0 && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\r')) --end;
  return std::string(s.substr(0, end));
}

inline std::string expand_tabs(std::string_view s, int tabstop = 8) {
  std::string out;
  int col = 0;
  for (char c : s) {
    if (c == '\t') {
      int next = (col / tabstop + 1) * tabstop;
      while (col < next) { out.push_back(' '); ++col; }
    } else {
      out.push_back(c);
      ++col;
    }
  }
  return out;
}

}  // namespace textstruct
