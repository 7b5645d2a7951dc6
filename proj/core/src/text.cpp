#include "wokie/text.hpp"

#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/ustring.h>

#include <array>
#include <cstdint>
#include <vector>

namespace wokie::text {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  const std::size_t n = s.size();
  auto cont = [&](std::size_t k) {
    return k < n && (static_cast<unsigned char>(s[k]) & 0xC0) == 0x80;
  };
  while (i < n) {
    const unsigned char c0 = static_cast<unsigned char>(s[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (c0 < 0x80) {
      cp = c0;
    } else if ((c0 & 0xE0) == 0xC0 && cont(i + 1)) {
      cp = (static_cast<char32_t>(c0 & 0x1F) << 6) | (s[i + 1] & 0x3F);
      len = 2;
      if (cp < 0x80) cp = 0xFFFD;
    } else if ((c0 & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
      cp = (static_cast<char32_t>(c0 & 0x0F) << 12) |
           (static_cast<char32_t>(s[i + 1] & 0x3F) << 6) | (s[i + 2] & 0x3F);
      len = 3;
      if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    } else if ((c0 & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
      cp = (static_cast<char32_t>(c0 & 0x07) << 18) |
           (static_cast<char32_t>(s[i + 1] & 0x3F) << 12) |
           (static_cast<char32_t>(s[i + 2] & 0x3F) << 6) | (s[i + 3] & 0x3F);
      len = 4;
      if (cp < 0x10000 || cp > 0x10FFFF) cp = 0xFFFD;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size() * 2);
  for (char32_t cp : s) {
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
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

bool is_space(char32_t c) {
  if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v') return true;
  return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0;
}

std::string trim(std::string_view s) {
  std::u32string u = decode_utf8(s);
  std::size_t b = 0;
  std::size_t e = u.size();
  while (b < e && is_space(u[b])) ++b;
  while (e > b && is_space(u[e - 1])) --e;
  return encode_utf8(std::u32string_view(u).substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
  std::u32string u = decode_utf8(s);
  std::u32string out;
  out.reserve(u.size());
  bool in_run = false;
  for (char32_t c : u) {
    if (is_space(c)) {
      in_run = true;
      continue;
    }
    if (in_run && !out.empty()) out.push_back(U' ');
    in_run = false;
    out.push_back(c);
  }
  return encode_utf8(out);
}

namespace {

struct QuotePair {
  char32_t open;
  char32_t close;
};

constexpr std::array<QuotePair, 9> kQuotePairs{{
    {U'"', U'"'},
    {U'\'', U'\''},
    {U'“', U'”'},  // “ ”
    {U'‘', U'’'},  // ‘ ’
    {U'«', U'»'},  // « »
    {U'‹', U'›'},  // ‹ ›
    {U'„', U'“'},  // „ “
    {U'‚', U'‘'},  // ‚ ‘
    {U'`', U'`'},  // ` `
}};

}  // namespace

std::string strip_quotes(std::string_view s) {
  std::u32string u = decode_utf8(trim(s));
  bool changed = true;
  while (changed && u.size() >= 2) {
    changed = false;
    for (const auto& q : kQuotePairs) {
      if (u.front() == q.open && u.back() == q.close) {
        u = u.substr(1, u.size() - 2);
        while (!u.empty() && is_space(u.front())) u.erase(u.begin());
        while (!u.empty() && is_space(u.back())) u.pop_back();
        changed = true;
        break;
      }
    }
  }
  return encode_utf8(u);
}

namespace {

std::u16string to_utf16(std::string_view s) {
  if (s.empty()) return {};
  std::u16string out(s.size() + 1, u'\0');
  UErrorCode ec = U_ZERO_ERROR;
  int32_t len = 0;
  u_strFromUTF8WithSub(out.data(), static_cast<int32_t>(out.size()), &len, s.data(),
                       static_cast<int32_t>(s.size()), 0xFFFD, nullptr, &ec);
  if (ec == U_BUFFER_OVERFLOW_ERROR) {
    out.resize(static_cast<std::size_t>(len));
    ec = U_ZERO_ERROR;
    u_strFromUTF8WithSub(out.data(), len, &len, s.data(), static_cast<int32_t>(s.size()), 0xFFFD,
                         nullptr, &ec);
  }
  if (U_FAILURE(ec)) return {};
  out.resize(static_cast<std::size_t>(len));
  return out;
}

std::string to_utf8(const char16_t* s, int32_t n) {
  if (n == 0) return {};
  std::string out(static_cast<std::size_t>(n) * 3 + 1, '\0');
  UErrorCode ec = U_ZERO_ERROR;
  int32_t len = 0;
  u_strToUTF8WithSub(out.data(), static_cast<int32_t>(out.size()), &len, s, n, 0xFFFD, nullptr,
                     &ec);
  if (ec == U_BUFFER_OVERFLOW_ERROR) {
    out.resize(static_cast<std::size_t>(len));
    ec = U_ZERO_ERROR;
    u_strToUTF8WithSub(out.data(), len, &len, s, n, 0xFFFD, nullptr, &ec);
  }
  if (U_FAILURE(ec)) return {};
  out.resize(static_cast<std::size_t>(len));
  return out;
}

}  // namespace

std::string nfc(std::string_view s) {
  if (s.empty()) return {};
  UErrorCode ec = U_ZERO_ERROR;
  const UNormalizer2* norm = unorm2_getNFCInstance(&ec);
  if (U_FAILURE(ec)) return std::string(s);
  std::u16string u = to_utf16(s);
  std::u16string out(u.size() + 16, u'\0');
  int32_t len = unorm2_normalize(norm, u.data(), static_cast<int32_t>(u.size()), out.data(),
                                 static_cast<int32_t>(out.size()), &ec);
  if (ec == U_BUFFER_OVERFLOW_ERROR) {
    out.resize(static_cast<std::size_t>(len));
    ec = U_ZERO_ERROR;
    len = unorm2_normalize(norm, u.data(), static_cast<int32_t>(u.size()), out.data(), len, &ec);
  }
  if (U_FAILURE(ec)) return std::string(s);
  return to_utf8(out.data(), len);
}

std::string casefold(std::string_view s) {
  if (s.empty()) return {};
  std::u16string u = to_utf16(s);
  std::u16string out(u.size() + 16, u'\0');
  UErrorCode ec = U_ZERO_ERROR;
  int32_t len = u_strFoldCase(out.data(), static_cast<int32_t>(out.size()), u.data(),
                              static_cast<int32_t>(u.size()), U_FOLD_CASE_DEFAULT, &ec);
  if (ec == U_BUFFER_OVERFLOW_ERROR) {
    out.resize(static_cast<std::size_t>(len));
    ec = U_ZERO_ERROR;
    len = u_strFoldCase(out.data(), len, u.data(), static_cast<int32_t>(u.size()),
                        U_FOLD_CASE_DEFAULT, &ec);
  }
  if (U_FAILURE(ec)) return std::string(s);
  return to_utf8(out.data(), len);
}

std::string canonical(std::string_view s) { return nfc(trim(s)); }

std::string match_key(std::string_view s) { return casefold(nfc(trim(s))); }

std::size_t word_count(std::string_view s) {
  std::u32string u = decode_utf8(s);
  std::size_t count = 0;
  bool in_word = false;
  for (char32_t c : u) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

}  // namespace wokie::text
