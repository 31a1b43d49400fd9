#include "denguecast/ingest/text.hpp"

#include <cctype>
#include <istream>
#include <stdexcept>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

namespace denguecast::ingest {

namespace {

const icu::Normalizer2& nfd() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status) || n == nullptr) throw std::runtime_error("ICU NFD normalizer unavailable");
  return *n;
}

icu::UnicodeString folded_unicode(std::string_view utf8) {
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  text.toLower(icu::Locale::getRoot());
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString decomposed = nfd().normalize(text, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalisation failed");
  icu::UnicodeString out;
  for (int32_t i = 0; i < decomposed.length();) {
    UChar32 c = decomposed.char32At(i);
    if (u_charType(c) != U_NON_SPACING_MARK) out.append(c);
    i += U16_LENGTH(c);
  }
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_scheme_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

/// Offset within `run` where a URL starts, or npos.
std::size_t url_start(std::string_view run) {
  std::size_t best = std::string_view::npos;
  for (std::size_t pos = run.find("://"); pos != std::string_view::npos; pos = run.find("://", pos + 1)) {
    std::size_t s = pos;
    while (s > 0 && is_scheme_char(run[s - 1])) --s;
    while (s < pos && !std::isalpha(static_cast<unsigned char>(run[s]))) ++s;
    if (s < pos) {
      best = std::min(best, s);
      break;
    }
  }
  for (std::size_t i = 0; i + 4 <= run.size(); ++i) {
    bool boundary = i == 0 || !std::isalnum(static_cast<unsigned char>(run[i - 1]));
    if (boundary && (run[i] == 'w' || run[i] == 'W') && (run[i + 1] == 'w' || run[i + 1] == 'W') &&
        (run[i + 2] == 'w' || run[i + 2] == 'W') && run[i + 3] == '.') {
      best = std::min(best, i);
      break;
    }
  }
  return best;
}

}  // namespace

std::string fold(std::string_view utf8) {
  std::string out;
  folded_unicode(utf8).toUTF8String(out);
  return out;
}

std::vector<std::string> words(std::string_view utf8) {
  icu::UnicodeString text = folded_unicode(utf8);
  std::vector<std::string> out;
  icu::UnicodeString current;
  auto flush = [&] {
    if (current.isEmpty()) return;
    std::string w;
    current.toUTF8String(w);
    out.push_back(std::move(w));
    current.remove();
  };
  for (int32_t i = 0; i < text.length();) {
    UChar32 c = text.char32At(i);
    if (u_isalnum(c)) {
      current.append(c);
    } else {
      flush();
    }
    i += U16_LENGTH(c);
  }
  flush();
  return out;
}

std::string strip_urls(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && !is_space(text[end])) ++end;
    std::string_view run = text.substr(i, end - i);
    out.append(run.substr(0, url_start(run)));
    i = end;
  }
  return out;
}

TokenSet normalize_text(std::string_view text, const TokenSet& stopwords) {
  std::vector<std::string> w = words(strip_urls(text));
  TokenSet tokens;
  auto stop = [&](const std::string& s) { return stopwords.contains(s); };
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!stop(w[i])) tokens.insert(w[i]);
    if (i + 1 < w.size() && !(stop(w[i]) && stop(w[i + 1]))) tokens.insert(w[i] + "_" + w[i + 1]);
  }
  return tokens;
}

TokenSet read_stopwords(std::istream& in) {
  TokenSet out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || is_space(line.back()))) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && is_space(line[start])) ++start;
    if (start == line.size() || line[start] == '#') continue;
    out.insert(line.substr(start));
  }
  return out;
}

}  // namespace denguecast::ingest
