#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace denguecast::ingest {

/// Ordered so iteration (and anything written from it) is deterministic.
using TokenSet = std::set<std::string, std::less<>>;

/// Lowercases UTF-8 text and strips diacritics (canonical decomposition,
/// then removal of non-spacing marks). Invalid UTF-8 becomes U+FFFD.
std::string fold(std::string_view utf8);

/// Folded words, split on every non-alphanumeric code point.
std::vector<std::string> words(std::string_view utf8);

/// Removes URL spans: from a `scheme://` or `www.` prefix to the end of the
/// whitespace-delimited run containing it.
std::string strip_urls(std::string_view text);

/// Unigrams plus `_`-joined bi-grams of adjacent words. Bi-grams are formed
/// before stop-word removal; stop-word unigrams and bi-grams made of two
/// stop-words are then dropped.
TokenSet normalize_text(std::string_view text, const TokenSet& stopwords);

/// One pre-normalised token per line; blank lines and `#` comments skipped.
TokenSet read_stopwords(std::istream& in);

}  // namespace denguecast::ingest
