#include "denguecast/ingest/lac.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

#include "denguecast/csv.hpp"

namespace denguecast::ingest {

std::string_view to_string(Category category) {
  switch (category) {
    case Category::PersonalExperience: return "personal_experience";
    case Category::Information: return "information";
    case Category::Opinion: return "opinion";
    case Category::Campaign: return "campaign";
    case Category::IronySarcasm: return "irony_sarcasm";
  }
  return "unknown";
}

std::optional<Category> parse_category(std::string_view text) {
  std::string lower(text);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (Category c : kCategories) {
    if (to_string(c) == lower) return c;
  }
  return std::nullopt;
}

Category decide(const Votes& votes, const std::array<Count, kCategoryCount>& class_counts) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < kCategoryCount; ++k) {
    if (votes[k] > votes[best] || (votes[k] == votes[best] && class_counts[k] > class_counts[best])) best = k;
  }
  return kCategories[best];
}

LacClassifier::LacClassifier(std::vector<LabeledDoc> training, LacConfig config)
    : docs_(std::move(training)), config_(config) {
  if (docs_.empty()) throw std::invalid_argument("LAC training corpus is empty");
  if (config_.min_support < 1) throw std::invalid_argument("LAC min_support must be >= 1");
  if (config_.max_rule_len < 1) throw std::invalid_argument("LAC max_rule_len must be >= 1");
  for (const LabeledDoc& d : docs_) {
    if (d.tokens.empty()) throw std::invalid_argument("LAC training document has no tokens");
    ++class_counts_[static_cast<std::size_t>(d.label)];
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < kCategoryCount; ++k) {
    if (class_counts_[k] > class_counts_[best]) best = k;
  }
  majority_ = kCategories[best];
}

Classification LacClassifier::classify(const TokenSet& query) const {
  const std::vector<std::string> q(query.begin(), query.end());
  const std::size_t max_len = static_cast<std::size_t>(config_.max_rule_len);

  // Antecedent (indices into q, increasing) -> per-label support.
  std::map<std::vector<std::size_t>, std::array<Count, kCategoryCount>> table;
  std::vector<std::size_t> projected;
  std::vector<std::size_t> combo;
  for (const LabeledDoc& doc : docs_) {
    projected.clear();
    auto it = doc.tokens.begin();
    for (std::size_t i = 0; i < q.size() && it != doc.tokens.end();) {
      if (*it < q[i]) {
        ++it;
      } else if (q[i] < *it) {
        ++i;
      } else {
        projected.push_back(i++);
        ++it;
      }
    }
    const std::size_t label = static_cast<std::size_t>(doc.label);
    auto enumerate = [&](auto&& self, std::size_t from) -> void {
      for (std::size_t j = from; j < projected.size(); ++j) {
        combo.push_back(projected[j]);
        ++table[combo][label];
        if (combo.size() < max_len) self(self, j + 1);
        combo.pop_back();
      }
    };
    enumerate(enumerate, 0);
  }

  Classification out;
  for (const auto& [antecedent, support] : table) {
    Count total = 0;
    for (Count s : support) total += s;
    for (std::size_t k = 0; k < kCategoryCount; ++k) {
      if (support[k] < config_.min_support) continue;
      Rule rule;
      for (std::size_t idx : antecedent) rule.antecedent.push_back(q[idx]);
      rule.consequent = kCategories[k];
      rule.support = support[k];
      rule.antecedent_support = total;
      rule.confidence = static_cast<double>(support[k]) / static_cast<double>(total);
      out.votes[k] += rule.confidence;
      out.rules.push_back(std::move(rule));
    }
  }

  if (out.rules.empty()) {
    out.label = majority_;
    out.fallback = true;
  } else {
    out.label = decide(out.votes, class_counts_);
  }
  return out;
}

Classification lac_classify(const TokenSet& query, std::span<const LabeledDoc> training, Count min_support,
                            int max_rule_len) {
  LacClassifier clf(std::vector<LabeledDoc>(training.begin(), training.end()), LacConfig{min_support, max_rule_len});
  return clf.classify(query);
}

std::vector<LabeledDoc> read_training_csv(std::istream& in, const TokenSet& stopwords) {
  csv::Reader reader(in);
  csv::expect_header(reader, {"label", "text"}, "training");
  std::vector<LabeledDoc> docs;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 2) throw csv::FormatError("training: expected 2 fields", reader.line());
    auto label = parse_category(f[0]);
    if (!label) throw csv::FormatError("training: unknown label '" + f[0] + "'", reader.line());
    TokenSet tokens = normalize_text(f[1], stopwords);
    if (tokens.empty()) continue;
    docs.push_back({std::move(tokens), *label});
  }
  return docs;
}

}  // namespace denguecast::ingest
