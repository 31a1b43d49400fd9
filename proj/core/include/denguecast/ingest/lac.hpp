#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "denguecast/core.hpp"
#include "denguecast/ingest/text.hpp"

namespace denguecast::ingest {

enum class Category { PersonalExperience, Information, Opinion, Campaign, IronySarcasm };
inline constexpr std::size_t kCategoryCount = 5;
inline constexpr std::array<Category, kCategoryCount> kCategories = {
    Category::PersonalExperience, Category::Information, Category::Opinion, Category::Campaign,
    Category::IronySarcasm};

/// snake_case names: personal_experience, information, opinion, campaign, irony_sarcasm.
std::string_view to_string(Category category);
/// Accepts the snake_case names, case-insensitively.
std::optional<Category> parse_category(std::string_view text);

struct LabeledDoc {
  TokenSet tokens;
  Category label = Category::Information;
};

struct Rule {
  std::vector<std::string> antecedent;  ///< sorted
  Category consequent = Category::Information;
  Count support = 0;             ///< docs containing antecedent with this label
  Count antecedent_support = 0;  ///< docs containing antecedent
  double confidence = 0.0;
};

using Votes = std::array<double, kCategoryCount>;

struct Classification {
  Category label = Category::Information;
  Votes votes{};
  bool fallback = false;  ///< no rule applied; majority training label used
  std::vector<Rule> rules;
};

struct LacConfig {
  Count min_support = 1;
  int max_rule_len = 2;
};

/// Lazy associative classifier over an immutable training corpus. Training
/// is projected onto each query's tokens; rules are enumerated in sorted
/// (antecedent, label) order and their confidences summed per label.
class LacClassifier {
 public:
  LacClassifier(std::vector<LabeledDoc> training, LacConfig config = {});

  Classification classify(const TokenSet& query) const;

  std::span<const LabeledDoc> training() const noexcept { return docs_; }
  const std::array<Count, kCategoryCount>& class_counts() const noexcept { return class_counts_; }
  /// Largest class; ties go to the earlier label.
  Category majority() const noexcept { return majority_; }

 private:
  std::vector<LabeledDoc> docs_;
  LacConfig config_;
  std::array<Count, kCategoryCount> class_counts_{};
  Category majority_ = Category::PersonalExperience;
};

/// Argmax of votes; ties by larger class count, then label order.
Category decide(const Votes& votes, const std::array<Count, kCategoryCount>& class_counts);

/// One-shot convenience wrapper.
Classification lac_classify(const TokenSet& query, std::span<const LabeledDoc> training, Count min_support = 1,
                            int max_rule_len = 2);

/// CSV `label,text`; text is normalised with `stopwords`. Documents whose
/// token set is empty are skipped.
std::vector<LabeledDoc> read_training_csv(std::istream& in, const TokenSet& stopwords);

}  // namespace denguecast::ingest
