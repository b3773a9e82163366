#ifndef MLNQA_ENTAILMENT_H_
#define MLNQA_ENTAILMENT_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace mlnqa {

/// Trims surrounding whitespace and lowercases. Underscores are kept, so
/// "thick_fur" and "thick fur" stay distinct.
std::string NormalizeString(std::string_view text);

/// Directed lexical entailment scores in [0,1]. Closed-world: a pair with no
/// entry scores 0, except self-pairs which default to 1.
class EntailmentTable {
 public:
  using Key = std::pair<std::string, std::string>;

  /// Later calls override earlier ones. The score is clamped to [0,1].
  void Set(std::string_view from, std::string_view to, double score);

  /// Explicit entry, or 1.0 for a self-pair without one.
  std::optional<double> Lookup(std::string_view from, std::string_view to) const;
  double Score(std::string_view from, std::string_view to) const {
    return Lookup(from, to).value_or(0.0);
  }

  const std::map<Key, double>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

  bool operator==(const EntailmentTable&) const = default;

 private:
  std::map<Key, double> entries_;
};

}  // namespace mlnqa

#endif  // MLNQA_ENTAILMENT_H_
