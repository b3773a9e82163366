#include "mlnqa/entailment.h"

#include <algorithm>
#include <cctype>

namespace mlnqa {

std::string NormalizeString(std::string_view text) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)); };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  });
  return out;
}

void EntailmentTable::Set(std::string_view from, std::string_view to,
                          double score) {
  entries_[{NormalizeString(from), NormalizeString(to)}] =
      std::clamp(score, 0.0, 1.0);
}

std::optional<double> EntailmentTable::Lookup(std::string_view from,
                                              std::string_view to) const {
  Key key{NormalizeString(from), NormalizeString(to)};
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  if (key.first == key.second) return 1.0;
  return std::nullopt;
}

}  // namespace mlnqa
