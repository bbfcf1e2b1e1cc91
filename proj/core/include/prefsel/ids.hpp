#pragma once

#include <compare>
#include <functional>
#include <string>
#include <utility>

namespace prefsel {

/// String identifier tagged with the kind of entity it names.
template <typename Tag>
class Id {
 public:
  Id() = default;
  explicit Id(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend bool operator==(const Id&, const Id&) = default;
  friend auto operator<=>(const Id& a, const Id& b) { return a.value_.compare(b.value_) <=> 0; }

 private:
  std::string value_;
};

using AlternativeId = Id<struct AlternativeTag>;
using CriterionId = Id<struct CriterionTag>;

}  // namespace prefsel

template <typename Tag>
struct std::hash<prefsel::Id<Tag>> {
  std::size_t operator()(const prefsel::Id<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
