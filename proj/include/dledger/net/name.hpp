#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace dledger::net {

/// Hierarchical name, stored as its canonical URI ("/a/b/c"). The root name is "/".
class Name
{
public:
  Name()
    : uri_("/")
  {
  }

  /// Throws std::invalid_argument unless `uri` starts with '/' and has no empty components.
  explicit Name(std::string uri);

  static Name from_components(const std::vector<std::string>& components);

  const std::string& uri() const { return uri_; }
  std::size_t size() const;
  std::vector<std::string> components() const;
  std::string_view component(std::size_t i) const;

  /// First `k` components.
  Name prefix(std::size_t k) const;
  Name append(std::string_view component) const;
  bool is_prefix_of(const Name& other) const;

  auto operator<=>(const Name&) const = default;
  bool operator==(const Name&) const = default;

private:
  std::string uri_;
};

} // namespace dledger::net

template <>
struct std::hash<dledger::net::Name>
{
  std::size_t operator()(const dledger::net::Name& n) const noexcept
  {
    return std::hash<std::string>{}(n.uri());
  }
};
