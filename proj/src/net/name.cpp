#include "dledger/net/name.hpp"

#include <stdexcept>

namespace dledger::net {

Name::Name(std::string uri)
  : uri_(std::move(uri))
{
  if (uri_.empty() || uri_[0] != '/')
    throw std::invalid_argument("name must start with '/': " + uri_);
  if (uri_ == "/")
    return;
  if (uri_.back() == '/' || uri_.find("//") != std::string::npos)
    throw std::invalid_argument("empty name component in " + uri_);
}

Name Name::from_components(const std::vector<std::string>& components)
{
  std::string uri;
  for (const auto& c : components) {
    if (c.empty() || c.find('/') != std::string::npos)
      throw std::invalid_argument("bad name component '" + c + "'");
    uri += '/';
    uri += c;
  }
  return uri.empty() ? Name() : Name(std::move(uri));
}

std::size_t Name::size() const
{
  if (uri_ == "/")
    return 0;
  std::size_t n = 0;
  for (char c : uri_)
    n += c == '/';
  return n;
}

std::vector<std::string> Name::components() const
{
  std::vector<std::string> out;
  if (uri_ == "/")
    return out;
  std::size_t pos = 1;
  while (pos <= uri_.size()) {
    auto next = uri_.find('/', pos);
    if (next == std::string::npos)
      next = uri_.size();
    out.emplace_back(uri_.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

std::string_view Name::component(std::size_t i) const
{
  std::string_view v(uri_);
  std::size_t pos = 1;
  for (std::size_t k = 0; k < i; ++k) {
    pos = v.find('/', pos);
    if (pos == std::string_view::npos)
      throw std::out_of_range("name component index");
    ++pos;
  }
  if (pos > v.size() || uri_ == "/")
    throw std::out_of_range("name component index");
  auto end = v.find('/', pos);
  return v.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
}

Name Name::prefix(std::size_t k) const
{
  if (k == 0)
    return Name();
  std::size_t pos = 0;
  for (std::size_t i = 0; i < k; ++i) {
    pos = uri_.find('/', pos + 1);
    if (pos == std::string::npos)
      return *this;
  }
  return Name(uri_.substr(0, pos));
}

Name Name::append(std::string_view component) const
{
  if (component.empty() || component.find('/') != std::string_view::npos)
    throw std::invalid_argument("bad name component");
  std::string uri = uri_ == "/" ? "" : uri_;
  uri += '/';
  uri += component;
  return Name(std::move(uri));
}

bool Name::is_prefix_of(const Name& other) const
{
  if (uri_ == "/")
    return true;
  const auto& o = other.uri_;
  return o.size() >= uri_.size() && o.compare(0, uri_.size(), uri_) == 0 &&
         (o.size() == uri_.size() || o[uri_.size()] == '/');
}

} // namespace dledger::net
