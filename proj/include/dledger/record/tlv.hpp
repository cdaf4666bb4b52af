#pragma once

#include "dledger/record/bytes.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dledger {

class DecodeError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Element layout: 1-byte type, 4-byte big-endian length, value.
class TlvWriter
{
public:
  void put(std::uint8_t type, ByteView value);
  void put(std::uint8_t type, std::string_view value) { put(type, as_bytes(value)); }
  void put_u8(std::uint8_t type, std::uint8_t value);
  void put_u32(std::uint8_t type, std::uint32_t value);
  void put_u64(std::uint8_t type, std::uint64_t value);
  void put_f64(std::uint8_t type, double value);

  // Nested elements: begin() reserves the header, end() patches the length.
  std::size_t begin(std::uint8_t type);
  void end(std::size_t marker);

  const Bytes& bytes() const& { return out_; }
  Bytes bytes() && { return std::move(out_); }

private:
  Bytes out_;
};

class TlvReader
{
public:
  explicit TlvReader(ByteView input)
    : in_(input)
  {
  }

  bool at_end() const { return pos_ == in_.size(); }

  // Type of the next element without consuming it; throws when at_end().
  std::uint8_t peek_type() const;

  // Consumes the next element, requiring it to carry `type`.
  ByteView read(std::uint8_t type);
  std::string read_string(std::uint8_t type);
  std::uint8_t read_u8(std::uint8_t type);
  std::uint32_t read_u32(std::uint8_t type);
  std::uint64_t read_u64(std::uint8_t type);
  double read_f64(std::uint8_t type);

  void expect_end() const;

private:
  ByteView in_;
  std::size_t pos_ = 0;
};

} // namespace dledger
