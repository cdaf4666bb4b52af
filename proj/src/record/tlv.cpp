#include "dledger/record/tlv.hpp"

#include <bit>
#include <cstring>

namespace dledger {

namespace {

void put_be(Bytes& out, std::uint64_t value, int width)
{
  for (int i = width - 1; i >= 0; --i)
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

std::uint64_t get_be(ByteView in, int width)
{
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i)
    v = (v << 8) | in[static_cast<std::size_t>(i)];
  return v;
}

} // namespace

void TlvWriter::put(std::uint8_t type, ByteView value)
{
  if (value.size() > UINT32_MAX)
    throw std::length_error("TLV value too large");
  out_.push_back(type);
  put_be(out_, value.size(), 4);
  out_.insert(out_.end(), value.begin(), value.end());
}

void TlvWriter::put_u8(std::uint8_t type, std::uint8_t value)
{
  std::uint8_t v[1] = {value};
  put(type, ByteView(v, 1));
}

void TlvWriter::put_u32(std::uint8_t type, std::uint32_t value)
{
  Bytes v;
  put_be(v, value, 4);
  put(type, v);
}

void TlvWriter::put_u64(std::uint8_t type, std::uint64_t value)
{
  Bytes v;
  put_be(v, value, 8);
  put(type, v);
}

void TlvWriter::put_f64(std::uint8_t type, double value)
{
  put_u64(type, std::bit_cast<std::uint64_t>(value));
}

std::size_t TlvWriter::begin(std::uint8_t type)
{
  out_.push_back(type);
  std::size_t marker = out_.size();
  out_.insert(out_.end(), 4, 0);
  return marker;
}

void TlvWriter::end(std::size_t marker)
{
  std::uint64_t len = out_.size() - marker - 4;
  if (len > UINT32_MAX)
    throw std::length_error("TLV value too large");
  for (int i = 0; i < 4; ++i)
    out_[marker + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(len >> (8 * (3 - i)));
}

std::uint8_t TlvReader::peek_type() const
{
  if (at_end())
    throw DecodeError("unexpected end of TLV input");
  return in_[pos_];
}

ByteView TlvReader::read(std::uint8_t type)
{
  if (in_.size() - pos_ < 5)
    throw DecodeError("truncated TLV header");
  if (in_[pos_] != type)
    throw DecodeError("unexpected TLV type " + std::to_string(in_[pos_]) + ", expected " +
                      std::to_string(type));
  std::uint64_t len = get_be(in_.subspan(pos_ + 1, 4), 4);
  if (in_.size() - pos_ - 5 < len)
    throw DecodeError("truncated TLV value");
  ByteView value = in_.subspan(pos_ + 5, len);
  pos_ += 5 + len;
  return value;
}

std::string TlvReader::read_string(std::uint8_t type)
{
  auto v = read(type);
  return std::string(v.begin(), v.end());
}

std::uint8_t TlvReader::read_u8(std::uint8_t type)
{
  auto v = read(type);
  if (v.size() != 1)
    throw DecodeError("bad u8 length");
  return v[0];
}

std::uint32_t TlvReader::read_u32(std::uint8_t type)
{
  auto v = read(type);
  if (v.size() != 4)
    throw DecodeError("bad u32 length");
  return static_cast<std::uint32_t>(get_be(v, 4));
}

std::uint64_t TlvReader::read_u64(std::uint8_t type)
{
  auto v = read(type);
  if (v.size() != 8)
    throw DecodeError("bad u64 length");
  return get_be(v, 8);
}

double TlvReader::read_f64(std::uint8_t type)
{
  return std::bit_cast<double>(read_u64(type));
}

void TlvReader::expect_end() const
{
  if (!at_end())
    throw DecodeError("trailing bytes after TLV element");
}

} // namespace dledger
