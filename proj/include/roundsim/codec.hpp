#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace roundsim {

using Bytes = std::vector<std::uint8_t>;

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(std::span<const std::uint8_t> data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t mix64(std::uint64_t x);

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(std::string_view hex);
std::string u64_to_hex(std::uint64_t v);
std::uint64_t u64_from_hex(std::string_view hex);

// Append-only little-endian writer with LEB128 varints.
class ByteWriter {
 public:
  ByteWriter& varint(std::uint64_t v);
  ByteWriter& svarint(std::int64_t v);
  ByteWriter& u64(std::uint64_t v);
  ByteWriter& bytes(std::span<const std::uint8_t> data);  // length-prefixed
  ByteWriter& raw(std::span<const std::uint8_t> data);
  const Bytes& data() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}
  std::uint64_t varint();
  std::int64_t svarint();
  std::uint64_t u64();
  Bytes bytes();
  bool done() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace roundsim
