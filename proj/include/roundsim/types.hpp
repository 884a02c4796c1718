#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "roundsim/codec.hpp"

namespace roundsim {

// Processes are numbered 1..n.
struct ProcessId {
  int index = 0;
  constexpr ProcessId() = default;
  constexpr explicit ProcessId(int i) : index(i) {}
  friend constexpr auto operator<=>(const ProcessId&, const ProcessId&) = default;
};

using ProcessSet = std::set<ProcessId>;

std::string to_string(ProcessId p);
std::vector<ProcessId> all_processes(int n);

// A decided value. Binary algorithms decide {0} or {1}; vector-valued
// algorithms (interactive consistency) decide one entry per process.
using Value = std::vector<std::int64_t>;
inline Value scalar(std::int64_t v) { return Value{v}; }
std::string to_string(const Value& v);

// Immutable message payload, shared between copies.
class Payload {
 public:
  Payload() = default;
  explicit Payload(Bytes bytes);

  const Bytes& bytes() const;
  std::size_t size() const { return data_ ? data_->size() : 0; }
  bool empty() const { return size() == 0; }

  friend bool operator==(const Payload& a, const Payload& b);
  friend std::strong_ordering operator<=>(const Payload& a, const Payload& b);

 private:
  std::shared_ptr<const Bytes> data_;
};

struct Message {
  ProcessId sender;
  ProcessId receiver;
  int round = 0;
  Payload payload;

  auto identity() const { return std::tuple(sender, receiver, round); }
  friend bool operator==(const Message&, const Message&) = default;
  friend std::strong_ordering operator<=>(const Message& a, const Message& b) {
    if (auto c = a.identity() <=> b.identity(); c != 0) return c;
    return a.payload <=> b.payload;
  }
};

std::string to_string(const Message& m);

// Message sets are sorted vectors; identity is (sender, receiver, round).
using MessageSet = std::vector<Message>;
void normalize(MessageSet& set);
bool contains_identity(const MessageSet& set, const Message& m);
bool contains_exact(const MessageSet& set, const Message& m);

// Opaque algorithm state. A trace may carry only the digest, in which case
// the bytes are unavailable but equality still works.
class StateBlob {
 public:
  StateBlob();
  explicit StateBlob(Bytes bytes);
  static StateBlob digest_only(std::uint64_t digest);

  bool has_bytes() const { return static_cast<bool>(bytes_); }
  const Bytes& bytes() const;
  std::uint64_t digest() const { return digest_; }

  friend bool operator==(const StateBlob& a, const StateBlob& b) { return a.digest_ == b.digest_; }

 private:
  std::shared_ptr<const Bytes> bytes_;
  std::uint64_t digest_ = 0;
};

struct ProcState {
  ProcessId process;
  int round = 1;
  std::int64_t proposal = 0;
  std::optional<Value> decision;
  StateBlob internal;

  friend bool operator==(const ProcState&, const ProcState&) = default;
};

}  // namespace roundsim
