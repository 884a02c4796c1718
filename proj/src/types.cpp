#include "roundsim/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace roundsim {

std::string to_string(ProcessId p) { return "p" + std::to_string(p.index); }

std::vector<ProcessId> all_processes(int n) {
  std::vector<ProcessId> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) out.emplace_back(i);
  return out;
}

std::string to_string(const Value& v) {
  if (v.size() == 1) return std::to_string(v[0]);
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + "]";
}

namespace {
const Bytes& empty_bytes() {
  static const Bytes kEmpty;
  return kEmpty;
}
}  // namespace

Payload::Payload(Bytes bytes) : data_(std::make_shared<const Bytes>(std::move(bytes))) {}

const Bytes& Payload::bytes() const { return data_ ? *data_ : empty_bytes(); }

bool operator==(const Payload& a, const Payload& b) {
  if (a.data_ == b.data_) return true;
  return a.bytes() == b.bytes();
}

std::strong_ordering operator<=>(const Payload& a, const Payload& b) {
  if (a.data_ == b.data_) return std::strong_ordering::equal;
  const auto& x = a.bytes();
  const auto& y = b.bytes();
  return std::lexicographical_compare_three_way(x.begin(), x.end(), y.begin(), y.end());
}

std::string to_string(const Message& m) {
  return "(" + to_string(m.sender) + "->" + to_string(m.receiver) + ", round " +
         std::to_string(m.round) + ")";
}

void normalize(MessageSet& set) { std::sort(set.begin(), set.end()); }

bool contains_identity(const MessageSet& set, const Message& m) {
  auto it = std::lower_bound(set.begin(), set.end(), m, [](const Message& a, const Message& b) {
    return a.identity() < b.identity();
  });
  return it != set.end() && it->identity() == m.identity();
}

bool contains_exact(const MessageSet& set, const Message& m) {
  return std::binary_search(set.begin(), set.end(), m);
}

StateBlob::StateBlob() : StateBlob(Bytes{}) {}

StateBlob::StateBlob(Bytes bytes)
    : bytes_(std::make_shared<const Bytes>(std::move(bytes))), digest_(fnv1a64(*bytes_)) {}

StateBlob StateBlob::digest_only(std::uint64_t digest) {
  StateBlob b;
  b.bytes_.reset();
  b.digest_ = digest;
  return b;
}

const Bytes& StateBlob::bytes() const {
  if (!bytes_) throw std::logic_error("internal state is known only by its digest");
  return *bytes_;
}

}  // namespace roundsim
