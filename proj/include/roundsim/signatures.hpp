#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "roundsim/types.hpp"

namespace roundsim {

// Idealized unforgeable signature. Only a SigningAuthority can mint digests;
// anyone can verify.
struct SignatureToken {
  ProcessId signer;
  std::uint64_t digest = 0;
  friend bool operator==(const SignatureToken&, const SignatureToken&) = default;
};

bool verify(const SignatureToken& token, std::span<const std::uint8_t> content);

class ForgeryError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SigningAuthority;

class Signer {
 public:
  ProcessId self() const { return self_; }
  SignatureToken sign(std::span<const std::uint8_t> content) const;

 private:
  friend class SigningAuthority;
  Signer(const SigningAuthority* authority, ProcessId self) : authority_(authority), self_(self) {}
  const SigningAuthority* authority_;
  ProcessId self_;
};

// Signing oracle for a Byzantine coalition: it can sign only on behalf of
// corrupted processes.
class CoalitionSigner {
 public:
  const ProcessSet& coalition() const { return coalition_; }
  SignatureToken sign_as(ProcessId who, std::span<const std::uint8_t> content) const;

 private:
  friend class SigningAuthority;
  CoalitionSigner(const SigningAuthority* authority, ProcessSet coalition)
      : authority_(authority), coalition_(std::move(coalition)) {}
  const SigningAuthority* authority_;
  ProcessSet coalition_;
};

class SigningAuthority {
 public:
  explicit SigningAuthority(bool record = false) : record_(record) {}
  SigningAuthority(const SigningAuthority&) = delete;
  SigningAuthority& operator=(const SigningAuthority&) = delete;

  Signer signer_for(ProcessId p) const { return Signer(this, p); }
  CoalitionSigner coalition(ProcessSet members) const { return CoalitionSigner(this, std::move(members)); }

  // Every token minted so far, when recording is enabled.
  std::vector<SignatureToken> issued() const;
  bool was_issued(const SignatureToken& token) const;

 private:
  friend class Signer;
  friend class CoalitionSigner;
  SignatureToken mint(ProcessId signer, std::span<const std::uint8_t> content) const;

  bool record_;
  mutable std::mutex mu_;
  mutable std::vector<SignatureToken> issued_;
};

}  // namespace roundsim
