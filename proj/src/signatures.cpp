#include "roundsim/signatures.hpp"

#include <algorithm>

namespace roundsim {

namespace {
std::uint64_t keyed_digest(ProcessId signer, std::span<const std::uint8_t> content) {
  std::uint64_t key = mix64(0x5157a7e5eed0f00dULL ^ static_cast<std::uint64_t>(signer.index));
  return mix64(fnv1a64(content, key) ^ key);
}
}  // namespace

bool verify(const SignatureToken& token, std::span<const std::uint8_t> content) {
  return token.signer.index >= 1 && token.digest == keyed_digest(token.signer, content);
}

SignatureToken Signer::sign(std::span<const std::uint8_t> content) const {
  return authority_->mint(self_, content);
}

SignatureToken CoalitionSigner::sign_as(ProcessId who, std::span<const std::uint8_t> content) const {
  if (!coalition_.contains(who))
    throw ForgeryError("coalition cannot sign on behalf of correct process " + to_string(who));
  return authority_->mint(who, content);
}

SignatureToken SigningAuthority::mint(ProcessId signer, std::span<const std::uint8_t> content) const {
  SignatureToken token{signer, keyed_digest(signer, content)};
  if (record_) {
    std::lock_guard lock(mu_);
    issued_.push_back(token);
  }
  return token;
}

std::vector<SignatureToken> SigningAuthority::issued() const {
  std::lock_guard lock(mu_);
  return issued_;
}

bool SigningAuthority::was_issued(const SignatureToken& token) const {
  std::lock_guard lock(mu_);
  return std::find(issued_.begin(), issued_.end(), token) != issued_.end();
}

}  // namespace roundsim
