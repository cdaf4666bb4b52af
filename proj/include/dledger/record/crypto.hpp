#pragma once

#include "dledger/record/bytes.hpp"

#include <array>
#include <memory>
#include <random>
#include <string>

namespace dledger {

inline constexpr std::size_t kDigestSize = 32;
using Digest = std::array<std::uint8_t, kDigestSize>;

/// SHA-256, the single hash used for record names, sync digests and key derivation.
Digest sha256(ByteView data);

struct KeyPair
{
  Bytes public_key;
  Bytes private_key;
};

/// Pluggable signature provider used for proof-of-authentication.
///
/// Implementations must be stateless after construction so a single instance
/// can be shared by every peer of a simulation.
class SignatureScheme
{
public:
  virtual ~SignatureScheme() = default;

  virtual std::string name() const = 0;

  /// `rng` drives key material for deterministic schemes; schemes backed by a
  /// system entropy source may ignore it.
  virtual KeyPair generate_key(std::mt19937_64& rng) const = 0;

  virtual Bytes sign(ByteView private_key, ByteView message) const = 0;

  virtual bool verify(ByteView public_key, ByteView message, ByteView signature) const = 0;
};

/// ECDSA over NIST P-256 with SHA-256 (DER signatures, uncompressed public points).
class EcdsaP256Scheme final : public SignatureScheme
{
public:
  std::string name() const override { return "ecdsa-p256"; }
  KeyPair generate_key(std::mt19937_64& rng) const override;
  Bytes sign(ByteView private_key, ByteView message) const override;
  bool verify(ByteView public_key, ByteView message, ByteView signature) const override;
};

/// Keyed-MAC test scheme for large simulations.
///
/// The public key is a random key id; the signing key is HMAC-SHA256(seed, key id),
/// so any verifier holding the shared seed can re-derive it. Offers creator
/// binding only against parties that do not know the seed.
class HmacTestScheme final : public SignatureScheme
{
public:
  explicit HmacTestScheme(Bytes shared_seed);

  std::string name() const override { return "hmac-test"; }
  KeyPair generate_key(std::mt19937_64& rng) const override;
  Bytes sign(ByteView private_key, ByteView message) const override;
  bool verify(ByteView public_key, ByteView message, ByteView signature) const override;

  const Bytes& seed() const { return seed_; }

private:
  Bytes derive(ByteView public_key) const;

  Bytes seed_;
};

Bytes hmac_sha256(ByteView key, ByteView message);

/// Builds a scheme from its textual name ("hmac-test" or "ecdsa-p256").
std::shared_ptr<const SignatureScheme> make_signature_scheme(const std::string& name,
                                                             const Bytes& seed);

} // namespace dledger
