#include "dledger/record/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/x509.h>

#include <stdexcept>

namespace dledger {

Digest sha256(ByteView data)
{
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != kDigestSize)
    throw std::runtime_error("SHA-256 failed");
  return out;
}

Bytes hmac_sha256(ByteView key, ByteView message)
{
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(), message.size(),
           out.data(), &len) == nullptr)
    throw std::runtime_error("HMAC-SHA256 failed");
  out.resize(len);
  return out;
}

namespace {

struct PkeyDeleter
{
  void operator()(EVP_PKEY* key) const { EVP_PKEY_free(key); }
};
struct MdCtxDeleter
{
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

PkeyPtr load_private(ByteView der)
{
  const unsigned char* p = der.data();
  PkeyPtr key(d2i_AutoPrivateKey(nullptr, &p, static_cast<long>(der.size())));
  if (!key)
    throw std::invalid_argument("malformed ECDSA private key");
  return key;
}

PkeyPtr load_public(ByteView der)
{
  const unsigned char* p = der.data();
  return PkeyPtr(d2i_PUBKEY(nullptr, &p, static_cast<long>(der.size())));
}

} // namespace

KeyPair EcdsaP256Scheme::generate_key(std::mt19937_64&) const
{
  PkeyPtr key(EVP_EC_gen("P-256"));
  if (!key)
    throw std::runtime_error("ECDSA key generation failed");

  KeyPair pair;
  int priv_len = i2d_PrivateKey(key.get(), nullptr);
  int pub_len = i2d_PUBKEY(key.get(), nullptr);
  if (priv_len <= 0 || pub_len <= 0)
    throw std::runtime_error("ECDSA key serialization failed");
  pair.private_key.resize(static_cast<std::size_t>(priv_len));
  pair.public_key.resize(static_cast<std::size_t>(pub_len));
  unsigned char* p = pair.private_key.data();
  i2d_PrivateKey(key.get(), &p);
  p = pair.public_key.data();
  i2d_PUBKEY(key.get(), &p);
  return pair;
}

Bytes EcdsaP256Scheme::sign(ByteView private_key, ByteView message) const
{
  auto key = load_private(private_key);
  MdCtxPtr ctx(EVP_MD_CTX_new());
  std::size_t sig_len = 0;
  if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, EVP_sha256(), nullptr, key.get()) != 1 ||
      EVP_DigestSign(ctx.get(), nullptr, &sig_len, message.data(), message.size()) != 1)
    throw std::runtime_error("ECDSA signing failed");
  Bytes sig(sig_len);
  if (EVP_DigestSign(ctx.get(), sig.data(), &sig_len, message.data(), message.size()) != 1)
    throw std::runtime_error("ECDSA signing failed");
  sig.resize(sig_len);
  return sig;
}

bool EcdsaP256Scheme::verify(ByteView public_key, ByteView message, ByteView signature) const
{
  auto key = load_public(public_key);
  if (!key)
    return false;
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, EVP_sha256(), nullptr, key.get()) != 1)
    return false;
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                          message.size()) == 1;
}

HmacTestScheme::HmacTestScheme(Bytes shared_seed)
  : seed_(std::move(shared_seed))
{
}

KeyPair HmacTestScheme::generate_key(std::mt19937_64& rng) const
{
  KeyPair pair;
  pair.public_key.resize(16);
  for (std::size_t i = 0; i < pair.public_key.size(); i += 8) {
    auto word = rng();
    for (std::size_t j = 0; j < 8; ++j)
      pair.public_key[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
  }
  pair.private_key = derive(pair.public_key);
  return pair;
}

Bytes HmacTestScheme::derive(ByteView public_key) const
{
  return hmac_sha256(seed_, public_key);
}

Bytes HmacTestScheme::sign(ByteView private_key, ByteView message) const
{
  return hmac_sha256(private_key, message);
}

bool HmacTestScheme::verify(ByteView public_key, ByteView message, ByteView signature) const
{
  auto expected = hmac_sha256(derive(public_key), message);
  return expected.size() == signature.size() &&
         CRYPTO_memcmp(expected.data(), signature.data(), expected.size()) == 0;
}

std::shared_ptr<const SignatureScheme> make_signature_scheme(const std::string& name,
                                                             const Bytes& seed)
{
  if (name == "hmac-test")
    return std::make_shared<HmacTestScheme>(seed);
  if (name == "ecdsa-p256")
    return std::make_shared<EcdsaP256Scheme>();
  throw std::invalid_argument("unknown signature scheme: " + name);
}

} // namespace dledger
