#pragma once

#include <cstdint>
#include <gmpxx.h>
#include <memory>
#include <string>
#include <vector>

#include "refed/rng.hpp"

namespace refed {

struct PublicKey {
    mpz_class n;
    mpz_class n_squared;
    std::uint64_t key_id = 0;
};

/// Held by clients only; the server never sees one. Decrypt calls are counted
/// so tests can assert the server-side count stays at zero.
struct PrivateKey {
    mpz_class lambda;
    mpz_class mu;
    mpz_class n;
    mpz_class n_squared;
    std::uint64_t key_id = 0;
    std::shared_ptr<std::size_t> decrypt_calls = std::make_shared<std::size_t>(0);
};

/// Trusted third party: generates the keypair and hands the private key to
/// clients. Test-grade modulus sizes (default 512 bits).
class KeyAuthority {
public:
    KeyAuthority(std::uint64_t seed, std::size_t modulus_bits = 512);
    const PublicKey& public_key() const { return pub_; }
    /// Clients fetch the shared private key; the server must not call this.
    const PrivateKey& issue_private_key() const { return priv_; }
    std::size_t decrypt_call_count() const { return *priv_.decrypt_calls; }

private:
    PublicKey pub_;
    PrivateKey priv_;
};

/// Vector of Paillier ciphertexts over fixed-point encodings (scale 2^scale_bits).
struct CipherVector {
    std::vector<mpz_class> c;
    unsigned scale_bits = 16;
    std::uint64_t key_id = 0;
};

constexpr unsigned kDefaultScaleBits = 16;
/// Extra precision used when multiplying by a real scalar (e.g. 1/count).
constexpr unsigned kScalarPrecisionBits = 32;

CipherVector he_encrypt(const std::vector<double>& values, const PublicKey& pub, Rng& rng,
                        unsigned scale_bits = kDefaultScaleBits);
std::vector<double> he_decrypt(const CipherVector& cv, const PrivateKey& priv);

/// Componentwise homomorphic addition: Dec(a (+) b) == a + b at fixed-point
/// resolution. Throws on key or scale mismatch.
CipherVector he_add(const CipherVector& a, const CipherVector& b, const PublicKey& pub);

/// Multiplication by a plaintext real scalar; the result's scale grows by
/// kScalarPrecisionBits.
CipherVector he_scalar_mult(const CipherVector& cv, double scalar, const PublicKey& pub);

/// Ciphertext of the coordinate-wise mean: homomorphic sum followed by a
/// plaintext-scalar multiply by 1/count. Performed without any decryption.
CipherVector he_aggregate_mean(const std::vector<CipherVector>& inputs, const PublicKey& pub);

}  // namespace refed
