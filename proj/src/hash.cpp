#include "aov/hash.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>

#include <algorithm>

#include "aov/error.hpp"

namespace aov {

Hash256 sha256(ByteView data) {
  Hash256 out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

Hash256 double_sha256(ByteView data) {
  Hash256 first = sha256(data);
  return sha256(first);
}

Hash256 hmac_sha256(ByteView key, ByteView message) {
  Hash256 out{};
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(), message.size(),
           out.data(), &len) == nullptr ||
      len != out.size()) {
    throw std::runtime_error("HMAC-SHA-256 failed");
  }
  return out;
}

Bytes sha256_expand(ByteView data, std::size_t out_len) {
  Bytes out;
  out.reserve(out_len + 32);
  for (std::uint32_t counter = 0; out.size() < out_len; ++counter) {
    Bytes block;
    append_u32_be(block, counter);
    append(block, data);
    Hash256 h = sha256(block);
    append(out, h);
  }
  out.resize(out_len);
  return out;
}

}  // namespace aov
