#pragma once

#include "aov/bytes.hpp"

namespace aov {

Hash256 sha256(ByteView data);
Hash256 double_sha256(ByteView data);
Hash256 hmac_sha256(ByteView key, ByteView message);

/// Counter-mode SHA-256 expansion: SHA256(be32(0) || data) || SHA256(be32(1) || data) || ...
/// truncated to `out_len` bytes.
Bytes sha256_expand(ByteView data, std::size_t out_len);

}  // namespace aov
