#ifndef GAZEQC_DIGEST_HPP
#define GAZEQC_DIGEST_HPP

#include <string>
#include <string_view>

namespace gazeqc {

// Lowercase hex SHA-256 of the given bytes, prefixed "sha256:".
std::string sha256_digest(std::string_view bytes);

}  // namespace gazeqc

#endif  // GAZEQC_DIGEST_HPP
