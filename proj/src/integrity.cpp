#include "mcp/integrity.hpp"

#include <openssl/hmac.h>

#include <algorithm>
#include <cstring>

namespace mcp::integrity {

std::array<uint8_t, 32> hmac_sha256(ByteView key, ByteView msg) {
    std::array<uint8_t, 32> out{};
    unsigned int out_len = 0;
    HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), msg.data(), msg.size(),
         out.data(), &out_len);
    return out;
}

Bytes canonical_bytes(const wire::Packet& p) {
    if (p.scratch && p.scratch->mode == wire::IntegrityMode::WRITABLE) {
        wire::Packet masked = p;
        std::fill(masked.scratch->value.begin(), masked.scratch->value.end(), uint8_t{0});
        Bytes enc = wire::encode(masked);
        enc.resize(enc.size() - wire::kTagLen);
        return enc;
    }
    Bytes enc = wire::encode(p);
    enc.resize(enc.size() - wire::kTagLen);
    return enc;
}

wire::Tag compute_tag(const ConnectionKey& key, const wire::Packet& p) {
    auto mac = hmac_sha256(key.key, canonical_bytes(p));
    wire::Tag tag;
    std::copy_n(mac.begin(), tag.size(), tag.begin());
    return tag;
}

VerifyResult verify(const ConnectionKey& key, const wire::Packet& p) {
    wire::Tag expected = compute_tag(key, p);
    uint8_t acc = 0;
    for (size_t i = 0; i < expected.size(); ++i) acc |= expected[i] ^ p.tag[i];
    return acc == 0 ? VerifyResult::OK : VerifyResult::FAIL;
}

}  // namespace mcp::integrity
