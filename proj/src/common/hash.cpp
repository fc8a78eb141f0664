// SPDX-License-Identifier: Apache-2.0
#include "phpvd/common/hash.hpp"

namespace phpvd {

namespace {
constexpr std::uint64_t kPrime = 0x100000001b3ULL;
}

Fnv1a64& Fnv1a64::update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
        state_ ^= c;
        state_ *= kPrime;
    }
    return *this;
}

Fnv1a64& Fnv1a64::update_u64(std::uint64_t v) noexcept {
    for (int i = 0; i < 8; ++i) {
        state_ ^= (v >> (8 * i)) & 0xffU;
        state_ *= kPrime;
    }
    return *this;
}

std::string Fnv1a64::hex() const { return to_hex(state_); }

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    return Fnv1a64{}.update(bytes).digest();
}

std::string to_hex(std::uint64_t v) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kDigits[v & 0xfU];
        v >>= 4;
    }
    return out;
}

}  // namespace phpvd
