// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace phpvd {

/// Incremental 64-bit FNV-1a. Stable across platforms and runs.
class Fnv1a64 {
public:
    Fnv1a64& update(std::string_view bytes) noexcept;
    Fnv1a64& update_u64(std::uint64_t v) noexcept;
    std::uint64_t digest() const noexcept { return state_; }
    std::string hex() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string to_hex(std::uint64_t v);

}  // namespace phpvd
