// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace phpvd {

enum class Granularity { Function, File };

std::string_view to_string(Granularity g) noexcept;
/// Accepts "function"/"func" and "file" (case-insensitive).
Granularity parse_granularity(std::string_view s);

}  // namespace phpvd
