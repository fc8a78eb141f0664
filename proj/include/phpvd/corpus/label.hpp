// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace phpvd {

enum class Label : std::size_t { Safe = 0, XSS = 1, SQLi = 2, OSCI = 3 };

constexpr std::size_t kNumLabels = 4;
constexpr std::array<Label, kNumLabels> kAllLabels = {Label::Safe, Label::XSS, Label::SQLi, Label::OSCI};

constexpr std::size_t index_of(Label l) noexcept { return static_cast<std::size_t>(l); }
constexpr bool is_unsafe(Label l) noexcept { return l != Label::Safe; }

/// "Safe", "XSS", "SQLi", "OSCI".
std::string_view to_string(Label l) noexcept;

/// Case-insensitive; throws FormatError on anything else.
Label parse_label(std::string_view text);

/// Throws FormatError when i >= 4.
Label label_from_index(std::size_t i);

}  // namespace phpvd
