// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phpvd/common/granularity.hpp"
#include "phpvd/php/keep_list.hpp"
#include "phpvd/php/normalize.hpp"
#include "phpvd/php/parser.hpp"
#include "phpvd/php/vocabulary.hpp"

namespace phpvd::cfg {

constexpr std::size_t kNodeLength = 20;

using Edge = std::pair<std::size_t, std::size_t>;

/// Line-level control-flow graph. Node i covers source line `lines[i]`
/// (0 for the synthetic file entry) and owns ids[i*20 .. i*20+19].
struct Cfg {
    std::vector<php::TokenId> ids;   // node_count() x kNodeLength, row-major
    std::vector<std::size_t> lines;  // one per node, ascending
    std::vector<Edge> edges;         // directed, sorted, no self-loops
    std::size_t entry = 0;
    std::vector<std::size_t> exits;  // sorted node indices
    std::vector<bool> dead;          // unreachable from entry

    std::size_t node_count() const noexcept { return lines.size(); }
    std::span<const php::TokenId> node_ids(std::size_t i) const {
        return std::span(ids).subspan(i * kNodeLength, kNodeLength);
    }

    bool operator==(const Cfg&) const = default;
};

struct CfgStats {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t max_out_degree = 0;

    bool operator==(const CfgStats&) const = default;
};

/// Builds the CFG of a parsed unit.
///
/// Function granularity: when the unit is a single function declaration the
/// graph is its body; otherwise the unit's statements are taken as-is.
/// File granularity: node 0 is a synthetic entry linked to the top-level code
/// and to the entry of every function and method body.
///
/// `normalized` must be normalize(unit.tokens, ...). Throws EmptyUnit when
/// the unit has no executable line.
Cfg build_cfg(const php::ParsedUnit& unit, std::span<const php::NormalizedToken> normalized,
              const php::Vocabulary& vocab, Granularity granularity);

/// Lex + parse + normalize + build. Throws LexError, ParseError, EmptyUnit.
Cfg build_cfg(std::string_view source, Granularity granularity, const php::Vocabulary& vocab,
              const php::KeepList& keep = php::KeepList());

/// One node holding the last 20 tokens of the unit, no edges. Used when a
/// unit has no executable line or does not parse.
Cfg single_node_cfg(std::span<const php::NormalizedToken> normalized, const php::Vocabulary& vocab);

CfgStats cfg_stats(const Cfg& g);

/// "N <count>" followed by one "i -> j" line per edge.
std::string dump(const Cfg& g);

}  // namespace phpvd::cfg
