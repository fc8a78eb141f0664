// SPDX-License-Identifier: Apache-2.0
#include "phpvd/php/functions.hpp"

#include <algorithm>

namespace phpvd::php {

namespace {

void collect(const std::vector<Stmt>& stmts, const ParsedUnit& unit, std::string_view source,
             std::vector<FunctionSpan>& out);

void collect_one(const Stmt& s, const ParsedUnit& unit, std::string_view source,
                 std::vector<FunctionSpan>& out) {
    if (s.kind == StmtKind::Function && s.has_body) {
        const auto& first = unit.tokens[s.span.first];
        const auto& last = unit.tokens[s.span.last];
        const std::size_t end = last.offset + last.text.size();
        out.push_back({s.name, first.line, last.end_line(),
                       std::string(source.substr(first.offset, end - first.offset))});
    }
    collect(s.body, unit, source, out);
    collect(s.else_body, unit, source, out);
    collect(s.finally_body, unit, source, out);
    collect(s.members, unit, source, out);
    for (const auto& c : s.cases) collect(c.body, unit, source, out);
    for (const auto& c : s.catches) collect(c.body, unit, source, out);
}

void collect(const std::vector<Stmt>& stmts, const ParsedUnit& unit, std::string_view source,
             std::vector<FunctionSpan>& out) {
    for (const auto& s : stmts) collect_one(s, unit, source, out);
}

}  // namespace

std::vector<FunctionSpan> extract_functions(const ParsedUnit& unit, std::string_view source) {
    std::vector<FunctionSpan> out;
    collect(unit.statements, unit, source, out);
    std::stable_sort(out.begin(), out.end(), [](const FunctionSpan& a, const FunctionSpan& b) {
        return a.start_line < b.start_line;
    });
    return out;
}

std::vector<FunctionSpan> extract_functions(std::string_view source, LexMode mode) {
    return extract_functions(parse(source, mode), source);
}

}  // namespace phpvd::php
