// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "phpvd/php/lexer.hpp"
#include "phpvd/php/token.hpp"

namespace phpvd::php {

enum class StmtKind {
    Simple,
    Return,
    Break,
    Continue,
    Exit,
    Throw,
    Block,
    If,
    While,
    DoWhile,
    For,
    Foreach,
    Switch,
    Try,
    Function,
    Class,
};

/// Inclusive range of indices into the token vector the unit was parsed from.
struct TokenRange {
    std::size_t first = 0;
    std::size_t last = 0;
};

struct Stmt;

struct SwitchCase {
    TokenRange head;  // `case expr:` or `default:`
    std::size_t line = 0;
    bool is_default = false;
    std::vector<Stmt> body;
};

struct CatchClause {
    TokenRange head;  // `catch (...)`
    std::size_t line = 0;
    std::vector<Stmt> body;
};

/// Statement-level syntax tree. Expressions stay opaque token ranges; only
/// control structure and declarations are modelled.
///
/// Field use by kind:
///   If        head = `if (...)`, body = then branch, else_body = else branch
///             (an elseif becomes a nested If inside else_body)
///   loops     head = loop header, body = loop body; DoWhile also has tail
///             (the `while (...)` after the body)
///   Switch    head = `switch (...)`, cases
///   Try       body = try block, catches, finally_body
///   Function  name, span, body (empty with has_body=false when abstract)
///   Class     name, members (methods as Function statements)
struct Stmt {
    StmtKind kind = StmtKind::Simple;
    TokenRange head;
    std::size_t line = 0;
    TokenRange span;  // whole statement
    std::size_t end_line = 0;

    std::vector<Stmt> body;
    std::vector<Stmt> else_body;
    bool has_else = false;

    TokenRange tail;
    std::size_t tail_line = 0;

    std::vector<SwitchCase> cases;
    std::vector<CatchClause> catches;
    std::vector<Stmt> finally_body;

    std::string name;
    bool has_body = true;
    std::vector<Stmt> members;
};

struct ParsedUnit {
    std::vector<RawToken> tokens;
    std::vector<Stmt> statements;
};

/// Parses the supported PHP subset into statements. Advanced constructs
/// (traits bodies, attributes, generators) are kept as opaque statements.
/// Throws LexError or ParseError.
ParsedUnit parse(std::string_view source, LexMode mode);
ParsedUnit parse(std::vector<RawToken> tokens);

}  // namespace phpvd::php
