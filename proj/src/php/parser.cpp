// SPDX-License-Identifier: Apache-2.0
#include "phpvd/php/parser.hpp"

#include <initializer_list>
#include <optional>

#include "phpvd/common/error.hpp"

namespace phpvd::php {

namespace {

bool opens(const RawToken& t) {
    return t.kind == TokenKind::Punctuation && (t.text == "(" || t.text == "[" || t.text == "{" || t.text == "#[");
}

bool closes(const RawToken& t) {
    return t.kind == TokenKind::Punctuation && (t.text == ")" || t.text == "]" || t.text == "}");
}

char closer_for(const RawToken& open) {
    if (open.text == "(") return ')';
    if (open.text == "{") return '}';
    return ']';
}

class Parser {
public:
    explicit Parser(std::vector<RawToken> tokens) {
        unit_.tokens = std::move(tokens);
        for (std::size_t i = 0; i < unit_.tokens.size(); ++i) {
            const auto k = unit_.tokens[i].kind;
            if (k != TokenKind::Whitespace && k != TokenKind::Comment) stream_.push_back(i);
        }
    }

    ParsedUnit run() {
        unit_.statements = parse_list({});
        if (!at_end()) fail("unexpected '" + tok().text + "'");
        return std::move(unit_);
    }

private:
    ParsedUnit unit_;
    std::vector<std::size_t> stream_;
    std::size_t p_ = 0;

    bool at_end(std::size_t q) const { return q >= stream_.size(); }
    bool at_end() const { return at_end(p_); }
    const RawToken& tok(std::size_t q) const { return unit_.tokens[stream_[q]]; }
    const RawToken& tok() const { return tok(p_); }
    std::size_t raw(std::size_t q) const { return stream_[q]; }

    bool kw(std::string_view k, std::size_t q) const { return !at_end(q) && tok(q).is_keyword(k); }
    bool kw(std::string_view k) const { return kw(k, p_); }
    bool punct(std::string_view s, std::size_t q) const { return !at_end(q) && tok(q).is_punct(s); }
    bool punct(std::string_view s) const { return punct(s, p_); }
    bool op(std::string_view s, std::size_t q) const { return !at_end(q) && tok(q).is_op(s); }
    bool is_close_tag(std::size_t q) const {
        return !at_end(q) && tok(q).kind == TokenKind::PhpTag && tok(q).text == "?>";
    }

    [[noreturn]] void fail(const std::string& what, std::size_t q) const {
        if (stream_.empty()) throw ParseError(what, 1, 1);
        const auto& t = tok(q < stream_.size() ? q : stream_.size() - 1);
        throw ParseError(what, t.line, t.col);
    }
    [[noreturn]] void fail(const std::string& what) const { fail(what, p_); }

    void expect_punct(std::string_view s) {
        if (!punct(s)) fail(at_end() ? "unexpected end of input, expected '" + std::string(s) + "'"
                                     : "expected '" + std::string(s) + "'");
        ++p_;
    }

    // Index of the bracket matching the opener at q.
    std::size_t match(std::size_t q) const {
        std::vector<char> expected;
        for (std::size_t i = q; i < stream_.size(); ++i) {
            const auto& t = tok(i);
            if (opens(t)) {
                expected.push_back(closer_for(t));
            } else if (closes(t)) {
                if (expected.empty() || expected.back() != t.text[0]) fail("mismatched '" + t.text + "'", i);
                expected.pop_back();
                if (expected.empty()) return i;
            }
        }
        fail("unexpected end of input, unclosed '" + tok(q).text + "'", q);
    }

    // Scans a simple statement starting at p_. Consumes a terminating ';'.
    // Stops before '?>' or an unmatched closing bracket.
    TokenRange scan_simple() {
        const std::size_t start = p_;
        std::vector<char> expected;
        while (!at_end()) {
            const auto& t = tok();
            if (expected.empty()) {
                if (t.is_punct(";")) {
                    ++p_;
                    return {raw(start), raw(p_ - 1)};
                }
                if (is_close_tag(p_) || closes(t)) break;
            }
            if (opens(t)) {
                expected.push_back(closer_for(t));
            } else if (closes(t)) {
                if (expected.back() != t.text[0]) fail("mismatched '" + t.text + "'");
                expected.pop_back();
            }
            ++p_;
        }
        if (!expected.empty()) fail("unexpected end of input inside statement", start);
        if (p_ == start) fail("expected a statement");
        return {raw(start), raw(p_ - 1)};
    }

    void finish(Stmt& s, std::size_t first_q) const {
        s.span.first = raw(first_q);
        s.span.last = raw(p_ - 1);
        s.line = s.line == 0 ? tok(first_q).line : s.line;
        s.end_line = unit_.tokens[s.span.last].end_line();
    }

    bool is_terminator(std::initializer_list<std::string_view> terms) const {
        for (auto t : terms) {
            if (t == "}" ? punct("}") : kw(t)) return true;
        }
        return false;
    }

    std::vector<Stmt> parse_list(std::initializer_list<std::string_view> terms) {
        std::vector<Stmt> out;
        while (!at_end() && !is_terminator(terms)) {
            if (skip_non_statement()) continue;
            if (closes(tok())) fail("unexpected '" + tok().text + "'");
            out.push_back(parse_statement());
        }
        return out;
    }

    // Skips tags, inline HTML, empty statements and attributes.
    bool skip_non_statement() {
        const auto& t = tok();
        if ((t.kind == TokenKind::PhpTag && t.text != "<?=") || t.kind == TokenKind::InlineHtml ||
            t.is_punct(";")) {
            ++p_;
            return true;
        }
        if (t.is_punct("#[")) {
            p_ = match(p_) + 1;
            return true;
        }
        return false;
    }

    // Header `kw (...)`, leaving p_ after ')'.
    TokenRange parse_paren_header() {
        const std::size_t start = p_;
        ++p_;
        if (!punct("(")) fail("expected '(' after '" + tok(start).text + "'");
        p_ = match(p_) + 1;
        return {raw(start), raw(p_ - 1)};
    }

    bool alt_syntax() const { return op(":", p_); }

    void expect_end_keyword(std::string_view end_kw) {
        if (!kw(end_kw)) fail("expected '" + std::string(end_kw) + "'");
        ++p_;
        if (punct(";")) {
            ++p_;
        } else if (!is_close_tag(p_) && !at_end()) {
            fail("expected ';' after '" + std::string(end_kw) + "'");
        }
    }

    // Loop/if body: single statement, block, or alt-syntax list ended by end_kw.
    std::vector<Stmt> parse_body(std::string_view end_kw) {
        if (alt_syntax()) {
            ++p_;
            auto body = parse_list({end_kw});
            expect_end_keyword(end_kw);
            return body;
        }
        return parse_single();
    }

    std::vector<Stmt> parse_single() {
        if (punct(";")) {
            ++p_;
            return {};
        }
        while (!at_end() && skip_non_statement()) {
        }
        if (at_end()) fail("unexpected end of input, expected a statement");
        std::vector<Stmt> out;
        out.push_back(parse_statement());
        return out;
    }

    Stmt parse_statement() {
        const auto& t = tok();
        if (t.is_punct("{")) return parse_block();
        if (t.kind == TokenKind::PhpTag) return parse_simple(StmtKind::Simple);  // "<?="
        if (t.kind == TokenKind::Keyword) {
            if (t.is_keyword("if")) return parse_if();
            if (t.is_keyword("while")) return parse_while();
            if (t.is_keyword("do")) return parse_do();
            if (t.is_keyword("for")) return parse_loop(StmtKind::For, "endfor");
            if (t.is_keyword("foreach")) return parse_loop(StmtKind::Foreach, "endforeach");
            if (t.is_keyword("switch")) return parse_switch();
            if (t.is_keyword("try")) return parse_try();
            if (t.is_keyword("return")) return parse_simple(StmtKind::Return);
            if (t.is_keyword("break")) return parse_simple(StmtKind::Break);
            if (t.is_keyword("continue")) return parse_simple(StmtKind::Continue);
            if (t.is_keyword("throw")) return parse_simple(StmtKind::Throw);
            if (t.is_keyword("exit") || t.is_keyword("die")) return parse_simple(StmtKind::Exit);
            if (t.is_keyword("namespace") && !op("\\", p_ + 1)) return parse_namespace();
            if (t.is_keyword("function") && is_function_decl(p_)) return parse_function(p_, "");
            if (is_class_decl(p_)) return parse_class();
            if (const auto fn = modified_function(p_)) {
                // A method slice outside its class, e.g. `public function save() {...}`.
                const std::size_t start = p_;
                p_ = *fn;
                return parse_function(start, "");
            }
        }
        if (t.kind == TokenKind::Identifier && op(":", p_ + 1) && !op(":", p_ + 2)) {
            // goto label
            Stmt s;
            s.kind = StmtKind::Simple;
            const std::size_t first = p_;
            p_ += 2;
            s.head = {raw(first), raw(p_ - 1)};
            finish(s, first);
            return s;
        }
        return parse_simple(StmtKind::Simple);
    }

    Stmt parse_simple(StmtKind kind) {
        Stmt s;
        s.kind = kind;
        const std::size_t first = p_;
        if (tok().kind == TokenKind::PhpTag) ++p_;  // "<?=" short echo
        if (at_end() || is_close_tag(p_)) {
            s.head = {raw(first), raw(first)};
        } else {
            s.head = scan_simple();
            s.head.first = raw(first);
        }
        finish(s, first);
        return s;
    }

    Stmt parse_block() {
        Stmt s;
        s.kind = StmtKind::Block;
        const std::size_t first = p_;
        ++p_;
        s.body = parse_list({"}"});
        expect_punct("}");
        s.head = {raw(first), raw(first)};
        finish(s, first);
        return s;
    }

    Stmt parse_if() {
        Stmt s;
        s.kind = StmtKind::If;
        const std::size_t first = p_;
        s.head = parse_paren_header();
        if (alt_syntax()) {
            ++p_;
            s.body = parse_list({"elseif", "else", "endif"});
            if (kw("elseif")) {
                s.has_else = true;
                s.else_body.push_back(parse_if());  // consumes the shared endif
            } else if (kw("else")) {
                ++p_;
                s.has_else = true;
                if (kw("if")) {
                    s.else_body.push_back(parse_if());
                } else {
                    if (!alt_syntax()) fail("expected ':' after 'else'");
                    ++p_;
                    s.else_body = parse_list({"endif"});
                    expect_end_keyword("endif");
                }
            } else {
                expect_end_keyword("endif");
            }
        } else {
            s.body = parse_single();
            if (kw("elseif")) {
                s.has_else = true;
                s.else_body.push_back(parse_if());
            } else if (kw("else")) {
                ++p_;
                s.has_else = true;
                if (kw("if")) {
                    s.else_body.push_back(parse_if());
                } else {
                    s.else_body = parse_single();
                }
            }
        }
        finish(s, first);
        return s;
    }

    Stmt parse_while() {
        Stmt s;
        s.kind = StmtKind::While;
        const std::size_t first = p_;
        s.head = parse_paren_header();
        s.body = parse_body("endwhile");
        finish(s, first);
        return s;
    }

    Stmt parse_loop(StmtKind kind, std::string_view end_kw) {
        Stmt s;
        s.kind = kind;
        const std::size_t first = p_;
        s.head = parse_paren_header();
        s.body = parse_body(end_kw);
        finish(s, first);
        return s;
    }

    Stmt parse_do() {
        Stmt s;
        s.kind = StmtKind::DoWhile;
        const std::size_t first = p_;
        s.head = {raw(first), raw(first)};
        ++p_;
        s.body = parse_single();
        if (!kw("while")) fail("expected 'while' after do-body");
        const std::size_t tail_first = p_;
        s.tail = parse_paren_header();
        if (punct(";")) {
            s.tail.last = raw(p_);
            ++p_;
        }
        s.tail_line = tok(tail_first).line;
        finish(s, first);
        return s;
    }

    Stmt parse_switch() {
        Stmt s;
        s.kind = StmtKind::Switch;
        const std::size_t first = p_;
        s.head = parse_paren_header();
        const bool alt = alt_syntax();
        if (alt) {
            ++p_;
        } else {
            expect_punct("{");
        }
        while (!at_end()) {
            if (alt ? kw("endswitch") : punct("}")) break;
            if (skip_non_statement()) continue;
            if (!kw("case") && !kw("default")) fail("expected 'case' or 'default' in switch");
            SwitchCase c;
            c.is_default = kw("default");
            const std::size_t case_first = p_;
            c.line = tok().line;
            ++p_;
            skip_case_label();
            c.head = {raw(case_first), raw(p_ - 1)};
            c.body = alt ? parse_list({"case", "default", "endswitch"})
                         : parse_list({"case", "default", "}"});
            s.cases.push_back(std::move(c));
        }
        if (alt) {
            expect_end_keyword("endswitch");
        } else {
            expect_punct("}");
        }
        finish(s, first);
        return s;
    }

    // After `case`/`default`: skips the label expression and its ':' or ';'.
    void skip_case_label() {
        int ternaries = 0;
        std::vector<char> expected;
        while (!at_end()) {
            const auto& t = tok();
            if (expected.empty()) {
                if (t.is_punct(";")) {
                    ++p_;
                    return;
                }
                if (t.is_op(":")) {
                    if (ternaries == 0) {
                        ++p_;
                        return;
                    }
                    --ternaries;
                }
                if (t.is_op("?")) ++ternaries;
                if (closes(t)) fail("unexpected '" + t.text + "' in case label");
            }
            if (opens(t)) {
                expected.push_back(closer_for(t));
            } else if (closes(t)) {
                if (expected.back() != t.text[0]) fail("mismatched '" + t.text + "'");
                expected.pop_back();
            }
            ++p_;
        }
        fail("unexpected end of input in case label");
    }

    Stmt parse_try() {
        Stmt s;
        s.kind = StmtKind::Try;
        const std::size_t first = p_;
        s.head = {raw(first), raw(first)};
        ++p_;
        if (!punct("{")) fail("expected '{' after 'try'");
        s.body.push_back(parse_block());
        while (kw("catch")) {
            CatchClause c;
            c.line = tok().line;
            c.head = parse_paren_header();
            if (!punct("{")) fail("expected '{' after catch clause");
            c.body.push_back(parse_block());
            s.catches.push_back(std::move(c));
        }
        if (kw("finally")) {
            ++p_;
            if (!punct("{")) fail("expected '{' after 'finally'");
            s.finally_body.push_back(parse_block());
        }
        if (s.catches.empty() && s.finally_body.empty()) fail("'try' without catch or finally", first);
        finish(s, first);
        return s;
    }

    static bool is_modifier(const RawToken& t) {
        for (auto m : {"public", "private", "protected", "static", "abstract", "final"}) {
            if (t.is_keyword(m)) return true;
        }
        return false;
    }

    // Position of `function` when q starts `modifier+ function name(`.
    std::optional<std::size_t> modified_function(std::size_t q) const {
        if (at_end(q) || !is_modifier(tok(q))) return std::nullopt;
        while (!at_end(q) && is_modifier(tok(q))) ++q;
        if (kw("function", q) && is_function_decl(q)) return q;
        return std::nullopt;
    }

    bool is_function_decl(std::size_t q) const {
        std::size_t n = q + 1;
        if (op("&", n)) ++n;
        return !at_end(n) && (tok(n).kind == TokenKind::Identifier || tok(n).kind == TokenKind::Keyword) &&
               punct("(", n + 1);
    }

    // `start` is the first token of the declaration (a modifier for methods).
    Stmt parse_function(std::size_t start, const std::string& owner) {
        Stmt s;
        s.kind = StmtKind::Function;
        if (!kw("function")) fail("expected 'function'");
        ++p_;
        if (op("&", p_)) ++p_;
        if (at_end()) fail("expected function name");
        s.name = owner.empty() ? tok().text : owner + "::" + tok().text;
        ++p_;
        if (!punct("(")) fail("expected '(' after function name");
        p_ = match(p_) + 1;
        // Return type: anything up to the body or ';'.
        while (!at_end() && !punct("{") && !punct(";")) {
            if (opens(tok())) {
                p_ = match(p_) + 1;
            } else {
                ++p_;
            }
        }
        if (at_end()) fail("unexpected end of input in function declaration");
        s.head = {raw(start), raw(p_ - 1)};
        if (punct(";")) {
            s.has_body = false;
            ++p_;
        } else {
            ++p_;
            s.body = parse_list({"}"});
            expect_punct("}");
        }
        finish(s, start);
        return s;
    }

    bool is_class_decl(std::size_t q) const {
        while (kw("abstract", q) || kw("final", q) || kw("readonly", q)) ++q;
        if (kw("class", q) || kw("interface", q) || kw("trait", q)) {
            return !at_end(q + 1) && tok(q + 1).kind == TokenKind::Identifier;
        }
        if (kw("enum", q)) {
            return !at_end(q + 1) && tok(q + 1).kind == TokenKind::Identifier &&
                   (punct("{", q + 2) || op(":", q + 2) || kw("implements", q + 2));
        }
        return false;
    }

    Stmt parse_class() {
        Stmt s;
        s.kind = StmtKind::Class;
        const std::size_t first = p_;
        while (!kw("class") && !kw("interface") && !kw("trait") && !kw("enum")) ++p_;
        ++p_;
        s.name = tok().text;
        while (!at_end() && !punct("{")) ++p_;
        if (at_end()) fail("expected '{' in class declaration", first);
        s.head = {raw(first), raw(p_)};
        ++p_;
        while (!at_end() && !punct("}")) {
            if (skip_non_statement()) continue;
            const std::size_t member_start = p_;
            while (kw("public") || kw("private") || kw("protected") || kw("static") || kw("abstract") ||
                   kw("final") || kw("readonly") || kw("var")) {
                ++p_;
            }
            if (kw("function")) {
                s.members.push_back(parse_function(member_start, s.name));
            } else if (kw("use")) {
                skip_trait_use();
            } else if (!at_end() && !punct("}")) {
                scan_simple();
            }
        }
        expect_punct("}");
        finish(s, first);
        return s;
    }

    void skip_trait_use() {
        while (!at_end()) {
            if (punct(";")) {
                ++p_;
                return;
            }
            if (punct("{")) {
                p_ = match(p_) + 1;
                return;
            }
            ++p_;
        }
    }

    Stmt parse_namespace() {
        const std::size_t first = p_;
        std::size_t q = p_ + 1;
        while (!at_end(q) && !punct("{", q) && !punct(";", q) && !is_close_tag(q)) ++q;
        if (!punct("{", q)) return parse_simple(StmtKind::Simple);
        p_ = q;
        Stmt s = parse_block();
        s.span.first = raw(first);
        s.line = tok(first).line;
        return s;
    }
};

}  // namespace

ParsedUnit parse(std::vector<RawToken> tokens) { return Parser(std::move(tokens)).run(); }

ParsedUnit parse(std::string_view source, LexMode mode) { return parse(lex(source, mode)); }

}  // namespace phpvd::php
