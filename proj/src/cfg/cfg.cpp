// SPDX-License-Identifier: Apache-2.0
#include "phpvd/cfg/cfg.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>

#include "phpvd/common/error.hpp"
#include "phpvd/php/encode.hpp"
#include "phpvd/php/lexer.hpp"

namespace phpvd::cfg {

namespace {

using php::Stmt;
using php::StmtKind;
using php::TokenRange;
using Frontier = std::vector<std::size_t>;  // lines

Frontier merge(Frontier a, const Frontier& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

struct LoopContext {
    bool is_switch = false;
    Frontier breaks;
    Frontier continues;
};

class Builder {
public:
    Builder(const php::ParsedUnit& unit) : unit_(unit) {}

    void build_component(const std::vector<Stmt>& stmts, const Frontier& preds) {
        loops_.clear();
        tries_.clear();
        const auto out = build_list(stmts, preds);
        falloff_.insert(out.begin(), out.end());
    }

    void add_synthetic_entry() { nodes_.try_emplace(0); }

    bool empty_of_real_lines() const {
        return std::none_of(nodes_.begin(), nodes_.end(), [](const auto& kv) { return kv.first != 0; });
    }

    Cfg finish(std::span<const php::NormalizedToken> normalized, const php::Vocabulary& vocab,
               std::optional<std::size_t> entry_line) const {
        Cfg g;
        std::map<std::size_t, std::size_t> index;
        for (const auto& [line, ranges] : nodes_) {
            index.emplace(line, g.lines.size());
            g.lines.push_back(line);
            std::vector<php::TokenId> node_tokens;
            for (const auto& r : ranges) {
                auto it = std::lower_bound(normalized.begin(), normalized.end(), r.first,
                                           [](const php::NormalizedToken& t, std::size_t idx) {
                                               return t.origin_index < idx;
                                           });
                for (; it != normalized.end() && it->origin_index <= r.last; ++it) {
                    node_tokens.push_back(vocab.id(it->surface));
                }
            }
            std::vector<php::TokenId> fitted;
            php::fit_to_length(node_tokens, kNodeLength, fitted);
            g.ids.insert(g.ids.end(), fitted.begin(), fitted.end());
        }
        for (const auto& [a, b] : edges_) g.edges.emplace_back(index.at(a), index.at(b));
        std::sort(g.edges.begin(), g.edges.end());

        std::set<std::size_t> exits;
        for (auto l : exit_lines_) exits.insert(index.at(l));
        for (auto l : falloff_) {
            if (l != 0 || nodes_.size() == 1) exits.insert(index.at(l));
        }
        g.exits.assign(exits.begin(), exits.end());

        g.entry = entry_line ? index.at(*entry_line) : 0;
        g.dead.assign(g.node_count(), true);
        std::vector<std::vector<std::size_t>> succ(g.node_count());
        for (const auto& [a, b] : g.edges) succ[a].push_back(b);
        std::queue<std::size_t> q;
        q.push(g.entry);
        g.dead[g.entry] = false;
        while (!q.empty()) {
            const auto n = q.front();
            q.pop();
            for (auto m : succ[n]) {
                if (g.dead[m]) {
                    g.dead[m] = false;
                    q.push(m);
                }
            }
        }
        return g;
    }

    static std::optional<std::size_t> entry_line(const std::vector<Stmt>& stmts) {
        for (const auto& s : stmts) {
            if (auto l = entry_line(s)) return l;
        }
        return std::nullopt;
    }

private:
    const php::ParsedUnit& unit_;
    std::map<std::size_t, std::vector<TokenRange>> nodes_;
    std::set<std::pair<std::size_t, std::size_t>> edges_;
    std::set<std::size_t> exit_lines_;
    std::set<std::size_t> falloff_;
    std::vector<LoopContext> loops_;
    std::vector<std::vector<std::size_t>> tries_;

    static std::optional<std::size_t> entry_line(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Function:
            case StmtKind::Class:
                return std::nullopt;
            case StmtKind::Block:
                return entry_line(s.body);
            case StmtKind::DoWhile:
                if (auto l = entry_line(s.body)) return l;
                return s.tail_line;
            case StmtKind::Try:
                if (auto l = entry_line(s.body)) return l;
                return entry_line(s.finally_body);
            default:
                return s.line;
        }
    }

    std::size_t touch(std::size_t line, TokenRange range) {
        nodes_[line].push_back(range);
        for (auto& t : tries_) t.push_back(line);
        return line;
    }

    void connect(const Frontier& preds, std::size_t to) {
        for (auto p : preds) {
            if (p != to) edges_.emplace(p, to);
        }
    }

    std::size_t jump_level(const Stmt& s) const {
        const auto& toks = unit_.tokens;
        for (std::size_t i = s.head.first + 1; i <= s.head.last && i < toks.size(); ++i) {
            const auto& t = toks[i];
            if (t.is_trivia()) continue;
            if (t.kind == php::TokenKind::ConstantLiteral) {
                try {
                    return std::max<std::size_t>(1, std::stoul(t.text));
                } catch (const std::exception&) {
                    return 1;
                }
            }
            break;
        }
        return 1;
    }

    LoopContext* loop_at(std::size_t level) {
        if (level == 0 || level > loops_.size()) return nullptr;
        return &loops_[loops_.size() - level];
    }

    Frontier build_list(const std::vector<Stmt>& stmts, Frontier preds) {
        for (const auto& s : stmts) preds = build(s, preds);
        return preds;
    }

    Frontier build(const Stmt& s, const Frontier& preds) {
        switch (s.kind) {
            case StmtKind::Simple: {
                const auto n = touch(s.line, s.head);
                connect(preds, n);
                return {n};
            }
            case StmtKind::Return:
            case StmtKind::Exit:
            case StmtKind::Throw: {
                const auto n = touch(s.line, s.head);
                connect(preds, n);
                exit_lines_.insert(n);
                return {};
            }
            case StmtKind::Break:
            case StmtKind::Continue: {
                const auto n = touch(s.line, s.head);
                connect(preds, n);
                auto* ctx = loop_at(jump_level(s));
                if (ctx == nullptr) {
                    exit_lines_.insert(n);
                } else if (s.kind == StmtKind::Break || ctx->is_switch) {
                    ctx->breaks.push_back(n);
                } else {
                    ctx->continues.push_back(n);
                }
                return {};
            }
            case StmtKind::Block:
                return build_list(s.body, preds);
            case StmtKind::If: {
                const auto c = touch(s.line, s.head);
                connect(preds, c);
                const auto then_out = build_list(s.body, {c});
                const auto else_out = s.has_else ? build_list(s.else_body, {c}) : Frontier{c};
                return merge(then_out, else_out);
            }
            case StmtKind::While:
            case StmtKind::For:
            case StmtKind::Foreach: {
                const auto c = touch(s.line, s.head);
                connect(preds, c);
                loops_.emplace_back();
                const auto body_out = build_list(s.body, {c});
                connect(body_out, c);
                connect(loops_.back().continues, c);
                auto breaks = std::move(loops_.back().breaks);
                loops_.pop_back();
                return merge({c}, breaks);
            }
            case StmtKind::DoWhile: {
                loops_.emplace_back();
                const auto body_out = build_list(s.body, preds);
                const auto t = touch(s.tail_line, s.tail);
                connect(body_out, t);
                connect(loops_.back().continues, t);
                if (const auto head = entry_line(s.body)) {
                    connect({t}, *head);
                } else {
                    connect(preds, t);
                }
                auto breaks = std::move(loops_.back().breaks);
                loops_.pop_back();
                return merge({t}, breaks);
            }
            case StmtKind::Switch: {
                const auto c = touch(s.line, s.head);
                connect(preds, c);
                loops_.push_back({true, {}, {}});
                Frontier fall;
                bool has_default = false;
                for (const auto& cs : s.cases) {
                    has_default = has_default || cs.is_default;
                    fall = build_list(cs.body, merge({c}, fall));
                }
                auto breaks = std::move(loops_.back().breaks);
                loops_.pop_back();
                auto out = merge(fall, breaks);
                if (!has_default || s.cases.empty()) out = merge(out, {c});
                return out;
            }
            case StmtKind::Try: {
                tries_.emplace_back();
                const auto try_out = build_list(s.body, preds);
                const auto in_try = std::move(tries_.back());
                tries_.pop_back();
                Frontier out = try_out;
                for (const auto& c : s.catches) {
                    const auto h = touch(c.line, c.head);
                    connect(in_try, h);
                    out = merge(out, build_list(c.body, {h}));
                }
                if (!s.finally_body.empty()) out = build_list(s.finally_body, out);
                return out;
            }
            case StmtKind::Function:
            case StmtKind::Class:
                return preds;
        }
        return preds;
    }
};

void collect_bodies(const std::vector<Stmt>& stmts, std::vector<const Stmt*>& out) {
    for (const auto& s : stmts) {
        if (s.kind == StmtKind::Function && s.has_body) out.push_back(&s);
        collect_bodies(s.body, out);
        collect_bodies(s.else_body, out);
        collect_bodies(s.finally_body, out);
        collect_bodies(s.members, out);
        for (const auto& c : s.cases) collect_bodies(c.body, out);
        for (const auto& c : s.catches) collect_bodies(c.body, out);
    }
}

bool is_declaration(const Stmt& s) { return s.kind == StmtKind::Function || s.kind == StmtKind::Class; }

}  // namespace

Cfg build_cfg(const php::ParsedUnit& unit, std::span<const php::NormalizedToken> normalized,
              const php::Vocabulary& vocab, Granularity granularity) {
    Builder b(unit);
    if (granularity == Granularity::File) {
        b.add_synthetic_entry();
        b.build_component(unit.statements, {0});
        std::vector<const Stmt*> bodies;
        collect_bodies(unit.statements, bodies);
        for (const auto* fn : bodies) b.build_component(fn->body, {0});
        if (b.empty_of_real_lines()) throw EmptyUnit("unit has no executable line");
        return b.finish(normalized, vocab, std::size_t{0});
    }

    const std::vector<Stmt>* body = &unit.statements;
    const bool only_declarations = std::all_of(unit.statements.begin(), unit.statements.end(), is_declaration);
    const auto fn_count = std::count_if(unit.statements.begin(), unit.statements.end(),
                                        [](const Stmt& s) { return s.kind == StmtKind::Function; });
    if (only_declarations && fn_count == 1) {
        for (const auto& s : unit.statements) {
            if (s.kind == StmtKind::Function) body = &s.body;
        }
    }
    b.build_component(*body, {});
    if (b.empty_of_real_lines()) throw EmptyUnit("unit has no executable line");
    return b.finish(normalized, vocab, Builder::entry_line(*body));
}

Cfg build_cfg(std::string_view source, Granularity granularity, const php::Vocabulary& vocab,
              const php::KeepList& keep) {
    const auto mode = granularity == Granularity::File ? php::LexMode::Html : php::detect_mode(source);
    const auto unit = php::parse(source, mode);
    const auto normalized = php::normalize(unit.tokens, granularity, keep);
    return build_cfg(unit, normalized, vocab, granularity);
}

Cfg single_node_cfg(std::span<const php::NormalizedToken> normalized, const php::Vocabulary& vocab) {
    Cfg g;
    std::vector<php::TokenId> all;
    all.reserve(normalized.size());
    for (const auto& t : normalized) all.push_back(vocab.id(t.surface));
    php::fit_to_length(all, kNodeLength, g.ids);
    g.lines.push_back(normalized.empty() ? 1 : normalized.front().origin_line);
    g.entry = 0;
    g.exits = {0};
    g.dead = {false};
    return g;
}

CfgStats cfg_stats(const Cfg& g) {
    CfgStats s;
    s.nodes = g.node_count();
    s.edges = g.edges.size();
    std::vector<std::size_t> out(g.node_count(), 0);
    for (const auto& e : g.edges) s.max_out_degree = std::max(s.max_out_degree, ++out[e.first]);
    return s;
}

std::string dump(const Cfg& g) {
    std::string out = "N " + std::to_string(g.node_count()) + "\n";
    for (const auto& [a, b] : g.edges) out += std::to_string(a) + " -> " + std::to_string(b) + "\n";
    return out;
}

}  // namespace phpvd::cfg
