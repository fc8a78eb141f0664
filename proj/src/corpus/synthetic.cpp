// SPDX-License-Identifier: Apache-2.0
#include "phpvd/corpus/synthetic.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include "phpvd/common/error.hpp"

namespace phpvd::corpus {

namespace {

constexpr std::array<std::string_view, 6> kXssSanitizers = {
    "htmlspecialchars", "htmlentities", "strip_tags", "esc_html", "esc_attr", "intval"};
constexpr std::array<std::string_view, 5> kSqliSanitizers = {
    "mysqli_real_escape_string", "mysql_real_escape_string", "addslashes", "esc_sql", "intval"};
constexpr std::array<std::string_view, 3> kOsciSanitizers = {"escapeshellarg", "escapeshellcmd", "intval"};

constexpr std::array<std::string_view, 5> kTransforms = {"trim", "urldecode", "http_build_query",
                                                         "strtolower", "stripslashes"};
constexpr std::array<std::string_view, 10> kKeys = {"userData", "name", "id",     "cmd",       "file",
                                                    "q",        "search", "title", "delimiter", "page"};
constexpr std::array<std::string_view, 8> kFunctionNames = {
    "handle_request", "save_settings", "process_form", "render_widget",
    "update_record",  "run_task",      "init_ds",      "ajax_handler"};
constexpr std::array<std::string_view, 4> kClassNames = {"Request_Handler", "Settings_Page",
                                                         "Admin_Controller", "Widget_Renderer"};
constexpr std::array<std::string_view, 8> kNoise = {
    "$count = 0;",     "$title = 'Report';", "$limit = 10;",     "$page = 1;",
    "$now = time();",  "// keep in sync with the admin page", "$items = array();", "$debug = false;"};

constexpr std::array<Sink, 4> kXssSinks = {Sink::Echo, Sink::Print, Sink::PrintR, Sink::UpdateOption};
constexpr std::array<Sink, 3> kSqliSinks = {Sink::MysqliQuery, Sink::QueryMethod, Sink::MysqlQuery};
constexpr std::array<Sink, 4> kOsciSinks = {Sink::Exec, Sink::System, Sink::ShellExec, Sink::Passthru};

bool appropriate(std::string_view sanitizer, Label cls) {
    const auto list = sanitizers_for(cls);
    return std::find(list.begin(), list.end(), sanitizer) != list.end();
}

std::string source_expr(const SyntheticTemplate& t) {
    const std::string k = "['" + t.key + "']";
    switch (t.source) {
        case Source::Get: return "$_GET" + k;
        case Source::Post: return "$_POST" + k;
        case Source::Request: return "$_REQUEST" + k;
        case Source::Cookie: return "$_COOKIE" + k;
        case Source::Files: return "$_FILES" + k + "['name']";
    }
    return "$_GET" + k;
}

std::string call(std::string_view fn, const std::string& arg) {
    if (fn == "mysqli_real_escape_string") return std::string(fn) + "($conn, " + arg + ")";
    return std::string(fn) + "(" + arg + ")";
}

void sink_lines(const SyntheticTemplate& t, std::vector<std::string>& out) {
    switch (t.sink) {
        case Sink::Echo:
            out.push_back(t.key.size() % 2 ? "echo $tainted;" : "echo '<p>' . $tainted . '</p>';");
            break;
        case Sink::Print: out.push_back("print($tainted);"); break;
        case Sink::PrintR: out.push_back("print_r($tainted);"); break;
        case Sink::UpdateOption: out.push_back("update_option('plugin_option', $tainted);"); break;
        case Sink::MysqliQuery:
            out.push_back("$query = \"SELECT * FROM users WHERE name = '\" . $tainted . \"'\";");
            out.push_back("$result = mysqli_query($conn, $query);");
            break;
        case Sink::QueryMethod:
            out.push_back("$sql = 'DELETE FROM ' . $wpdb->prefix . 'items WHERE id = ' . $tainted;");
            out.push_back("$wpdb->query($sql);");
            break;
        case Sink::MysqlQuery:
            out.push_back("$result = mysql_query(\"SELECT id FROM posts WHERE slug = '\" . $tainted . \"'\");");
            break;
        case Sink::Exec: out.push_back("exec('ls -l ' . $tainted, $output);"); break;
        case Sink::System: out.push_back("system('cat /tmp/' . $tainted);"); break;
        case Sink::ShellExec: out.push_back("$out = shell_exec('ping -c 1 ' . $tainted);"); break;
        case Sink::Passthru: out.push_back("passthru('grep ' . $tainted . ' /var/log/app.log');"); break;
    }
}

std::vector<std::string> body_lines(const SyntheticTemplate& t) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < t.noise && i < kNoise.size(); ++i) out.emplace_back(kNoise[(i + t.key.size()) % kNoise.size()]);
    const bool needs_conn = t.sink == Sink::MysqliQuery ||
                            std::any_of(t.paths.begin(), t.paths.end(), [](const PathSpec& p) {
                                return p.sanitizer == "mysqli_real_escape_string";
                            });
    if (needs_conn) out.push_back("$conn = mysqli_connect('localhost', 'app', 'secret', 'app');");
    if (t.sink == Sink::QueryMethod && (t.wrapper == Wrapper::Function || t.wrapper == Wrapper::Method)) {
        out.push_back("global $wpdb;");
    }
    const auto src = source_expr(t);
    const auto transform = [&](std::vector<std::string>& lines) {
        if (!t.transform.empty()) lines.push_back("$tainted = " + call(t.transform, "$tainted") + ";");
    };
    const auto sanitize = [&](std::vector<std::string>& lines, const PathSpec& p, const std::string& indent) {
        if (!p.sanitizer.empty()) lines.push_back(indent + "$tainted = " + call(p.sanitizer, "$tainted") + ";");
    };

    switch (t.flow) {
        case Flow::Direct:
            out.push_back("$tainted = " + src + ";");
            transform(out);
            sanitize(out, t.paths.at(0), "");
            break;
        case Flow::ArrayPush:
            out.push_back("$array = array();");
            out.push_back("$array[] = 'safe';");
            out.push_back("$array[] = " + src + ";");
            out.push_back("$array[] = 'safe';");
            out.push_back("$tainted = $array[1];");
            transform(out);
            sanitize(out, t.paths.at(0), "");
            break;
        case Flow::Branch: {
            out.push_back("$tainted = " + src + ";");
            transform(out);
            out.push_back("if (strlen($tainted) > " + std::to_string(4 + t.key.size()) + ") {");
            const auto branch = [&](const PathSpec& p) {
                if (p.sanitizer.empty()) {
                    out.push_back("    $note = 'unchanged';");
                } else {
                    sanitize(out, p, "    ");
                }
            };
            branch(t.paths.at(0));
            out.push_back("} else {");
            branch(t.paths.at(1));
            out.push_back("}");
            break;
        }
        case Flow::Loop:
            out.push_back("$parts = array();");
            out.push_back("foreach (" + src + " as $item) {");
            if (t.paths.at(0).sanitizer.empty()) {
                out.push_back("    $parts[] = $item;");
            } else {
                out.push_back("    $parts[] = " + call(t.paths.at(0).sanitizer, "$item") + ";");
            }
            out.push_back("}");
            out.push_back("$tainted = implode(',', $parts);");
            transform(out);
            break;
    }
    sink_lines(t, out);
    return out;
}

std::string indented(const std::vector<std::string>& lines, const std::string& indent) {
    std::string out;
    for (const auto& l : lines) out += indent + l + "\n";
    return out;
}

}  // namespace

Label sink_class(Sink sink) noexcept {
    switch (sink) {
        case Sink::Echo:
        case Sink::Print:
        case Sink::PrintR:
        case Sink::UpdateOption: return Label::XSS;
        case Sink::MysqliQuery:
        case Sink::QueryMethod:
        case Sink::MysqlQuery: return Label::SQLi;
        case Sink::Exec:
        case Sink::System:
        case Sink::ShellExec:
        case Sink::Passthru: return Label::OSCI;
    }
    return Label::XSS;
}

std::span<const std::string_view> sanitizers_for(Label cls) {
    switch (cls) {
        case Label::XSS: return kXssSanitizers;
        case Label::SQLi: return kSqliSanitizers;
        case Label::OSCI: return kOsciSanitizers;
        case Label::Safe: break;
    }
    return {};
}

Label label_of(const SyntheticTemplate& t) {
    const auto cls = sink_class(t.sink);
    const bool all_clean = !t.paths.empty() && std::all_of(t.paths.begin(), t.paths.end(), [&](const PathSpec& p) {
        return appropriate(p.sanitizer, cls);
    });
    return all_clean ? Label::Safe : cls;
}

std::string render(const SyntheticTemplate& t, Granularity granularity) {
    const auto body = body_lines(t);
    if (granularity == Granularity::Function) {
        if (t.wrapper == Wrapper::Method) {
            return "public function " + t.function_name + "() {\n" + indented(body, "    ") + "}";
        }
        return "function " + t.function_name + "() {\n" + indented(body, "    ") + "}";
    }
    switch (t.wrapper) {
        case Wrapper::TopLevel: return "<?php\n" + indented(body, "");
        case Wrapper::Html: {
            const std::string tag = t.use_script_tag ? "script" : "style";
            return "<!DOCTYPE html><html>\n<head><" + tag + "><?php\n" + indented(body, "") + "?></" + tag +
                   "></head>\n<body><h1>Hello World!</h1></body>\n</html>\n";
        }
        case Wrapper::Function:
            return "<?php\nfunction " + t.function_name + "() {\n" + indented(body, "    ") + "}\n\n" +
                   t.function_name + "();\n";
        case Wrapper::Method:
            return "<?php\nclass " + t.class_name + " {\n    public function " + t.function_name + "() {\n" +
                   indented(body, "        ") + "    }\n}\n";
    }
    return {};
}

SyntheticTemplate draw_template(Rng& rng, Label target, Granularity granularity) {
    SyntheticTemplate t;
    const Label cls = is_unsafe(target)
                          ? target
                          : std::array{Label::XSS, Label::SQLi, Label::OSCI}[rng.below(3)];
    switch (cls) {
        case Label::XSS: t.sink = rng.pick(kXssSinks); break;
        case Label::SQLi: t.sink = rng.pick(kSqliSinks); break;
        default: t.sink = rng.pick(kOsciSinks); break;
    }
    t.source = static_cast<Source>(rng.below(5));
    t.flow = static_cast<Flow>(rng.below(4));
    t.wrapper = granularity == Granularity::Function ? (rng.bernoulli(0.5) ? Wrapper::Method : Wrapper::Function)
                                                     : static_cast<Wrapper>(rng.below(4));
    t.key = std::string(rng.pick(kKeys));
    if (rng.bernoulli(0.5)) t.transform = std::string(rng.pick(kTransforms));
    t.noise = static_cast<std::size_t>(rng.below(3));
    t.use_script_tag = rng.bernoulli(0.5);
    t.function_name = std::string(rng.pick(kFunctionNames));
    t.class_name = std::string(rng.pick(kClassNames));

    const std::size_t n_paths = t.flow == Flow::Branch ? 2 : 1;
    const auto good = sanitizers_for(cls);
    std::vector<std::string_view> wrong;
    for (auto other : {Label::XSS, Label::SQLi, Label::OSCI}) {
        for (auto s : sanitizers_for(other)) {
            if (!appropriate(s, cls) && std::find(wrong.begin(), wrong.end(), s) == wrong.end()) wrong.push_back(s);
        }
    }
    t.paths.resize(n_paths);
    if (!is_unsafe(target)) {
        for (auto& p : t.paths) p.sanitizer = std::string(good[rng.below(good.size())]);
    } else {
        const auto raw = rng.below(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) {
            if (i == raw) {
                if (rng.bernoulli(0.35)) t.paths[i].sanitizer = std::string(wrong[rng.below(wrong.size())]);
            } else if (rng.bernoulli(0.5)) {
                t.paths[i].sanitizer = std::string(good[rng.below(good.size())]);
            }
        }
    }
    if (label_of(t) != target) throw Error("synthetic template drew the wrong label");
    return t;
}

std::vector<GeneratedSample> generate_templates(std::size_t n_per_class, std::uint64_t seed,
                                                Granularity granularity) {
    Rng rng(seed);
    std::vector<GeneratedSample> out;
    std::unordered_set<std::string> ids;
    for (const auto label : kAllLabels) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            for (std::size_t attempt = 0;; ++attempt) {
                if (attempt == 10000) throw Error("synthetic generator ran out of distinct samples");
                auto t = draw_template(rng, label, granularity);
                auto code = render(t, granularity);
                const auto id = sample_id(code, granularity);
                if (!ids.insert(id).second) continue;
                Provenance prov{ProvenanceKind::Synthetic, "seed=" + std::to_string(seed) + ";class=" +
                                                               std::string(to_string(label)) + ";i=" +
                                                               std::to_string(i)};
                out.push_back({std::move(t), make_sample(std::move(code), granularity, label, std::move(prov))});
                break;
            }
        }
    }
    return out;
}

std::vector<Sample> generate_synthetic(std::size_t n_per_class, std::uint64_t seed, Granularity granularity) {
    std::vector<Sample> out;
    for (auto& g : generate_templates(n_per_class, seed, granularity)) out.push_back(std::move(g.sample));
    return out;
}

}  // namespace phpvd::corpus
