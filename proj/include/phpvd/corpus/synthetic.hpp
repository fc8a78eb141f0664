// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phpvd/common/granularity.hpp"
#include "phpvd/common/rng.hpp"
#include "phpvd/corpus/label.hpp"
#include "phpvd/corpus/sample.hpp"

namespace phpvd::corpus {

enum class Source { Get, Post, Request, Cookie, Files };

enum class Sink {
    Echo, Print, PrintR, UpdateOption,          // XSS
    MysqliQuery, QueryMethod, MysqlQuery,       // SQLi
    Exec, System, ShellExec, Passthru,          // OSCI
};

/// How tainted data travels from the source to the sink.
enum class Flow {
    Direct,     // $t = SRC; [transform]; [sanitize]; SINK
    ArrayPush,  // the array-push shape of the SARD XSS case
    Branch,     // if/else, each branch sanitizes (or not) on its own
    Loop,       // foreach over a source array, sanitizing per item
};

enum class Wrapper { TopLevel, Html, Function, Method };

/// One source-to-sink path; `sanitizer` is empty when the path is raw.
struct PathSpec {
    std::string sanitizer;

    bool operator==(const PathSpec&) const = default;
};

/// Everything that determines a generated sample. Branch flows have two
/// paths, every other flow exactly one.
struct SyntheticTemplate {
    Source source = Source::Get;
    Sink sink = Sink::Echo;
    Flow flow = Flow::Direct;
    Wrapper wrapper = Wrapper::TopLevel;
    std::string key = "userData";      // superglobal index
    std::string transform;             // non-sanitizing call, may be empty
    std::vector<PathSpec> paths;
    std::size_t noise = 0;             // unrelated statements prepended
    bool use_script_tag = false;       // Html wrapper: <script> instead of <style>
    std::string function_name = "handle_request";
    std::string class_name = "Request_Handler";

    bool operator==(const SyntheticTemplate&) const = default;
};

/// XSS, SQLi or OSCI.
Label sink_class(Sink sink) noexcept;

/// Sanitizers that neutralize taint for a vulnerability class.
std::span<const std::string_view> sanitizers_for(Label cls);

/// Safe iff every path carries a sanitizer appropriate for the sink's class,
/// otherwise the sink's class.
Label label_of(const SyntheticTemplate& t);

/// PHP text for the template. Function granularity emits only the function
/// (Wrapper::Function / Method), without an open tag.
std::string render(const SyntheticTemplate& t, Granularity granularity);

/// Draws a template whose label is `target`.
SyntheticTemplate draw_template(Rng& rng, Label target, Granularity granularity);

struct GeneratedSample {
    SyntheticTemplate tmpl;
    Sample sample;
};

/// n_per_class samples of each label (Safe, XSS, SQLi, OSCI in that order),
/// all with distinct ids. Same (n, seed, granularity) gives identical output.
std::vector<GeneratedSample> generate_templates(std::size_t n_per_class, std::uint64_t seed,
                                                Granularity granularity = Granularity::File);

std::vector<Sample> generate_synthetic(std::size_t n_per_class, std::uint64_t seed,
                                       Granularity granularity = Granularity::File);

}  // namespace phpvd::corpus
