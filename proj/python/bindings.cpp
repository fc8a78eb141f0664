// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "phpvd/cfg/cfg.hpp"
#include "phpvd/common/error.hpp"
#include "phpvd/corpus/synthetic.hpp"
#include "phpvd/metrics/confusion.hpp"
#include "phpvd/model/checkpoint.hpp"
#include "phpvd/model/featurizer.hpp"
#include "phpvd/model/predictor.hpp"
#include "phpvd/model/trainer.hpp"
#include "phpvd/php/functions.hpp"
#include "phpvd/php/lexer.hpp"
#include "phpvd/php/normalize.hpp"
#include "phpvd/scanner/scanner.hpp"

namespace py = pybind11;
using namespace phpvd;

namespace {

std::vector<Label> labels_from(const std::vector<std::string>& names) {
    std::vector<Label> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(parse_label(n));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "phpvd core bindings";

    auto base = py::register_exception<Error>(m, "PhpvdError", PyExc_RuntimeError);
    py::register_exception<LexError>(m, "LexError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ConfigMismatch>(m, "ConfigMismatch", base.ptr());
    py::register_exception<MissingCheckpoint>(m, "MissingCheckpoint", base.ptr());
    py::register_exception<LengthMismatch>(m, "LengthMismatch", base.ptr());

    m.def(
        "tokenize",
        [](const std::string& source) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& t : php::lex(source, php::detect_mode(source))) {
                out.emplace_back(std::string(php::to_string(t.kind)), t.text);
            }
            return out;
        },
        py::arg("source"), "(kind, text) pairs covering the whole source");

    m.def(
        "normalize",
        [](const std::string& source, const std::string& granularity) {
            return model::normalized_surfaces(source, parse_granularity(granularity), php::KeepList());
        },
        py::arg("source"), py::arg("granularity") = "file");

    m.def(
        "extract_functions",
        [](const std::string& source) {
            py::list out;
            for (const auto& f : php::extract_functions(source)) {
                out.append(py::dict(py::arg("name") = f.name, py::arg("start_line") = f.start_line,
                                    py::arg("end_line") = f.end_line, py::arg("body") = f.body));
            }
            return out;
        },
        py::arg("source"));

    py::class_<cfg::Cfg>(m, "Cfg")
        .def_property_readonly("node_count", &cfg::Cfg::node_count)
        .def_readonly("lines", &cfg::Cfg::lines)
        .def_readonly("edges", &cfg::Cfg::edges)
        .def_readonly("entry", &cfg::Cfg::entry)
        .def_readonly("exits", &cfg::Cfg::exits)
        .def("dump", [](const cfg::Cfg& g) { return cfg::dump(g); });

    m.def(
        "build_cfg",
        [](const std::string& source, const std::string& granularity) {
            const auto g = parse_granularity(granularity);
            const auto vocab = php::Vocabulary::build(
                std::vector<std::vector<std::string>>{model::normalized_surfaces(source, g, php::KeepList())});
            return cfg::build_cfg(source, g, vocab);
        },
        py::arg("source"), py::arg("granularity") = "file");

    py::class_<metrics::ConfusionReport>(m, "ConfusionReport")
        .def_readonly("tn", &metrics::ConfusionReport::tn)
        .def_readonly("fn", &metrics::ConfusionReport::fn)
        .def_readonly("tp", &metrics::ConfusionReport::tp)
        .def_readonly("fp", &metrics::ConfusionReport::fp)
        .def_readonly("matrix", &metrics::ConfusionReport::matrix)
        .def_property_readonly("accuracy", &metrics::ConfusionReport::accuracy)
        .def_property_readonly("precision", &metrics::ConfusionReport::precision)
        .def_property_readonly("recall", &metrics::ConfusionReport::recall)
        .def_property_readonly("f1", &metrics::ConfusionReport::f1);

    m.def(
        "confusion",
        [](const std::vector<std::string>& truth, const std::vector<std::string>& pred) {
            return metrics::confusion(labels_from(truth), labels_from(pred));
        },
        py::arg("truth"), py::arg("pred"));

    m.def(
        "generate_synthetic",
        [](std::size_t n_per_class, std::uint64_t seed, const std::string& granularity) {
            py::list out;
            for (const auto& s : corpus::generate_synthetic(n_per_class, seed, parse_granularity(granularity))) {
                out.append(py::dict(py::arg("id") = s.id, py::arg("code") = s.code,
                                    py::arg("label") = std::string(to_string(s.label))));
            }
            return out;
        },
        py::arg("n_per_class"), py::arg("seed"), py::arg("granularity") = "file");

    py::class_<model::Model>(m, "Model")
        .def_property_readonly("granularity",
                               [](const model::Model& mm) { return std::string(to_string(mm.arch().granularity)); })
        .def_property_readonly("vocab_size", [](const model::Model& mm) { return mm.vocab.size(); })
        .def_property_readonly("parameter_count", [](const model::Model& mm) { return mm.params.parameter_count(); })
        .def("save", [](const model::Model& mm, const std::filesystem::path& path) { model::save_checkpoint(mm, path); },
             py::arg("path"));

    m.def("load_model", &model::load_checkpoint, py::arg("path"));

    m.def(
        "train",
        [](const std::vector<std::pair<std::string, std::string>>& samples, const std::string& granularity,
           std::size_t epochs, std::size_t batch_size, double lr, std::uint64_t seed) {
            const auto g = parse_granularity(granularity);
            std::vector<corpus::Sample> data;
            for (const auto& [code, label] : samples) {
                data.push_back(corpus::make_sample(code, g, parse_label(label), {corpus::ProvenanceKind::Fixture, ""}));
            }
            model::TrainConfig tc;
            tc.epochs = epochs;
            tc.batch_size = batch_size;
            tc.adam.lr = lr;
            tc.seed = seed;
            py::gil_scoped_release release;
            return model::train_model(data, data, model::ArchitectureConfig::for_granularity(g, 0), php::KeepList(), tc)
                .model;
        },
        py::arg("samples"), py::arg("granularity") = "file", py::arg("epochs") = 1, py::arg("batch_size") = 64,
        py::arg("lr") = 1e-5, py::arg("seed") = 0,
        "Trains on (code, label) pairs, validating on the same data.");

    py::class_<model::Prediction>(m, "Prediction")
        .def_property_readonly("label", [](const model::Prediction& p) { return std::string(to_string(p.label)); })
        .def_readonly("probabilities", &model::Prediction::probabilities);

    m.def(
        "predict",
        [](const model::Model& mm, const std::string& code) {
            py::gil_scoped_release release;
            return model::predict(mm, code);
        },
        py::arg("model"), py::arg("code"));

    m.def(
        "scan",
        [](const std::filesystem::path& dir, const std::filesystem::path& file_ckpt,
           const std::filesystem::path& func_ckpt, std::size_t threads) {
            scanner::ScanOptions opt;
            opt.threads = threads;
            scanner::ScanResult r;
            {
                py::gil_scoped_release release;
                r = scanner::scan(dir, file_ckpt, func_ckpt, opt);
            }
            return py::module_::import("json").attr("loads")(scanner::report(r, scanner::ReportFormat::Json));
        },
        py::arg("dir"), py::arg("file_model"), py::arg("func_model"), py::arg("threads") = 1);
}
