import json
import math
import pathlib

import pytest

import phpvd

FIXTURE = pathlib.Path(__file__).resolve().parents[1] / "fixtures" / "scan_project"


def test_tokens_cover_source():
    src = "<?php\n$a = $_GET['q'];\necho $a; ?>\n<p>hi</p>"
    toks = phpvd.tokenize(src)
    assert "".join(text for _, text in toks) == src
    kinds = {kind for kind, _ in toks}
    assert "Variable" in kinds and "InlineHtml" in kinds


def test_unterminated_string_is_lex_error():
    with pytest.raises(phpvd.LexError):
        phpvd.tokenize("<?php echo 'oops;")
    assert issubclass(phpvd.LexError, phpvd.PhpvdError)


def test_normalize_abstracts_names_and_literals():
    out = phpvd.normalize("<?php $user = $_GET['id']; mysql_query('SELECT ' . $user);")
    assert "$user" not in out
    assert "mysql_query" in out and "$_GET" in out
    assert out.count("VAR0") == 2


def test_extract_functions_spans():
    src = "<?php\nclass A {\n  public function f($x) {\n    return $x;\n  }\n}\nfunction g() { }\n"
    fns = phpvd.extract_functions(src)
    assert [(f["name"], f["start_line"], f["end_line"]) for f in fns] == [("A::f", 3, 5), ("g", 7, 7)]
    assert fns[1]["body"] == "function g() { }"


def test_cfg_branches_and_merges():
    src = "<?php\nif ($a) {\n  echo 1;\n} else {\n  echo 2;\n}\necho 3;\n"
    g = phpvd.build_cfg(src)
    succ = {}
    for a, b in g.edges:
        succ.setdefault(a, set()).add(b)
    branch = g.lines.index(2)
    assert len(succ[branch]) == 2
    join = g.lines.index(7)
    assert {a for a, b in g.edges if b == join} == {g.lines.index(3), g.lines.index(5)}
    assert g.node_count == len(g.lines)
    assert g.dump().startswith("N %d" % g.node_count)


def _counts(tn, fn, tp, fp):
    truth = ["Safe"] * (tn + fp) + ["XSS"] * (fn + tp)
    pred = ["Safe"] * tn + ["SQLi"] * fp + ["Safe"] * fn + ["XSS"] * tp
    return truth, pred


def test_confusion_binary_scores():
    r = phpvd.confusion(*_counts(240, 32, 241, 33))
    assert (r.tn, r.fn, r.tp, r.fp) == (240, 32, 241, 33)
    p, rc = 241 / 274, 241 / 273
    assert math.isclose(r.precision, 100 * p, rel_tol=1e-12)
    assert math.isclose(r.recall, 100 * rc, rel_tol=1e-12)
    assert math.isclose(r.f1, 100 * 2 * p * rc / (p + rc), rel_tol=1e-12)
    assert round(r.f1, 2) == 88.12


def test_confusion_length_mismatch():
    with pytest.raises(phpvd.LengthMismatch):
        phpvd.confusion(["Safe"], [])


def test_synthetic_is_deterministic():
    a = phpvd.generate_synthetic(3, 11, "function")
    b = phpvd.generate_synthetic(3, 11, "function")
    assert a == b
    assert sorted({s["label"] for s in a}) == ["OSCI", "SQLi", "Safe", "XSS"]
    assert len({s["id"] for s in a}) == len(a)


def test_missing_checkpoint(tmp_path):
    with pytest.raises(phpvd.MissingCheckpoint):
        phpvd.load_model(tmp_path / "nope.ckpt")


@pytest.fixture(scope="module")
def models(tmp_path_factory):
    d = tmp_path_factory.mktemp("models")
    out = {}
    for g in ("file", "function"):
        data = [(s["code"], s["label"]) for s in phpvd.generate_synthetic(2, 5, g)]
        m = phpvd.train(data, granularity=g, epochs=1, batch_size=8, seed=3)
        path = d / (g + ".ckpt")
        m.save(path)
        out[g] = (m, path)
    return out


def test_checkpoint_round_trip(models):
    m, path = models["function"]
    loaded = phpvd.load_model(path)
    assert loaded.granularity == "function"
    assert loaded.vocab_size == m.vocab_size
    assert loaded.parameter_count == m.parameter_count
    code = "function f() { echo $_GET['x']; }"
    a, b = phpvd.predict(m, code), phpvd.predict(loaded, code)
    assert a.label == b.label and a.probabilities == b.probabilities
    assert math.isclose(sum(a.probabilities), 1.0, rel_tol=1e-12)


def test_scan_report(models):
    report = phpvd.scan(FIXTURE, models["file"][1], models["function"][1], threads=2)
    json.dumps(report)
    perf = report["perf"]
    php = sorted(FIXTURE.rglob("*.php"))
    assert perf["php_files"] == len(php)
    assert perf["loc"] == sum(p.read_bytes().count(b"\n") + (0 if p.read_bytes().endswith(b"\n") else 1) for p in php)
    assert report["files_scanned"] + len(report["skipped"]) == len(php)
    assert {f["path"] for f in report["findings"]} <= set(report["flagged"])
