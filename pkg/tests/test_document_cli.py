import json
from pathlib import Path

import pytest

from graphreact import (
    DocumentError,
    emit_document,
    parse_document,
    prepare,
    validate,
)
from graphreact.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def path_site_doc():
    return json.loads((FIXTURES / "path_site.json").read_text())


def test_parse_and_prepare_vertex_injection():
    parsed = parse_document(path_site_doc())
    g, w, start = prepare(parsed)
    assert start == "v0"
    assert validate(g) == []
    assert w.at("c", 0) == pytest.approx(0.5)


def test_round_trip_identical_graph():
    parsed = parse_document(path_site_doc())
    again = parse_document(emit_document(parsed))
    assert again.graph == parsed.graph
    assert again.injection == parsed.injection


def test_unknown_keys_rejected_everywhere():
    doc = path_site_doc()
    doc["surprise"] = 1
    with pytest.raises(DocumentError, match="unknown keys"):
        parse_document(doc)
    doc = path_site_doc()
    doc["vertices"][0]["color"] = "red"
    with pytest.raises(DocumentError, match=r"vertices\[0\]"):
        parse_document(doc)
    doc = path_site_doc()
    doc["edges"][1]["weight"] = 2
    with pytest.raises(DocumentError, match=r"edges\[1\]"):
        parse_document(doc)
    doc = path_site_doc()
    doc["injection"] = {"vertex": "v0", "offset": 1}
    with pytest.raises(DocumentError):
        parse_document(doc)


def test_missing_keys_reported_with_location():
    with pytest.raises(DocumentError, match="missing required key"):
        parse_document({"vertices": []})
    with pytest.raises(DocumentError, match=r"edges\[0\].*length"):
        parse_document(
            {"vertices": [{"id": "a", "role": "exit"}], "edges": [{"from": "a", "to": "a"}]}
        )


def test_explicit_weights_override_and_validate():
    doc = path_site_doc()
    doc["weights"] = {"c": {"0": 0.25, "1": 0.75}}
    g, w, _ = prepare(parse_document(doc))
    assert w.at("c", 0) == 0.25
    assert w.at("c", 1) == 0.75
    assert w.at("v0", 0) == 1.0  # derived row untouched

    doc["weights"] = {"c": {"0": 0.25, "1": 0.5}}
    with pytest.raises(DocumentError, match="sum"):
        prepare(parse_document(doc))
    doc["weights"] = {"ghost": {"0": 1.0}}
    with pytest.raises(DocumentError, match="unknown vertex"):
        prepare(parse_document(doc))


def test_edge_injection_splits_and_remaps_weights():
    doc = path_site_doc()
    doc["weights"] = {"c": {"0": 0.3, "1": 0.7}}
    doc["injection"] = {"edge": ["v0", "c"], "offset": 0.25}
    g, w, start = prepare(parse_document(doc))
    assert validate(g) == []
    assert g.degree(start) == 2
    # c's explicit row follows the renamed child edge (old index 0 -> appended)
    assert w.at("c", len(g.edges) - 1) == 0.3
    assert w.at("c", 1) == 0.7
    assert w.at(start, 0) == pytest.approx(0.5)


def test_injection_unknown_edge():
    doc = path_site_doc()
    doc["injection"] = {"edge": ["v0", "a"], "offset": 0.1}
    with pytest.raises(DocumentError, match="no edge"):
        parse_document(doc)


def _write(tmp_path, doc, name="g.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_cli_validate(tmp_path, capsys):
    path = _write(tmp_path, path_site_doc())
    assert main(["validate", path]) == 0
    assert capsys.readouterr().out.strip() == "OK"

    bad = path_site_doc()
    bad["edges"][0]["length"] = -1.0
    path = _write(tmp_path, bad, "bad.json")
    assert main(["validate", path]) == 1
    assert "length" in capsys.readouterr().out

    broken = tmp_path / "broken.json"
    broken.write_text("{ nope")
    assert main(["validate", str(broken)]) == 1
    err = capsys.readouterr().err
    assert "line" in err and "column" in err

    assert main(["validate", str(tmp_path / "absent.json")]) == 1
    capsys.readouterr()


def test_cli_convert_path_site(tmp_path, capsys):
    path = _write(tmp_path, path_site_doc())
    assert main(["convert", path, "--kappa", "1"]) == 0
    out = capsys.readouterr().out
    assert "alpha_kac = 0.666666666667" in out
    assert "alpha_fk  = 0.666666666667" in out

    assert main(["convert", path, "--kappa", "0"]) == 0
    out = capsys.readouterr().out
    assert "alpha_kac = 0" in out

    assert main(["convert", path, "--kappa", "inf"]) == 0
    out = capsys.readouterr().out
    assert "alpha_kac = 1" in out  # hitting probability from v0 is 1


def test_cli_convert_rejects_bad_kappa(tmp_path, capsys):
    path = _write(tmp_path, path_site_doc())
    assert main(["convert", path, "--kappa", "-2"]) == 1
    assert main(["convert", path, "--kappa", "soup"]) == 1
    capsys.readouterr()


def test_cli_sweep_monotone_and_stable(tmp_path, capsys):
    path = _write(tmp_path, path_site_doc())
    out_file = tmp_path / "sweep.csv"
    args = [
        "sweep", path, "--kappa-min", "0.1", "--kappa-max", "10",
        "--steps", "5", "--spacing", "geometric", "--out", str(out_file),
    ]
    assert main(args) == 0
    text = out_file.read_text()
    lines = text.strip().split("\n")
    assert lines[0] == "kappa,alpha,psi,method"
    assert len(lines) == 1 + 2 * 5
    kac_alphas = [float(l.split(",")[1]) for l in lines[1:] if l.endswith("kac")]
    assert kac_alphas == sorted(kac_alphas)
    # byte stability
    assert main(args) == 0
    assert out_file.read_text() == text
    capsys.readouterr()


def test_cli_sweep_stdout_and_arg_checks(tmp_path, capsys):
    path = _write(tmp_path, path_site_doc())
    assert main(["sweep", path, "--kappa-min", "0", "--kappa-max", "1", "--steps", "2"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert len(lines) == 5
    assert main(["sweep", path, "--kappa-min", "1", "--kappa-max", "1", "--steps", "3"]) == 1
    assert main(["sweep", path, "--kappa-min", "0", "--kappa-max", "1", "--steps", "1"]) == 1
    capsys.readouterr()


def test_cli_rational_path_site(tmp_path, capsys):
    path = _write(tmp_path, path_site_doc())
    assert main(["rational", path]) == 0
    out = capsys.readouterr().out.strip().split("\n")
    assert out[0] == "numerator,0,2"
    assert out[1] == "denominator,1,2"


def test_cli_green_chain(tmp_path, capsys):
    doc = json.loads((FIXTURES / "chain_m2.json").read_text())
    path = _write(tmp_path, doc)
    assert main(["green", path]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "site,c1,c2"
    row1 = [float(v) for v in lines[1].split(",")[1:]]
    row2 = [float(v) for v in lines[2].split(",")[1:]]
    assert row1 == pytest.approx([2.0, 1.0], abs=1e-10)
    assert row2 == pytest.approx([1.0, 1.0], abs=1e-10)


def test_cli_hit_chain(tmp_path, capsys):
    doc = json.loads((FIXTURES / "chain_m2.json").read_text())
    path = _write(tmp_path, doc)
    assert main(["hit", path]) == 0
    out = capsys.readouterr().out
    assert "alpha_inf = 1" in out
    assert "c1,1" in out
    assert "c2,0" in out


def test_cli_mc_csv(tmp_path, capsys):
    path = _write(tmp_path, path_site_doc())
    args = ["mc", path, "--kappa", "1", "--delta", "0.25", "--n", "2000", "--seed", "42"]
    assert main(args) == 0
    first = capsys.readouterr().out
    lines = first.strip().split("\n")
    assert lines[0] == "kappa,mean,se,n,delta,seed"
    fields = lines[1].split(",")
    assert fields[0] == "1" and fields[3] == "2000" and fields[5] == "42"
    assert main(args) == 0
    assert capsys.readouterr().out == first  # byte-stable under the same seed


def test_cli_diffuse_csv(tmp_path, capsys):
    doc = json.loads((FIXTURES / "interval_zone.json").read_text())
    path = _write(tmp_path, doc)
    args = [
        "diffuse", path, "--k", "1", "--delta", "1", "--diffusion", "1",
        "--h-list", "0.1,0.01",
    ]
    assert main(args) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "h,psi_h,psi_limit,abs_err"
    assert len(lines) == 3
    errs = [float(l.split(",")[3]) for l in lines[1:]]
    assert errs[0] > errs[1]


def test_cli_compare_star(tmp_path, capsys):
    doc = json.loads((FIXTURES / "star_n3.json").read_text())
    path = _write(tmp_path, doc)
    assert main([
        "compare", path, "--kappa", "2", "--delta", "0.1", "--n", "20000",
        "--seed", "7",
    ]) == 0
    out = capsys.readouterr().out.strip().split("\n")
    assert out[0] == "method,alpha,psi,se,status"
    assert out[-1].startswith("mc,")
    assert out[-1].endswith("pass")


def test_cli_injection_required(tmp_path, capsys):
    doc = path_site_doc()
    del doc["injection"]
    path = _write(tmp_path, doc)
    assert main(["convert", path, "--kappa", "1"]) == 1
    assert "injection" in capsys.readouterr().err
    # but the injection-free commands still work
    assert main(["green", path]) == 0
    capsys.readouterr()


def test_cli_usage_errors_exit_one(capsys):
    assert main(["sweep"]) == 1
    assert main(["nonsense"]) == 1
    capsys.readouterr()


def test_cli_numerical_failure_exits_two(tmp_path, capsys, monkeypatch):
    import graphreact.cli as cli
    from graphreact import SingularSystemError

    def boom(*args, **kwargs):
        raise SingularSystemError("matrix is singular at pivot column 0")

    monkeypatch.setattr(cli, "conversion", boom)
    path = _write(tmp_path, path_site_doc())
    assert main(["convert", path, "--kappa", "1"]) == 2
    assert "numerical failure" in capsys.readouterr().err


def test_cli_thread_env_var_sets_default(monkeypatch):
    from graphreact.cli import build_parser

    monkeypatch.setenv("GRAPHREACT_THREADS", "4")
    args = build_parser().parse_args(
        ["mc", "g.json", "--kappa", "1", "--delta", "0.1", "--n", "10", "--seed", "1"]
    )
    assert args.threads == 4
    monkeypatch.delenv("GRAPHREACT_THREADS")
    args = build_parser().parse_args(["compare", "g.json", "--kappa", "1"])
    assert args.threads == 1


def test_round_trip_preserves_weights_and_dimension():
    doc = path_site_doc()
    doc["dimension"] = 2
    doc["weights"] = {"c": {"0": 0.25, "1": 0.75}}
    parsed = parse_document(doc)
    again = parse_document(emit_document(parsed))
    assert again.graph == parsed.graph
    assert again.explicit_weights == parsed.explicit_weights
    g1, w1, _ = prepare(parsed)
    g2, w2, _ = prepare(again)
    assert w1.p == w2.p
