import csv

import pytest

from pwnorm.cli import fmt, main, read_variables, read_vector
from pwnorm.config import build_space, parse_config
from pwnorm.envelope import distortion_certificate, envelope_norm_exact
from pwnorm.errors import ParseError
from pwnorm.experiments import rosenthal_mc, yn_default_params, yn_report
from pwnorm.norms import family_norm
from pwnorm.spaces import classify_rosenthal
from pwnorm.vectors import ConstantBlock, SparseVector
from pwnorm.weights import PowerDecay

XP_CFG = "p = 4\nspace = xp(power_decay(0.25))\n"
CONST_CFG = "p = 4\nspace = xp(const(0.5))\n"
ENV_CFG = "p = 4\nspace = envelope(xp(const(0.5)))\n"


def _file(tmp_path, text, name):
    f = tmp_path / name
    f.write_text(text)
    return str(f)


def _cfg(tmp_path, text=XP_CFG):
    return _file(tmp_path, text, "space.cfg")


def _vec(tmp_path, text="1 : 1\n2 : 1\n"):
    return _file(tmp_path, text, "x.vec")


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _x12():
    return SparseVector(arity=1, entries=(((1,), 1.0), ((2,), 1.0)))


# --- vector / variables files ----------------------------------------------------


def test_read_vector_entries_blocks_comments(tmp_path):
    path = _file(
        tmp_path,
        "# header comment\n"
        "\n"
        "1 2 : 0.5   # an entry\n"
        "block 2 1 2 3 51 : 0.25\n",
        "v.vec",
    )
    x = read_vector(path, 2)
    assert x == SparseVector(
        arity=2,
        entries=(((1, 2), 0.5),),
        blocks=(
            ConstantBlock(template=(2, 1), running_coord=2, lo=3, hi=51, coeff=0.25),
        ),
    )


@pytest.mark.parametrize(
    "text,arity,snippet",
    [
        ("1 1 : 0.5\n", 1, "expected 1 coordinates, got 2"),
        ("1 : x\n", 1, "bad value 'x'"),
        ("1 0.5\n", 1, "missing ':'"),
        ("block 2 1 2 3 : 0.25\n", 2, "block lines need 2 template coordinates"),
        ("1.5 : 0.5\n", 1, "coordinates must be integers"),
        ("block 2 1 2 a 51 : 0.25\n", 2, "block coordinates must be integers"),
        ("# nothing here\n", 1, "no entries"),
    ],
)
def test_read_vector_errors(tmp_path, text, arity, snippet):
    path = _file(tmp_path, text, "bad.vec")
    with pytest.raises(ParseError, match=r".*" + snippet.replace("(", r"\(").replace(")", r"\)")):
        read_vector(path, arity)


def test_read_variables(tmp_path):
    path = _file(tmp_path, "2.0 0.25\n# c\n\n1.0 1.0\n", "vars.txt")
    assert read_variables(path) == [(2.0, 0.25), (1.0, 1.0)]


@pytest.mark.parametrize(
    "text,snippet",
    [
        ("1.0\n", "expected 'amplitude probability'"),
        ("a b\n", "bad number"),
        ("", "no variables"),
    ],
)
def test_read_variables_errors(tmp_path, text, snippet):
    path = _file(tmp_path, text, "vars.txt")
    with pytest.raises(ParseError, match=snippet):
        read_variables(path)


# --- norm / envelope / distortion ---------------------------------------------


def test_norm_command(tmp_path, capsys):
    out = str(tmp_path / "r.csv")
    rc = main(
        ["--command", "norm", "--config", _cfg(tmp_path), "--vector", _vec(tmp_path),
         "--out", out]
    )
    assert rc == 0
    p, expr = parse_config(XP_CFG)
    expected = family_norm(_x12(), build_space(p, expr))
    captured = capsys.readouterr().out.splitlines()
    assert captured[0] == f"norm = {fmt(expected.value)}"
    assert captured[1] == f"argmax member: {expected.argmax_member}"
    header, row = _rows(out)
    assert header == ["command", "space", "p", "norm", "argmax_member"]
    assert row == ["norm", "xp(power_decay(0.25))", "4", fmt(expected.value), "()"]


def test_envelope_command(tmp_path, capsys):
    out = str(tmp_path / "r.csv")
    rc = main(
        ["--command", "envelope", "--config", _cfg(tmp_path, CONST_CFG),
         "--vector", _vec(tmp_path), "--out", out]
    )
    assert rc == 0
    p, expr = parse_config(CONST_CFG)
    res, assignment = envelope_norm_exact(_x12(), build_space(p, expr))
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == f"envelope norm = {fmt(res.value)}"
    assert lines[1] == f"assignment: {assignment.label()}"
    _, row = _rows(out)
    assert row == [
        "envelope", "xp(const(0.5))", "4", fmt(res.value), "assign[discrete,discrete]",
    ]


def test_distortion_command(tmp_path, capsys):
    out = str(tmp_path / "r.csv")
    rc = main(
        ["--command", "distortion", "--config", _cfg(tmp_path, CONST_CFG),
         "--vector", _vec(tmp_path), "--out", out]
    )
    assert rc == 0
    p, expr = parse_config(CONST_CFG)
    rep = distortion_certificate(_x12(), build_space(p, expr))
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == f"given norm   = {fmt(rep.given_norm)}"
    assert lines[3] == f"distance lb  = {fmt(rep.distance_lb)}"
    header, row = _rows(out)
    assert header == [
        "command", "space", "p", "given_norm", "envelope_lb", "ratio", "distance_lb",
    ]
    assert row[3:] == [
        fmt(rep.given_norm), fmt(rep.envelope_lb), fmt(rep.ratio), fmt(rep.distance_lb),
    ]


def test_norm_command_with_blocks(tmp_path, capsys):
    cfg = _cfg(tmp_path, "p = 4\nspace = tensor(lp, lp)\n")
    vec = _file(tmp_path, "block 2 1 2 3 51 : 0.25\n", "b.vec")
    rc = main(["--command", "norm", "--config", cfg, "--vector", vec])
    assert rc == 0
    expected = (49 * 0.25**4) ** 0.25
    line = capsys.readouterr().out.splitlines()[0]
    assert line == f"norm = {fmt(expected)}"


# --- classify / property check ---------------------------------------------------


def test_classify_command(tmp_path, capsys):
    out = str(tmp_path / "r.csv")
    rc = main(["--command", "classify", "--config", _cfg(tmp_path), "--out", out])
    assert rc == 0
    c = classify_rosenthal(PowerDecay(0.25), 4.0)
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == f"type: {c.tag.value}"
    _, row = _rows(out)
    assert row[:3] == ["classify", "xp(power_decay(0.25))", "4"]
    assert row[3] == c.tag.value


def test_classify_requires_xp_config(tmp_path, capsys):
    cfg = _cfg(tmp_path, "p = 4\nspace = lp\n")
    rc = main(["--command", "classify", "--config", cfg])
    assert rc == 2
    assert "classify decides two-member families" in capsys.readouterr().err


def test_check_envelope_property_failing(tmp_path, capsys):
    out = str(tmp_path / "r.csv")
    rc = main(
        ["--command", "check-envelope-property", "--config", _cfg(tmp_path, CONST_CFG),
         "--vector", _vec(tmp_path), "--out", out]
    )
    assert rc == 0
    outl = capsys.readouterr().out.splitlines()
    assert outl[0] == "envelope property FAILS; counterexample refinement:"
    assert outl[1] == "  cells [(1,)] <- member discrete"
    assert outl[2] == "  cells [(2,)] <- member ()"
    header, row = _rows(out)
    assert header == [
        "command", "space", "p", "holds", "exhaustive", "checked", "counterexample",
    ]
    assert row[3:] == ["false", "true", "4", "[(1,)]<-discrete | [(2,)]<-()"]


def test_check_envelope_property_holding(tmp_path, capsys):
    rc = main(
        ["--command", "check-envelope-property", "--config", _cfg(tmp_path, ENV_CFG),
         "--vector", _vec(tmp_path)]
    )
    assert rc == 0
    line = capsys.readouterr().out.splitlines()[0]
    assert line == "envelope property holds exhaustively (9 refinements checked)"


# --- experiments -----------------------------------------------------------------


def test_experiment_yn_default(tmp_path, capsys):
    out = str(tmp_path / "r.csv")
    rc = main(["--command", "experiment-yn", "--out", out])
    assert rc == 0
    rep = yn_report(yn_default_params())
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n = 3, p = 4, eps = 1"
    assert lines[1] == "m = (16, 16, 16), K = (49, 49, 49)"
    header, row = _rows(out)
    assert header == (
        ["n", "p", "eps", "m", "K"]
        + [f"S_{i}" for i in range(8)]
        + ["given_norm", "envelope_lb", "ratio", "distance_lb"]
    )
    assert row[:5] == ["3", "4", "1", "16;16;16", "49;49;49"]
    assert row[5:13] == [fmt(s) for s in rep.sums]
    assert row[13] == fmt(rep.given_norm)


def test_experiment_yn_n_flag(tmp_path):
    out = str(tmp_path / "r.csv")
    assert main(["--command", "experiment-yn", "--n", "2", "--out", out]) == 0
    header, row = _rows(out)
    assert header[5:9] == ["S_0", "S_1", "S_2", "S_3"]
    assert len(header) == 5 + 4 + 4
    assert row[0] == "2"


def test_experiment_yn_reads_yn_config(tmp_path, capsys):
    cfg = _cfg(tmp_path, "p = 4\nspace = yn(3, power_decay(0.25))\n")
    rc = main(["--command", "experiment-yn", "--config", cfg])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n = 3, p = 4, eps = 1"
    rep = yn_report(yn_default_params())
    assert lines[-4] == f"given norm  = {fmt(rep.given_norm)}"


def test_experiment_rosenthal(tmp_path, capsys):
    out = str(tmp_path / "r.csv")
    rc = main(
        ["--command", "experiment-rosenthal", "--n", "3", "--samples", "10000",
         "--out", out]
    )
    assert rc == 0
    res = rosenthal_mc([(1.0, 1.0)] * 3, 4.0, 10000, 0)
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "N = 3, p = 4, samples = 10000, seed = 0"
    assert lines[1] == f"lhs estimate = {fmt(res.lhs_est)} (stderr {fmt(res.stderr)})"
    header, row = _rows(out)
    assert header == ["N", "p", "samples", "seed", "lhs_est", "stderr", "rhs", "ratio"]
    assert row == [
        "3", "4", "10000", "0",
        fmt(res.lhs_est), fmt(res.stderr), fmt(res.rhs), fmt(res.ratio),
    ]


def test_experiment_rosenthal_variables_file(tmp_path, capsys):
    vars_path = _file(tmp_path, "2.0 0.25\n1.0 1.0\n", "vars.txt")
    rc = main(
        ["--command", "experiment-rosenthal", "--vector", vars_path,
         "--samples", "10000", "--seed", "7"]
    )
    assert rc == 0
    res = rosenthal_mc([(2.0, 0.25), (1.0, 1.0)], 4.0, 10000, 7)
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "N = 2, p = 4, samples = 10000, seed = 7"
    assert lines[3] == f"ratio        = {fmt(res.ratio)}"


# --- CSV byte stability ------------------------------------------------------------


def test_csv_outputs_are_byte_stable(tmp_path):
    argv_sets = [
        ["--command", "norm", "--config", _cfg(tmp_path), "--vector", _vec(tmp_path)],
        ["--command", "experiment-yn"],
        ["--command", "experiment-rosenthal", "--n", "4", "--samples", "10000"],
    ]
    for i, argv in enumerate(argv_sets):
        a = str(tmp_path / f"a{i}.csv")
        b = str(tmp_path / f"b{i}.csv")
        assert main(argv + ["--out", a]) == 0
        assert main(argv + ["--out", b]) == 0
        with open(a, "rb") as fa, open(b, "rb") as fb:
            assert fa.read() == fb.read()


# --- exit codes --------------------------------------------------------------------


def test_exit_code_2_on_config_parse_error(tmp_path, capsys):
    cfg = _cfg(tmp_path, "p = $\n")
    rc = main(["--command", "norm", "--config", cfg, "--vector", _vec(tmp_path)])
    assert rc == 2
    assert capsys.readouterr().err.startswith("parse error:")


def test_exit_code_2_on_validation_error(tmp_path, capsys):
    cfg = _cfg(tmp_path, "p = 2\nspace = lp\n")
    rc = main(["--command", "norm", "--config", cfg, "--vector", _vec(tmp_path)])
    assert rc == 2
    assert capsys.readouterr().err.startswith("error:")


def test_exit_code_2_on_bad_vector(tmp_path, capsys):
    vec = _file(tmp_path, "1 2 : 0.5\n", "bad.vec")
    rc = main(["--command", "norm", "--config", _cfg(tmp_path), "--vector", vec])
    assert rc == 2
    assert "expected 1 coordinates, got 2" in capsys.readouterr().err


def test_exit_code_2_on_missing_flag(tmp_path, capsys):
    rc = main(["--command", "norm", "--config", _cfg(tmp_path)])
    assert rc == 2
    assert "command 'norm' requires --vector" in capsys.readouterr().err


def test_exit_code_3_on_capacity(tmp_path, capsys):
    rc = main(
        ["--command", "envelope", "--config", _cfg(tmp_path, CONST_CFG),
         "--vector", _vec(tmp_path), "--cap-members", "1"]
    )
    assert rc == 3
    assert capsys.readouterr().err.startswith("capacity error:")


def test_exit_code_4_on_missing_files(tmp_path, capsys):
    rc = main(
        ["--command", "norm", "--config", str(tmp_path / "nope.cfg"),
         "--vector", _vec(tmp_path)]
    )
    assert rc == 4
    assert capsys.readouterr().err.startswith("i/o error:")
    rc = main(
        ["--command", "norm", "--config", _cfg(tmp_path),
         "--vector", str(tmp_path / "nope.vec")]
    )
    assert rc == 4


def test_unknown_command_rejected_by_argparse(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--command", "frobnicate"])
    assert exc.value.code == 2
