import io
import json

import pytest

from corpus import ODE_SQRT, OPERATOR_CORPUS, REC_GEOM, n, x
from holomellin import (
    DerivAtOne,
    DiffOp,
    MellinMoment,
    Poly,
    RecOp,
    from_json,
    normalize_diffop,
    parse_operator,
    to_json,
)
from holomellin.cli import run
from holomellin.errors import MixedOperatorError, ParseError, ZeroOperatorError
from holomellin.parsing import parse_polynomial, parse_symbol, pretty


def cli(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


# parsing


def test_parse_sqrt_operator():
    op = parse_operator("(x-3)*Dx + 2*(x^2-1)*Dx^2")
    assert op == normalize_diffop(ODE_SQRT)


def test_parse_recurrence_example():
    assert parse_operator("(2+n)*S^2 - S - (n+1)") == REC_GEOM


def test_parse_atom_forms():
    assert parse_operator("(n+2)*f(n+2) - f(n+1) - (n+1)*f(n) = 0") == REC_GEOM
    assert parse_operator("(n+2)*M(n+2) - M(n+1) - (n+1)*M(n)") == REC_GEOM
    op = parse_operator("(n+1)*M(n) - f(1)", normalize=False)
    assert op == RecOp((n + 1,), {DerivAtOne(0): Poly([-1], "n")})
    op = parse_operator("S - 2*f^(2)(1) + M(3)", normalize=False)
    assert op.inhom == {DerivAtOne(2): Poly([-2], "n"), MellinMoment(3): Poly([1], "n")}


def test_parse_rational_coefficients_cleared():
    parsed = parse_operator("Dx + 1/(x+1)", with_report=True)
    assert parsed.op == DiffOp((1, x + 1))
    assert parsed.cleared == x + 1


def test_parse_D_alias_and_powers():
    assert parse_operator("D^2 - 1") == parse_operator("Dx*Dx - 1")
    assert parse_operator("S^2") == parse_operator("S*S")


@pytest.mark.parametrize("text", ["Dx*S", "x*S", "n*Dx + 1"])
def test_mixed_operators_rejected(text):
    with pytest.raises(MixedOperatorError):
        parse_operator(text)


def test_syntax_error_position():
    with pytest.raises(ParseError) as info:
        parse_operator("(x-3)*Dx +\n  * 2")
    err = info.value
    assert (err.line, err.column) == (2, 3)
    assert "line 2" in str(err)


@pytest.mark.parametrize("text", ["Dx*x", "S*n", "Dx^x", "(Dx+1)^2", "x/Dx", "f(n+)", ")"])
def test_malformed_inputs(text):
    with pytest.raises(ParseError):
        parse_operator(text)


def test_zero_operator_rejected():
    with pytest.raises(ParseError, match="zero"):
        parse_operator("Dx - Dx")
    with pytest.raises(ZeroOperatorError):
        from_json({"kind": "recop", "var": "n", "coeffs": ["0"], "inhom": []})


def test_parse_polynomial_and_symbol():
    p = parse_polynomial("1/2*n^2+n", "n")
    assert str(p) == "1/2*n^2 + n"
    assert parse_polynomial("-3+x", "x") == x - 3
    assert parse_symbol("f(1)") == DerivAtOne(0)
    assert parse_symbol("f^(3)(1)") == DerivAtOne(3)
    assert parse_symbol("M(2)") == MellinMoment(2)


@pytest.mark.parametrize("op", OPERATOR_CORPUS, ids=str)
def test_print_parse_round_trip(op):
    assert parse_operator(pretty(op), normalize=False) == op


@pytest.mark.parametrize("op", OPERATOR_CORPUS, ids=str)
def test_json_round_trip(op):
    data = to_json(op)
    text = json.dumps(data)
    assert from_json(json.loads(text)) == op
    assert all(isinstance(c, str) for c in data["coeffs"])


def test_json_rejects_floats():
    with pytest.raises(Exception):
        from_json({"kind": "diffop", "var": "x", "coeffs": [1.5, "1"], "inhom": []})


def test_json_schema_shape():
    data = to_json(RecOp((n + 1,), {DerivAtOne(0): Poly([-1], "n")}))
    assert data == {
        "kind": "recop",
        "var": "n",
        "coeffs": ["n + 1"],
        "inhom": [{"symbol": "f^(0)(1)", "coeff": "-1"}],
    }


# command line


def test_cli_invmellin_pretty():
    code, out = cli("invmellin", "--expr", "(2+n)*S^2 - S - (n+1)", "--pretty")
    assert code == 0
    assert out.strip() == "(x - 1)*Dx + 1"


def test_cli_invmellin_trace():
    code, out = cli("invmellin", "--expr", "(2+n)*S^2 - S - (n+1)", "--trace")
    data = json.loads(out)
    assert code == 0
    assert data["trace"][1] == "-(x^3 - x)*f' - f(n+2) - f(n+1) = 0"
    assert data["result"]["coeffs"] == ["1", "x - 1"]


def test_cli_mellin_json():
    code, out = cli("mellin", "--expr", "(x-3)*Dx + 2*(x^2-1)*Dx^2")
    data = json.loads(out)
    assert code == 0
    assert data["result"]["coeffs"][-1] == "2*n^2 + 13*n + 21"
    assert data["result"]["inhom"] == [{"symbol": "f^(0)(1)", "coeff": "-6"}]


def test_cli_series():
    code, out = cli("series", "--expr", "(1+x)*Dx + 1", "--init", "1", "--terms", "5", "--pretty")
    assert code == 0
    assert out.strip() == "1, -1, 1, -1, 1, -1"


def test_cli_solvers():
    code, out = cli("solve-rec", "--expr", "(2+n)*S^2 + S - (1+n)", "--pretty")
    assert code == 0 and "y(n+1)/y(n) = -1" in out
    code, out = cli("solve-ode", "--expr", "x^2*(2-x-x^2)*Dx + x^2*(1-x)", "--pretty")
    assert code == 0 and out.strip() == "1/(x + 2)"


def test_cli_verify(tmp_path):
    ode = tmp_path / "ode.json"
    rec = tmp_path / "rec.json"
    ode.write_text(json.dumps(to_json(DiffOp((1, x + 1)))))
    rec.write_text(json.dumps(to_json(RecOp((-(n + 1), Poly([1], "n"), n + 2)))))
    code, out = cli("verify", "--ode", str(ode), "--rec", str(rec), "--init", "1",
                    "--n-max", "20", "--tol", "1e-6")
    report = json.loads(out)
    assert code == 0 and report["passed"]
    assert report["max_residual"] < 1e-6
    code, out = cli("verify", "--ode", str(ode), "--rec", "S - 1", "--init", "1")
    assert code == 1 and not json.loads(out)["passed"]


def test_cli_file_input_with_denominator(tmp_path):
    path = tmp_path / "op.json"
    path.write_text(json.dumps(to_json(REC_GEOM)))
    code, out = cli("invmellin", "--file", str(path), "--pretty")
    assert code == 0 and out.strip() == "(x - 1)*Dx + 1"
    code, out = cli("mellin", "--expr", "Dx + 1/(x+1)")
    assert json.loads(out)["cleared_denominator"] == "x + 1"


def test_cli_exit_codes(tmp_path, capsys):
    assert cli("invmellin", "--expr", "Dx*S")[0] == 1
    assert cli("frobnicate")[0] == 2
    assert cli("invmellin")[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli("invmellin", "--file", str(bad))[0] == 1
    assert cli("invmellin", "--expr", "S - f(1)")[0] == 1
    capsys.readouterr()


def test_cli_deterministic():
    args = ("mellin", "--expr", "(x-3)*Dx + 2*(x^2-1)*Dx^2")
    assert cli(*args) == cli(*args)
    args = ("solve-rec", "--expr", "S^2 - 1")
    assert cli(*args) == cli(*args)


def test_cli_max_terms_env(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("HOLOMELLIN_MAX_TERMS", "80")
    code, _ = cli("verify", "--ode", "(1-x)*Dx - 1", "--rec", "(n+2)*S - (n+1)",
                  "--init", "1", "--tol", "1e-9")
    assert code == 1
    assert "holomellin verify" in capsys.readouterr().err
