import csv
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornerfields.angles import Angle
from cornerfields.cli import main
from cornerfields.config import (
    RunConfig,
    emit_config,
    emit_table,
    merge,
    parse_config,
    read_points,
    read_table,
)
from cornerfields.cutoff import Smoothness
from cornerfields.errors import ParseError, ValidationError
from cornerfields.exponents import BcKind

ROOT_SCHEMA = ["re(lambda)", "im(lambda)", "branch", "residual"]

# -- config documents ------------------------------------------------------------------


def test_omega_pi_syntax():
    cfg = parse_config("omega = 3pi/2\n")
    assert float(cfg.omega) == pytest.approx(4.712388980384690, abs=1e-15)
    assert cfg.omega.pi_multiple == Fraction(3, 2)
    assert parse_config("omega = 3*pi/2").omega == cfg.omega


def test_omega_zero_rejected():
    with pytest.raises(ValidationError, match="omega"):
        parse_config("omega = 0")
    with pytest.raises(ValidationError, match="omega"):
        parse_config("omega = 5pi/2")


def test_full_document():
    text = """
    # L-corner, second exponent
    problem = laplace
    omega = 3pi/2   # reentrant
    lambda = 0.5
    bc = nn
    k = 2
    profile = exp
    out = "runs/a b"
    """
    cfg = parse_config(text)
    assert cfg.lam == 0.5 and cfg.k == 2
    assert cfg.bc is BcKind("nn")
    assert cfg.profile is Smoothness("exp")
    assert cfg.out == "runs/a b"


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("omega = pi\nproblem laplace\n", 2, 1),
        ("  = 3\n", 1, 3),
        ("k =\n", 1, 4),
        ("k = 1\n\nk = 2\n", 3, 1),
    ],
)
def test_parse_error_positions(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_config(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_unknown_key():
    with pytest.raises(ValidationError, match="colour: unknown key"):
        parse_config("colour = red")


@pytest.mark.parametrize(
    "text, field",
    [("k = two", "k"), ("tol = -1", "tol"), ("r0 = 0.5\nr1 = 0.2", "r1"), ("bc = xy", "bc"), ("lambda = nan", "lambda")],
)
def test_bad_values_name_the_field(text, field):
    with pytest.raises(ValidationError, match=f"^{field}:"):
        parse_config(text)


def test_merge_ignores_none():
    cfg = parse_config("k = 3")
    assert merge(cfg, k=None, lam=0.25) == RunConfig(k=3, lam=0.25)


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
positive = st.floats(min_value=1e-12, max_value=1e6, allow_nan=False)


@st.composite
def configs(draw):
    omega = draw(
        st.one_of(
            st.fractions(min_value=Fraction(1, 64), max_value=2, max_denominator=64).map(Angle.from_pi),
            st.floats(min_value=1e-6, max_value=2 * math.pi).map(Angle),
        )
    )
    r0 = draw(st.none() | st.floats(min_value=1e-3, max_value=1.0))
    r1 = None if r0 is None else draw(st.floats(min_value=2 * r0, max_value=3.0))
    return RunConfig(
        problem=draw(st.sampled_from(["laplace", "stokes"])),
        omega=omega,
        lam=draw(st.none() | finite),
        bc=draw(st.none() | st.sampled_from(list(BcKind))),
        k=draw(st.none() | st.integers(0, 50)),
        amplitude=draw(st.none() | finite),
        r0=r0,
        r1=r1,
        profile=draw(st.none() | st.sampled_from(list(Smoothness))),
        xi=draw(st.none() | positive),
        tol=draw(st.none() | positive),
        levels=draw(st.none() | st.integers(1, 8)),
        out=draw(st.none() | st.text(alphabet="abcxyz_/.-0123 ", min_size=1, max_size=12)),
    )


@settings(max_examples=100, deadline=None)
@given(configs())
def test_config_round_trip(cfg):
    text = emit_config(cfg)
    again = parse_config(text)
    assert again == cfg
    assert emit_config(again) == text


# -- tables -------------------------------------------------------------------------------


def test_empty_table_is_header_only(tmp_path):
    path = tmp_path / "t.csv"
    emit_table([], ROOT_SCHEMA, path)
    assert path.read_bytes() == b"re(lambda),im(lambda),branch,residual\n"


def test_one_root_row(tmp_path):
    path = tmp_path / "t.csv"
    emit_table([(0.5444837367824639, 0.0, "plus", 1e-17)], ROOT_SCHEMA, path)
    lines = path.read_bytes().split(b"\n")
    assert lines[0] == b"re(lambda),im(lambda),branch,residual"
    cells = lines[1].decode().split(",")
    assert cells[2] == "plus"
    assert [float(cells[i]) for i in (0, 1, 3)] == [0.5444837367824639, 0.0, 1e-17]
    # 17 significant digits
    assert len(cells[0].replace("0.", "", 1)) == 17
    assert lines[2:] == [b""]


def test_table_values_reparse_bit_identical(tmp_path):
    import numpy as np

    values = np.random.default_rng(0).normal(size=(200, 2)) * 10.0 ** np.arange(-150, 150, 1.5)[:, None]
    path = tmp_path / "t.csv"
    emit_table(values, ["x", "y"], path)
    assert b"\r" not in path.read_bytes()
    x, y = read_points(path)
    assert np.array_equal(x, values[:, 0]) and np.array_equal(y, values[:, 1])


def test_table_arity_checked(tmp_path):
    with pytest.raises(ValidationError):
        emit_table([(1.0, 2.0)], ROOT_SCHEMA, tmp_path / "t.csv")


def test_table_io_error_names_path(tmp_path):
    bad = tmp_path / "missing" / "t.csv"
    with pytest.raises(OSError) as info:
        emit_table([], ["a"], bad)
    assert str(bad) in str(info.value)
    with pytest.raises(OSError) as info:
        read_table(bad)
    assert str(bad) in str(info.value)


def test_table_to_stdout(capsys):
    emit_table([(1, True, 0.1)], ["a", "b", "c"])
    assert capsys.readouterr().out == "a,b,c\n1,true,0.10000000000000001\n"


# -- command line -----------------------------------------------------------------------------


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def points(tmp_path):
    path = tmp_path / "pts.csv"
    path.write_text("x,y\n0.3,0.2\n-0.2,0.35\n-0.1,-0.3\n0.0,0.4\n")
    return str(path)


def test_cli_exponents_laplace(tmp_path):
    assert main(["--out", str(tmp_path), "exponents", "--omega", "3pi/2", "--count", "3"]) == 0
    rows = _rows(tmp_path / "exponents.csv")
    assert [float(r["re(lambda)"]) for r in rows] == pytest.approx([2 / 3, 4 / 3, 2.0], abs=0)


def test_cli_exponents_stokes(tmp_path):
    args = ["--out", str(tmp_path), "exponents", "--omega", "3pi/2", "--problem", "stokes"]
    args += ["--re-min", "0.1", "--re-max", "0.9", "--im-min", "-0.5", "--im-max", "0.5"]
    assert main(args) == 0
    rows = _rows(tmp_path / "exponents.csv")
    lams = sorted(float(r["re(lambda)"]) for r in rows)
    assert lams[0] == pytest.approx(0.544483736782464, abs=1e-12)
    assert all(float(r["residual"]) <= 1e-12 for r in rows)


def test_cli_eval_laplace(tmp_path, points):
    assert main(["--out", str(tmp_path), "eval-laplace", "--points", points]) == 0
    rows = _rows(tmp_path / "laplace.csv")
    assert len(rows) == 4
    r = math.hypot(0.3, 0.2)
    expected = r ** (2 / 3) * math.sin(2 / 3 * math.atan2(0.2, 0.3))
    assert float(rows[0]["u"]) == pytest.approx(expected, rel=1e-14)


def test_cli_eval_stokes(tmp_path, points):
    assert main(["--out", str(tmp_path), "eval-stokes", "--points", points, "--lambda", "0.5445", "--dirichlet"]) == 0
    assert list(_rows(tmp_path / "stokes.csv")[0]) == ["x", "y", "u1", "u2", "p"]
    assert main(["--out", str(tmp_path), "eval-stokes", "--points", points, "--lambda", "1", "--coeffs", "1,0,0,0"]) == 0
    row = _rows(tmp_path / "stokes.csv")[0]
    # basis 1 at lambda = 1 is the linear field (x, -y)
    assert (float(row["u1"]), float(row["u2"])) == pytest.approx((0.3, -0.2), abs=1e-15)


def test_cli_rhs(tmp_path, points):
    assert main(["--out", str(tmp_path), "rhs", "--points", points, "--r0", "0.2", "--r1", "0.6"]) == 0
    rows = _rows(tmp_path / "rhs.csv")
    assert float(rows[3]["f"]) != 0.0
    assert main(["--out", str(tmp_path), "rhs", "--problem", "stokes", "--lambda", "0.5445", "--points", points]) == 0
    assert list(_rows(tmp_path / "rhs.csv")[0]) == ["x", "y", "f1", "f2", "g"]


def test_cli_pairing_limit_case(tmp_path):
    assert main(["--out", str(tmp_path), "pairing"]) == 0
    values = {r["quantity"]: float(r["value"]) for r in _rows(tmp_path / "defect.csv")}
    assert values["arc_limit"] == pytest.approx(-math.pi, abs=1e-6)
    assert values["area_pairing"] == pytest.approx(-math.pi, abs=1e-4)
    assert len(_rows(tmp_path / "pairing.csv")) > 3


def test_cli_fem(tmp_path):
    assert main(["--out", str(tmp_path), "fem", "--case", "convergence", "--levels", "3", "--n0", "4"]) == 0
    rows = _rows(tmp_path / "fem_convergence.csv")
    assert len(rows) == 3
    assert float(rows[-1]["rate_h1"]) == pytest.approx(2 / 3, abs=0.15)
    assert main(["--out", str(tmp_path), "fem", "--case", "limit", "--levels", "2"]) == 0
    assert len(_rows(tmp_path / "fem_limit.csv")) == 2
    assert len(_rows(tmp_path / "solution.csv")) > 100


def test_cli_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("omega = pi\nk = 2\n")
    assert main(["--config", str(cfg), "--out", str(tmp_path), "exponents"]) == 0
    assert [float(r["re(lambda)"]) for r in _rows(tmp_path / "exponents.csv")] == [1.0, 2.0]
    assert main(["--config", str(cfg), "--out", str(tmp_path), "exponents", "--count", "1"]) == 0
    assert len(_rows(tmp_path / "exponents.csv")) == 1


def test_cli_root_on_region_boundary_exit_2():
    # lambda = 1 is always a root of the minus factor
    assert main(["exponents", "--problem", "stokes", "--re-min", "0.1", "--re-max", "1.0"]) == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["exponents", "--omega", "0"],
        ["exponents", "--omega", "7"],
        ["fem", "--case", "limit", "--omega", "pi"],
        ["eval-stokes", "--points", "/nonexistent/pts.csv", "--lambda", "1", "--coeffs", "1,0,0,0"],
        ["eval-stokes", "--points", "/nonexistent/pts.csv", "--lambda", "1", "--coeffs", "1,x"],
        ["rhs", "--problem", "stokes", "--points", "/nonexistent/pts.csv"],
        ["--config", "/nonexistent.cfg", "exponents"],
    ],
)
def test_cli_invalid_input_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_cli_bad_config_exit_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("omega = 3pi/2\nshape = L\n")
    assert main(["--config", str(cfg), "exponents"]) == 2


def test_cli_numerical_failure_exit_3(tmp_path):
    # one CG iteration cannot reach the requested tolerance
    assert main(["--tol", "1e-300", "fem", "--case", "limit", "--levels", "1"]) == 3


def test_cli_bit_reproducible(tmp_path):
    outputs = []
    for run in range(2):
        out = tmp_path / f"run{run}"
        assert main(["--out", str(out), "fem", "--case", "limit", "--levels", "2"]) == 0
        assert main(["--out", str(out), "pairing"]) == 0
        assert main(["--out", str(out), "exponents", "--problem", "stokes"]) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert outputs[0] == outputs[1]
