import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import P
from tanhclass import formats
from tanhclass.canonical import canonicalise
from tanhclass.characterisation import exchange_units
from tanhclass.cli import main
from tanhclass.core import Parameter, Shape, random_parameter
from tanhclass.errors import FormatError
from tanhclass.reducibility import rank


def write(tmp_path, name, w):
    path = tmp_path / name
    formats.write_json(formats.parameter_to_dict(w), path)
    return str(path)


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


class TestFormats:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 4), st.data())
    def test_round_trip_bit_exact(self, n, m, h, data):
        shape = Shape(n, m, h)
        vec = np.array(data.draw(st.lists(finite, min_size=shape.size, max_size=shape.size)))
        w = Parameter.from_flat(shape, vec)
        back = formats.parameter_from_dict(json.loads(formats.dumps(formats.parameter_to_dict(w))))
        assert back.flatten().tobytes() == w.flatten().tobytes()

    def test_layout(self):
        d = formats.parameter_to_dict(P([(1, 2, 0.5)], 0.25))
        assert d == {"n": 1, "m": 1, "h": 1, "units": [{"a": [1.0], "b": [2.0], "c": 0.5}], "d": [0.25]}

    @pytest.mark.parametrize(
        "mutate, message",
        [
            (lambda d: d.pop("d"), "missing field 'd'"),
            (lambda d: d.pop("n"), "missing field 'n'"),
            (lambda d: d.update(h=3), "'units'"),
            (lambda d: d["units"][0].pop("c"), "units\\[0\\].c"),
            (lambda d: d["units"][0].update(b=[1, 2]), "units\\[0\\].b"),
            (lambda d: d.update(n=True), "integer"),
            (lambda d: d.update(d=["x"]), "numbers"),
            (lambda d: d.update(h=-1), "h"),
        ],
    )
    def test_bad_parameters(self, mutate, message):
        d = formats.parameter_to_dict(P([(1, 2, 0.5), (0, 0, 0)]))
        mutate(d)
        with pytest.raises(FormatError, match=message):
            formats.parameter_from_dict(d)

    def test_non_finite_rejected(self):
        d = formats.parameter_to_dict(P([(1, 2, 0.5)]))
        d["d"] = [float("inf")]
        with pytest.raises(FormatError, match="finite"):
            formats.parameter_from_dict(d)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(FormatError, match="invalid JSON"):
            formats.load_parameter(path)

    def test_record(self):
        w = P([(1, 2, 0.5), (1, 2, 0.5), (1, -1, 0)])
        data = formats.record_to_dict(canonicalise(w))
        assert data["zeroed"] == [0]
        assert data["signs"] == [1, 1, -1]
        assert data["permutation"] == [1, 2, 0]


class TestCli:
    def test_canon_golden(self, tmp_path, capsys):
        src = write(tmp_path, "w.json", P([(1, -2, 0.5), (3, 1, 0)]))
        assert main(["canon", src]) == 0
        assert capsys.readouterr().out == (
            '{"n": 1, "m": 1, "h": 2, "units": [{"a": [-1.0], "b": [2.0], "c": -0.5}, '
            '{"a": [3.0], "b": [1.0], "c": 0.0}], "d": [0.0]}\n'
        )

    def test_canon_deterministic_and_trace(self, tmp_path):
        src = write(tmp_path, "w.json", random_parameter(Shape(2, 2, 4), 3))
        out1, out2, trace = (tmp_path / f for f in ("o1.json", "o2.json", "t.json"))
        assert main(["canon", src, "-o", str(out1), "--trace", str(trace)]) == 0
        assert main(["canon", src, "-o", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert set(json.loads(trace.read_text())) == {"canonical", "zeroed", "signs", "permutation"}

    def test_canon_missing_field(self, tmp_path, capsys):
        path = tmp_path / "w.json"
        path.write_text('{"n": 1, "m": 1, "h": 0, "units": []}')
        assert main(["canon", str(path)]) == 2
        assert "missing field 'd'" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["rank", str(tmp_path / "nope.json")]) == 2

    def test_equiv(self, tmp_path, capsys):
        w = P([(1, 2, 0.5), (0, 0, 0)])
        a = write(tmp_path, "a.json", w)
        b = write(tmp_path, "b.json", P([(0, 0, 0), (-1, -2, -0.5)]))
        c = write(tmp_path, "c.json", P([(1, 2, 0.6), (0, 0, 0)]))
        short = write(tmp_path, "s.json", P([(1, 2, 0.5)]))
        assert main(["equiv", a, b]) == 0
        assert capsys.readouterr().out == "equivalent\n"
        assert main(["equiv", a, c]) == 1
        assert capsys.readouterr().out == "not equivalent\n"
        assert main(["equiv", a, short]) == 2
        assert main(["equiv", a, short, "--sampled"]) == 0
        assert capsys.readouterr().out == "functionally equal (sampled)\n"

    def test_rank(self, tmp_path, capsys):
        blank = write(tmp_path, "z.json", Parameter.blank(Shape(1, 1, 3)))
        assert main(["rank", blank]) == 0
        assert capsys.readouterr().out == "0\n"
        dup = write(tmp_path, "d.json", P([(1, 2, 0.5), (3, 2, 0.5)]))
        assert main(["rank", dup]) == 0
        assert capsys.readouterr().out == "1\n"

    def test_reduce(self, tmp_path, capsys):
        src = write(tmp_path, "w.json", P([(1, 2, 0.5), (3, 2, 0.5), (0, 0, 0)]))
        out = tmp_path / "r.json"
        assert main(["reduce", src, "-o", str(out)]) == 0
        assert capsys.readouterr().out == "h=3 -> h=1: functionally equal (sampled)\n"
        assert formats.load_parameter(out) == P([(4, 2, 0.5)])

    def test_reduce_to_stdout(self, tmp_path, capsys):
        src = write(tmp_path, "w.json", Parameter.blank(Shape(1, 1, 2)))
        assert main(["reduce", src]) == 0
        captured = capsys.readouterr()
        assert json.loads(captured.out)["h"] == 0
        assert "h=2 -> h=0" in captured.err

    def test_path_and_verify(self, tmp_path, capsys):
        a = write(tmp_path, "a.json", P([(1, 2, 0.5), (0, 0, 0)]))
        b = write(tmp_path, "b.json", P([(0, 0, 0), (-1, -2, -0.5)]))
        out = tmp_path / "p.json"
        assert main(["path", a, b, "--short", "-o", str(out)]) == 0
        segments = int(capsys.readouterr().out.split(":")[1])
        assert segments <= 7
        assert main(["verify-path", str(out)]) == 0
        assert capsys.readouterr().out.startswith("max_deviation: ")

    def test_verify_path_failure(self, tmp_path, capsys):
        w = P([(1, 2, 0.5), (0, 0, 0)])
        data = {
            "reference": formats.parameter_to_dict(w),
            "waypoints": [formats.parameter_to_dict(w), formats.parameter_to_dict(P([(0, 0, 0), (1, 2, 0.5)]))],
        }
        path = tmp_path / "p.json"
        formats.write_json(data, path)
        assert main(["verify-path", str(path)]) == 1
        assert "worst_segment: 0" in capsys.readouterr().out

    def test_path_irreducible(self, tmp_path, capsys):
        w = random_parameter(Shape(1, 1, 2), 0)
        a = write(tmp_path, "a.json", w)
        b = write(tmp_path, "b.json", P([(-w.a[0, 0], -w.b[0, 0], -w.c[0]), (w.a[1, 0], w.b[1, 0], w.c[1])], w.d[0]))
        assert main(["path", a, b]) == 3
        assert "discrete" in capsys.readouterr().err

    def test_path_not_equivalent(self, tmp_path):
        a = write(tmp_path, "a.json", P([(1, 2, 0.5), (0, 0, 0)]))
        b = write(tmp_path, "b.json", P([(1, 2, 0.7), (0, 0, 0)]))
        assert main(["path", a, b]) == 1

    def test_short_path_rank_too_high(self, tmp_path, capsys):
        w = random_parameter(Shape(1, 1, 3), 1)
        w = w.replace_unit(2, a=[0.0])
        a = write(tmp_path, "a.json", w)
        b = write(tmp_path, "b.json", exchange_units(w, 0, 1))
        assert main(["path", a, b, "--short"]) == 3
        assert "h/2" in capsys.readouterr().err

    def test_gen(self, tmp_path):
        out1, out2 = tmp_path / "g1.json", tmp_path / "g2.json"
        args = ["gen", "--n", "2", "--m", "3", "--h", "5", "--rank", "2", "--seed", "4"]
        assert main(args + ["-o", str(out1)]) == 0
        assert main(args + ["-o", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        w = formats.load_parameter(out1)
        assert w.shape == Shape(2, 3, 5)
        assert rank(w) == 2

    def test_gen_bad_rank(self):
        assert main(["gen", "--h", "2", "--rank", "3"]) == 2

    def test_global_options_after_subcommand(self, tmp_path, capsys):
        src = write(tmp_path, "w.json", P([(1, 2, 0.5), (1, 2, 0.5 + 1e-6)]))
        assert main(["rank", src]) == 0
        assert capsys.readouterr().out == "2\n"
        assert main(["rank", src, "--weight-tol", "1e-5"]) == 0
        assert capsys.readouterr().out == "1\n"
        assert main(["--weight-tol", "1e-5", "rank", src]) == 0
        assert capsys.readouterr().out == "1\n"


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    src = write(tmp_path, "w.json", P([(1, 2, 0.5), (3, 2, 0.5)]))
    done = subprocess.run([sys.executable, "-m", "tanhclass", "rank", src], capture_output=True, text=True)
    assert done.returncode == 0 and done.stdout == "1\n"
