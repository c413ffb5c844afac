"""Figure renderers: determinism and schema errors on the committed samples."""

import os
import sys

import numpy as np
import pytest

HERE = os.path.dirname(__file__)
PLOTS = os.path.dirname(HERE)
SAMPLES = os.path.join(PLOTS, "samples")
sys.path.insert(0, PLOTS)

import render_enaqt
import render_et
import render_gate
import render_powerlaw
import render_pyrazine
import render_stability
import render_trajectory
import render_vaet
from figkit import SchemaError, load_table


def sample(name):
    return os.path.join(SAMPLES, name)


RECIPES = [
    ("stability", lambda out: render_stability.render(sample("stability.csv"), out)),
    ("trajectory", lambda out: render_trajectory.render(sample("trajectory.csv"), out)),
    ("gate", lambda out: render_gate.render(sample("gate.csv"), out)),
    (
        "powerlaw",
        lambda out: render_powerlaw.render([sample("jij_p08.csv"), sample("jij_p12.csv")], out),
    ),
    (
        "enaqt",
        lambda out: render_enaqt.render(
            [sample("enaqt_g0.csv"), sample("enaqt_g2.csv"), sample("enaqt_g20.csv")], out
        ),
    ),
    (
        "et",
        lambda out: render_et.render(
            [sample("et_nonadiabatic.csv"), sample("et_adiabatic.csv")], out
        ),
    ),
    (
        "pyrazine",
        lambda out: render_pyrazine.render(
            [sample("pyrazine_g0.csv"), sample("pyrazine_g04.csv")], out
        ),
    ),
    (
        "vaet",
        lambda out: render_vaet.render(
            [sample("vaet_g0.csv"), sample("vaet_g3.csv"),
             sample("vaet_g3.csv.spectral_density.csv")], out
        ),
    ),
]


@pytest.mark.parametrize("name,recipe", RECIPES, ids=[r[0] for r in RECIPES])
def test_renders_deterministically(name, recipe, tmp_path):
    out1 = str(tmp_path / f"{name}_1.png")
    out2 = str(tmp_path / f"{name}_2.png")
    recipe(out1)
    recipe(out2)
    assert os.path.getsize(out1) > 2000
    with open(out1, "rb") as f1, open(out2, "rb") as f2:
        assert f1.read() == f2.read()


@pytest.mark.parametrize("name,recipe", RECIPES, ids=[r[0] for r in RECIPES])
def test_inputs_not_mutated(name, recipe, tmp_path):
    paths = [os.path.join(SAMPLES, f) for f in os.listdir(SAMPLES) if f.endswith(".csv")]
    before = {p: open(p, "rb").read() for p in paths}
    recipe(str(tmp_path / "out.png"))
    for p, content in before.items():
        with open(p, "rb") as fh:
            assert fh.read() == content


class TestSchemaErrors:
    def test_missing_column_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        with pytest.raises(SchemaError) as err:
            render_gate.render(str(bad), str(tmp_path / "o.png"))
        msg = str(err.value)
        for col in ("t", "P_dd", "P_ud_du", "P_uu"):
            assert col in msg

    def test_stability_schema(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,q\n0,0\n")
        with pytest.raises(SchemaError) as err:
            render_stability.render(str(bad), str(tmp_path / "o.png"))
        assert "stable" in str(err.value)

    def test_loader_reads_values(self):
        data = load_table(sample("trajectory.csv"), ["xi", "x", "v"])
        assert len(data["xi"]) > 100
        assert np.isfinite(data["x"]).all()


class TestFooterProvenance:
    def test_manifest_footer_present(self):
        from figkit import manifest_footer

        footer = manifest_footer(sample("gate.csv"))
        assert "gate" in footer
