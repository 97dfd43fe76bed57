import json
import math

import numpy as np
import pytest

import plapd


@pytest.fixture(scope="module")
def disc():
    return plapd.mesh_disc(1.0, 0.1)


def test_mesh_arrays(disc):
    assert disc.nodes.shape == (disc.num_nodes, 2)
    assert disc.triangles.shape == (disc.num_triangles, 3)
    assert disc.validate() == ""
    # the polygonal disc is inscribed, so its area is slightly below pi
    assert 0.97 * math.pi < disc.area < math.pi
    assert abs(disc.lumped_mass.sum() - disc.area) < 1e-12


def test_torsion_matches_closed_form(disc):
    r = plapd.inner_solve(disc, 2.0, np.ones(disc.num_nodes))
    assert r["converged"]
    radii = np.linalg.norm(disc.nodes, axis=1)
    exact = (1.0 - radii**2) / 4.0
    assert np.max(np.abs(r["values"] - exact)) < 0.05 * exact.max()
    assert plapd.torsion_exact(2.0, 2, 0.0) == pytest.approx(0.25, rel=1e-12)


def test_eigenvalue_against_bessel_zero(disc):
    lam, phi, ok = plapd.first_eigenpair(disc, 2.0)
    j01 = 2.404825557695773
    assert ok
    assert lam == pytest.approx(j01**2, rel=0.03)
    assert phi.min() >= 0.0
    assert plapd.radial_eigen(2.0, 2) == pytest.approx(j01**2, rel=1e-6)


def test_superlinear_solution_and_identities(disc):
    f = plapd.nonlinearity("power:q=3", 2.0, 2)
    assert f(2.0) == pytest.approx(8.0)
    sol = plapd.fixed_point_solve(f, 2.0, disc)
    assert sol["converged"], sol["message"]
    bvp = plapd.radial_solve_bvp(2.0, 2, f)
    assert bvp["found"]
    assert sol["sup_norm"] == pytest.approx(bvp["m"], rel=0.05)
    assert plapd.energy_identity(disc, sol["values"], f, 2.0)["pass"]


def test_classify_log_critical():
    f = plapd.nonlinearity("log-critical:alpha=3", 2.0, 3)
    h = plapd.classify(f, 2.0, 3)
    assert h["h3pp"]["verdict"] == "holds"
    assert h["h3p"]["verdict"] == "fails"


def test_invalid_input_raises():
    with pytest.raises(plapd.Error):
        plapd.nonlinearity("nonsense", 2.0, 2)
    with pytest.raises(plapd.Error):
        plapd.mesh_disc(-1.0, 0.1)


def test_cli_entry_point(tmp_path):
    code, _, _ = plapd.cli(["eigen", "--h", "0.1", "--out-dir", str(tmp_path / "e")])
    assert code == 0
    report = json.loads((tmp_path / "e" / "report.json").read_text())
    assert report["eigenpair"]["converged"]
    code, _, _ = plapd.cli(["solve", "--p", "0.5", "--out-dir", str(tmp_path / "bad")])
    assert code == 2
