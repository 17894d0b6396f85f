"""Smoke tests for the Python surface: geometry, solves, equilibria, and the
config-driven runner, plus byte parity with the command-line tool."""

import json
import os
import subprocess

import pytest

import channelfsi as cf

CH = cf.Channel(Lrect=1.5, H=1.0)
DISK = cf.BodyShape.ellipse(0.25, 0.25)


def coarse_mesh():
    mo = cf.MeshOptions()
    mo.size = 0.2
    mo.body_refine = 2.0
    return mo


def couette(lam, h):
    return cf.FlowProblem(
        channel=CH,
        shape=DISK,
        placement=cf.Placement(h=h),
        profile=cf.InflowProfile.couette(1.0, CH.H),
        lam=lam,
    )


def model():
    return cf.RestoringForce(channel=CH, shape=DISK)


def test_geometry_and_profiles():
    assert DISK.is_ellipse and DISK.mirror_symmetric
    assert DISK.area == pytest.approx(3.141592653589793 * 0.25 * 0.25)

    ext = cf.body_extents(DISK, 0.0)
    assert ext.delta_b == pytest.approx(0.25)
    g = cf.gaps(CH, ext, 0.2)
    assert g.eps_b == pytest.approx(0.95)
    assert g.eps_t == pytest.approx(0.55)
    assert cf.is_admissible(CH, DISK, cf.Placement(h=0.2), 0.1)
    assert not cf.is_admissible(CH, DISK, cf.Placement(h=0.72), 0.1)

    prof = cf.InflowProfile.couette(1.0, CH.H)
    assert prof.V_in(-CH.H) == pytest.approx(0.0)
    assert prof.V_in(CH.H) == pytest.approx(1.0)
    assert prof.flux == pytest.approx(1.0)
    assert not prof.symmetric
    assert cf.InflowProfile.uniform(1.0, CH.H).symmetric

    # matching conditions are validated immediately
    with pytest.raises(cf.ProfileError):
        cf.InflowProfile.polynomial([0.0, 0.5], U=1.0, H=CH.H)

    hexagon = cf.BodyShape.rounded_polygon(
        [(0.3, 0.0), (0.15, 0.26), (-0.15, 0.26), (-0.3, 0.0), (-0.15, -0.26), (0.15, -0.26)]
    )
    assert hexagon.mirror_symmetric and not hexagon.is_ellipse


def test_zero_wind_flow_is_exactly_at_rest():
    s = cf.solve(couette(0.0, 0.1), coarse_mesh())
    assert s.converged
    assert s.u_h1 <= 1e-11
    assert s.lift_boundary == 0.0
    assert s.lift_volume == 0.0
    assert s.triangles > 0 and s.velocity_unknowns > 0


def test_solve_reports_both_lift_evaluations():
    s = cf.solve(couette(0.5, 0.3), coarse_mesh())
    assert s.converged
    assert s.final_residual <= 1e-10
    assert s.discrepancy == pytest.approx(abs(s.lift_boundary - s.lift_volume))
    assert abs(s.lift_volume) > 1e-4  # real signal at this wind and offset
    assert s.discrepancy <= 0.25 * abs(s.lift_volume)  # loose: coarse mesh


def test_restoring_force_family():
    m = model()
    assert cf.restoring_force(m, 0.0) == 0.0
    # slope at least gamma
    assert (cf.restoring_force(m, 0.2) - cf.restoring_force(m, 0.1)) / 0.1 >= m.gamma
    # zero tilt reduces to the plain family
    assert cf.restoring_force_theta(m, 0.1, 0.0) == cf.restoring_force(m, 0.1)


def test_equilibrium_without_wind_sits_on_the_axis():
    opts = cf.FsiOptions()
    opts.mesh = coarse_mesh()
    eq = cf.find_equilibrium(couette(0.0, 0.0), model(), opts)
    assert abs(eq.h_star) <= 1e-4 * CH.H
    assert eq.lift_at_root == 0.0
    assert eq.phi_at_root == cf.restoring_force(model(), eq.h_star)
    assert all(d.from_shortcut for d in eq.solves)
    assert eq.bracket_a <= eq.h_star <= eq.bracket_b

    # an all-positive bracket is reported, not silently accepted
    with pytest.raises(cf.NoSignChange):
        cf.find_equilibrium(couette(0.0, 0.0), model(), 0.1, 0.3, opts)


def test_global_force_composition():
    opts = cf.FsiOptions()
    opts.mesh = coarse_mesh()
    gf = cf.global_force(couette(0.3, 0.0), model(), 0.2, opts)
    assert gf.phi == gf.f_restoring - gf.lift
    assert gf.f_restoring == cf.restoring_force(model(), 0.2)
    assert not gf.diag.from_shortcut


MESH_DUMP_CONFIG = {
    "channel": {"H": 1.0, "Lrect": 1.5},
    "body": {"shape": {"kind": "ellipse", "a": 0.25, "b": 0.25}, "h": 0.2},
    "solver": {"size": 0.2, "body_refine": 2.0},
    "experiment": {"kind": "mesh-dump"},
}


def test_config_parsing_and_scenario_run(tmp_path):
    assert "experiment" in cf.config_schema()

    with pytest.raises(cf.ConfigError):
        cf.parse_config('{"nope": 1}')

    cfg = cf.parse_config(json.dumps(MESH_DUMP_CONFIG))
    assert cfg.kind == "mesh-dump"
    cfg.out_dir = str(tmp_path / "out")
    res = cf.run_scenario(cfg)
    assert res.all_pass
    assert not res.failures
    names = [a.name for a in res.artifacts]
    assert "mesh.txt" in names and "mesh.cert" in names
    # recorded digests match the files on disk
    for a in res.artifacts:
        assert cf.sha256_file_hex(os.path.join(res.out_dir, a.name)) == a.sha256
    assert os.path.exists(os.path.join(res.out_dir, "manifest.txt"))


def test_cli_writes_byte_identical_artifacts(tmp_path):
    cli = os.environ.get("CFSI_CLI")
    if not cli:
        pytest.skip("CFSI_CLI not set")

    cfg_file = tmp_path / "mesh.json"
    cfg_file.write_text(json.dumps(MESH_DUMP_CONFIG))

    cfg = cf.parse_config(json.dumps(MESH_DUMP_CONFIG))
    cfg.out_dir = str(tmp_path / "lib")
    res = cf.run_scenario(cfg)

    cli_out = tmp_path / "cli"
    proc = subprocess.run(
        [cli, "run", str(cfg_file), "--out", str(cli_out)],
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "result: PASS" in proc.stdout

    for a in res.artifacts:
        assert cf.sha256_file_hex(str(cli_out / a.name)) == a.sha256
    assert cf.sha256_file_hex(str(cli_out / "manifest.txt")) == cf.sha256_file_hex(
        os.path.join(res.out_dir, "manifest.txt")
    )
