import numpy as np
import pytest

from imkdv.solver import (
    StepFailure,
    content_hash,
    default_dt,
    evolve,
    export_trajectory,
    invariants,
    rescale,
    soliton,
    step_mkdv,
    step_system,
)
from imkdv.spectral import (
    Field,
    FieldPair,
    derivative,
    field_from_function,
    inverse_transform,
    l2_norm,
    load_field,
    make_grid,
)


def test_soliton_validation():
    grid = make_grid(40.0, 256)
    with pytest.raises(ValueError):
        soliton(-1.0, 20.0, grid)
    # c = 0.01 has tail sech(0.1 * 20) ~ 0.27 on this torus
    with pytest.raises(ValueError):
        soliton(0.01, 20.0, grid)


def test_soliton_profile_residual():
    # sqrt(2c) sech(sqrt(c)(x - x0)) solves the once-integrated profile
    # equation u'' - c u + u^3 = 0 (the x-derivative of which is the
    # traveling-wave mkdv equation); the integrated form avoids amplifying
    # the spectral roundoff floor by xi^3
    grid = make_grid(40.0, 512)
    c = 1.0
    u = soliton(c, 20.0, grid)
    us = inverse_transform(u)
    res = inverse_transform(derivative(u, 2)) - c * us + us**3
    assert np.abs(res).max() < 5e-7


def test_soliton_transport():
    grid = make_grid(40.0, 256)
    c, x0, t_end = 1.0, 20.0, 1.0
    traj = evolve(soliton(c, x0, grid), t_end, 1e-3, snapshot_every=1000)
    exact = soliton(c, x0 + c * t_end, grid)
    err = l2_norm(Field(grid, traj.states[-1].coeffs - exact.coeffs))
    assert err < 1e-6


def test_temporal_convergence_is_fourth_order():
    grid = make_grid(2 * np.pi, 32)
    u0 = field_from_function(grid, lambda x: np.cos(x) + 0.5 * np.sin(2 * x))
    t_end = 0.1
    ref = evolve(u0, t_end, t_end / 512, snapshot_every=10**9).states[-1]
    errs = []
    for n in (8, 16):
        approx = evolve(u0, t_end, t_end / n, snapshot_every=10**9).states[-1]
        errs.append(l2_norm(Field(grid, approx.coeffs - ref.coeffs)))
    order = np.log2(errs[0] / errs[1])
    assert order == pytest.approx(4.0, abs=0.3)


def test_mass_and_energy_conservation():
    grid = make_grid(2 * np.pi, 64)
    u0 = field_from_function(grid, lambda x: 0.5 * np.cos(x) + 0.2 * np.sin(3 * x))
    traj = evolve(u0, 0.5, 1e-3, snapshot_every=100)
    rep = invariants(traj, 0.25)
    mass = np.asarray(rep.mass)
    en = np.asarray(rep.energy)
    assert np.abs(mass - mass[0]).max() < 1e-9 * max(1.0, abs(mass[0]))
    assert np.abs(en - en[0]).max() < 1e-8 * max(1.0, abs(en[0]))


def test_system_reductions():
    grid = make_grid(2 * np.pi, 32)
    u0 = field_from_function(grid, lambda x: 0.4 * np.cos(x) + 0.3 * np.sin(2 * x))
    single = step_mkdv(u0, 1e-3)
    same = step_system(FieldPair(u0, u0), 1e-3)
    assert np.allclose(same.u.coeffs, single.coeffs, atol=1e-14)
    assert np.allclose(same.v.coeffs, single.coeffs, atol=1e-14)
    # (phi, -phi) stays antisymmetric and each component solves mkdv
    anti = step_system(FieldPair(u0, Field(grid, -u0.coeffs)), 1e-3)
    assert np.allclose(anti.v.coeffs, -anti.u.coeffs, atol=1e-14)
    assert np.allclose(anti.u.coeffs, single.coeffs, atol=1e-14)


def test_system_invariants_i1_i2():
    grid = make_grid(2 * np.pi, 64)
    u0 = field_from_function(grid, lambda x: 0.5 * np.cos(x))
    v0 = field_from_function(grid, lambda x: 0.3 * np.sin(2 * x) - 0.2 * np.cos(x))
    traj = evolve(FieldPair(u0, v0), 0.2, 1e-3, snapshot_every=50)
    rep = invariants(traj, 0.25)
    i1 = np.asarray(rep.i1)
    i2 = np.asarray(rep.i2)
    assert np.abs(i1 - i1[0]).max() < 1e-8 * max(1.0, abs(i1[0]))
    assert np.abs(i2 - i2[0]).max() < 1e-8 * max(1.0, abs(i2[0]))
    csv = rep.to_csv()
    assert csv.splitlines()[0] == "t,mass,energy,i1,i2"
    assert len(csv.splitlines()) == len(rep.times) + 1


def test_step_failure_and_validation():
    grid = make_grid(2 * np.pi, 32)
    huge = Field(grid, np.full(grid.K, 1e13, dtype=np.complex128))
    with pytest.raises(StepFailure):
        step_mkdv(huge, 1e-3)
    ok = field_from_function(grid, np.cos)
    with pytest.raises(ValueError):
        step_mkdv(ok, -1e-3)
    with pytest.raises(ValueError):
        step_system(FieldPair(ok, ok), 0.0)


def test_evolve_time_grid_checks():
    grid = make_grid(2 * np.pi, 32)
    u0 = field_from_function(grid, np.cos)
    with pytest.raises(ValueError):
        evolve(u0, 1.0, 0.3)  # dt does not divide t_end
    with pytest.raises(ValueError):
        evolve(u0, -1.0, 0.1)
    trivial = evolve(u0, 0.0, 0.1)
    assert trivial.times == [0.0]
    traj = evolve(u0, 0.01, 1e-3, snapshot_every=4)
    assert traj.times[-1] == pytest.approx(0.01)
    assert len(traj.states) == len(traj.times)


def test_rescale_l2_law_and_flow_commutation():
    grid = make_grid(2 * np.pi, 32)
    u0 = field_from_function(grid, lambda x: 0.5 * np.cos(x) + 0.25 * np.sin(2 * x))
    lam = 4.0
    with pytest.raises(ValueError):
        rescale(u0, 0.5)
    scaled = rescale(u0, lam)
    assert scaled.grid.L == pytest.approx(lam * grid.L)
    # ||u_lam||_{L2}^2 = lam^{-1} ||u||_{L2}^2
    assert l2_norm(scaled) ** 2 == pytest.approx(l2_norm(u0) ** 2 / lam, rel=1e-12)
    # scaling commutes with the flow: S_lam u(t) = (S_lam u)(lam^3 t)
    dt, nsteps = 1e-3, 20
    coarse = evolve(u0, nsteps * dt, dt, snapshot_every=10**9).states[-1]
    path_a = rescale(coarse, lam)
    path_b = evolve(
        scaled, nsteps * dt * lam**3, dt * lam**3, snapshot_every=10**9
    ).states[-1]
    diff = l2_norm(Field(path_a.grid, path_a.coeffs - path_b.coeffs))
    assert diff < 1e-8


def test_content_hash_and_export(tmp_path):
    grid = make_grid(2 * np.pi, 32)
    u0 = field_from_function(grid, np.cos)
    assert content_hash(u0) == content_hash(Field(grid, u0.coeffs.copy()))
    assert content_hash(u0) != content_hash(Field(grid, 2 * u0.coeffs))
    traj = evolve(u0, 0.01, 1e-3, snapshot_every=5)
    export_trajectory(traj, tmp_path, "mkdv", {"alpha": 0.25})
    assert (tmp_path / "manifest.json").exists()
    back = load_field((tmp_path / "snapshot_0000.txt").read_text())
    assert np.array_equal(back.coeffs, u0.coeffs)
    pair = FieldPair(u0, Field(grid, -u0.coeffs))
    export_trajectory(evolve(pair, 0.0, 1e-3), tmp_path / "sys", "system", {})
    assert (tmp_path / "sys" / "snapshot_0000_v.txt").exists()


def test_default_dt():
    grid = make_grid(2 * np.pi, 32)
    assert default_dt(Field(grid, np.zeros(grid.K, dtype=np.complex128))) == 1e-3
    small = default_dt(field_from_function(grid, lambda x: 10 * np.cos(x)))
    assert 0 < small < 1e-3
