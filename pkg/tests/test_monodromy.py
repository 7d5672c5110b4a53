"""Numerical monodromy continuation against the closed-form data."""

import numpy as np
import pytest

from elliptau.isomono import build_phi, coefficients, normalize_Y
from elliptau.monodromy import (
    base_point,
    calibrate_loops,
    continue_solution,
    sector_connection_residuals,
    stokes_ray_directions,
    trivial_loop_identity,
)


@pytest.fixture(scope="module")
def mono(golden_ctx):
    nums, offsets = golden_ctx.numerical_monodromy
    return golden_ctx, nums, offsets


def test_monodromy_matches_closed_forms(mono):
    ctx, nums, _ = mono
    md = ctx.theory
    for which in (1, 2, 3, "inf"):
        assert np.max(np.abs(nums[which] - md.M[which])) < 1e-6


def test_cyclic_relation(mono):
    _, nums, _ = mono
    prod = nums[3] @ nums[2] @ nums[1] @ nums["inf"]
    assert np.max(np.abs(prod - np.eye(2))) < 1e-6


def test_loop_frame_offsets_recorded(mono):
    _, _, offsets = mono
    assert set(offsets) == {1, 2, 3, "inf"}
    for v in offsets.values():
        assert isinstance(v, tuple) and len(v) == 2


def test_trivial_loop_gives_identity(mono):
    ctx, _, _ = mono
    assert trivial_loop_identity(ctx.params, ctx.coeffs) < 1e-9


def test_monodromy_eigenvalues_quarter_exponents(mono):
    # each loop matrix is similar to diag(e^{-pi i/2}, e^{pi i/2})
    _, nums, _ = mono
    for which in (1, 2, 3, "inf"):
        ev = sorted(np.linalg.eigvals(nums[which]), key=lambda z: z.imag)
        assert abs(ev[0] + 1j) < 1e-6
        assert abs(ev[1] - 1j) < 1e-6


def test_stokes_rays_and_triviality(mono):
    ctx, _, _ = mono
    th1, th2 = stokes_ray_directions(ctx.params)
    assert abs(abs(th2 - th1) - np.pi) < 1e-12
    res = sector_connection_residuals(ctx.params, ctx.sol, ctx.coeffs)
    assert len(res) == 2
    assert max(res) < 1e-6


def test_monodromy_invariant_under_deformation(golden_ctx):
    # one representative direction here; the full four-direction drift is a
    # scenario check and part of the acceptance gate
    ctx = golden_ctx
    nums, _ = ctx.numerical_monodromy
    s = ctx.scenario
    p2 = ctx.params_at(t=s.t + 1e-3)
    phi2 = build_phi(p2)
    sol2 = normalize_Y(p2, phi2)
    co2 = coefficients(p2, phi=phi2, sol=sol2)
    Y02 = sol2.y_at(base_point(p2.branch))
    loops2, _ = calibrate_loops(p2)
    for which in (1, "inf"):
        W = continue_solution(co2, loops2[which], Y02)
        M = np.linalg.inv(Y02) @ W
        assert np.max(np.abs(M - nums[which])) < 1e-6


def test_base_point_above_all_singularities(golden_branch):
    x0 = base_point(golden_branch)
    assert x0.imag >= 2.0 * max(abs(e.imag) for e in golden_branch.es) + 1.0
