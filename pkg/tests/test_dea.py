import numpy as np
import pytest
import scipy.sparse as sp

from cavityflux import dea
from cavityflux.dea import (DeaError, PhaseSpaceBasis, adjoint, assemble,
                            port_flux, solve, source_vector,
                            spatial_map, spectral_radius_estimate)
from cavityflux.geometry import build_scene, discretize
from cavityflux.presets import build_preset
from cavityflux.raytrace import Source

from conftest import empty_square_config
from oracles import fine_fan_point_deposit


def _basis(scene, elem=0.1, n_dir=16):
    return PhaseSpaceBasis(discretize(scene, elem), n_dir=n_dir)


@pytest.fixture(scope="module")
def fig2_op():
    scene = build_preset("fig2")
    basis = _basis(scene, elem=0.05, n_dir=16)
    return scene, basis, assemble(scene, basis)


def test_basis_invariants(fig2):
    basis = _basis(fig2)
    assert basis.n_cells == basis.discretization.n_elements * 16
    assert basis.bin_width == pytest.approx(2.0 / 16)
    # extreme direction coordinates stay inside the outermost bins
    cells = basis.cell_of([0, 0, 0], [-1.0, 0.0, 1.0])
    assert cells[0] == 0 and cells[2] == 15
    with pytest.raises(ValueError, match="n_dir"):
        PhaseSpaceBasis(basis.discretization, n_dir=0)


def test_closed_lossless_columns_are_stochastic():
    scene = build_scene(empty_square_config())
    basis = _basis(scene, elem=0.25, n_dir=8)
    op = assemble(scene, basis)
    sums = np.asarray(op.scale(0.0).sum(axis=0)).ravel()
    assert np.allclose(sums, 1.0, atol=1e-12)


def test_full_absorption_kills_transport():
    scene = build_scene(empty_square_config(alpha=1.0))
    basis = _basis(scene, elem=0.25, n_dir=8)
    op = assemble(scene, basis)
    L = op.scale(1.0)
    assert L.nnz == 0 or np.abs(L.toarray()).max() == 0.0
    rho0 = np.zeros(basis.n_cells)
    rho0[3] = 0.7
    assert np.array_equal(solve(L, rho0), rho0)


def test_port_columns_are_zero(fig2_op):
    scene, basis, op = fig2_op
    L = op.scale(0.3)
    open_cells = np.concatenate([basis.opening_cells("P1"),
                                 basis.opening_cells("PA")])
    cols = np.asarray(np.abs(L[:, open_cells]).sum(axis=0)).ravel()
    assert np.all(cols == 0.0)


def test_column_sums_bounded(fig2_op):
    _, _, op = fig2_op
    for alpha in (0.0, 0.3):
        sums = np.asarray(op.scale(alpha).sum(axis=0)).ravel()
        assert sums.max() <= 1.0 + 1e-12
        assert sums.min() >= 0.0


def test_spectral_radius_below_one(fig1a):
    basis = _basis(fig1a, elem=0.1, n_dir=16)
    op = assemble(fig1a, basis)
    assert spectral_radius_estimate(op.scale(0.0)) < 1.0


def test_scale_rejects_bad_alpha(fig2_op):
    _, _, op = fig2_op
    with pytest.raises(ValueError, match="alpha"):
        op.scale(1.5)


def test_source_vector_point_lossless():
    scene = build_scene(empty_square_config())
    basis = _basis(scene, elem=0.25, n_dir=8)
    rho0 = source_vector(scene, basis, Source.point_isotropic(0.5, 0.5))
    assert rho0.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(rho0 >= 0.0)
    # centered source in a square: each wall receives a quarter by symmetry
    per_entity = [rho0.reshape(-1, 8)[basis.discretization.entity == e].sum()
                  for e in range(4)]
    assert per_entity == pytest.approx([0.25] * 4, abs=1e-12)


def test_source_vector_absorbing_scene():
    scene = build_scene(empty_square_config(alpha=1.0))
    basis = _basis(scene, elem=0.25, n_dir=8)
    rho0 = source_vector(scene, basis, Source.point_isotropic(0.5, 0.5))
    # every arrival cell reflects, so full annihilation
    assert rho0.sum() == 0.0


def test_source_vector_port_fan(fig2):
    basis = _basis(fig2, elem=0.05, n_dir=16)
    rho0 = source_vector(fig2, basis, Source.port_normal("P1"))
    assert rho0.sum() == pytest.approx(1.0, abs=1e-12)
    # a normal fan from the top port deposits nothing back onto open elements
    assert port_flux(basis, rho0, "P1") == 0.0


def test_source_vector_matches_fine_fan_oracle(fig2):
    basis = _basis(fig2, elem=0.05, n_dir=16)
    src = Source.point_isotropic(0.5, 0.4)
    n = 20000
    ref = fine_fan_point_deposit(fig2, basis, (0.5, 0.4), n)
    got = source_vector(fig2, basis, src, n_rays=n)
    occupied = ref > 1e-4
    assert np.allclose(got[occupied], ref[occupied], rtol=0.01)
    # and the default fan resolution is already converged on occupied cells
    coarse = source_vector(fig2, basis, src)
    assert np.allclose(coarse[occupied], ref[occupied], rtol=0.02, atol=2e-4)


def test_solve_matches_truncated_neumann(fig2_op):
    scene, basis, op = fig2_op
    L = op.scale(0.5)
    rho0 = source_vector(build_preset("fig2", alpha=0.5), basis,
                         Source.port_normal("P1"))
    rho = solve(L, rho0)
    K = 20
    partial = rho0.copy()
    term = rho0.copy()
    for _ in range(K):
        term = L @ term
        partial += term
    # ||L||_1 can equal 1 exactly (cells whose whole emission lands on
    # absorbing port cells), but port columns are zero, so every two-flight
    # path crosses a reflecting row and ||L^2||_1 <= 1 - alpha < 1.  Tail:
    # sum_{m>K} L^m rho0 = (sum_m L^m) L^{K+1} rho0, and the series factor
    # has 1-norm at most (1 + ||L||_1) / (1 - ||L^2||_1).
    term = L @ term  # term_{K+1}
    norm1 = float(np.asarray(np.abs(L).sum(axis=0)).max())
    norm2 = float(np.asarray(np.abs(L @ L).sum(axis=0)).max())
    assert norm2 < 1.0
    bound = (1.0 + norm1) / (1.0 - norm2) * np.abs(term).sum()
    assert bound > 1e-9  # the truncation bound, not roundoff, decides the test
    assert np.abs(rho - partial).sum() <= bound + 1e-9
    assert np.all(rho >= -1e-9)


def test_iterative_solver_agrees_with_dense(fig2_op):
    scene, basis, op = fig2_op
    L = op.scale(0.2)
    rho0 = source_vector(build_preset("fig2", alpha=0.2), basis,
                         Source.port_normal("P1"))
    dense = solve(L, rho0)
    # force the Neumann path by temporarily lowering the dense cutoff
    old = dea._DENSE_SOLVE_MAX
    try:
        dea._DENSE_SOLVE_MAX = 0
        iterative = solve(L, rho0)
    finally:
        dea._DENSE_SOLVE_MAX = old
    assert np.allclose(iterative, dense, atol=1e-9)


def test_solve_diagnoses_closed_lossless_scene():
    scene = build_scene(empty_square_config())
    basis = _basis(scene, elem=0.25, n_dir=8)
    L = assemble(scene, basis).scale(0.0)
    rho0 = source_vector(scene, basis, Source.point_isotropic(0.5, 0.5))
    old = dea._DENSE_SOLVE_MAX
    try:
        dea._DENSE_SOLVE_MAX = 0
        with pytest.raises(DeaError, match="spectral radius"):
            solve(L, rho0)
    finally:
        dea._DENSE_SOLVE_MAX = old


def test_lossless_conservation_single_cavity(fig2_op):
    scene, basis, op = fig2_op
    L = op.scale(0.0)
    rho = solve(L, source_vector(scene, basis, Source.port_normal("P1")))
    total = port_flux(basis, rho, "P1") + port_flux(basis, rho, "PA")
    assert total == pytest.approx(1.0, abs=1e-6)


def test_lossless_conservation_two_cavity(fig1a):
    basis = _basis(fig1a, elem=0.1, n_dir=16)
    L = assemble(fig1a, basis).scale(0.0)
    rho = solve(L, source_vector(fig1a, basis, Source.port_normal("P1")))
    total = port_flux(basis, rho, "P1") + port_flux(basis, rho, "P2")
    assert total == pytest.approx(1.0, abs=1e-6)
    # the cross-over share is well away from zero and below the source side
    assert 0.1 < port_flux(basis, rho, "P2") < port_flux(basis, rho, "P1")


def test_port_flux_unknown_opening(fig2_op):
    _, basis, _ = fig2_op
    with pytest.raises(Exception):
        port_flux(basis, np.zeros(basis.n_cells), "nope")


def test_multi_rhs_solve_matches_single(fig2_op):
    scene, basis, op = fig2_op
    L = op.scale(0.1)
    s_alpha = build_preset("fig2", alpha=0.1)
    sources = [Source.port_normal("P1"), Source.point_isotropic(0.5, 0.4)]
    stack = np.stack([source_vector(s_alpha, basis, s) for s in sources], axis=1)
    rhos = solve(L, stack)
    for k, s in enumerate(sources):
        single = solve(L, source_vector(s_alpha, basis, s))
        assert np.allclose(rhos[:, k], single, atol=1e-12)


def test_adjoint_identity_trivial(fig2_op):
    _, basis, _ = fig2_op
    L = sp.csr_matrix((basis.n_cells, basis.n_cells))
    chi = basis.indicator("P1")
    assert np.array_equal(adjoint(L, chi), chi)


@pytest.mark.parametrize("alpha", [0.0, 0.5])
def test_adjoint_duality(fig2_op, alpha):
    scene, basis, op = fig2_op
    L = op.scale(alpha)
    s_alpha = build_preset("fig2", alpha=alpha)
    sources = [Source.port_normal("P1"), Source.point_isotropic(0.5, 0.4),
               Source.point_isotropic(0.9, 0.9)]
    for port in ("P1", "PA"):
        chi = basis.indicator(port)
        mu = adjoint(L, chi)
        assert np.all(mu >= -1e-9)
        assert mu.max() <= 1.0 + 1e-9
        for s in sources:
            rho0 = source_vector(s_alpha, basis, s)
            rho = solve(L, rho0)
            direct = float(rho @ chi)
            via_adjoint = float(rho0 @ mu)
            assert via_adjoint == pytest.approx(direct, rel=1e-9, abs=1e-12)


def test_spatial_map_nonnegative(fig2_op):
    scene, basis, op = fig2_op
    rho = solve(op.scale(0.0), source_vector(scene, basis, Source.port_normal("P1")))
    grid = spatial_map(scene, basis, rho, resolution=20,
                       source=Source.port_normal("P1"))
    assert np.all(grid.values >= 0.0)
    assert float(grid.values.sum()) > 0.0
    # lossless equilibrium flux reaches essentially the whole cavity
    interior = grid.values[2:-2, 2:-2]
    assert np.count_nonzero(interior) > 0.9 * interior.size
