import math

import numpy as np
import pytest

from sphelast.assembly import (
    BasisMap,
    _SingleShiftKernel,
    assemble_dimer,
    assemble_single,
    entry_dimer,
    entry_single,
    per_copy_entries,
    per_copy_entry,
)
from sphelast.kelvin import norm_factor, shifted_ball_potential, surface_response
from sphelast.latsum import DimerGeometry, LatticeSumCache, QuasiMomentumSingular
from sphelast.oracle import (
    brute_lattice_entry,
    build_quadrature,
    inner_product_S2,
)
from sphelast.translation import cross_coeff, decay_coeff
from sphelast.vsh import Family, ForbiddenIndexError, vsh_real

RHO = 0.1
GEOM = DimerGeometry(0.2, RHO)


class TestBasisMap:
    def test_first_slot(self):
        basis = BasisMap(2)
        assert basis.index_of(0, 0, Family.V) == 0

    def test_effective_size(self):
        assert BasisMap(1).n_eff == 10
        assert BasisMap(2).n_eff == 25
        for l_max in range(5):
            assert BasisMap(l_max).n_eff == 3 * (l_max + 1) ** 2 - 2

    def test_second_slot(self):
        assert BasisMap(1).index_of(1, -1, Family.V) == 1

    def test_forbidden_labels(self):
        basis = BasisMap(2)
        with pytest.raises(ForbiddenIndexError):
            basis.index_of(0, 0, Family.W)
        with pytest.raises(ForbiddenIndexError):
            basis.index_of(0, 0, Family.X)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            BasisMap(1).index_of(2, 0, Family.V)

    def test_ordering(self):
        basis = BasisMap(1)
        assert basis.labels[:4] == [
            (0, 0, Family.V),
            (1, -1, Family.V),
            (1, -1, Family.W),
            (1, -1, Family.X),
        ]


class TestShiftKernel:
    def test_matches_scalar_coefficients(self):
        # the vectorised per-shift kernel is the same closed forms as the
        # scalar translation coefficients
        ns = np.array([1.0, -2.0, 3.5, -0.4])
        ker = _SingleShiftKernel(ns)
        for i, n in enumerate(ns):
            shift = np.array([-n, 0.0, 0.0])
            assert ker.plain(2, 1, 1, 0)[i] == pytest.approx(
                complex(decay_coeff(2, 1, 1, 0, shift)), abs=1e-15
            )
            assert ker.cross(1, 1, 1, 0, 0, 1, 0)[i] == pytest.approx(
                complex(cross_coeff(1, 1, 1, 0, 0, 1, 0, shift)), abs=1e-15
            )

    def test_rejects_zero_shift(self):
        with pytest.raises(ValueError):
            _SingleShiftKernel([1.0, 0.0])


class TestPerCopy:
    def test_decaying_source_rows_vanish(self, params):
        for lp in range(3):
            for l in range(3):
                assert per_copy_entry(
                    Family.V, lp, 0, Family.V, l, 0, 1, RHO, params
                ) == 0.0
        assert per_copy_entry(Family.X, 1, 0, Family.V, 1, 0, 2, RHO, params) == 0.0

    def test_toroidal_to_decaying_vanishes_numerically(self, params):
        assert abs(
            per_copy_entry(Family.V, 2, 1, Family.X, 1, 1, 1, RHO, params)
        ) <= 1e-10

    def test_against_quadrature(self, params, quad20):
        cases = [
            (Family.W, 1, 0, Family.V, 1, 0),
            (Family.V, 1, 1, Family.W, 2, 0),
            (Family.X, 1, 0, Family.W, 1, -1),
            (Family.W, 1, -1, Family.X, 1, 0),
            (Family.X, 1, -1, Family.X, 1, -1),
            (Family.W, 2, 0, Family.W, 2, 0),
        ]
        for pf, lp, mp, qf, l, m in cases:
            for n in (1, -2):
                proj = inner_product_S2(
                    lambda d: vsh_real(pf, lp, mp, d),
                    lambda d: shifted_ball_potential(n, l, m, qf, d, RHO, params),
                    quad20,
                )
                closed = per_copy_entry(pf, lp, mp, qf, l, m, n, RHO, params)
                assert abs(proj - closed) <= 1e-8

    def test_vectorised_matches_scalar(self, params):
        ns = [1, -1, 2, -3]
        vec = per_copy_entries(
            Family.W, 1, 0, Family.W, 1, 0, [float(n) for n in ns], RHO, params
        )
        for i, n in enumerate(ns):
            assert vec[i] == pytest.approx(
                per_copy_entry(Family.W, 1, 0, Family.W, 1, 0, n, RHO, params),
                abs=1e-15,
            )

    def test_forbidden_labels(self, params):
        with pytest.raises(ForbiddenIndexError):
            per_copy_entry(Family.W, 0, 0, Family.V, 1, 0, 1, RHO, params)


class TestEntrySingle:
    def test_zero_blocks(self, params):
        alpha = 1.2
        assert entry_single(Family.X, 1, 0, Family.V, 1, 0, alpha, RHO, params) == 0
        assert entry_single(Family.V, 1, 0, Family.X, 1, 0, alpha, RHO, params) == 0

    def test_decaying_block_is_pure_diagonal(self, params):
        # no phase dependence anywhere in the (V, V) block
        one = entry_single(Family.V, 1, 0, Family.V, 1, 0, 0.8, RHO, params)
        two = entry_single(Family.V, 1, 0, Family.V, 1, 0, 2.4, RHO, params)
        assert one == two
        tau = surface_response(1, params)[0]
        assert one == pytest.approx(RHO * tau * norm_factor(Family.V, 1))
        assert entry_single(Family.V, 1, 0, Family.V, 2, 0, 0.8, RHO, params) == 0

    def test_diagonal_consistency(self, params):
        # the diagonal entry minus its lattice part is exactly the on-ball
        # surface response times the basis norm
        from sphelast.assembly import _BlochKernel, _combined_value

        alpha = 1.9
        for fam, l, slot in [(Family.W, 1, 1), (Family.X, 2, 2), (Family.V, 1, 0)]:
            full = entry_single(fam, l, 0, fam, l, 0, alpha, RHO, params)
            if fam == Family.V:
                lattice = 0.0
            else:
                lattice = _combined_value(
                    fam, l, 0, fam, l, 0, RHO, params, _BlochKernel(alpha)
                )
            tau = surface_response(l, params)[slot]
            assert full - lattice == pytest.approx(
                RHO * tau * norm_factor(fam, l), abs=1e-16
            )

    @pytest.mark.parametrize(
        "pf,lp,mp,qf,l,m",
        [
            (Family.W, 2, 0, Family.V, 1, 0),
            (Family.V, 1, 1, Family.W, 2, 0),
            (Family.W, 1, 1, Family.W, 1, 1),
            (Family.X, 1, 0, Family.W, 1, -1),
            (Family.W, 1, -1, Family.X, 1, 0),
            (Family.X, 2, 1, Family.X, 2, 1),
        ],
    )
    def test_against_truncated_sums(self, params, pf, lp, mp, qf, l, m):
        alpha = math.pi / 2
        closed = entry_single(pf, lp, mp, qf, l, m, alpha, RHO, params)
        brute = brute_lattice_entry(pf, lp, mp, qf, l, m, alpha, RHO, params, 10000)
        if (pf, lp, mp) == (qf, l, m):
            tau = surface_response(l, params)[int(pf) - 1]
            brute += RHO * tau * norm_factor(pf, l)
        assert abs(closed - brute) <= 1e-5
        assert abs(closed - brute) <= max(1e-7, 3e-4 * abs(closed) + 2e-6)

    def test_singular_phase_propagates(self, params):
        with pytest.raises(QuasiMomentumSingular):
            entry_single(Family.W, 1, 0, Family.W, 1, 0, 0.0, RHO, params)


class TestAssembleSingle:
    def test_shape_and_metadata(self, params):
        mat = assemble_single(1.1, RHO, params, 2)
        assert mat.matrix.shape == (25, 25)
        assert mat.meta["basis_version"]
        assert mat.l_max == 2

    def test_zero_pattern(self, params):
        mat = assemble_single(1.1, RHO, params, 2)
        for i, (lp, mp, pf) in enumerate(mat.basis):
            for j, (l, m, qf) in enumerate(mat.basis):
                if {pf, qf} == {Family.V, Family.X}:
                    assert mat.matrix[i, j] == 0
                if pf == qf == Family.V and (lp, mp) != (l, m):
                    assert mat.matrix[i, j] == 0

    def test_conjugation_symmetry(self, params):
        for alpha in (0.7, 1.9, 3.0):
            a = assemble_single(alpha, RHO, params, 3)
            b = assemble_single(2 * math.pi - alpha, RHO, params, 3)
            assert np.abs(b.matrix - a.matrix.conjugate()).max() <= 1e-12

    def test_thread_fill_matches_serial(self, params):
        serial = assemble_single(1.3, RHO, params, 1, n_threads=1)
        threaded = assemble_single(1.3, RHO, params, 1, n_threads=4)
        assert np.array_equal(serial.matrix, threaded.matrix)

    def test_radius_validation(self, params):
        with pytest.raises(ValueError):
            assemble_single(1.0, 0.6, params, 1)


class TestDimer:
    def test_self_blocks_identical(self, params):
        mat = assemble_dimer(1.3, GEOM, params, 1)
        n = mat.basis.n_eff
        assert np.array_equal(mat.matrix[:n, :n], mat.matrix[n:, n:])
        single = assemble_single(1.3, RHO, params, 1)
        assert np.array_equal(mat.matrix[:n, :n], single.matrix)

    def test_coupling_zero_blocks(self, params):
        for block in ("21", "12"):
            assert entry_dimer(
                block, Family.V, 1, 0, Family.V, 1, 0, 1.3, GEOM, params
            ) == 0
            assert entry_dimer(
                block, Family.V, 1, 0, Family.X, 1, 0, 1.3, GEOM, params
            ) == 0

    @pytest.mark.parametrize("block,shift", [("21", 2 * GEOM.d), ("12", -2 * GEOM.d)])
    def test_coupling_against_shifted_sums(self, params, block, shift):
        alpha = 1.3
        cache = LatticeSumCache(alpha, GEOM)
        for pf, lp, mp, qf, l, m in [
            (Family.W, 1, 0, Family.V, 1, 0),
            (Family.W, 1, 0, Family.W, 1, 0),
            (Family.X, 1, 1, Family.X, 1, 1),
        ]:
            closed = entry_dimer(
                block, pf, lp, mp, qf, l, m, alpha, GEOM, params, cache
            )
            brute = brute_lattice_entry(
                pf, lp, mp, qf, l, m, alpha, RHO, params, 10000,
                shift=shift, include_zero=True,
            )
            assert abs(closed - brute) <= max(1e-7, 3e-4 * abs(closed) + 2e-6)

    def test_block_layout(self, params):
        # coupling block "st" sits at block row t, block column s
        mat = assemble_dimer(1.3, GEOM, params, 1)
        n = mat.basis.n_eff
        i = mat.basis.index_of(1, 0, Family.W)
        j = mat.basis.index_of(1, 0, Family.V)
        expect21 = entry_dimer(
            "21", Family.W, 1, 0, Family.V, 1, 0, 1.3, GEOM, params
        )
        expect12 = entry_dimer(
            "12", Family.W, 1, 0, Family.V, 1, 0, 1.3, GEOM, params
        )
        assert mat.matrix[i, n + j] == expect21
        assert mat.matrix[n + i, j] == expect12
        assert expect21 != expect12


def test_brute_zero_cut(params):
    assert brute_lattice_entry(
        Family.W, 1, 0, Family.W, 1, 0, 1.0, RHO, params, 0
    ) == 0


def test_per_copy_higher_degree_against_quadrature(params):
    # one mid-degree case beyond the acceptance range, at a quadrature
    # degree that resolves the degree-5 row exactly
    quad = build_quadrature(24)
    pf, lp, mp, qf, l, m = Family.W, 5, 2, Family.W, 4, 1
    proj = inner_product_S2(
        lambda d: vsh_real(pf, lp, mp, d),
        lambda d: shifted_ball_potential(1, l, m, qf, d, RHO, params),
        quad,
    )
    closed = per_copy_entry(pf, lp, mp, qf, l, m, 1, RHO, params)
    assert abs(proj - closed) <= 1e-12
