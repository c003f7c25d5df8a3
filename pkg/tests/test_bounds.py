import math
from fractions import Fraction

import numpy as np
import pytest

from spinbound import (
    BoundSpec,
    LatticeSpec,
    baerwinkel_bound,
    build_lattice,
    closed_form_constant,
    compare_bounds,
    coupling_matrix,
    diameter_constant,
    from_edge_list,
    gauge_weak_homogeneity,
    generic_constant,
    joint_spectrum,
    lattice_coupling_eigenvalues,
    open_constant,
    open_leading_term,
    periodic_constant,
    periodic_leading_term,
    three_qubit_eigenvalues,
    three_qubit_psd,
    certify_inequality,
)
from conftest import chain, ring
from oracles import singlet_projector_full

GRID = [1.1, 1.5, 2.0, 3.0, 5.0]


def three_qubit_operator_spectrum(a, b):
    op = (a * singlet_projector_full(3, 0, 1)
          + b * singlet_projector_full(3, 1, 2)
          - singlet_projector_full(3, 0, 2))
    return np.linalg.eigvalsh(op)


class TestThreeQubitFormula:
    @pytest.mark.parametrize("a,b,expected,psd", [
        (2.0, 2.0, (3.0, 0.0), True),       # boundary: ab = a + b
        (3.0, 1.5, (3.5, 0.0), True),       # boundary again
        (1.0, 1.0, (1.5, -0.5), False),
    ])
    def test_frozen_examples(self, a, b, expected, psd):
        hi, lo = three_qubit_eigenvalues(a, b)
        assert (hi, lo) == pytest.approx(expected, abs=1e-12)
        assert three_qubit_psd(a, b) is psd
        # dense oracle: spectrum is {0 x4, hi x2, lo x2}
        oracle = three_qubit_operator_spectrum(a, b)
        frozen = np.sort([0.0, 0.0, 0.0, 0.0, hi, hi, lo, lo])
        assert np.allclose(oracle, frozen, atol=1e-12)

    def test_grid_against_dense_oracle(self):
        for a in GRID:
            for b in GRID:
                hi, lo = three_qubit_eigenvalues(a, b)
                oracle = three_qubit_operator_spectrum(a, b)
                assert np.allclose(oracle, np.sort([0.0] * 4 + [hi, hi, lo, lo]),
                                   atol=1e-12)
                assert three_qubit_psd(a, b) == (oracle[0] >= -1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            three_qubit_eigenvalues(0.0, 1.0)
        with pytest.raises(ValueError):
            three_qubit_psd(1.0, -2.0)


class TestClosedForms:
    def test_generic(self):
        assert generic_constant(3).slope == 12
        assert generic_constant(10).slope == 810

    def test_periodic_values(self):
        assert periodic_constant((4,)).slope == 6
        assert periodic_constant((3,)).slope == 2
        assert periodic_constant(dims=2, n=4).slope == 40
        assert periodic_constant((3, 3)).slope == 10

    def test_open_values(self):
        assert open_constant((3,)).slope == 10
        assert open_constant((2,)).slope == 2
        assert open_constant((4,)).slope == 28

    def test_diameter_triangle(self):
        g = from_edge_list([(0, 1), (1, 2), (0, 2)])
        assert diameter_constant(g).slope == 6   # 1 * 3 * 2

    def test_exact_fractions(self):
        c = periodic_constant((5,))
        assert isinstance(c.slope, Fraction)
        assert c.slope == Fraction(10)

    def test_dispatcher(self):
        assert closed_form_constant("generic", n_sites=3).slope == 12
        assert closed_form_constant("periodic", dims=1, n=4).slope == 6
        assert closed_form_constant("open", shape=(4, 3)).slope == 212
        with pytest.raises(ValueError):
            closed_form_constant("nope")

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            periodic_constant((2,))
        with pytest.raises(ValueError):
            open_constant((1,))
        with pytest.raises(ValueError):
            generic_constant(1)

    def test_open_single_edge_tight(self):
        g = chain(2)
        cert = certify_inequality(g, open_constant((2,)).slope)
        assert cert.passed
        assert cert.lambda_min == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("shape,boundary", [
        ((4,), "periodic"), ((6,), "periodic"), ((3, 3), "periodic"),
        ((3,), "open"), ((5,), "open"), ((3, 3), "open"), ((4, 3), "open"),
    ])
    def test_closed_forms_certify(self, shape, boundary):
        g = build_lattice(LatticeSpec(shape, boundary))
        maker = periodic_constant if boundary == "periodic" else open_constant
        assert certify_inequality(g, maker(shape).slope, tol=1e-9).passed

    def test_asymptotics_periodic(self):
        # pure formula evaluation, no operators involved
        for dims in (1, 2, 3):
            ratio = float(periodic_constant(dims=dims, n=64).slope) / \
                periodic_leading_term(dims=dims, n=64)
            assert 0.98 <= ratio <= 1.02

    def test_asymptotics_open(self):
        for dims in (1, 2, 3):
            ratio = float(open_constant(dims=dims, n=64).slope) / \
                open_leading_term(dims=dims, n=64)
            assert 0.95 <= ratio <= 1.05


class TestGauge:
    def test_two_site_already_homogeneous(self):
        cm = coupling_matrix(from_edge_list([(0, 1)]), 1.0)
        gauged = gauge_weak_homogeneity(cm)
        assert np.allclose(gauged.matrix, [[0, -2], [-2, 0]])
        assert np.allclose(gauged.row_sums(), -2)

    def test_three_site_chain(self):
        # frozen from applying the diagonal redefinition entrywise
        cm = coupling_matrix(chain(3), 1.0)
        gauged = gauge_weak_homogeneity(cm)
        assert np.allclose(np.diag(gauged.matrix), [-2 / 3, 4 / 3, -2 / 3])
        assert np.allclose(gauged.row_sums(), -8 / 3)
        assert abs(np.trace(gauged.matrix)) < 1e-12

    def test_offdiagonal_untouched_and_traceless(self):
        from spinbound.bounds import CouplingMatrix
        rng = np.random.default_rng(5)
        for _ in range(10):
            n = int(rng.integers(3, 9))
            m = rng.standard_normal((n, n))
            m = (m + m.T) / 2
            np.fill_diagonal(m, 0.0)
            gauged = gauge_weak_homogeneity(CouplingMatrix(m))
            off = ~np.eye(n, dtype=bool)
            assert np.allclose(gauged.matrix[off], m[off])
            sums = gauged.row_sums()
            assert np.ptp(sums) < 1e-12
            assert abs(np.trace(gauged.matrix)) < 1e-12


class TestBaerwinkel:
    def test_ring4_frozen(self, ring4):
        # frozen from the dense eigendecomposition + conversion formula
        bound = baerwinkel_bound(ring4, coupling=1.0)
        assert bound.slope == pytest.approx(4.0, abs=1e-12)
        assert bound.offset == pytest.approx(2.0, abs=1e-12)
        assert bound.params["j"] == pytest.approx(-4.0)
        assert bound.params["j_min"] == pytest.approx(0.0, abs=1e-12)
        assert bound.params["j2"] == pytest.approx(0.0, abs=1e-12)

    def test_ring6_frozen(self):
        bound = baerwinkel_bound(ring(6), coupling=1.0)
        assert bound.slope == pytest.approx(12.0, abs=1e-10)
        assert bound.offset == pytest.approx(21.0, abs=1e-10)

    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_ring_spectra_analytic(self, n):
        g = ring(n)
        gauged = gauge_weak_homogeneity(coupling_matrix(g, 1.0))
        dense = np.sort(np.linalg.eigvalsh(gauged.matrix))
        analytic = lattice_coupling_eigenvalues(g.lattice, 1.0)
        assert np.allclose(dense, analytic, atol=1e-10)
        expected = np.sort([-4 * math.cos(2 * math.pi * m / n) for m in range(n)])
        assert np.allclose(dense, expected, atol=1e-10)

    @pytest.mark.parametrize("dims,n", [(1, 4), (1, 6), (2, 3), (2, 4), (3, 3), (3, 4)])
    def test_lattice_j_values(self, dims, n):
        g = build_lattice(LatticeSpec.cubic(dims, n, "periodic"))
        bound = baerwinkel_bound(g, coupling=1.0)
        assert bound.params["j"] == pytest.approx(-4.0 * dims, abs=1e-10)
        assert bound.params["j_min"] == pytest.approx(
            -4.0 * (dims - 1 + math.cos(2 * math.pi / n)), abs=1e-10)

    def test_dominates_joint_pairs_periodic(self):
        # validity on periodic lattices, where j2 = j_min
        for g in (ring(4), ring(6), ring(8),
                  build_lattice(LatticeSpec((3, 3), "periodic"))):
            bound = baerwinkel_bound(g, coupling=1.0)
            for pairs in joint_spectrum(g).values():
                for alpha, beta in pairs:
                    assert beta <= float(bound.slope) * alpha + float(bound.offset) + 1e-9

    def test_coupling_scaling_invariant(self):
        # the converted bound is dimensionless; J cancels
        g = ring(6)
        b1 = baerwinkel_bound(g, coupling=1.0)
        b2 = baerwinkel_bound(g, coupling=2.5)
        assert b2.slope == pytest.approx(b1.slope, rel=1e-12)
        assert b2.offset == pytest.approx(b1.offset, rel=1e-12)

    def test_spin_restriction(self, ring4):
        with pytest.raises(ValueError):
            baerwinkel_bound(ring4, spin=1.0)


class TestCompareBounds:
    def test_ring4_crossover(self, ring4):
        ours = periodic_constant((4,))
        theirs = baerwinkel_bound(ring4)
        report = compare_bounds(ours, theirs)   # x_max defaults to edge count 4
        assert report.x_max == 4.0
        assert report.crossover == pytest.approx(1.0, abs=1e-12)
        assert report.tighter_at_zero == "first"
        assert report.tighter_at_xmax == "second"

    def test_values_at_half(self):
        ours = periodic_constant((4,))
        theirs = baerwinkel_bound(ring(4))
        assert float(ours.evaluate(0.5)) == pytest.approx(3.0)
        assert float(theirs.evaluate(0.5)) == pytest.approx(4.0)

    def test_values_at_xmax(self, ring4):
        report = compare_bounds(periodic_constant((4,)), baerwinkel_bound(ring4))
        assert report.values_at_xmax == pytest.approx((24.0, 18.0))

    def test_explicit_xmax(self):
        a = BoundSpec(2.0, 0.0, "assignment", {})
        b = BoundSpec(1.0, 3.0, "baerwinkel", {})
        report = compare_bounds(a, b, x_max=10.0)
        assert report.crossover == pytest.approx(3.0)
        assert report.tighter_at_zero == "first"
        assert report.tighter_at_xmax == "second"

    def test_slope_validation(self):
        with pytest.raises(ValueError):
            BoundSpec(-1.0, 0.0, "generic", {})
