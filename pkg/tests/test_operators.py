import math

import numpy as np
import pytest

from spinbound import (
    LatticeSpec,
    build_lattice,
    delta_hamiltonian,
    delta_spin_squared,
    magnon_state,
    max_spin_squared,
    multiplet_multiplicity,
    sector_basis,
    singlet_projector,
    spin_deficit_levels,
)
from conftest import chain, ring
from oracles import delta_h_full, delta_s2_full, sector_block_of_full, singlet_projector_full


def full_spectrum(graph_or_n, operator):
    """Collect eigenvalues of a sector-blocked operator over all sectors."""
    n = graph_or_n if isinstance(graph_or_n, int) else graph_or_n.n_sites
    vals = []
    for m in range(n + 1):
        basis = sector_basis(n, m)
        op = operator(basis)
        vals.extend(np.linalg.eigvalsh(op.toarray()))
    return np.sort(vals)


class TestSectorBasis:
    @pytest.mark.parametrize("n,m,dim", [(4, 2, 6), (2, 1, 2), (3, 0, 1), (6, 3, 20)])
    def test_dimensions(self, n, m, dim):
        basis = sector_basis(n, m)
        assert basis.dim == dim == math.comb(n, m)

    def test_states_sorted_and_invertible(self):
        basis = sector_basis(5, 2)
        states = basis.states
        assert all(states[i] < states[i + 1] for i in range(len(states) - 1))
        assert all(basis.position(s) == i for i, s in enumerate(states))
        assert all(bin(int(s)).count("1") == 2 for s in states)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            sector_basis(4, 5)
        with pytest.raises(ValueError):
            sector_basis(0, 0)
        with pytest.raises(ValueError):
            sector_basis(25, 1)
        assert sector_basis(25, 1, max_qubits=25).dim == 25


class TestSingletProjector:
    def test_two_qubit_matrix(self):
        basis = sector_basis(2, 1)
        mat = singlet_projector(basis, 0, 1).toarray()
        assert np.allclose(mat, [[0.5, -0.5], [-0.5, 0.5]])

    def test_idempotent(self):
        basis = sector_basis(5, 2)
        p = singlet_projector(basis, 1, 3)
        assert abs(p @ p - p).max() < 1e-14

    def test_full_space_trace_is_two(self):
        # rank 2^(n-2): n=3 gives trace 2 summed over sectors
        total = sum(singlet_projector(sector_basis(3, m), 0, 2).diagonal().sum()
                    for m in range(4))
        assert total == pytest.approx(2.0)

    def test_rejects_equal_sites(self):
        with pytest.raises(ValueError):
            singlet_projector(sector_basis(3, 1), 1, 1)

    def test_matches_kron_oracle(self):
        n = 4
        full = singlet_projector_full(n, 1, 3)
        for m in range(n + 1):
            basis = sector_basis(n, m)
            lib = singlet_projector(basis, 1, 3).toarray()
            oracle = sector_block_of_full(full, n, basis.states)
            assert np.allclose(lib, oracle, atol=1e-13)


class TestDeltaHamiltonian:
    def test_single_edge_spectrum(self, single_edge):
        spec = full_spectrum(2, lambda b: delta_hamiltonian(single_edge, b))
        assert np.allclose(spec, [0, 0, 0, 1])

    def test_vacuum_annihilated(self):
        g = ring(4)
        basis = sector_basis(4, 0)
        assert delta_hamiltonian(g, basis).toarray()[0, 0] == 0.0

    def test_triangle_spectrum_matches_oracle(self, triangle):
        # frozen from dense diagonalization of the 8x8 kron operator
        spec = full_spectrum(3, lambda b: delta_hamiltonian(triangle, b))
        assert np.allclose(spec, [0, 0, 0, 0, 1.5, 1.5, 1.5, 1.5], atol=1e-12)
        oracle = np.linalg.eigvalsh(delta_h_full(3, triangle.edges))
        assert np.allclose(spec, oracle, atol=1e-12)

    def test_size_mismatch_rejected(self, triangle):
        with pytest.raises(ValueError):
            delta_hamiltonian(triangle, sector_basis(4, 1))

    def test_matches_kron_oracle_blocks(self):
        g = ring(5)
        full = delta_h_full(5, g.edges)
        for m in range(6):
            basis = sector_basis(5, m)
            lib = delta_hamiltonian(g, basis).toarray()
            assert np.allclose(lib, sector_block_of_full(full, 5, basis.states), atol=1e-13)


class TestDeltaSpinSquared:
    def test_two_qubit_spectrum(self):
        spec = full_spectrum(2, delta_spin_squared)
        assert np.allclose(spec, [0, 0, 0, 2])

    def test_three_qubit_spectrum(self):
        # frozen from dense diagonalization: doublets sit at 15/4 - 3/4 = 3
        spec = full_spectrum(3, delta_spin_squared)
        assert np.allclose(spec, [0, 0, 0, 0, 3, 3, 3, 3], atol=1e-12)
        oracle = np.linalg.eigvalsh(delta_s2_full(3))
        assert np.allclose(spec, oracle, atol=1e-12)

    def test_complete_graph_identity(self):
        from spinbound import from_edge_list
        n = 5
        g = from_edge_list([(i, k) for i in range(n) for k in range(i + 1, n)])
        for m in range(n // 2 + 1):
            basis = sector_basis(n, m)
            lhs = delta_spin_squared(basis)
            rhs = 2.0 * delta_hamiltonian(g, basis)
            assert abs(lhs - rhs).max() < 1e-13

    def test_spectrum_equals_multiplet_deficits(self):
        # combinatorial oracle: deficit Smax^2 - s(s+1) with multiplicity
        # equal to the number of spin-s multiplets, one state per sector
        for n in (4, 5, 6):
            for m in range(n // 2 + 1):
                basis = sector_basis(n, m)
                got = np.sort(np.linalg.eigvalsh(delta_spin_squared(basis).toarray()))
                expected = []
                smax2 = max_spin_squared(n)
                for twice_s in range(abs(n - 2 * m), n + 1, 2):
                    s = twice_s / 2
                    expected.extend([smax2 - s * (s + 1)] * multiplet_multiplicity(n, twice_s))
                assert np.allclose(got, np.sort(expected), atol=1e-12)


class TestOperatorInvariants:
    def test_commutation(self):
        rng = np.random.default_rng(11)
        for g in (ring(6), chain(5), ring(8)):
            n = g.n_sites
            for m in range(n // 2 + 1):
                basis = sector_basis(n, m)
                a = delta_hamiltonian(g, basis)
                b = delta_spin_squared(basis)
                for _ in range(50):
                    v = rng.standard_normal(basis.dim)
                    v /= np.linalg.norm(v)
                    assert np.linalg.norm(a @ (b @ v) - b @ (a @ v)) < 1e-12

    def test_kernel_containment(self):
        # vectors annihilated by the energy operator are annihilated by the deficit
        for g in (ring(6), chain(5), build_lattice(LatticeSpec((3, 3), "open"))):
            n = g.n_sites
            for m in range(n // 2 + 1):
                basis = sector_basis(n, m)
                a = delta_hamiltonian(g, basis).toarray()
                b = delta_spin_squared(basis)
                vals, vecs = np.linalg.eigh(a)
                for idx in np.nonzero(vals <= 1e-10)[0]:
                    assert np.linalg.norm(b @ vecs[:, idx]) < 1e-9

    def test_projector_sums_psd(self):
        for g in (ring(6), chain(7)):
            n = g.n_sites
            for m in range(n // 2 + 1):
                basis = sector_basis(n, m)
                vals = np.linalg.eigvalsh(delta_hamiltonian(g, basis).toarray())
                assert vals[0] >= -1e-12
                vals = np.linalg.eigvalsh(delta_spin_squared(basis).toarray())
                assert vals[0] >= -1e-12

    def test_sector_closure_via_strict_lookup(self):
        # applying an operator never produces a state outside the sector;
        # construction would KeyError on the strict index if it did
        g = ring(8)
        for m in (0, 1, 3, 4):
            delta_hamiltonian(g, sector_basis(8, m))
            delta_spin_squared(sector_basis(8, m))


class TestSpinDeficitLevels:
    def test_levels_match_spectrum(self):
        for n, m in [(4, 2), (5, 2), (6, 3), (7, 1)]:
            basis = sector_basis(n, m)
            got = np.unique(np.round(np.linalg.eigvalsh(
                delta_spin_squared(basis).toarray()), 9))
            assert np.allclose(np.sort(spin_deficit_levels(n, m)), got, atol=1e-9)


class TestMagnonStates:
    def test_open_boundary_rejected(self):
        with pytest.raises(ValueError):
            magnon_state(LatticeSpec((4,), "open"), 1)

    def test_zero_momentum_uniform(self):
        state = magnon_state(LatticeSpec((4,), "periodic"), 0)
        assert np.allclose(state.amplitudes, 0.5)
        g = ring(4)
        a = delta_hamiltonian(g, state.basis)
        assert np.linalg.norm(a @ state.amplitudes) < 1e-12

    @pytest.mark.parametrize("m,expected", [(1, 1.0), (2, 2.0), (3, 1.0)])
    def test_ring4_eigenvalues(self, m, expected):
        # frozen from exact diagonalization: eigenvalue 1 - cos(2 pi m / 4)
        g = ring(4)
        state = magnon_state(g.lattice, m)
        a = delta_hamiltonian(g, state.basis)
        v = state.amplitudes
        energy = np.real(np.vdot(v, a @ v))
        assert energy == pytest.approx(expected, abs=1e-12)
        assert np.linalg.norm(a @ v - energy * v) < 1e-12

    def test_norm_property(self):
        state = magnon_state(LatticeSpec((6,), "periodic"), 2)
        assert abs(state.norm - 1.0) < 1e-12

    def test_eigenstate_residuals_up_to_12(self):
        for n in (4, 6, 8, 10, 12):
            g = ring(n)
            a = delta_hamiltonian(g, sector_basis(n, 1))
            for m in range(1, n):
                v = magnon_state(g.lattice, m).amplitudes
                energy = np.real(np.vdot(v, a @ v))
                assert np.linalg.norm(a @ v - energy * v) < 1e-10
                assert energy == pytest.approx(1 - np.cos(2 * np.pi * m / n), abs=1e-10)

    def test_two_dimensional_dispersion(self):
        spec = LatticeSpec((4, 4), "periodic")
        g = build_lattice(spec)
        a = delta_hamiltonian(g, sector_basis(16, 1))
        for momentum in [(1, 0), (1, 2), (2, 3)]:
            v = magnon_state(spec, momentum).amplitudes
            energy = np.real(np.vdot(v, a @ v))
            expected = sum(1 - np.cos(2 * np.pi * m / 4) for m in momentum)
            assert energy == pytest.approx(expected, abs=1e-10)
            assert np.linalg.norm(a @ v - energy * v) < 1e-10

    def test_single_magnon_deficit_is_site_count(self):
        # one-flip eigenstates carry total spin n/2 - 1: deficit n exactly
        for n in (4, 6):
            g = ring(n)
            b = delta_spin_squared(sector_basis(n, 1))
            for m in range(1, n):
                v = magnon_state(g.lattice, m).amplitudes
                deficit = np.real(np.vdot(v, b @ v))
                assert deficit == pytest.approx(n, abs=1e-10)
