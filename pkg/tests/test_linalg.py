import numpy as np
import pytest

from eprkit.errors import (
    DegenerateSpectrumError,
    DimensionMismatchError,
    NonHermitianError,
    SpectrumCoverageError,
)
from eprkit.linalg import (
    Observable,
    commutator,
    extract_c,
    is_hermitian,
    match_value,
    phase_fix,
    spectral_decompose,
    tensor_product,
)
from helpers import PAULI_X, PAULI_Y, PAULI_Z, random_hermitian


class TestTensorProduct:
    def test_identity_times_identity(self):
        assert np.array_equal(tensor_product(np.eye(2), np.eye(2)), np.eye(4))

    def test_sigma_z_with_identity(self):
        # expanded by hand: first factor varies slowest
        expected = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)
        assert np.allclose(tensor_product(PAULI_Z, np.eye(2)), expected)

    def test_two_qubit_sum_eigenvalues(self):
        total = tensor_product(PAULI_Z, np.eye(2)) + tensor_product(np.eye(2), PAULI_Z)
        assert np.allclose(total, np.diag([2.0, 0.0, 0.0, -2.0]))

    def test_index_convention(self):
        a = np.array([[1, 2], [3, 4]], dtype=complex)
        b = np.array([[5, 6], [7, 8]], dtype=complex)
        out = tensor_product(a, b)
        # entry ((i1*2 + i2), (j1*2 + j2)) = a[i1, j1] * b[i2, j2]
        assert out[1 * 2 + 0, 0 * 2 + 1] == a[1, 0] * b[0, 1]

    def test_bilinear(self):
        rng = np.random.default_rng(1)
        a = random_hermitian(rng, 3)
        b = random_hermitian(rng, 2)
        c = random_hermitian(rng, 2)
        left = tensor_product(a, 2.0 * b + c)
        right = 2.0 * tensor_product(a, b) + tensor_product(a, c)
        assert np.allclose(left, right, atol=1e-12)

    def test_mixed_product_identity(self):
        rng = np.random.default_rng(2)
        a = random_hermitian(rng, 3)
        b = random_hermitian(rng, 3)
        lhs = tensor_product(a, np.eye(3)) @ tensor_product(np.eye(3), b)
        assert np.abs(lhs - tensor_product(a, b)).max() <= 1e-12

    def test_associative_up_to_reassociation(self):
        rng = np.random.default_rng(3)
        a, b, c = (random_hermitian(rng, 2) for _ in range(3))
        assert np.allclose(
            tensor_product(tensor_product(a, b), c),
            tensor_product(a, tensor_product(b, c)),
            atol=1e-12,
        )

    def test_rejects_nonfinite(self):
        bad = np.array([[np.inf, 0], [0, 1]], dtype=complex)
        with pytest.raises(ValueError):
            tensor_product(bad, np.eye(2))


class TestCommutator:
    def test_identity_commutes_with_anything(self):
        rng = np.random.default_rng(4)
        m = random_hermitian(rng, 4)
        assert np.abs(commutator(np.eye(4), m)).max() == 0.0

    def test_self_commutator_vanishes(self):
        rng = np.random.default_rng(5)
        m = random_hermitian(rng, 3)
        assert np.abs(commutator(m, m)).max() == 0.0

    def test_pauli_algebra(self):
        assert np.allclose(commutator(PAULI_Z, PAULI_X), 2j * PAULI_Y)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            commutator(np.eye(2), np.eye(3))


class TestExtractC:
    def test_pauli_triple(self):
        assert np.allclose(extract_c(PAULI_Z, PAULI_X, 2.0), PAULI_Y)

    def test_sigma_z_sigma_y(self):
        # [sigma_z, sigma_y] = -2i sigma_x, computed by hand
        assert np.allclose(extract_c(PAULI_Z, PAULI_Y, 2.0), -PAULI_X)

    def test_commuting_pair_gives_zero(self):
        rng = np.random.default_rng(6)
        m = random_hermitian(rng, 3)
        assert np.abs(extract_c(m, m, 1.0)).max() == 0.0

    def test_result_is_hermitian(self):
        rng = np.random.default_rng(7)
        a = random_hermitian(rng, 5)
        b = random_hermitian(rng, 5)
        assert is_hermitian(extract_c(a, b, 1.0))

    def test_zero_alpha_rejected(self):
        with pytest.raises(ValueError):
            extract_c(PAULI_Z, PAULI_X, 0.0)

    def test_non_hermitian_rejected(self):
        upper = np.array([[0, 1], [0, 0]], dtype=complex)
        with pytest.raises(NonHermitianError):
            extract_c(upper, PAULI_X, 1.0)


class TestIsHermitian:
    def test_sigma_y(self):
        assert is_hermitian(PAULI_Y)

    def test_strictly_upper_entry(self):
        assert not is_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_within_explicit_tolerance(self):
        perturbed = PAULI_Z.astype(complex)
        perturbed[0, 1] += 1e-14
        assert is_hermitian(perturbed, tol=1e-12)

    def test_non_square_rejected(self):
        with pytest.raises(DimensionMismatchError):
            is_hermitian(np.zeros((2, 3)))


class TestSpectralDecompose:
    def test_sigma_z(self):
        dec = spectral_decompose(PAULI_Z)
        assert [line.eigenvalue for line in dec.lines] == [-1.0, 1.0]
        assert dec.multiplicities == (1, 1)

    def test_identity_is_one_line(self):
        dec = spectral_decompose(np.eye(5))
        assert len(dec.lines) == 1
        assert dec.lines[0].eigenvalue == pytest.approx(1.0)
        assert dec.lines[0].multiplicity == 5
        assert np.allclose(dec.lines[0].projector, np.eye(5))

    def test_two_qubit_sum_degeneracy(self):
        total = np.diag([2.0, 0.0, 0.0, -2.0])
        dec = spectral_decompose(total)
        assert list(dec.eigenvalues) == [-2.0, 0.0, 2.0]
        assert dec.multiplicities == (1, 2, 1)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianError):
            spectral_decompose(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_rejects_beyond_envelope(self):
        with pytest.raises(DimensionMismatchError):
            spectral_decompose(np.eye(65))

    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_projector_invariants_random(self, n):
        rng = np.random.default_rng(100 + n)
        h = random_hermitian(rng, n)
        dec = spectral_decompose(h)
        assert sum(dec.multiplicities) == n
        assert np.all(np.diff(dec.eigenvalues) > 0)
        for i, line in enumerate(dec.lines):
            p = line.projector
            assert np.abs(p - p.conj().T).max() <= 1e-10
            assert np.abs(p @ p - p).max() <= 1e-10
            assert np.trace(p).real == pytest.approx(line.multiplicity, abs=1e-10)
            assert np.abs(p @ h @ p - line.eigenvalue * p).max() <= 1e-9
            for other in dec.lines[i + 1 :]:
                assert np.abs(p @ other.projector).max() <= 1e-10

    def test_reconstruction_and_completeness(self):
        rng = np.random.default_rng(11)
        for n in range(2, 9):
            h = random_hermitian(rng, n)
            dec = spectral_decompose(h)
            scale = np.linalg.norm(h)
            assert np.abs(dec.reconstruct() - h).max() <= 1e-10 * scale
            assert np.abs(dec.projector_sum() - np.eye(n)).max() <= 1e-10

    def test_exact_degeneracy_grouped(self):
        # eigh splits exact degeneracies by ulps; the grouping must merge them
        rng = np.random.default_rng(12)
        u = np.linalg.qr(random_hermitian(rng, 4) + 1j * np.eye(4))[0]
        h = u @ np.diag([1.0, 1.0, 2.0, 3.0]) @ u.conj().T
        dec = spectral_decompose((h + h.conj().T) / 2)
        assert dec.multiplicities == (2, 1, 1)


class TestObservable:
    def test_eigenvector_phase_is_deterministic(self):
        obs = Observable(PAULI_Y)
        v = obs.eigenvectors
        for j in range(2):
            pivot = v[np.abs(v[:, j]) > 1e-8, j][0]
            assert pivot.imag == pytest.approx(0.0, abs=1e-12)
            assert pivot.real > 0
        assert np.allclose(obs.matrix @ v, v @ np.diag(obs.eigenvalues))

    def test_degenerate_flag(self):
        assert Observable(PAULI_Z).is_nondegenerate
        assert not Observable(np.eye(3)).is_nondegenerate
        with pytest.raises(DegenerateSpectrumError):
            Observable(np.eye(3)).require_nondegenerate()

    def test_line_index_matches_within_tolerance(self):
        obs = Observable(PAULI_Z)
        assert obs.line_index(1.0 + 1e-12) == 1
        with pytest.raises(SpectrumCoverageError):
            obs.line_index(0.5)

    def test_matrix_is_readonly(self):
        obs = Observable(PAULI_Z)
        with pytest.raises(ValueError):
            obs.matrix[0, 0] = 7.0


def test_match_value_picks_nearest():
    values = np.array([-1.0, 0.0, 2.0])
    assert match_value(values, 1.9999999999, 1e-8) == 2
    with pytest.raises(SpectrumCoverageError):
        match_value(values, 1.0, 1e-8)


def test_phase_fix_skips_negligible_components():
    v = np.array([[1e-12, 1.0], [1.0j, 0.0]], dtype=complex)
    fixed = phase_fix(v)
    # column 0 pivots on the second entry, rotating 1j to 1
    assert fixed[1, 0] == pytest.approx(1.0)
    assert fixed[0, 1] == pytest.approx(1.0)


def test_commutator_triple_has_traceless_vanishing_diagonal():
    # for C = [A, B]/i, both tr(C) and the diagonal of C in A's eigenbasis vanish
    rng = np.random.default_rng(13)
    for _ in range(20):
        n = int(rng.integers(2, 7))
        a = random_hermitian(rng, n)
        b = random_hermitian(rng, n)
        c = extract_c(a, b, 1.0)
        scale = np.linalg.norm(c)
        assert abs(np.trace(c)) <= 1e-10 * scale
        v = np.linalg.eigh(a)[1]
        diag = np.einsum("ij,jk,ki->i", v.conj().T, c, v)
        assert np.abs(diag).max() <= 1e-10 * scale
