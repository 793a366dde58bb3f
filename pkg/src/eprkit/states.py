"""Pure states and prediction on a single observable.

Covers outcome probabilities, the best predictor of a function of an
observable, its prediction error, the Heisenberg audit for a commutation
triple, and the vanishing-trace/vanishing-diagonal check that dissolves the
EPR objection in finite dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, SpectrumCoverageError
from .linalg import Observable, as_complex_matrix, extract_c, match_value, phase_fix

# Input vectors shorter than this are rejected rather than silently normalized.
MIN_STATE_NORM = 1e-8

# Slack allowed when flagging an uncertainty product as satisfying its bound.
HUP_SLACK = 1e-10

PHASE_EQUAL_TOL = 1e-10


class PureState:
    """A normalized complex vector on a (possibly composite) Hilbert space.

    ``factor_dims`` records the tensor factorization, e.g. ``(2, 2)`` for two
    qubits; the flat amplitude order is lexicographic with the first factor as
    the slow index. Construction normalizes the input (preserving its phase)
    and records the applied scale.
    """

    def __init__(self, amplitudes, factor_dims=None):
        vec = np.ascontiguousarray(amplitudes, dtype=np.complex128).reshape(-1)
        if not np.isfinite(vec).all():
            raise ValueError("state amplitudes must be finite")
        norm = float(np.linalg.norm(vec))
        if norm < MIN_STATE_NORM:
            raise ValueError(f"state vector norm {norm:.3e} is below {MIN_STATE_NORM}")
        if factor_dims is None:
            factor_dims = (vec.size,)
        factor_dims = tuple(int(d) for d in factor_dims)
        if math.prod(factor_dims) != vec.size:
            raise DimensionMismatchError(
                f"factor dims {factor_dims} do not multiply to vector length {vec.size}"
            )
        vec = vec / norm
        vec.setflags(write=False)
        self._amplitudes = vec
        self._factor_dims = factor_dims
        self._norm_scale = norm

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amplitudes

    @property
    def factor_dims(self) -> tuple[int, ...]:
        return self._factor_dims

    @property
    def dim(self) -> int:
        return self._amplitudes.size

    @property
    def norm_scale(self) -> float:
        """Norm of the raw input vector before normalization."""
        return self._norm_scale

    def overlap(self, other: "PureState") -> complex:
        if other.dim != self.dim:
            raise DimensionMismatchError("states live on different spaces")
        return complex(np.vdot(self._amplitudes, other._amplitudes))

    def equals_up_to_phase(self, other: "PureState", tol: float = PHASE_EQUAL_TOL) -> bool:
        """Physical equality: ``|<self|other>| >= 1 - tol``."""
        return abs(self.overlap(other)) >= 1.0 - tol

    def expectation(self, matrix) -> complex:
        """Quadratic form ``<psi|M|psi>``."""
        m = as_complex_matrix(matrix)
        if m.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"matrix shape {m.shape} does not act on dim {self.dim}")
        return complex(np.vdot(self._amplitudes, m @ self._amplitudes))

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim}, factors={self._factor_dims})"


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities over the distinct outcomes of one observable, ascending."""

    outcomes: tuple[tuple[float, float], ...]

    def __post_init__(self):
        values = [v for v, _ in self.outcomes]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("outcome values must be strictly increasing")
        total = sum(p for _, p in self.outcomes)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.outcomes])

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.outcomes])

    def probability_of(self, value: float, tol: float = 1e-9) -> float:
        idx = match_value(self.values, value, tol)
        return self.outcomes[idx][1]


class SpectrumFunction:
    """A real function given as a table over an observable's eigenvalues.

    Lookups match keys within a tolerance, since spectrum values arrive as
    floats from an eigensolver while tables are often written as decimal
    literals.
    """

    def __init__(self, table: dict[float, float], match_tol: float = 1e-9):
        if not table:
            raise ValueError("spectrum function table is empty")
        items = sorted((float(k), float(v)) for k, v in table.items())
        self._keys = np.array([k for k, _ in items])
        self._values = np.array([v for _, v in items])
        self.match_tol = match_tol

    @classmethod
    def identity(cls, spectrum) -> "SpectrumFunction":
        return cls({float(a): float(a) for a in spectrum})

    @classmethod
    def constant(cls, spectrum, c: float) -> "SpectrumFunction":
        return cls({float(a): float(c) for a in spectrum})

    @classmethod
    def from_callable(cls, spectrum, fn) -> "SpectrumFunction":
        return cls({float(a): float(fn(a)) for a in spectrum})

    @property
    def table(self) -> dict[float, float]:
        return {float(k): float(v) for k, v in zip(self._keys, self._values)}

    def __call__(self, value: float) -> float:
        idx = match_value(self._keys, value, self.match_tol)
        return float(self._values[idx])

    def covers(self, spectrum) -> bool:
        try:
            for a in spectrum:
                self(a)
        except SpectrumCoverageError:
            return False
        return True

    def require_covers(self, spectrum) -> None:
        for a in spectrum:
            self(a)

    def squared(self) -> "SpectrumFunction":
        return SpectrumFunction(
            {float(k): float(v) ** 2 for k, v in zip(self._keys, self._values)},
            match_tol=self.match_tol,
        )


@dataclass(frozen=True)
class UncertaintyReport:
    """One Heisenberg audit: prediction errors against half the C expectation."""

    delta_a: float
    delta_b: float
    rhs: float
    satisfied: bool


@dataclass(frozen=True)
class DiagonalVanishingReport:
    """Residuals for the vanishing trace and vanishing diagonal of C.

    ``a_degenerate`` flags that the diagonal was evaluated in one particular
    (non-canonical) eigenbasis choice.
    """

    trace_residual: float
    max_diag_residual: float
    c_norm: float
    a_degenerate: bool


def _check_same_dim(state: PureState, obs: Observable) -> None:
    if state.dim != obs.dim:
        raise DimensionMismatchError(f"state dim {state.dim} != observable dim {obs.dim}")


def outcome_probabilities(state: PureState, obs: Observable) -> OutcomeDistribution:
    """Distribution of measurement outcomes: ``p(s_k) = <psi|P_k|psi>``.

    Evaluated as ``|P_k psi|^2``, which is the same number for a projector but
    loses only quadratically small precision near zero, so eigenstates report
    genuinely negligible probabilities for the other outcomes.
    """
    _check_same_dim(state, obs)
    outcomes = []
    for line in obs.decomposition.lines:
        w = line.projector @ state.amplitudes
        p = float(np.real(np.vdot(w, w)))
        outcomes.append((line.eigenvalue, min(max(p, 0.0), 1.0)))
    return OutcomeDistribution(outcomes=tuple(outcomes))


def function_matrix(obs: Observable, f: SpectrumFunction) -> np.ndarray:
    """Assemble the matrix ``f(A) = sum_k f(a_k) P_k``."""
    out = np.zeros((obs.dim, obs.dim), dtype=np.complex128)
    for line in obs.decomposition.lines:
        out += f(line.eigenvalue) * line.projector
    return out


def best_predictor(state: PureState, obs: Observable, f: SpectrumFunction) -> float:
    """Expected value of ``f(A)``: the predictor minimizing mean squared error.

    Evaluated as the spectral sum ``sum_k f(a_k) p(a_k)``, which equals the
    quadratic form ``<psi|f(A)|psi>``.
    """
    dist = outcome_probabilities(state, obs)
    f.require_covers(dist.values)
    return float(sum(f(v) * p for v, p in dist.outcomes))


def prediction_error(state: PureState, obs: Observable) -> float:
    """Smallest achievable prediction error ``sqrt(<(A - <A>)^2>)``.

    Zero exactly when the state is (numerically) an eigenstate.
    """
    dist = outcome_probabilities(state, obs)
    mean = float(np.dot(dist.values, dist.probabilities))
    var = float(np.dot((dist.values - mean) ** 2, dist.probabilities))
    return math.sqrt(max(var, 0.0))


def audit_uncertainty(state: PureState, a: Observable, b: Observable, c: Observable) -> UncertaintyReport:
    """Check ``Delta(A) * Delta(B) >= |<C>| / 2`` in the given state."""
    if not (a.dim == b.dim == c.dim == state.dim):
        raise DimensionMismatchError("audit requires all operands on one space")
    delta_a = prediction_error(state, a)
    delta_b = prediction_error(state, b)
    rhs = 0.5 * abs(state.expectation(c.matrix))
    return UncertaintyReport(
        delta_a=delta_a,
        delta_b=delta_b,
        rhs=rhs,
        satisfied=delta_a * delta_b >= rhs - HUP_SLACK,
    )


def verify_theorem1(a: Observable, b: Observable, alpha: float = 1.0) -> DiagonalVanishingReport:
    """Residuals of the two structural identities for ``C = [A, B] / (i*alpha)``.

    The trace of C vanishes, and so does every diagonal element of C in the
    eigenbasis of A; the latter is what makes a zero-error prediction of A
    compatible with the uncertainty bound.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError("observables act on different spaces")
    c = extract_c(a.matrix, b.matrix, alpha)
    vectors = a.eigenvectors if a.is_nondegenerate else phase_fix(np.linalg.eigh(a.matrix)[1])
    diag = np.einsum("ij,jk,ki->i", vectors.conj().T, c, vectors)
    return DiagonalVanishingReport(
        trace_residual=abs(complex(np.trace(c))),
        max_diag_residual=float(np.abs(diag).max()),
        c_norm=float(np.linalg.norm(c)),
        a_degenerate=not a.is_nondegenerate,
    )
