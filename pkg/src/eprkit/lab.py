"""Scenario construction, the end-to-end analysis pipeline, and shot sampling.

A scenario bundles one commutation triple [A, B] = i*alpha*C on the factor
space with an initial state of the two-factor composite. The analysis
conditions on every reachable sum outcome, audits the uncertainty bound in
each branch, runs the full measure-S-then-A1 chain, and the sampler draws
reproducible measurement paths to compare empirical frequencies against the
analytic distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .composite import (
    ZERO_PROB_THRESHOLD,
    eigenspace_projector,
    lift,
    post_measurement_state,
    schmidt_rank,
    sum_observable,
)
from .conditional import (
    PredictionSummary,
    SumConstraintReport,
    certain_prediction,
    conditional_distribution,
    epr_resolution_check,
    sequential_measure,
    verify_theorem2,
)
from .errors import DimensionMismatchError
from .linalg import MAX_DIM, Observable, extract_c
from .states import (
    OutcomeDistribution,
    PureState,
    SpectrumFunction,
    UncertaintyReport,
    audit_uncertainty,
    best_predictor,
    outcome_probabilities,
    prediction_error,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Tolerance for the declared C matching [A, B] / (i*alpha).
COMMUTATION_TOL = 1e-8

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class Scenario:
    """One commutation triple plus an initial composite state."""

    label: str
    factor_dim: int
    obs_a: Observable
    obs_b: Observable
    obs_c: Observable
    alpha: float
    initial_state: PureState

    def __post_init__(self):
        n = self.factor_dim
        if not (self.obs_a.dim == self.obs_b.dim == self.obs_c.dim == n):
            raise DimensionMismatchError("A, B, C must all act on the factor space")
        if n * n > MAX_DIM:
            raise DimensionMismatchError(
                f"factor dim {n} gives composite dim {n * n}, beyond the envelope of {MAX_DIM}"
            )
        if self.initial_state.dim != n * n:
            raise DimensionMismatchError("initial state must live on the composite space")
        derived = extract_c(self.obs_a.matrix, self.obs_b.matrix, self.alpha)
        residual = float(np.abs(derived - self.obs_c.matrix).max())
        if residual > COMMUTATION_TOL:
            raise ValueError(
                f"matrix_c is inconsistent with [A, B]/(i*alpha): residual {residual:.3e}"
            )

    @property
    def commutation_residual(self) -> float:
        derived = extract_c(self.obs_a.matrix, self.obs_b.matrix, self.alpha)
        return float(np.abs(derived - self.obs_c.matrix).max())


def build_scenario(label, matrix_a, matrix_b, state, alpha: float = 1.0, matrix_c=None) -> Scenario:
    """Assemble a scenario, deriving C from the commutator when not supplied.

    ``alpha`` defaults to 1, the generic unit convention; the Pauli builder
    uses 2 to match the spin-matrix commutation relations.
    """
    a = matrix_a if isinstance(matrix_a, Observable) else Observable(matrix_a)
    b = matrix_b if isinstance(matrix_b, Observable) else Observable(matrix_b)
    if matrix_c is None:
        c = Observable(extract_c(a.matrix, b.matrix, alpha))
    else:
        c = matrix_c if isinstance(matrix_c, Observable) else Observable(matrix_c)
    psi = state if isinstance(state, PureState) else PureState(state, factor_dims=(a.dim, a.dim))
    return Scenario(
        label=str(label),
        factor_dim=a.dim,
        obs_a=a,
        obs_b=b,
        obs_c=c,
        alpha=float(alpha),
        initial_state=psi,
    )


def build_pauli_scenario(amplitudes, label: str = "pauli-pair") -> Scenario:
    """Two spin-1/2 factors with A, B, C the Pauli matrices and alpha = 2.

    The four amplitudes are given in the product basis order
    (up, up), (up, down), (down, up), (down, down), i.e. first factor slow
    with the +1 eigenstate first.
    """
    vec = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if vec.size != 4:
        raise DimensionMismatchError(f"need 4 amplitudes for two qubits, got {vec.size}")
    return build_scenario(
        label,
        PAULI_Z,
        PAULI_X,
        PureState(vec, factor_dims=(2, 2)),
        alpha=2.0,
        matrix_c=PAULI_Y,
    )


@dataclass(frozen=True)
class SumBranchReport:
    """Predictions and audits in the post-measurement state of one sum outcome."""

    s_value: float
    probability: float
    schmidt_rank: int
    a1: PredictionSummary
    a2: PredictionSummary
    b1: PredictionSummary
    b2: PredictionSummary
    c1: PredictionSummary
    c2: PredictionSummary
    sum_constraint: SumConstraintReport
    audit_slot1: UncertaintyReport
    audit_slot2: UncertaintyReport


@dataclass(frozen=True)
class ChainReport:
    """Outcome of the full chain: S observed, then A(1) observed."""

    s_value: float
    a1_value: float
    a2_value: float
    conditional_probability: float
    a2_predicted: float
    a2_stdev: float
    point_mass_residual: float
    resolution: UncertaintyReport


@dataclass(frozen=True)
class EprReport:
    """Complete analysis of one scenario."""

    scenario_label: str
    sum_spectrum: OutcomeDistribution
    per_sum: tuple[SumBranchReport, ...]
    chains: tuple[ChainReport, ...]

    def __post_init__(self):
        # The uncertainty bound is a theorem; a violated audit is a bug, not a result.
        for branch in self.per_sum:
            if not (branch.audit_slot1.satisfied and branch.audit_slot2.satisfied):
                raise ValueError(f"uncertainty audit failed in branch s={branch.s_value!r}")
        for chain in self.chains:
            if not chain.resolution.satisfied:
                raise ValueError(
                    f"uncertainty audit failed after chain (s={chain.s_value!r}, a1={chain.a1_value!r})"
                )

    def branch_for(self, s_value: float, tol: float = 1e-9) -> SumBranchReport:
        for branch in self.per_sum:
            if abs(branch.s_value - s_value) <= tol:
                return branch
        raise KeyError(f"no populated branch for s={s_value!r}")

    def chain_for(self, s_value: float, a1_value: float, tol: float = 1e-9) -> ChainReport:
        for chain in self.chains:
            if abs(chain.s_value - s_value) <= tol and abs(chain.a1_value - a1_value) <= tol:
                return chain
        raise KeyError(f"no chain entry for (s={s_value!r}, a1={a1_value!r})")


def run_epr_analysis(sc: Scenario) -> EprReport:
    """Condition on every reachable sum outcome and run every reachable chain.

    Outcomes of (numerically) zero probability are omitted rather than
    reported as errors; every retained branch carries its own audits.
    """
    a, b, c = sc.obs_a, sc.obs_b, sc.obs_c
    state = sc.initial_state
    s_obs = sum_observable(a)
    spectrum = outcome_probabilities(state, s_obs)
    identity = SpectrumFunction.identity(a.eigenvalues)

    branches = []
    chains = []
    for k, (s_value, prob) in enumerate(spectrum.outcomes):
        if prob < ZERO_PROB_THRESHOLD:
            continue
        psi_s, _ = post_measurement_state(state, eigenspace_projector(s_obs, k))
        lifted = {
            (name, slot): lift(obs, slot, s_obs.space)
            for name, obs in (("a", a), ("b", b), ("c", c))
            for slot in (1, 2)
        }
        summaries = {
            key: PredictionSummary(
                mean=best_predictor(psi_s, obs, SpectrumFunction.identity(obs.eigenvalues)),
                stdev=prediction_error(psi_s, obs),
            )
            for key, obs in lifted.items()
        }
        branches.append(
            SumBranchReport(
                s_value=s_value,
                probability=prob,
                schmidt_rank=schmidt_rank(psi_s),
                a1=summaries[("a", 1)],
                a2=summaries[("a", 2)],
                b1=summaries[("b", 1)],
                b2=summaries[("b", 2)],
                c1=summaries[("c", 1)],
                c2=summaries[("c", 2)],
                sum_constraint=verify_theorem2(state, a, s_value),
                audit_slot1=audit_uncertainty(psi_s, lifted[("a", 1)], lifted[("b", 1)], lifted[("c", 1)]),
                audit_slot2=audit_uncertainty(psi_s, lifted[("a", 2)], lifted[("b", 2)], lifted[("c", 2)]),
            )
        )

        cond = conditional_distribution(state, a, s_value)
        for a1_value, cond_prob in cond.support:
            if cond_prob < ZERO_PROB_THRESHOLD:
                continue
            phi = sequential_measure(state, a, s_value, a1_value)
            prediction = certain_prediction(phi, a, identity, s_value, a1_value)
            m = s_obs.index.partner_index(s_value, int(np.argmin(np.abs(a.eigenvalues - a1_value))))
            a2_value = float(a.eigenvalues[m])
            chains.append(
                ChainReport(
                    s_value=s_value,
                    a1_value=a1_value,
                    a2_value=a2_value,
                    conditional_probability=cond_prob,
                    a2_predicted=prediction.value,
                    a2_stdev=prediction.stdev,
                    point_mass_residual=abs(1.0 - prediction.delta_check.probability_of(a2_value)),
                    resolution=epr_resolution_check(phi, a, b, c),
                )
            )

    return EprReport(
        scenario_label=sc.label,
        sum_spectrum=spectrum,
        per_sum=tuple(branches),
        chains=tuple(chains),
    )


def path_key(s_value: float, a1_value: float, a2_value: float) -> str:
    """Canonical serialized form of one outcome path."""
    return f"{s_value:.12g},{a1_value:.12g},{a2_value:.12g}"


@dataclass(frozen=True)
class ShotRecord:
    """Tally of sampled measurement paths (s, a1, a2 = s - a1)."""

    scenario_label: str
    seed: int
    shots: int
    counts: tuple[tuple[tuple[float, float, float], int], ...]

    def __post_init__(self):
        total = sum(count for _, count in self.counts)
        if total != self.shots:
            raise ValueError(f"counts sum to {total}, expected {self.shots}")

    @property
    def empirical(self) -> dict[tuple[float, float, float], float]:
        return {path: count / self.shots for path, count in self.counts}

    @property
    def counts_dict(self) -> dict[tuple[float, float, float], int]:
        return dict(self.counts)


def _chain_distributions(sc: Scenario):
    """Analytic sum distribution and per-sum conditional tables for sampling."""
    a = sc.obs_a
    s_obs = sum_observable(a)
    spectrum = outcome_probabilities(sc.initial_state, s_obs)
    d = len(spectrum.outcomes)
    n = a.dim
    cond_probs = np.zeros((d, n))
    populated = []
    for k, (s_value, prob) in enumerate(spectrum.outcomes):
        if prob < ZERO_PROB_THRESHOLD:
            continue
        populated.append(k)
        cond = conditional_distribution(sc.initial_state, a, s_value)
        for a1_value, p in cond.support:
            idx = int(np.argmin(np.abs(a.eigenvalues - a1_value)))
            cond_probs[k, idx] = p
    return s_obs, spectrum, cond_probs, populated


def sample_chain(sc: Scenario, shots: int, seed: int = 0) -> ShotRecord:
    """Sample ``shots`` full measurement chains, reproducibly in the seed.

    Each shot draws a sum outcome from the analytic distribution, collapses,
    draws the first-factor outcome from the conditional distribution, and
    records the implied second-factor value. The stream is counter-based, so
    identical (scenario, shots, seed) yields identical counts regardless of
    backend or evaluation order.
    """
    if not isinstance(shots, (int, np.integer)) or shots < 1:
        raise ValueError(f"shots must be a positive integer, got {shots!r}")
    if not 0 <= int(seed) <= MAX_SEED:
        raise ValueError("seed must fit in 64 bits")

    s_obs, spectrum, cond_probs, populated = _chain_distributions(sc)
    d = len(spectrum.outcomes)
    n = sc.obs_a.dim

    sum_cdf = np.cumsum(np.clip(spectrum.probabilities, 0.0, 1.0))
    sum_cdf[-1] = 1.0
    cond_cdf = np.ones((d, n))
    for k in populated:
        cond_cdf[k] = np.cumsum(np.clip(cond_probs[k], 0.0, 1.0))
        cond_cdf[k, -1] = 1.0

    counts_matrix = _kernels.sample_counts(int(seed), int(shots), sum_cdf, cond_cdf)

    a_values = sc.obs_a.eigenvalues
    counts = []
    for k in range(d):
        for idx in range(n):
            count = int(counts_matrix[k, idx])
            if count:
                s_value = spectrum.outcomes[k][0]
                a1_value = float(a_values[idx])
                m = s_obs.index.partner_index(s_value, idx)
                counts.append(((s_value, a1_value, float(a_values[m])), count))
    counts.sort(key=lambda item: item[0])
    return ShotRecord(scenario_label=sc.label, seed=int(seed), shots=int(shots), counts=tuple(counts))


@dataclass(frozen=True)
class PathComparison:
    path: tuple[float, float, float]
    analytic: float
    empirical: float
    deviation: float
    bound: float


@dataclass(frozen=True)
class EmpiricalComparison:
    """Per-path deviations of a shot record from the analytic chain distribution."""

    max_abs_deviation: float
    within_3sigma: bool
    paths: tuple[PathComparison, ...] = field(repr=False)


def compare_empirical(record: ShotRecord, sc: Scenario) -> EmpiricalComparison:
    """Check every sampled path against its analytic probability and 3-sigma band."""
    if record.scenario_label != sc.label:
        raise ValueError(
            f"record was sampled from {record.scenario_label!r}, not {sc.label!r}"
        )
    a = sc.obs_a
    s_obs, spectrum, cond_probs, populated = _chain_distributions(sc)
    analytic: dict[str, tuple[tuple[float, float, float], float]] = {}
    for k in populated:
        s_value, prob = spectrum.outcomes[k]
        for idx in range(a.dim):
            if cond_probs[k, idx] <= 0.0:
                continue
            a1_value = float(a.eigenvalues[idx])
            m = s_obs.index.partner_index(s_value, idx)
            path = (s_value, a1_value, float(a.eigenvalues[m]))
            analytic[path_key(*path)] = (path, prob * cond_probs[k, idx])

    empirical = {path_key(*path): freq for path, freq in record.empirical.items()}
    unknown = set(empirical) - set(analytic)
    if unknown:
        raise ValueError(f"record contains paths impossible under the scenario: {sorted(unknown)}")

    rows = []
    for key, (path, p) in sorted(analytic.items(), key=lambda item: item[1][0]):
        freq = empirical.get(key, 0.0)
        deviation = abs(freq - p)
        bound = 3.0 * math.sqrt(p * (1.0 - p) / record.shots)
        rows.append(PathComparison(path=path, analytic=p, empirical=freq, deviation=deviation, bound=bound))
    max_dev = max((row.deviation for row in rows), default=0.0)
    within = all(row.deviation <= row.bound for row in rows)
    return EmpiricalComparison(max_abs_deviation=max_dev, within_3sigma=within, paths=tuple(rows))
