"""Single-photon propagation, POVM statistics and Kraus-map outputs.

States live in the one-photon sector: a qudit over ``N`` spatial modes is
just its amplitude vector.  Mixed states are handled at the density-matrix
level only.
"""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .dilation import ContractionMap, dilate, validate_contraction
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    KrausBoundViolated,
    NotPositive,
    ZeroOutcome,
)
from .interferometer import dilation_to_circuit, recompose
from .linalg import as_matrix, dagger, hermiticity_residual, hermitian_eigen, svd

NORM_SLACK = 1e-9
ZERO_NORM = 1e-14


@dataclass(frozen=True)
class QuditState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if a.size == 0 or not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be a non-empty finite vector")
        if np.linalg.norm(a) > 1.0 + NORM_SLACK:
            raise ValueError(f"state norm {np.linalg.norm(a)} exceeds 1")
        object.__setattr__(self, "amplitudes", a)

    @property
    def dim(self):
        return self.amplitudes.shape[0]

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def density(self):
        return DensityMatrix(np.outer(self.amplitudes, np.conj(self.amplitudes)))


@dataclass(frozen=True)
class DensityMatrix:
    rho: np.ndarray

    def __post_init__(self):
        r = as_matrix(self.rho, "density matrix")
        if r.shape[0] != r.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got {r.shape}")
        res = hermiticity_residual(r)
        if res > 1e-10:
            raise ValueError(f"density matrix not Hermitian (residual {res:.3e})")
        r = 0.5 * (r + dagger(r))
        low = hermitian_eigen(r, tol=1e-10).eigenvalues[-1]
        if low < -1e-10:
            raise NotPositive(low)
        if np.real(np.trace(r)) > 1.0 + NORM_SLACK:
            raise ValueError(f"trace {np.real(np.trace(r))} exceeds 1")
        object.__setattr__(self, "rho", r)

    @property
    def dim(self):
        return self.rho.shape[0]

    @property
    def trace(self):
        return float(np.real(np.trace(self.rho)))

    def normalized(self):
        t = self.trace
        if t < ZERO_NORM:
            raise ZeroOutcome(t)
        return DensityMatrix(self.rho / t)


@dataclass(frozen=True)
class MeasurementRecord:
    outcome_probs: np.ndarray
    outcome_states: List[Optional[QuditState]]
    shots: Optional[int] = None
    seed: Optional[int] = None
    counts: Optional[np.ndarray] = None


def _amplitudes(psi):
    if isinstance(psi, QuditState):
        return psi.amplitudes
    return QuditState(psi).amplitudes


def propagate(c, psi):
    """Send a single photon through ``c`` element by element.

    Input shorter than the circuit is padded with vacuum modes.
    """
    x = _amplitudes(psi)
    if x.shape[0] > c.mode_count:
        raise DimensionMismatch(f"state has {x.shape[0]} modes, circuit has {c.mode_count}")
    out = np.zeros(c.mode_count, dtype=complex)
    out[: x.shape[0]] = x
    for e in c.elements:
        idx = list(e.modes)
        out[idx] = e.block() @ out[idx]
    return QuditState(out)


def apply_pure_map(k, psi):
    """Normalised ``K psi`` and its success probability ``<psi|K^H K|psi>``."""
    if not isinstance(k, ContractionMap):
        k = validate_contraction(k)
    x = _amplitudes(psi)
    if x.shape[0] != k.n_in:
        raise DimensionMismatch(f"state has {x.shape[0]} modes, map expects {k.n_in}")
    if abs(np.linalg.norm(x) - 1.0) > NORM_SLACK:
        raise ValueError("input state must be normalised")
    y = k.k @ x
    nrm = float(np.linalg.norm(y))
    if nrm < ZERO_NORM:
        raise ZeroOutcome(nrm)
    return QuditState(y / nrm), nrm * nrm


def _kraus_matrices(kraus):
    mats = [k.k if isinstance(k, ContractionMap) else as_matrix(k, "Kraus operator") for k in kraus]
    if not mats:
        raise ValueError("need at least one Kraus operator")
    shape = mats[0].shape
    for m in mats:
        if m.shape != shape:
            raise DimensionMismatch("Kraus operators must share one shape")
    return mats


def apply_quantum_operation(kraus, rho):
    """``E(rho) = sum_i K_i rho K_i^H``, normalised, with its trace as probability."""
    mats = _kraus_matrices(kraus)
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    if mats[0].shape[1] != rho.dim:
        raise DimensionMismatch(f"rho is {rho.dim}-dimensional, Kraus maps expect {mats[0].shape[1]}")
    bound = sum(dagger(m) @ m for m in mats)
    top = hermitian_eigen(bound, tol=np.inf).eigenvalues[0]
    if top > 1.0 + NORM_SLACK:
        raise KrausBoundViolated(top)
    out = sum(m @ rho.rho @ dagger(m) for m in mats)
    out = 0.5 * (out + dagger(out))
    prob = float(np.real(np.trace(out)))
    if prob < ZERO_NORM:
        raise ZeroOutcome(np.sqrt(max(prob, 0.0)))
    return DensityMatrix(out / prob), prob


def draw_seed():
    return int(np.random.SeedSequence().entropy % (2**63))


def sample_counts(probs, shots, seed):
    """Multinomial counts from a PCG64 generator seeded with ``seed``."""
    rng = np.random.Generator(np.random.PCG64(seed))
    p = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    return rng.multinomial(int(shots), p / p.sum())


def measure_povm(bundle, psi, shots=None, seed=None):
    """Outcome probabilities and post-measurement states from a compiled POVM.

    Probabilities are squared norms of the routed output lanes after
    propagating ``psi`` through the bundle's circuit.  With ``shots`` a
    multinomial sample is drawn; a missing seed is drawn fresh and stored in
    the record.
    """
    x = _amplitudes(psi)
    if x.shape[0] != bundle.dim:
        raise DimensionMismatch(f"state has {x.shape[0]} modes, POVM acts on {bundle.dim}")
    if abs(np.linalg.norm(x) - 1.0) > NORM_SLACK:
        raise ValueError("input state must be normalised")
    out = propagate(bundle.circuit, x).amplitudes
    probs = np.zeros(bundle.n)
    states = []
    for i in range(bundle.n):
        lo, hi = bundle.routing[i]
        block = out[lo:hi]
        probs[i] = float(np.real(np.vdot(block, block)))
        nrm = np.sqrt(probs[i])
        states.append(QuditState(block / nrm) if nrm > ZERO_NORM else None)
    counts = None
    if shots is not None:
        if seed is None:
            seed = draw_seed()
        counts = sample_counts(probs, shots, seed)
    return MeasurementRecord(probs, states, shots, seed, counts)


def dephasing_mask(bundle):
    """Boolean mask keeping only the diagonal (outcome, outcome) lane blocks."""
    labels = np.full(bundle.total_modes, -1)
    for i, (lo, hi) in bundle.routing.items():
        labels[lo:hi] = i
    return labels[:, None] == labels[None, :]


def mixing_contraction(bundle):
    """``(1/sqrt(n)) [I I ... I]`` folding every outcome lane onto one subspace."""
    dim, n = bundle.dim, bundle.n
    ell = np.zeros((dim, bundle.total_modes), dtype=complex)
    for lo, hi in bundle.routing.values():
        ell[:, lo:hi] = np.eye(dim)
    return ell / np.sqrt(n)


def dephase_and_mix(bundle, rho):
    """Dephase the extended output and fold the outcome lanes together.

    Returns the unnormalised ``(sum_i A_i rho A_i^H) / n`` (trace ``1/n``);
    call ``.normalized()`` for the mixture itself.
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    if rho.dim != bundle.dim:
        raise DimensionMismatch(f"rho is {rho.dim}-dimensional, POVM acts on {bundle.dim}")
    u = recompose(bundle.circuit)[:, : bundle.dim]
    extended = u @ rho.rho @ dagger(u)
    dephased = np.where(dephasing_mask(bundle), extended, 0.0)
    ell = mixing_contraction(bundle)
    return DensityMatrix(ell @ dephased @ dagger(ell))


def prepare_qudit(target):
    """Circuit turning a photon in mode 0 into ``sum_i c_i a_i^H |0>`` on modes ``0..N-1``.

    Sub-normalised targets are allowed; the missing weight leaks into the
    ancilla modes.
    """
    t = _amplitudes(target)
    k = validate_contraction(t.reshape(-1, 1))
    return dilation_to_circuit(dilate(k))


def entanglement_filter(schmidt):
    """Local diagonal filter equalising the Schmidt coefficients of ``sum_i c_i |ii>``.

    Returns the contraction ``diag(min(c) / c_i)`` and its success
    probability ``N * min(c)^2``.
    """
    c = np.asarray(schmidt, dtype=float).reshape(-1)
    if c.size == 0:
        raise DegenerateInput("no Schmidt coefficients given")
    if np.any(c <= 0.0):
        raise DegenerateInput("Schmidt coefficients must be strictly positive")
    if abs(np.sum(c * c) - 1.0) > NORM_SLACK:
        raise ValueError(f"Schmidt coefficients square-sum to {np.sum(c * c)}, expected 1")
    cmin = float(c.min())
    k = validate_contraction(np.diag(cmin / c))
    return k, c.size * cmin * cmin


def schmidt_coefficients(amplitude_matrix):
    """Schmidt coefficients of a normalised bipartite amplitude matrix."""
    m = as_matrix(amplitude_matrix)
    m = m / np.linalg.norm(m)
    return svd(m).singular_values


def filtered_state(k, schmidt):
    """Amplitude matrix ``K diag(c)`` of ``(K x I) sum_i c_i |ii>`` (unnormalised)."""
    kk = k.k if isinstance(k, ContractionMap) else as_matrix(k)
    return kk @ np.diag(np.asarray(schmidt, dtype=float))

