"""Unitary dilation ``U_big = U G V^H`` of a contraction ``K``.

A contraction with ``N2 x N1`` matrix ``K`` is embedded as the top-left
block of a ``2 max(N1, N2)`` square unitary.  The input amplitudes are
padded with vacuum (zeros) on the ancilla modes.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotContraction
from .linalg import as_matrix, dagger, operator_norm, svd

CONTRACTION_SLACK = 1e-9


@dataclass(frozen=True)
class ContractionMap:
    """A validated linear map ``K`` (``n_out x n_in``) with ``||K|| <= 1``."""

    k: np.ndarray
    norm: float
    scale: float = 1.0

    @property
    def n_in(self):
        return self.k.shape[1]

    @property
    def n_out(self):
        return self.k.shape[0]


@dataclass(frozen=True)
class DilationResult:
    u_big: np.ndarray
    u: np.ndarray
    v: np.ndarray
    g: np.ndarray
    sigma_prime: np.ndarray
    thetas: np.ndarray
    singular_values: np.ndarray
    n_in: int
    n_out: int

    @property
    def mode_count(self):
        return self.u_big.shape[0]

    @property
    def half(self):
        return self.mode_count // 2


def validate_contraction(k, policy="reject"):
    """Check ``||K|| <= 1`` and wrap ``K`` as a ``ContractionMap``.

    Args:
        k: The ``N2 x N1`` matrix.
        policy: ``"reject"`` raises ``NotContraction`` when the norm exceeds
            ``1 + 1e-9``; ``"rescale"`` divides by the norm instead and records
            the factor in ``ContractionMap.scale``.
    """
    if policy not in ("reject", "rescale"):
        raise ValueError(f"unknown policy {policy!r}")
    k = as_matrix(k, "contraction")
    norm = operator_norm(k)
    if norm <= 1.0 + CONTRACTION_SLACK:
        return ContractionMap(k, norm)
    if policy == "reject":
        raise NotContraction(norm)
    return ContractionMap(k / norm, 1.0, scale=norm)


def extend_sigma(singular_values, n_in, n_out):
    """Pad the singular values with ones up to length ``max(n_in, n_out)``."""
    s = np.abs(np.asarray(singular_values, dtype=float))
    m, r = max(n_in, n_out), min(n_in, n_out)
    if len(s) != r:
        raise DimensionMismatch(f"expected {r} singular values, got {len(s)}")
    return np.concatenate([s, np.ones(m - r)])


def build_g(sigma_prime):
    """Real orthogonal dilation ``[[S, C], [C, -S]]`` with ``C = sqrt(1 - S^2)``."""
    s = np.asarray(sigma_prime, dtype=float)
    if np.any(s < 0) or np.any(s > 1.0):
        raise ValueError("sigma_prime entries must lie in [0, 1]")
    c = np.sqrt(1.0 - s * s)
    return np.block([[np.diag(s), np.diag(c)], [np.diag(c), -np.diag(s)]]).astype(complex)


def _embed(m, size):
    out = np.eye(size, dtype=complex)
    out[: m.shape[0], : m.shape[1]] = m
    return out


def dilate(k):
    """Unitary dilation of a contraction.

    ``k`` may be a ``ContractionMap`` or a raw matrix (validated with the
    reject policy).  Singular values in ``(1, 1 + 1e-9]`` are clamped to 1.
    """
    if not isinstance(k, ContractionMap):
        k = validate_contraction(k)
    n_out, n_in = k.k.shape
    half = max(n_in, n_out)
    size = 2 * half
    res = svd(k.k)
    sv = res.singular_values
    if np.any(sv > 1.0 + CONTRACTION_SLACK):
        raise NotContraction(float(sv.max()))
    sv = np.clip(sv, 0.0, 1.0)
    sigma_prime = extend_sigma(sv, n_in, n_out)
    g = build_g(sigma_prime)
    u = _embed(res.u, size)
    v = _embed(res.v, size)
    u_big = u @ g @ dagger(v)
    return DilationResult(
        u_big=u_big,
        u=u,
        v=v,
        g=g,
        sigma_prime=sigma_prime,
        thetas=np.arccos(sv),
        singular_values=sv,
        n_in=n_in,
        n_out=n_out,
    )


def apply_dilation(d, amplitudes):
    """Pad ``amplitudes`` with vacuum and apply ``d.u_big``."""
    x = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if x.shape[0] != d.n_in:
        raise DimensionMismatch(f"input has {x.shape[0]} amplitudes, map expects {d.n_in}")
    padded = np.zeros(d.mode_count, dtype=complex)
    padded[: d.n_in] = x
    return d.u_big @ padded
