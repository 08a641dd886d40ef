"""Dense complex linear algebra kernel.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
The eigensolver is a cyclic (round-robin ordered) Jacobi method, and the
SVD is assembled from it by diagonalising ``K K^H`` or ``K^H K``,
whichever is smaller.  No LAPACK eigen/SVD routine is used, so results are
reproducible across platforms.
"""
from typing import NamedTuple

import numpy as np

from .errors import NoConvergence, NotHermitian, NotPositive

EIGEN_CONVERGENCE = 1e-14
EIGEN_STALL = 1e-12
MAX_SWEEPS = 100
NEGATIVE_CLAMP = 1e-12


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class SvdResult(NamedTuple):
    u: np.ndarray
    v: np.ndarray
    singular_values: np.ndarray

    def sigma_matrix(self):
        """Rectangular ``N2 x N1`` diagonal matrix of the singular values."""
        s = np.zeros((self.u.shape[0], self.v.shape[0]))
        r = len(self.singular_values)
        s[:r, :r] = np.diag(self.singular_values)
        return s

    def reconstruct(self):
        return self.u @ self.sigma_matrix() @ self.v.conj().T


def as_matrix(m, name="matrix"):
    """Coerce ``m`` to a finite 2-D complex array (a fresh copy)."""
    a = np.array(m, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def dagger(m):
    return np.conj(np.transpose(m))


def hermiticity_residual(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def unitarity_residual(u):
    u = np.asarray(u)
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[1]))))


def _round_robin(n):
    """Rounds of disjoint index pairs covering every pair exactly once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        p, q = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a < n and b < n:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=int), np.array(q, dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _off_norm(a):
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _fix_phases(v):
    """Make each column's largest-magnitude entry real and nonnegative."""
    idx = np.argmax(np.abs(v), axis=0)
    pivots = v[idx, np.arange(v.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0, np.conj(pivots) / np.where(mags > 0, mags, 1.0), 1.0)
    return v * phases[np.newaxis, :]


def hermitian_eigen(m, tol=1e-10):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Args:
        m: Square Hermitian matrix.
        tol: Allowed deviation ``max |M - M^H|`` before ``NotHermitian``.

    Returns:
        HermitianEigen with eigenvalues in descending order and orthonormal
        eigenvector columns.  Each column is phased so that its first
        largest-magnitude component is real and nonnegative.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    res = hermiticity_residual(a)
    if res > tol:
        raise NotHermitian(res)
    a = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(a))

    if n > 1 and scale > 0.0:
        rounds = _round_robin(n)
        off = _off_norm(a)
        prev = np.inf
        sweeps = 0
        while off > EIGEN_CONVERGENCE * scale:
            # roundoff floor: off-diagonal mass no longer shrinking
            if off <= EIGEN_STALL * scale and off > 0.5 * prev:
                break
            if sweeps >= MAX_SWEEPS:
                raise NoConvergence(sweeps, off)
            for p, q in rounds:
                _rotate(a, v, p, q)
            sweeps += 1
            prev, off = off, _off_norm(a)

    w = np.real(np.diag(a)).copy()
    order = np.argsort(-w, kind="stable")
    return HermitianEigen(w[order], _fix_phases(v[:, order]))


def _rotate(a, v, p, q):
    """Annihilate a[p, q] for every (p, q) pair of one round, in place."""
    apq = a[p, q]
    r = np.abs(apq)
    live = r > 1e-280
    if not np.any(live):
        return
    p, q, apq, r = p[live], q[live], apq[live], r[live]
    phase = apq / r
    app = np.real(a[p, p])
    aqq = np.real(a[q, q])
    theta = (aqq - app) / (2.0 * r)
    sgn = np.where(theta >= 0.0, 1.0, -1.0)
    t = sgn / (np.abs(theta) + np.hypot(theta, 1.0))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # J = diag(1, conj(phase)) @ [[c, s], [-s, c]]
    j00 = c.astype(complex)
    j01 = s.astype(complex)
    j10 = -s * np.conj(phase)
    j11 = c * np.conj(phase)

    cp, cq = a[:, p].copy(), a[:, q].copy()
    a[:, p] = cp * j00 + cq * j10
    a[:, q] = cp * j01 + cq * j11
    rp, rq = a[p, :].copy(), a[q, :].copy()
    a[p, :] = np.conj(j00)[:, None] * rp + np.conj(j10)[:, None] * rq
    a[q, :] = np.conj(j01)[:, None] * rp + np.conj(j11)[:, None] * rq
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = np.real(a[p, p])
    a[q, q] = np.real(a[q, q])

    vp, vq = v[:, p].copy(), v[:, q].copy()
    v[:, p] = vp * j00 + vq * j10
    v[:, q] = vp * j01 + vq * j11


def _orthogonalize(x, q):
    """Project ``x`` off the columns of ``q`` twice (classical GS with reorthogonalisation)."""
    if q.shape[1] == 0:
        return x
    for _ in range(2):
        x = x - q @ (dagger(q) @ x)
    return x


def complete_basis(q, n=None):
    """Extend orthonormal columns ``q`` (n x r) to an n x n unitary.

    New columns are taken greedily from the complement projector, picking the
    largest remaining column each time, so the result is deterministic.
    """
    q = np.asarray(q, dtype=complex)
    if n is None:
        n = q.shape[0]
    q = q.reshape(n, -1)
    need = n - q.shape[1]
    if need <= 0:
        return q.copy()
    cand = _orthogonalize(np.eye(n, dtype=complex), q)
    new = []
    for _ in range(need):
        norms = np.linalg.norm(cand, axis=0)
        k = int(np.argmax(norms))
        x = cand[:, k] / norms[k]
        basis = np.column_stack([q] + new) if new else q
        x = _orthogonalize(x[:, None], basis)[:, 0]
        x /= np.linalg.norm(x)
        new.append(x[:, None])
        cand = cand - np.outer(x, np.conj(x) @ cand)
        cand[:, k] = 0.0
    return np.column_stack([q] + new)


def svd(k, tol=1e-10):
    """Singular value decomposition ``K = U Sigma V^H`` built on ``hermitian_eigen``.

    For an ``N2 x N1`` matrix with ``N1 >= N2`` the ``N2 x N2`` Gram matrix
    ``K K^H`` is diagonalised to give ``U``; otherwise ``K^H K`` gives ``V``.
    The partner unitary is formed from the images of those eigenvectors,
    orthonormalised, and completed to a full basis.
    """
    k = as_matrix(k)
    n2, n1 = k.shape
    if n1 >= n2:
        u, s, v = _svd_wide(k, tol)
    else:
        v, s, u = _svd_wide(dagger(k), tol)
    return SvdResult(u, v, s)


def _svd_wide(k, tol):
    """SVD of a wide (rows <= cols) matrix; returns (left, sigma, right)."""
    rows, cols = k.shape
    gram = k @ dagger(k)
    left = hermitian_eigen(gram, tol=max(tol, 1e-12 * max(1.0, float(np.max(np.abs(gram)))))).eigenvectors
    images = dagger(k) @ left
    scale = max(float(np.linalg.norm(k)), np.finfo(float).tiny)
    sig = np.zeros(rows)
    right_cols = []
    kept = []
    for j in range(rows):
        basis = np.column_stack(right_cols) if right_cols else np.zeros((cols, 0), dtype=complex)
        w = _orthogonalize(images[:, j : j + 1], basis)[:, 0]
        nrm = float(np.linalg.norm(w))
        if nrm <= 1e-15 * scale:
            continue
        sig[j] = nrm
        right_cols.append(w / nrm)
        kept.append(j)
    order = sorted(range(rows), key=lambda j: -sig[j])
    left = left[:, order]
    sig = sig[order]
    # kept right vectors first in sigma order; completion fills the rest
    pos = {j: i for i, j in enumerate(kept)}
    ordered = [right_cols[pos[j]] for j in order if j in pos]
    q = np.column_stack(ordered) if ordered else np.zeros((cols, 0), dtype=complex)
    right = complete_basis(q, cols)
    return left, sig, right


def cholesky_psd(p, tol=1e-12):
    """Upper-triangular ``A`` with ``A^H A = P`` for a positive semidefinite ``P``.

    Pivots that fall below ``tol`` (relative to the largest diagonal entry)
    zero the corresponding row, so rank-deficient inputs give ``A`` with
    zero rows instead of failing.
    """
    a = as_matrix(p)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    eig = hermitian_eigen(a, tol=max(tol, 1e-12))
    if eig.eigenvalues[-1] < -max(tol, NEGATIVE_CLAMP):
        raise NotPositive(eig.eigenvalues[-1])
    a = 0.5 * (a + dagger(a))
    floor = tol * max(1.0, float(np.max(np.real(np.diag(a)))))
    r = np.zeros((n, n), dtype=complex)
    for j in range(n):
        pivot = float(np.real(a[j, j] - np.vdot(r[:j, j], r[:j, j])))
        if pivot <= floor:
            continue
        d = np.sqrt(pivot)
        r[j, j] = d
        r[j, j + 1 :] = (a[j, j + 1 :] - dagger(r[:j, j]) @ r[:j, j + 1 :]) / d
    return r


def sqrt_psd(p, tol=1e-10):
    """Hermitian PSD square root of a Hermitian PSD matrix."""
    eig = hermitian_eigen(p, tol=tol)
    w = eig.eigenvalues
    if w[-1] < -max(tol, NEGATIVE_CLAMP):
        raise NotPositive(w[-1])
    v = eig.eigenvectors
    root = np.sqrt(np.clip(w, 0.0, None))
    s = (v * root[np.newaxis, :]) @ dagger(v)
    return 0.5 * (s + dagger(s))


def pinv_diag(d, rank_tol=1e-10):
    d = np.asarray(d, dtype=float)
    out = np.zeros_like(d)
    big = d > rank_tol
    out[big] = 1.0 / d[big]
    return out


def operator_norm(m):
    """Largest singular value of ``m``."""
    a = as_matrix(m)
    gram = dagger(a) @ a if a.shape[1] <= a.shape[0] else a @ dagger(a)
    top = hermitian_eigen(gram, tol=np.inf).eigenvalues[0]
    return float(np.sqrt(max(top, 0.0)))


def pinv(m, rank_tol=1e-10):
    """Moore-Penrose pseudo-inverse via ``svd`` and ``pinv_diag``."""
    res = svd(m)
    r = len(res.singular_values)
    inv = pinv_diag(res.singular_values, rank_tol)
    return (res.v[:, :r] * inv[np.newaxis, :]) @ dagger(res.u[:, :r])
