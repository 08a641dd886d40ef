"""Compile a finite POVM into a chain of unitary modules.

Layout of the compiled circuit: ``n`` lanes of ``N`` modes each.  Lane 1
is the input.  Stage ``k`` (``k < n``) rotates the still-active ports of
lane ``k`` by ``U_kL``, splits them with a diagonal dilation ``G_k`` into
a kept part (stays on lane ``k``) and a complement (moves to the same
positions on the fresh lane ``k + 1``), and finishes lane ``k`` with
``V_k``.  The complement lane carries the accumulated contraction ``C``
with ``C^H C = I - (Pi_1 + ... + Pi_k)``.  The last lane only needs
``V_n``.  That makes ``3 n - 2`` modules in total.

Ports whose complement amplitude vanishes (unit eigenvalues) are never
used again; they always sit at the front of a lane because stage
eigenvalues are sorted in descending order.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .dilation import build_g
from .errors import (
    DimensionMismatch,
    NotComplete,
    NotHermitian,
    NotPositive,
    NotUnitary,
    StageInfeasible,
)
from .interferometer import OpticalCircuit, concatenate, g_elements, reck_decompose
from .linalg import (
    as_matrix,
    cholesky_psd,
    complete_basis,
    dagger,
    hermiticity_residual,
    hermitian_eigen,
    pinv,
    svd,
    unitarity_residual,
)

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
RANK_TOL = 1e-10
SATURATION_SLACK = 1e-6


@dataclass(frozen=True)
class PovmSpec:
    dim: int
    elements: Tuple[np.ndarray, ...]
    eigen_ranges: Tuple[Tuple[float, float], ...] = ()

    @property
    def n(self):
        return len(self.elements)


@dataclass(frozen=True)
class DetectionOperator:
    a: np.ndarray
    index: int


def validate_povm(elements, dim=None):
    """Check Hermiticity, positivity and completeness of a POVM.

    Raises ``NotHermitian(i)``, ``NotPositive(i)`` or ``NotComplete`` naming
    the offending element.  Elements are symmetrised on success.
    """
    mats = [as_matrix(e, f"POVM element {i}") for i, e in enumerate(elements)]
    if len(mats) < 2:
        raise ValueError("a POVM needs at least two elements")
    if dim is None:
        dim = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape != (dim, dim):
            raise DimensionMismatch(f"element {i} has shape {m.shape}, expected {(dim, dim)}")
    clean, ranges = [], []
    for i, m in enumerate(mats):
        res = hermiticity_residual(m)
        if res > HERMITIAN_TOL:
            raise NotHermitian(res, index=i)
        m = 0.5 * (m + dagger(m))
        w = hermitian_eigen(m, tol=HERMITIAN_TOL).eigenvalues
        if w[-1] < -PSD_TOL:
            raise NotPositive(w[-1], index=i)
        clean.append(m)
        ranges.append((float(w[-1]), float(w[0])))
    total = sum(clean)
    res = float(np.max(np.abs(total - np.eye(dim))))
    if res > COMPLETENESS_TOL:
        raise NotComplete(res)
    return PovmSpec(dim, tuple(clean), tuple(ranges))


def detection_operators(p):
    """Upper-triangular ``A_i`` with ``A_i^H A_i = Pi_i``."""
    return [DetectionOperator(cholesky_psd(pi), i) for i, pi in enumerate(p.elements)]


def unit_multiplicity(pi, tol=RANK_TOL):
    w = hermitian_eigen(pi, tol=HERMITIAN_TOL).eigenvalues
    return int(np.sum(w >= 1.0 - tol))


def suggest_order(p):
    """Element order with unit-eigenvalue elements first (stable otherwise).

    Projecting out ports early shrinks every later stage.
    """
    mult = [unit_multiplicity(pi) for pi in p.elements]
    return sorted(range(p.n), key=lambda i: -mult[i])


@dataclass(frozen=True)
class ResidualContext:
    """Accumulated contraction ``C`` (active rows x N) feeding the next stage.

    ``offset`` counts the dead ports at the front of the lane; the active
    rows of ``C`` live on lane positions ``offset, offset + 1, ...``.
    """

    c: np.ndarray
    offset: int = 0

    @classmethod
    def initial(cls, dim):
        return cls(np.eye(dim, dtype=complex), 0)

    @property
    def dim(self):
        return self.c.shape[1]

    @property
    def active_dim(self):
        return self.c.shape[0]


@dataclass(frozen=True)
class StageDecomposition:
    index: int
    u_stage: np.ndarray
    sigma_star: np.ndarray
    sigma_c: np.ndarray
    v_stage: np.ndarray
    active_dim: int
    rank_drop: int
    offset: int
    pre_v: np.ndarray
    detection: DetectionOperator
    residual: ResidualContext
    final: bool = False

    @property
    def thetas(self):
        return np.arccos(np.clip(self.sigma_star, 0.0, 1.0))


def _matching_unitary(x, a, rel_tol=1e-12):
    """Unitary ``V`` with ``V x = a``, given ``x^H x == a^H a`` (both N x N)."""
    res = svd(x)
    s = res.singular_values
    scale = max(1.0, float(np.max(np.abs(x))))
    targets = []
    for j, sj in enumerate(s):
        if sj <= rel_tol * scale:
            break
        y = a @ res.v[:, j] / sj
        if targets:
            q = np.column_stack(targets)
            for _ in range(2):
                y = y - q @ (dagger(q) @ y)
        nrm = np.linalg.norm(y)
        if not nrm > 0.5:
            # image lost to roundoff; leave the direction to the completion
            break
        targets.append(y / nrm)
    q = np.column_stack(targets) if targets else np.zeros((x.shape[0], 0), dtype=complex)
    y_full = complete_basis(q, x.shape[0])
    return y_full @ dagger(res.u)


def _embed_rows(block, offset, dim):
    out = np.zeros((dim, block.shape[1]), dtype=complex)
    out[offset : offset + block.shape[0]] = block
    return out


def compile_stage(ctx, pi_next, rank_tol=RANK_TOL, index=0, detection=None, final=False, v_override=None):
    """One step of the sequential POVM construction.

    Solves ``C^H (U^H S^2 U) C = Pi`` for a unitary ``U`` and diagonal
    ``S`` on the active ports, using the pseudo-inverse of ``C`` so that
    ports already projected out are ignored.  The complement
    ``sqrt(1 - S^2) U C`` becomes the next context, with ports whose
    complement vanishes removed.

    With ``final=True`` no splitting happens: the whole residual goes to
    the outcome, after checking ``C^H C == Pi``.
    """
    pi_next = as_matrix(pi_next)
    c = ctx.c
    a_dim, dim = c.shape
    if detection is None:
        detection = DetectionOperator(cholesky_psd(pi_next), index)

    if final or a_dim == 0:
        gap = float(np.max(np.abs(dagger(c) @ c - pi_next))) if a_dim else float(np.max(np.abs(pi_next)))
        if gap > SATURATION_SLACK:
            raise StageInfeasible(index, 1.0 + gap)
        u_stage = np.eye(a_dim, dtype=complex)
        sigma_star = np.ones(a_dim)
        sigma_c = np.zeros(a_dim)
        pre = c
        residual = ResidualContext(np.zeros((0, dim), dtype=complex), ctx.offset + a_dim)
        drop = 0
    else:
        c_plus = pinv(c, rank_tol)
        m = dagger(c_plus) @ pi_next @ c_plus
        eig = hermitian_eigen(0.5 * (m + dagger(m)), tol=np.inf)
        lam = eig.eigenvalues
        if lam.size and np.sqrt(max(lam[0], 0.0)) > 1.0 + SATURATION_SLACK:
            raise StageInfeasible(index, np.sqrt(lam[0]))
        lam = np.clip(lam, 0.0, 1.0)
        dead = (1.0 - lam) <= rank_tol
        lam[dead] = 1.0
        lam[lam <= rank_tol] = 0.0
        sigma_star = np.sqrt(lam)
        sigma_c = np.sqrt(1.0 - lam)
        u_stage = dagger(eig.eigenvectors)
        rotated = u_stage @ c
        pre = sigma_star[:, None] * rotated
        drop = int(np.sum(dead))
        nxt = (sigma_c[:, None] * rotated)[drop:]
        residual = ResidualContext(nxt, ctx.offset + drop)

    pre_v = _embed_rows(pre, ctx.offset, dim)
    stage = StageDecomposition(
        index=index,
        u_stage=u_stage,
        sigma_star=sigma_star,
        sigma_c=sigma_c,
        v_stage=np.eye(dim, dtype=complex),
        active_dim=a_dim,
        rank_drop=drop,
        offset=ctx.offset,
        pre_v=pre_v,
        detection=detection,
        residual=residual,
        final=final,
    )
    return _with_v(stage, choose_v(stage, v_override))


def _with_v(stage, v):
    fields = dict(stage.__dict__)
    fields["v_stage"] = v
    return StageDecomposition(**fields)


def choose_v(stage, v_override=None, tol=1e-10):
    """Output unitary of a stage.

    By default the unitary that turns the stage's outcome block into the
    upper-triangular detection operator.  Any unitary override of the right
    size is accepted instead; outcome probabilities do not depend on it.
    """
    dim = stage.pre_v.shape[0]
    if v_override is not None:
        v = as_matrix(v_override, "V override")
        if v.shape != (dim, dim):
            raise DimensionMismatch(f"V override must be {dim}x{dim}, got {v.shape}")
        res = unitarity_residual(v)
        if res > tol:
            raise NotUnitary(res)
        return v
    return _matching_unitary(stage.pre_v, stage.detection.a)


@dataclass(frozen=True)
class UnitaryModule:
    name: str
    matrix: np.ndarray
    modes: Tuple[int, ...]
    circuit: OpticalCircuit


@dataclass(frozen=True)
class PovmCircuitBundle:
    dim: int
    stages: Tuple[StageDecomposition, ...]
    modules: Tuple[UnitaryModule, ...]
    detection_ops: Tuple[DetectionOperator, ...]
    routing: Dict[int, Tuple[int, int]]
    total_modes: int
    circuit: OpticalCircuit
    order: Tuple[int, ...] = field(default=())

    @property
    def n(self):
        return len(self.detection_ops)

    def beam_splitter_count(self):
        return self.circuit.beam_splitter_count()


def _lane(k, dim):
    return list(range(k * dim, (k + 1) * dim))


def _module(name, matrix, modes, tol):
    if len(modes) == 0:
        return UnitaryModule(name, matrix, (), OpticalCircuit(0))
    local = reck_decompose(matrix, tol)
    return UnitaryModule(name, matrix, tuple(modes), local)


def compile_povm(p, order="given", v_overrides=None, rank_tol=RANK_TOL, tol=1e-10):
    """Compile a validated POVM into a ``PovmCircuitBundle``.

    Args:
        p: ``PovmSpec`` from ``validate_povm``.
        order: ``"given"``, ``"auto"`` (see ``suggest_order``) or an explicit
            permutation of outcome indices.
        v_overrides: optional ``{outcome index: unitary}`` replacing the
            default output unitaries.
        rank_tol: threshold on ``1 - sigma^2`` below which a port counts as
            projected out.
    """
    n, dim = p.n, p.dim
    if isinstance(order, str):
        if order == "given":
            order = list(range(n))
        elif order == "auto":
            order = suggest_order(p)
        else:
            raise ValueError(f"unknown order {order!r}")
    order = [int(i) for i in order]
    if sorted(order) != list(range(n)):
        raise ValueError(f"order must be a permutation of 0..{n - 1}")
    v_overrides = v_overrides or {}
    dets = detection_operators(p)

    ctx = ResidualContext.initial(dim)
    stages = []
    for pos, idx in enumerate(order):
        final = pos == n - 1
        st = compile_stage(
            ctx, p.elements[idx], rank_tol, index=idx, detection=dets[idx],
            final=final, v_override=v_overrides.get(idx),
        )
        stages.append(st)
        ctx = st.residual

    modules = []
    for pos, st in enumerate(stages):
        lane = _lane(pos, dim)
        k = pos + 1
        if not st.final:
            active = lane[st.offset : st.offset + st.active_dim]
            below = _lane(pos + 1, dim)[st.offset : st.offset + st.active_dim]
            u_name = "U_1" if k == 1 else f"U_{k}L"
            modules.append(_module(u_name, st.u_stage, active, tol))
            g_local = build_g(st.sigma_star) if st.active_dim else np.zeros((0, 0), dtype=complex)
            g_elems = g_elements(st.sigma_star, st.thetas, st.active_dim)
            g_circ = OpticalCircuit(2 * st.active_dim, tuple(g_elems))
            modules.append(UnitaryModule(f"G_{k}", g_local, tuple(active + below), g_circ))
        modules.append(_module(f"V_{k}", st.v_stage, lane, tol))

    total = n * dim
    parts = [(m.name, [e.shifted(m.modes) for e in m.circuit.elements], m.modes) for m in modules]
    circuit = concatenate(total, parts)
    routing = {st.index: (pos * dim, (pos + 1) * dim) for pos, st in enumerate(stages)}
    return PovmCircuitBundle(
        dim=dim,
        stages=tuple(stages),
        modules=tuple(modules),
        detection_ops=tuple(dets),
        routing=routing,
        total_modes=total,
        circuit=circuit,
        order=tuple(order),
    )


def bundle_unitary(bundle):
    """Dense product of the module unitaries (independent of the element lists)."""
    total = bundle.total_modes
    u = np.eye(total, dtype=complex)
    for m in bundle.modules:
        full = np.eye(total, dtype=complex)
        idx = np.array(m.modes)
        full[np.ix_(idx, idx)] = m.matrix
        u = full @ u
    return u


def outcome_blocks(bundle, unitary=None):
    """``{outcome: N x N block}`` mapping input amplitudes to each outcome lane."""
    if unitary is None:
        unitary = bundle_unitary(bundle)
    dim = bundle.dim
    return {i: unitary[lo:hi, :dim] for i, (lo, hi) in bundle.routing.items()}
