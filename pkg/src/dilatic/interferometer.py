"""Beam-splitter / phase-shifter circuits and the triangular Reck decomposition.

Beam splitter convention on modes ``(i, j)``::

    [[cos t, -sin t * exp(1j*phi)],
     [sin t * exp(-1j*phi), cos t]]

with reflection probability ``R = sin(t)**2``.  A phase shifter multiplies
one mode by ``exp(1j*phi)``.  Circuits list elements in the order light
meets them, so the circuit matrix is ``E_last @ ... @ E_first``.
"""
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .errors import NotUnitary
from .linalg import as_matrix, dagger, unitarity_residual

PRUNE_TOL = 1e-12

BEAM_SPLITTER = "beam_splitter"
PHASE_SHIFTER = "phase_shifter"


def wrap_phase(phi):
    """Map an angle into ``(-pi, pi]``."""
    w = float(np.pi - np.mod(np.pi - phi, 2 * np.pi))
    return w


@dataclass(frozen=True)
class OpticalElement:
    kind: str
    modes: Tuple[int, ...]
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if self.kind == BEAM_SPLITTER:
            if len(self.modes) != 2 or not self.modes[0] < self.modes[1]:
                raise ValueError(f"beam splitter needs modes (i, j) with i < j, got {self.modes}")
            if not -PRUNE_TOL <= self.theta <= np.pi / 2 + PRUNE_TOL:
                raise ValueError(f"mixing angle {self.theta} outside [0, pi/2]")
        elif self.kind == PHASE_SHIFTER:
            if len(self.modes) != 1:
                raise ValueError(f"phase shifter acts on one mode, got {self.modes}")
        else:
            raise ValueError(f"unknown element kind {self.kind!r}")
        if min(self.modes) < 0:
            raise ValueError("mode indices must be nonnegative")

    @property
    def reflectivity(self):
        return float(np.sin(self.theta) ** 2)

    def block(self):
        """The 2x2 (beam splitter) or 1x1 (phase shifter) active block."""
        if self.kind == PHASE_SHIFTER:
            return np.array([[np.exp(1j * self.phi)]])
        c, s = np.cos(self.theta), np.sin(self.theta)
        e = np.exp(1j * self.phi)
        return np.array([[c, -s * e], [s * np.conj(e), c]])

    def shifted(self, mode_map):
        return OpticalElement(self.kind, tuple(int(mode_map[m]) for m in self.modes), self.theta, self.phi)


def beam_splitter(i, j, theta, phi=0.0):
    return OpticalElement(BEAM_SPLITTER, (int(i), int(j)), float(theta), wrap_phase(phi))


def phase_shifter(i, phi):
    return OpticalElement(PHASE_SHIFTER, (int(i),), 0.0, wrap_phase(phi))


class ModuleLabel(NamedTuple):
    """Names the element range ``[start, stop)`` forming one unitary module."""

    name: str
    start: int
    stop: int
    modes: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class OpticalCircuit:
    mode_count: int
    elements: Tuple[OpticalElement, ...] = ()
    module_labels: Tuple[ModuleLabel, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "module_labels", tuple(ModuleLabel(*m) for m in self.module_labels))
        for e in self.elements:
            if max(e.modes) >= self.mode_count:
                raise ValueError(f"element {e} addresses a mode >= {self.mode_count}")

    def beam_splitter_count(self):
        return sum(1 for e in self.elements if e.kind == BEAM_SPLITTER)

    def module(self, name):
        for lab in self.module_labels:
            if lab.name == name:
                return self.elements[lab.start : lab.stop]
        raise KeyError(name)

    def module_beam_splitters(self):
        return {
            lab.name: sum(1 for e in self.elements[lab.start : lab.stop] if e.kind == BEAM_SPLITTER)
            for lab in self.module_labels
        }


def concatenate(mode_count, parts):
    """Join ``(name, elements, modes)`` parts into one labelled circuit."""
    elements, labels = [], []
    for name, elems, modes in parts:
        start = len(elements)
        elements.extend(elems)
        labels.append(ModuleLabel(name, start, len(elements), None if modes is None else tuple(modes)))
    return OpticalCircuit(mode_count, tuple(elements), tuple(labels))


def element_matrix(e, mode_count):
    m = np.eye(mode_count, dtype=complex)
    idx = np.array(e.modes)
    m[np.ix_(idx, idx)] = e.block()
    return m


def recompose(c):
    """Dense matrix of a circuit: ordered product of its element matrices."""
    m = np.eye(c.mode_count, dtype=complex)
    for e in c.elements:
        m = element_matrix(e, c.mode_count) @ m
    return m


def reck_decompose(u, tol=1e-10):
    """Triangular beam-splitter decomposition of an ``N x N`` unitary.

    Entries of the last row left of the diagonal are nulled first, then the
    next row up, and so on; each nulling is one beam splitter on modes
    ``(c, r)``.  The leftover diagonal becomes trailing phase shifters.
    Identity elements are dropped, so at most ``N(N-1)/2`` beam splitters
    appear.
    """
    w = as_matrix(u, "unitary")
    n = w.shape[0]
    if w.shape[1] != n:
        raise NotUnitary(np.inf)
    res = unitarity_residual(w)
    if res > tol:
        raise NotUnitary(res)
    elements = []
    for r in range(n - 1, 0, -1):
        for c in range(r):
            a, b = w[r, c], w[r, r]
            if abs(a) == 0.0:
                continue
            theta = float(np.arctan2(abs(a), abs(b)))
            phi = float(np.angle(b) - np.angle(a))
            el = beam_splitter(c, r, theta, phi)
            blk = el.block()
            w[:, [c, r]] = w[:, [c, r]] @ dagger(blk)
            w[r, c] = 0.0
            if theta >= PRUNE_TOL:
                elements.append(el)
    for k in range(n):
        phi = float(np.angle(w[k, k]))
        if abs(phi) >= PRUNE_TOL:
            elements.append(phase_shifter(k, phi))
    return OpticalCircuit(n, tuple(elements), (ModuleLabel("U", 0, len(elements), tuple(range(n))),))


def embed_elements(circuit, modes):
    """Re-address a circuit's elements onto the global ``modes`` list."""
    return [e.shifted(modes) for e in circuit.elements]


def beam_splitter_bound(n_in, n_out):
    """Upper bound on beam splitters for a dilated ``n_out x n_in`` map."""
    return n_in**2 / 2 + n_out**2 / 2 - abs(n_in / 2 - n_out / 2)


def g_elements(sigma_prime, thetas, half, top_modes=None, bottom_modes=None):
    """Elements realising ``G``: one splitter per singular value below 1, then pi phases."""
    top = list(range(half)) if top_modes is None else list(top_modes)
    bottom = list(range(half, 2 * half)) if bottom_modes is None else list(bottom_modes)
    elements = []
    for i, theta in enumerate(thetas):
        if theta >= PRUNE_TOL:
            elements.append(beam_splitter(top[i], bottom[i], theta, np.pi))
    for i in range(len(sigma_prime)):
        elements.append(phase_shifter(bottom[i], np.pi))
    return elements


def dilation_to_circuit(d, tol=1e-10):
    """Three labelled modules ``V^H``, ``G``, ``U`` whose product is ``d.u_big``."""
    n_in, n_out, half = d.n_in, d.n_out, d.half
    v_dag = reck_decompose(dagger(d.v[:n_in, :n_in]), tol)
    u = reck_decompose(d.u[:n_out, :n_out], tol)
    g = g_elements(d.sigma_prime, d.thetas, half)
    return concatenate(
        2 * half,
        [
            ("V^H", list(v_dag.elements), range(n_in)),
            ("G", g, range(2 * half)),
            ("U", list(u.elements), range(n_out)),
        ],
    )
