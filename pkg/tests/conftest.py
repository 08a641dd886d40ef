import numpy as np
import pytest

# Random-object generators.  These use numpy.linalg (LAPACK) on purpose so the
# test oracles stay independent of the package's own Jacobi/SVD kernel.


def haar_unitary(n, rng):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_matrix(rows, cols, rng):
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_contraction(rows, cols, rng, max_norm=None):
    k = random_matrix(rows, cols, rng)
    target = rng.uniform(0.2, 1.0) if max_norm is None else max_norm
    return k * (target / np.linalg.norm(k, 2))


def random_hermitian(n, rng):
    x = random_matrix(n, n, rng)
    return x + x.conj().T


def random_psd(n, rng, rank=None):
    rank = n if rank is None else rank
    x = random_matrix(n, rank, rng)
    return x @ x.conj().T


def inv_sqrt(s):
    w, v = np.linalg.eigh(s)
    return (v / np.sqrt(w)) @ v.conj().T


def random_povm(n, dim, rng):
    """Random full-rank POVM: normalise a random PSD set by S^{-1/2} . S^{-1/2}."""
    ps = [random_psd(dim, rng) for _ in range(n)]
    si = inv_sqrt(sum(ps))
    return [0.5 * (m + m.conj().T) for m in (si @ p @ si for p in ps)]


def povm_with_projector(n, dim, unit, rng, partial=True):
    """POVM whose first element has ``unit`` eigenvalues equal to one."""
    w = haar_unitary(dim, rng)
    lam = np.ones(dim)
    lam[unit:] = rng.uniform(0.1, 0.9, size=dim - unit) if partial else 0.0
    first = (w * lam) @ w.conj().T
    rest_root = (w * np.sqrt(1.0 - lam)) @ w.conj().T
    others = [rest_root @ q @ rest_root for q in random_povm(n - 1, dim, rng)] if n > 2 else [rest_root @ rest_root]
    els = [first] + others
    return [0.5 * (m + m.conj().T) for m in els]


def trine():
    out = []
    for k in range(3):
        a = 2 * np.pi * k / 3
        f = np.array([np.cos(a), np.sin(a)])
        out.append((2.0 / 3.0) * np.outer(f, f))
    return out


def random_state(dim, rng):
    x = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return x / np.linalg.norm(x)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
