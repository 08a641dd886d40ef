"""``dilatic`` command line: compile-map, compile-povm, simulate, verify.

Exit codes: 0 success, 1 verification failure, 2 domain-validation
failure, 3 I/O or parse failure.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .dilation import dilate, validate_contraction
from .errors import DilaticError, DimensionMismatch, DomainError
from .fileio import (
    CircuitDocument,
    FormatError,
    dump_circuit,
    load_circuit,
    load_matrix,
    write_text,
)
from .interferometer import beam_splitter_bound, dilation_to_circuit, recompose, reck_decompose
from .linalg import dagger
from .povm import compile_povm, validate_povm
from .simulator import draw_seed, measure_povm, propagate, sample_counts

EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3
DEFAULT_TOL = 1e-10
TOL_ENV = "DILATIC_TOL"


def default_tol():
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError:
        raise FormatError(f"{TOL_ENV}={raw!r} is not a number") from None


def _fmt_list(xs, digits=12):
    return "[" + ", ".join(f"{x:.{digits}g}" for x in xs) + "]"


def _fmt_complex(z):
    return f"{z.real:+.12g}{z.imag:+.12g}j"


class Reporter:
    """Collects ``key: value`` report lines; goes to stderr when stdout carries data."""

    def __init__(self, stream):
        self.stream = stream

    def __call__(self, key, value=None):
        line = key if value is None else f"{key}: {value}"
        print(line, file=self.stream)


def _header(report, tol, seed=None):
    report("dilatic", __version__)
    report("tolerance", f"{tol:.3g}")
    if seed is not None:
        report("seed", seed)


def cmd_compile_map(args):
    tol = args.tol if args.tol is not None else default_tol()
    doc = load_matrix(args.input)
    report = Reporter(sys.stderr if args.output == "-" else sys.stdout)
    _header(report, tol)
    if doc.kind == "unitary":
        circ = reck_decompose(doc.data, tol)
        residual = float(np.max(np.abs(recompose(circ) - doc.data)))
        n = doc.data.shape[0]
        write_text(args.output, dump_circuit(CircuitDocument("unitary", circ, n_in=n, n_out=n)))
        report("N", n)
        report("beam splitters", circ.beam_splitter_count())
        report("bound", n * (n - 1) // 2)
        report("residual", f"{residual:.3e}")
        return EXIT_OK if residual <= tol else EXIT_VERIFY
    if doc.kind != "contraction":
        raise DimensionMismatch(f"compile-map needs a contraction file, got kind {doc.kind!r}")
    k = validate_contraction(doc.data, "rescale" if args.rescale else "reject")
    d = dilate(k)
    circ = dilation_to_circuit(d, tol=max(tol, 1e-10))
    block = recompose(circ)[: k.n_out, : k.n_in]
    residual = float(np.max(np.abs(block - k.k)))
    meta = {"singular_values": [float(s) for s in d.singular_values], "scale": k.scale}
    write_text(args.output, dump_circuit(CircuitDocument("map", circ, n_in=k.n_in, n_out=k.n_out, meta=meta)))
    report("N1 (input)", k.n_in)
    report("N2 (output)", k.n_out)
    if k.scale != 1.0:
        report("rescaled by", f"{k.scale:.15g}")
    report("singular values", _fmt_list(d.singular_values))
    for name, count in circ.module_beam_splitters().items():
        report(f"module {name}", f"{count} beam splitters")
    report("beam splitters", circ.beam_splitter_count())
    report("bound", f"{beam_splitter_bound(k.n_in, k.n_out):g}")
    report("residual", f"{residual:.3e}")
    return EXIT_OK if residual <= tol else EXIT_VERIFY


def cmd_compile_povm(args):
    tol = args.tol if args.tol is not None else default_tol()
    doc = load_matrix(args.input)
    if doc.kind != "povm":
        raise DimensionMismatch(f"compile-povm needs a povm file, got kind {doc.kind!r}")
    spec = validate_povm(doc.data)
    bundle = compile_povm(spec, order=args.order, tol=max(tol, 1e-10))
    report = Reporter(sys.stderr if args.output == "-" else sys.stdout)
    _header(report, tol)
    report("N", spec.dim)
    report("outcomes", spec.n)
    report("order", " ".join(str(i) for i in bundle.order))
    for pos, st in enumerate(bundle.stages, start=1):
        if st.final:
            report(f"stage {pos} (outcome {st.index})", f"final, active ports {st.active_dim}")
        else:
            report(
                f"stage {pos} (outcome {st.index})",
                f"sigma* {_fmt_list(st.sigma_star, 10)}, rank drop D={st.rank_drop}, active ports {st.active_dim}",
            )
    report("modules", len(bundle.modules))
    report("module sequence", " ".join(m.name for m in bundle.modules))
    report("beam splitters", bundle.beam_splitter_count())
    report("total modes", bundle.total_modes)
    u = recompose(bundle.circuit)
    residual = 0.0
    for i, (lo, hi) in bundle.routing.items():
        blk = u[lo:hi, : spec.dim]
        residual = max(residual, float(np.max(np.abs(dagger(blk) @ blk - spec.elements[i]))))
    report("residual", f"{residual:.3e}")
    out = CircuitDocument(
        "povm",
        bundle.circuit,
        dim=spec.dim,
        routing=dict(bundle.routing),
        detection_ops=[d.a for d in bundle.detection_ops],
        meta={
            "order": list(bundle.order),
            "stages": [
                {"outcome": st.index, "sigma_star": [float(s) for s in st.sigma_star],
                 "rank_drop": st.rank_drop, "active_dim": st.active_dim, "final": st.final}
                for st in bundle.stages
            ],
        },
    )
    write_text(args.output, dump_circuit(out))
    return EXIT_OK if residual <= max(tol, 1e-8) else EXIT_VERIFY


def _state_vector(path):
    doc = load_matrix(path)
    if doc.kind != "state":
        raise DimensionMismatch(f"expected a state file, got kind {doc.kind!r}")
    return doc.data


def cmd_simulate(args):
    circ_doc = load_circuit(args.circuit)
    psi = _state_vector(args.state)
    seed = args.seed
    if args.shots is not None and seed is None:
        seed = draw_seed()
    result = {"version": __version__, "kind": circ_doc.kind}
    if args.shots is not None:
        result.update(shots=args.shots, seed=seed)

    if circ_doc.kind == "povm":
        rec = measure_povm(circ_doc, psi, shots=args.shots, seed=seed)
        result["probabilities"] = [float(p) for p in rec.outcome_probs]
        result["states"] = [
            None if s is None else [[float(z.real), float(z.imag)] for z in s.amplitudes] for s in rec.outcome_states
        ]
        if rec.counts is not None:
            result["counts"] = [int(c) for c in rec.counts]
        labels = [f"outcome {i}" for i in range(circ_doc.n)]
        amps = [s.amplitudes if s is not None else None for s in rec.outcome_states]
    else:
        n_in = circ_doc.n_in
        if psi.shape[0] != n_in:
            raise DimensionMismatch(f"state has {psi.shape[0]} modes, circuit input has {n_in}")
        out = propagate(circ_doc.circuit, psi).amplitudes
        n_out = circ_doc.n_out
        success = float(np.real(np.vdot(out[:n_out], out[:n_out])))
        leak = float(np.real(np.vdot(out[n_out:], out[n_out:])))
        probs = [success, leak] if circ_doc.kind == "map" else [success]
        result["probabilities"] = probs
        result["output"] = [[float(z.real), float(z.imag)] for z in out]
        if args.shots is not None:
            result["counts"] = [int(c) for c in sample_counts(probs, args.shots, seed)]
        labels = ["success ports", "leak ports"] if circ_doc.kind == "map" else ["output"]
        amps = [out[:n_out] / np.sqrt(success) if success > 0 else None, None]

    if args.json:
        print(json.dumps(result, indent=1))
        return EXIT_OK
    _header(Reporter(sys.stdout), DEFAULT_TOL, seed)
    for i, label in enumerate(labels):
        line = f"{label}: p = {result['probabilities'][i]:.12f}"
        if "counts" in result:
            line += f", count = {result['counts'][i]}"
        print(line)
        if amps[i] is not None:
            print("  state: " + " ".join(_fmt_complex(z) for z in amps[i]))
    return EXIT_OK


def cmd_verify(args):
    tol = args.tol if args.tol is not None else default_tol()
    circ_doc = load_circuit(args.circuit)
    mat = load_matrix(args.matrix)
    u = recompose(circ_doc.circuit)
    if circ_doc.kind == "povm":
        if mat.kind != "povm":
            raise DimensionMismatch("a POVM circuit is verified against a povm file")
        if len(mat.data) != circ_doc.n or mat.data[0].shape[0] != circ_doc.dim:
            raise DimensionMismatch("POVM file does not match the circuit's outcomes or dimension")
        residual = 0.0
        for i, (lo, hi) in circ_doc.routing.items():
            blk = u[lo:hi, : circ_doc.dim]
            residual = max(residual, float(np.max(np.abs(dagger(blk) @ blk - mat.data[i]))))
    else:
        if mat.kind not in ("contraction", "unitary"):
            raise DimensionMismatch(f"cannot verify a {circ_doc.kind} circuit against a {mat.kind} file")
        rows, cols = mat.data.shape
        if rows > u.shape[0] or cols > u.shape[1]:
            raise DimensionMismatch(f"matrix {mat.data.shape} larger than circuit ({u.shape[0]} modes)")
        residual = float(np.max(np.abs(u[:rows, :cols] - mat.data)))
    _header(Reporter(sys.stdout), tol)
    print(f"max residual: {residual:.3e}")
    ok = residual <= tol
    print("verified" if ok else "FAILED")
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser():
    parser = argparse.ArgumentParser(prog="dilatic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dilatic {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile-map", help="compile a contraction (or unitary) into a circuit")
    p.add_argument("input", help="matrix file, '-' for stdin")
    p.add_argument("-o", "--output", default="-", help="circuit file, '-' for stdout")
    p.add_argument("--rescale", action="store_true", help="divide by the operator norm instead of rejecting")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_compile_map)

    p = sub.add_parser("compile-povm", help="compile a POVM into a circuit bundle")
    p.add_argument("input")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--order", choices=("given", "auto"), default="given")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_compile_povm)

    p = sub.add_parser("simulate", help="propagate a state through a compiled circuit")
    p.add_argument("circuit")
    p.add_argument("state")
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="check a circuit against a matrix")
    p.add_argument("circuit")
    p.add_argument("matrix")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, OSError) as exc:
        print(f"dilatic: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, DilaticError, ValueError) as exc:
        print(f"dilatic: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
