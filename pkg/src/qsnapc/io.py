"""Versioned text formats for matrices, plans, gate sequences and sweeps.

All floats are written with ``%.17e`` so reading a file back reproduces
the in-memory values bit for bit. SNAP phase vectors are run-length
encoded: ``3.14159265358979312e+00*5 0*27`` expands to 32 phases.
"""
import csv
import io
import itertools
import math

import numpy as np

from .decompose import DecompositionPlan, GivensStep, SnapStep
from .errors import FormatError, UnsupportedVersionError
from .synth import DispGate, GateSequence, SnapGate, SynthesisOptions

__all__ = [
    "SWEEP_HEADER",
    "read_matrix",
    "read_plan",
    "read_sequence",
    "write_matrix",
    "write_plan",
    "write_sequence",
    "write_sweep_csv",
]

MATRIX_MAGIC = "qsnapc-matrix"
PLAN_MAGIC = "qsnapc-plan"
SEQUENCE_MAGIC = "qsnapc-sequence"
FORMAT_VERSION = 1

SWEEP_HEADER = (
    "experiment", "dim", "N", "k", "m", "theta", "infidelity_raw",
    "infidelity_clamped", "gate_count", "compile_seconds", "simulate_seconds",
)


def _f(x):
    return "%.17e" % x


def _phases_out(phases):
    # runs of identical values collapse to "<value>*<count>"
    toks = []
    for value, run in itertools.groupby(phases.tolist()):
        n = len(list(run))
        text = "0" if value == 0.0 and math.copysign(1.0, value) > 0 else _f(value)
        toks.append(text if n == 1 else f"{text}*{n}")
    return " ".join(toks)


def _phases_in(toks, dim, where):
    phases = []
    for tok in toks:
        value, star, count = tok.partition("*")
        n = _int(count, where) if star else 1
        if n < 1:
            raise FormatError(f"{where}: run length must be positive")
        phases.extend([_float(value, where)] * n)
    if len(phases) != dim:
        raise FormatError(f"{where}: expected {dim} phases, got {len(phases)}")
    return phases


def _float(tok, where):
    try:
        value = float(tok)
    except ValueError:
        raise FormatError(f"{where}: expected a number, got {tok!r}") from None
    if not math.isfinite(value):
        raise FormatError(f"{where}: non-finite value {tok!r}")
    return value


def _int(tok, where):
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"{where}: expected an integer, got {tok!r}") from None


class _Lines:
    """Line cursor that reports positions in format errors."""

    def __init__(self, text, source):
        self.lines = text.splitlines()
        self.pos = 0
        self.source = source

    def where(self):
        return f"{self.source}:{self.pos}"

    def next(self):
        if self.pos >= len(self.lines):
            raise FormatError(f"{self.source}: unexpected end of file")
        line = self.lines[self.pos]
        self.pos += 1
        return line.split()

    def field(self, key):
        toks = self.next()
        if len(toks) != 2 or toks[0] != key:
            raise FormatError(f"{self.where()}: expected '{key} <value>'")
        return toks[1]

    def end(self):
        rest = [ln for ln in self.lines[self.pos:] if ln.strip()]
        if rest:
            raise FormatError(f"{self.source}: trailing content after line {self.pos}")


def _header(cur, magic):
    toks = cur.next()
    if len(toks) != 2 or toks[0] != magic:
        raise FormatError(f"{cur.source}: not a {magic} file")
    version = _int(toks[1], cur.where())
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"{cur.source}: {magic} version {version} is not supported (expected {FORMAT_VERSION})")


def _dim(cur):
    dim = _int(cur.field("dim"), cur.where())
    if dim < 2:
        raise FormatError(f"{cur.where()}: dim must be >= 2")
    return dim


def _read_text(path):
    with open(path, "r", encoding="ascii") as fh:
        return fh.read()


def _write_text(path, text):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def format_matrix(M):
    M = np.asarray(M, dtype=np.complex128)
    out = [f"{MATRIX_MAGIC} {FORMAT_VERSION}", f"dim {M.shape[0]}"]
    out.extend(f"{_f(z.real)} {_f(z.imag)}" for z in M.ravel())
    return "\n".join(out) + "\n"


def parse_matrix(text, source="<matrix>"):
    cur = _Lines(text, source)
    _header(cur, MATRIX_MAGIC)
    dim = _dim(cur)
    M = np.empty(dim * dim, dtype=np.complex128)
    for i in range(dim * dim):
        toks = cur.next()
        if len(toks) != 2:
            raise FormatError(f"{cur.where()}: expected '<re> <im>'")
        M[i] = complex(_float(toks[0], cur.where()), _float(toks[1], cur.where()))
    cur.end()
    return M.reshape(dim, dim)


def write_matrix(path, M):
    _write_text(path, format_matrix(M))


def read_matrix(path):
    return parse_matrix(_read_text(path), str(path))


def format_plan(plan):
    out = [f"{PLAN_MAGIC} {FORMAT_VERSION}", f"dim {plan.dim}",
           f"source_checksum {plan.source_checksum or '-'}", f"steps {len(plan.steps)}"]
    for step in plan.steps:
        if isinstance(step, SnapStep):
            out.append("snap " + _phases_out(step.phases))
        else:
            out.append(f"givens {step.k} {_f(step.theta)}")
    return "\n".join(out) + "\n"


def parse_plan(text, source="<plan>"):
    cur = _Lines(text, source)
    _header(cur, PLAN_MAGIC)
    dim = _dim(cur)
    checksum = cur.field("source_checksum")
    count = _int(cur.field("steps"), cur.where())
    steps = []
    for _ in range(count):
        toks = cur.next()
        tag = toks[0] if toks else ""
        if tag == "snap":
            steps.append(SnapStep(_phases_in(toks[1:], dim, cur.where())))
        elif tag == "givens" and len(toks) == 3:
            steps.append(GivensStep(_int(toks[1], cur.where()), _float(toks[2], cur.where())))
        else:
            raise FormatError(f"{cur.where()}: malformed or unknown plan step {tag!r}")
    cur.end()
    try:
        return DecompositionPlan(dim, steps, "" if checksum == "-" else checksum)
    except ValueError as exc:
        raise FormatError(f"{source}: {exc}") from None


def write_plan(path, plan):
    _write_text(path, format_plan(plan))


def read_plan(path):
    return parse_plan(_read_text(path), str(path))


def format_sequence(seq, options=None, source_checksum=""):
    options = options or SynthesisOptions()
    prune = "none" if options.prune_tol is None else _f(options.prune_tol)
    out = [
        f"{SEQUENCE_MAGIC} {FORMAT_VERSION}",
        f"dim {seq.dim}",
        f"m {options.m}",
        f"merge {'true' if options.merge else 'false'}",
        f"prune_tol {prune}",
        f"source_checksum {source_checksum or '-'}",
        f"gates {len(seq.gates)}",
    ]
    for g in seq.gates:
        if isinstance(g, SnapGate):
            out.append("snap " + _phases_out(g.phases))
        else:
            out.append(f"disp {_f(g.alpha)}")
    return "\n".join(out) + "\n"


def parse_sequence(text, source="<sequence>"):
    """Return ``(sequence, options, source_checksum)``."""
    cur = _Lines(text, source)
    _header(cur, SEQUENCE_MAGIC)
    dim = _dim(cur)
    m = _int(cur.field("m"), cur.where())
    merge_tok = cur.field("merge")
    if merge_tok not in ("true", "false"):
        raise FormatError(f"{cur.where()}: merge must be true or false")
    prune_tok = cur.field("prune_tol")
    prune_tol = None if prune_tok == "none" else _float(prune_tok, cur.where())
    checksum = cur.field("source_checksum")
    count = _int(cur.field("gates"), cur.where())
    gates = []
    for _ in range(count):
        toks = cur.next()
        tag = toks[0] if toks else ""
        if tag == "snap":
            gates.append(SnapGate(_phases_in(toks[1:], dim, cur.where())))
        elif tag == "disp" and len(toks) == 2:
            gates.append(DispGate(_float(toks[1], cur.where())))
        else:
            raise FormatError(f"{cur.where()}: malformed or unknown gate {tag!r}")
    cur.end()
    try:
        options = SynthesisOptions(m=m, merge=merge_tok == "true", prune_tol=prune_tol)
        seq = GateSequence(dim, gates)
    except ValueError as exc:
        raise FormatError(f"{source}: {exc}") from None
    return seq, options, "" if checksum == "-" else checksum


def write_sequence(path, seq, options=None, source_checksum=""):
    _write_text(path, format_sequence(seq, options, source_checksum))


def read_sequence(path):
    return parse_sequence(_read_text(path), str(path))


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_sweep_csv(records, timings=True):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in records:
        compile_s = r.compile_seconds if timings else 0.0
        simulate_s = r.simulate_seconds if timings else 0.0
        writer.writerow([_cell(v) for v in (
            r.experiment, r.dim, r.N, r.k, r.m, r.theta, float(r.infidelity),
            float(r.infidelity_clamped), r.gate_count, float(compile_s), float(simulate_s))])
    return buf.getvalue()


def write_sweep_csv(path, records, timings=True):
    _write_text(path, format_sweep_csv(records, timings))


def read_sweep_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != SWEEP_HEADER:
            raise FormatError(f"{path}: unexpected sweep CSV header")
        return list(reader)
