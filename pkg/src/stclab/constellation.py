"""The 32-point super-orthogonal 4PSK constellation and its coset tables.

The constellation is the first-tier expansion of the 16 codematrices of the
1/sqrt(2)-normalized 2x2 design over 4PSK by the unitary diag(1, -1):
entries 0..15 (BASE) have the form [[A, conj(B)], [B, -conj(A)]] and entries
16..31 (PRIMED) the form [[A, -conj(B)], [B, conj(A)]], with A and B 4PSK
points.  Each entry carries two set-partitioning labelings, one into 8
cosets of 4 (two uncoded bits per branch) and one into 16 cosets of 2 (one
uncoded bit), read from the shipped data table.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .designs import (
    GeneratorSet,
    alamouti_generators,
    analyze,
    primed_alamouti_generators,
)
from .expansion import Subconstellation
from .linalg import as_complex_matrix

#: 4PSK alphabet; index k is exp(j*(pi/4 + k*pi/2)).
QPSK = tuple(
    complex((1 if k in (0, 3) else -1), (1 if k in (0, 1) else -1)) / np.sqrt(2.0)
    for k in range(4)
)

DATA_FILE = "constellation32.txt"


@dataclass(frozen=True, eq=False)
class CodematrixEntry:
    """One constellation entry with both set-partitioning labels."""

    index: int
    index_matrix: tuple          # 2x2 nested tuple of 4PSK indices
    matrix: np.ndarray           # 2x2 complex codematrix
    subconstellation: Subconstellation
    q8_coset: int
    q8_bits: str                 # two uncoded bits at partition depth 8
    q16_coset: int
    q16_bit: str                 # one uncoded bit at partition depth 16


def matrix_from_indices(index_matrix) -> np.ndarray:
    """Codematrix from a 2x2 array of 4PSK alphabet indices."""
    im = np.asarray(index_matrix)
    if im.shape != (2, 2):
        raise ValueError("index matrix must be 2x2, got %s" % (im.shape,))
    return np.array([[QPSK[int(im[r, c])] for c in range(2)] for r in range(2)],
                    dtype=np.complex128)


def indices_from_matrix(m, tol: float = 1e-9) -> tuple:
    """Round a codematrix back to 4PSK alphabet indices."""
    a = as_complex_matrix(m)
    if a.shape != (2, 2):
        raise ValueError("expected a 2x2 codematrix, got %s" % (a.shape,))
    out = []
    for r in range(2):
        row = []
        for c in range(2):
            dists = [abs(a[r, c] - s) for s in QPSK]
            k = int(np.argmin(dists))
            if dists[k] > tol:
                raise ValueError("entry (%d, %d) = %r is not a 4PSK point" % (r, c, a[r, c]))
            row.append(k)
        out.append(tuple(row))
    return tuple(out)


def _parse_table(text: str):
    rows = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 6:
            raise ValueError("line %d: expected 6 comma fields, got %d" % (no, len(fields)))
        try:
            idx = int(fields[0])
            cells = [int(x) for x in fields[1].split()]
            q8_coset = int(fields[2])
            q8_bits = fields[3]
            q16_coset = int(fields[4])
            q16_bit = fields[5]
        except ValueError as exc:
            raise ValueError("line %d: %s" % (no, exc)) from None
        if len(cells) != 4 or any(not 0 <= c <= 3 for c in cells):
            raise ValueError("line %d: need four 4PSK indices in 0..3" % no)
        if len(q8_bits) != 2 or not set(q8_bits) <= {"0", "1"}:
            raise ValueError("line %d: q8 bits must be two binary digits" % no)
        if q16_bit not in ("0", "1"):
            raise ValueError("line %d: q16 bit must be one binary digit" % no)
        rows.append((idx, ((cells[0], cells[1]), (cells[2], cells[3])),
                     q8_coset, q8_bits, q16_coset, q16_bit))
    if [r[0] for r in rows] != list(range(32)):
        raise ValueError("table must list indices 0..31 in order")
    return rows


@lru_cache(maxsize=None)
def build_constellation() -> tuple:
    """Load the shipped table and materialize all 32 entries."""
    text = importlib.resources.files("stclab.data").joinpath(DATA_FILE).read_text()
    entries = []
    for idx, im, q8c, q8b, q16c, q16b in _parse_table(text):
        tag = Subconstellation.BASE if idx < 16 else Subconstellation.PRIMED
        entries.append(CodematrixEntry(
            index=idx, index_matrix=im, matrix=matrix_from_indices(im),
            subconstellation=tag, q8_coset=q8c, q8_bits=q8b,
            q16_coset=q16c, q16_bit=q16b))
    return tuple(entries)


@lru_cache(maxsize=None)
def matrix_stack() -> np.ndarray:
    """All 32 codematrices as a (32, 2, 2) array, index order."""
    return np.stack([e.matrix for e in build_constellation()])


def base_generator_set() -> GeneratorSet:
    return alamouti_generators()


def primed_generator_set() -> GeneratorSet:
    return primed_alamouti_generators()


def chi_coordinates(entry: CodematrixEntry) -> np.ndarray:
    """Direct-sum coordinates (length 8) of an entry over its own basis.

    BASE entries occupy the first four slots, PRIMED entries the last four;
    the other half is exactly zero.
    """
    out = np.zeros(8)
    if entry.subconstellation is Subconstellation.BASE:
        chi, resid = analyze(base_generator_set(), entry.matrix)
        out[:4] = chi
    else:
        chi, resid = analyze(primed_generator_set(), entry.matrix)
        out[4:] = chi
    if resid > 1e-9:
        raise ValueError("entry %d does not lie in its tagged design (residual %g)"
                         % (entry.index, resid))
    return out


@dataclass(frozen=True)
class FormReport:
    """verify_forms outcome; empty violations means every entry checks out."""

    violations: tuple

    @property
    def passed(self) -> bool:
        return not self.violations


def verify_forms(entries=None, tol: float = 1e-12) -> FormReport:
    """Check the algebraic form of every entry against its tag.

    BASE: [[A, conj(B)], [B, -conj(A)]]; PRIMED: [[A, -conj(B)], [B, conj(A)]];
    in both cases A, B must be 4PSK points.
    """
    if entries is None:
        entries = build_constellation()
    bad = []
    for e in entries:
        m = e.matrix
        a, b = m[0, 0], m[1, 0]
        if min(abs(a - s) for s in QPSK) > tol or min(abs(b - s) for s in QPSK) > tol:
            bad.append("entry %d: first column not drawn from 4PSK" % e.index)
            continue
        if e.subconstellation is Subconstellation.BASE:
            ok = (abs(m[0, 1] - np.conj(b)) <= tol and abs(m[1, 1] + np.conj(a)) <= tol)
            form = "[[A, conj(B)], [B, -conj(A)]]"
        else:
            ok = (abs(m[0, 1] + np.conj(b)) <= tol and abs(m[1, 1] - np.conj(a)) <= tol)
            form = "[[A, -conj(B)], [B, conj(A)]]"
        if not ok:
            bad.append("entry %d: does not match %s form" % (e.index, form))
    return FormReport(violations=tuple(bad))


def q8_cosets(entries=None) -> dict:
    """Map q8 coset id -> member indices in uncoded-bit order 00,01,10,11."""
    if entries is None:
        entries = build_constellation()
    out = {}
    for e in entries:
        out.setdefault(e.q8_coset, {})[e.q8_bits] = e.index
    return {c: tuple(members[b] for b in ("00", "01", "10", "11"))
            for c, members in sorted(out.items())}


def q16_cosets(entries=None) -> dict:
    """Map q16 coset id -> member indices in uncoded-bit order 0,1."""
    if entries is None:
        entries = build_constellation()
    out = {}
    for e in entries:
        out.setdefault(e.q16_coset, {})[e.q16_bit] = e.index
    return {c: tuple(members[b] for b in ("0", "1"))
            for c, members in sorted(out.items())}


def distance_spectrum(entries=None, which: str = "FULL") -> dict:
    """Squared pairwise Frobenius distance -> multiplicity.

    which selects BASE, PRIMED, or FULL (all 32 points).  Distances are
    grouped on a 1e-9 grid; for this constellation they are exact integers.
    """
    if entries is None:
        entries = build_constellation()
    if which == "BASE":
        pool = [e for e in entries if e.subconstellation is Subconstellation.BASE]
    elif which == "PRIMED":
        pool = [e for e in entries if e.subconstellation is Subconstellation.PRIMED]
    elif which == "FULL":
        pool = list(entries)
    else:
        raise ValueError("which must be BASE, PRIMED, or FULL, got %r" % (which,))
    spectrum = {}
    for i in range(len(pool)):
        for j in range(i + 1, len(pool)):
            d2 = float(np.sum(np.abs(pool[i].matrix - pool[j].matrix) ** 2))
            key = round(d2 / 1e-9) * 1e-9
            spectrum[key] = spectrum.get(key, 0) + 1
    return dict(sorted(spectrum.items()))
