"""Generator sets for generalized complex orthogonal space-time designs.

A design over T channel uses, N transmit antennas and K complex symbols is
described by an ordered basis of 2K complex T x N matrices.  Writing the
symbol vector in real coordinates chi (length 2K, interleaved re/im), a
codematrix is the real linear combination

    S(chi) = sum_l chi_l B_l.

The basis must satisfy the scaled Radon-Hurwitz orthogonality condition

    B_l^H B_p + B_p^H B_l = 2 c delta_lp I_N

with a single scale c > 0 shared by all pairs.  c = 1 recovers the
unit-normalized convention; the 1/sqrt(2)-normalized quadruples shipped here
have c = 1/2.  The condition makes every codematrix semiunitary,
S^H S = c * ||chi||^2 * I_N, and makes pairwise codematrix differences
orthogonal with squared gain c * ||chi - chi'||^2 per antenna.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .linalg import (
    as_complex_matrix,
    frobenius_norm,
    matrix_to_real_vector,
)

RH_TOL = 1e-12

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    """Ordered Radon-Hurwitz basis of a generalized orthogonal design.

    Attributes
    ----------
    block_len : int
        Channel uses per codematrix (rows of each basis matrix).
    num_antennas : int
        Transmit antennas (columns of each basis matrix).
    num_symbols : int
        Complex symbols per codematrix; the basis has 2 * num_symbols members.
    basis : tuple of ndarray
        The 2K matrices, order significant: members 2k, 2k+1 carry the real
        and imaginary coordinate of symbol k.
    scale : float
        The Radon-Hurwitz scale c.
    """

    block_len: int
    num_antennas: int
    num_symbols: int
    basis: tuple
    scale: float

    def __post_init__(self):
        if self.block_len < 1 or self.num_antennas < 1 or self.num_symbols < 1:
            raise ValueError("block_len, num_antennas, num_symbols must be positive")
        if len(self.basis) != 2 * self.num_symbols:
            raise ValueError("basis must hold exactly 2K matrices, got %d for K=%d"
                             % (len(self.basis), self.num_symbols))
        shaped = tuple(as_complex_matrix(b) for b in self.basis)
        for k, b in enumerate(shaped):
            if b.shape != (self.block_len, self.num_antennas):
                raise ValueError("basis[%d] has shape %s, expected (%d, %d)"
                                 % (k, b.shape, self.block_len, self.num_antennas))
        object.__setattr__(self, "basis", shaped)
        if not (self.scale > 0.0):
            raise ValueError("scale must be positive, got %r" % (self.scale,))

    def stacked(self) -> np.ndarray:
        """Basis as a (2K, T, N) array."""
        return np.stack(self.basis)


def make_generator_set(basis, scale: float | None = None) -> GeneratorSet:
    """Build a GeneratorSet from matrices, estimating the scale if omitted.

    The estimate reads c off the first diagonal Radon-Hurwitz identity,
    c = (1/2N) * trace(B_0^H B_0 + B_0^H B_0).
    """
    mats = [as_complex_matrix(b) for b in basis]
    if not mats or len(mats) % 2 != 0:
        raise ValueError("a generator set needs a nonempty even number of matrices")
    rows, cols = mats[0].shape
    if scale is None:
        scale = float(np.real(np.trace(mats[0].conj().T @ mats[0]))) / cols
    return GeneratorSet(block_len=rows, num_antennas=cols,
                        num_symbols=len(mats) // 2, basis=tuple(mats),
                        scale=scale)


def alamouti_generators() -> GeneratorSet:
    """The 1/sqrt(2)-normalized rate-one 2x2 quadruple (scale 1/2)."""
    b0 = _INV_SQRT2 * np.array([[1, 0], [0, -1]], dtype=np.complex128)
    b1 = _INV_SQRT2 * np.array([[1j, 0], [0, 1j]], dtype=np.complex128)
    b2 = _INV_SQRT2 * np.array([[0, 1], [1, 0]], dtype=np.complex128)
    b3 = _INV_SQRT2 * np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    return GeneratorSet(2, 2, 2, (b0, b1, b2, b3), 0.5)


def primed_alamouti_generators() -> GeneratorSet:
    """The companion quadruple, the base one right-multiplied by diag(1, -1)."""
    u = np.diag([1.0, -1.0]).astype(np.complex128)
    base = alamouti_generators()
    return GeneratorSet(2, 2, 2, tuple(b @ u for b in base.basis), 0.5)


@dataclass(frozen=True)
class RadonHurwitzReport:
    """Outcome of a Radon-Hurwitz suite run."""

    passed: bool
    scale: float
    max_residual: float
    worst_pair: tuple


def radon_hurwitz_check(g: GeneratorSet, tol: float = RH_TOL) -> RadonHurwitzReport:
    """Check B_l^H B_p + B_p^H B_l = 2 c delta_lp I over all ordered pairs.

    The residual of a pair is the max-abs entry of the defect matrix; the
    report carries the worst pair so failures can be named.
    """
    n = g.num_antennas
    eye = np.eye(n)
    worst = 0.0
    worst_pair = (0, 0)
    for l, bl in enumerate(g.basis):
        for p, bp in enumerate(g.basis):
            lhs = bl.conj().T @ bp + bp.conj().T @ bl
            expect = 2.0 * g.scale * eye if l == p else np.zeros((n, n))
            resid = float(np.max(np.abs(lhs - expect)))
            if resid > worst:
                worst = resid
                worst_pair = (l, p)
    return RadonHurwitzReport(passed=worst <= tol, scale=g.scale,
                              max_residual=worst, worst_pair=worst_pair)


def synthesize(g: GeneratorSet, chi) -> np.ndarray:
    """Codematrix S(chi) = sum_l chi_l B_l for real coordinates chi."""
    x = np.asarray(chi, dtype=np.float64).reshape(-1)
    if x.size != 2 * g.num_symbols:
        raise ValueError("chi must have length %d, got %d" % (2 * g.num_symbols, x.size))
    return np.tensordot(x, g.stacked(), axes=1)


def analyze(g: GeneratorSet, s) -> tuple[np.ndarray, float]:
    """Recover real coordinates of a matrix and the off-design residual.

    Coordinates come from the orthogonality of the basis,
    chi_l = Re tr(B_l^H S) / (c N); the returned residual is the Frobenius
    norm of S - S(chi), zero exactly when S lies in the design.
    """
    sm = as_complex_matrix(s)
    if sm.shape != (g.block_len, g.num_antennas):
        raise ValueError("matrix shape %s does not match the design (%d, %d)"
                         % (sm.shape, g.block_len, g.num_antennas))
    denom = g.scale * g.num_antennas
    chi = np.array([float(np.real(np.sum(b.conj() * sm))) / denom for b in g.basis])
    resid = frobenius_norm(sm - synthesize(g, chi))
    return chi, resid


def conjugate_basis_pair(g: GeneratorSet, l: int) -> tuple[np.ndarray, np.ndarray]:
    """The conjugation split (B+_l, B-_l) of symbol slot l (1-based).

    B+_l = (B_{2l-2} + i B_{2l-1}) / 2 multiplies the conjugated symbol,
    B-_l = (B_{2l-2} - i B_{2l-1}) / 2 the symbol itself, so that
    S = sum_l z_l B-_l + conj(z_l) B+_l.
    """
    if not 1 <= l <= g.num_symbols:
        raise ValueError("symbol slot must be in 1..%d, got %d" % (g.num_symbols, l))
    be = g.basis[2 * l - 2]
    bo = g.basis[2 * l - 1]
    plus = (be + 1j * bo) / 2.0
    minus = (be - 1j * bo) / 2.0
    return plus, minus


def pairwise_difference_check(g: GeneratorSet, chi_a, chi_b,
                              tol: float = RH_TOL) -> float:
    """Max-abs defect of (S - S')^H (S - S') = c ||chi_a - chi_b||^2 I.

    Returns the residual; values above tol mean the semiunitary difference
    identity does not hold for this pair.
    """
    xa = np.asarray(chi_a, dtype=np.float64).reshape(-1)
    xb = np.asarray(chi_b, dtype=np.float64).reshape(-1)
    if xa.size != xb.size or xa.size != 2 * g.num_symbols:
        raise ValueError("coordinate vectors must both have length %d" % (2 * g.num_symbols,))
    d = synthesize(g, xa) - synthesize(g, xb)
    lhs = d.conj().T @ d
    expect = g.scale * float(np.sum((xa - xb) ** 2)) * np.eye(g.num_antennas)
    return float(np.max(np.abs(lhs - expect)))


def rotate_generators(g: GeneratorSet, zeta: complex) -> GeneratorSet:
    """Generator set absorbing a unimodular symbol rotation zeta.

    The rotated basis
        H_{2l-2} = zeta (Re(zeta) B_{2l-2} - Im(zeta) B_{2l-1})
        H_{2l-1} = zeta (Re(zeta) B_{2l-1} + Im(zeta) B_{2l-2})
    satisfies the same Radon-Hurwitz condition at the same scale, and
    synthesizing with the coordinates of z*zeta reproduces zeta * S(z).
    """
    z = complex(zeta)
    if abs(abs(z) - 1.0) > 1e-12:
        raise ValueError("rotation must be unimodular, got |zeta|=%r" % abs(z))
    c, s = z.real, z.imag
    out = []
    for l in range(g.num_symbols):
        be = g.basis[2 * l]
        bo = g.basis[2 * l + 1]
        out.append(z * (c * be - s * bo))
        out.append(z * (c * bo + s * be))
    return GeneratorSet(g.block_len, g.num_antennas, g.num_symbols,
                        tuple(out), g.scale)


def span_residuals(g: GeneratorSet, matrices) -> np.ndarray:
    """Frobenius residual of each matrix after projecting onto span_R(basis).

    The projection is a real least-squares fit in flattened coordinates, so
    it stays meaningful even for bases that narrowly miss orthogonality.
    """
    a = np.column_stack([matrix_to_real_vector(b) for b in g.basis])
    out = []
    for m in matrices:
        v = matrix_to_real_vector(as_complex_matrix(m))
        coef, *_ = np.linalg.lstsq(a, v, rcond=None)
        out.append(float(np.linalg.norm(v - a @ coef)))
    return np.array(out)


def write_generator_file(g: GeneratorSet) -> str:
    """Serialize to the plain text exchange format.

    Header line ``T N K c``, then the 2K matrices in order, each as T lines
    of N whitespace-separated ``re,im`` pairs, blank line between matrices.
    """
    buf = io.StringIO()
    buf.write("%d %d %d %r\n" % (g.block_len, g.num_antennas, g.num_symbols, g.scale))
    for b in g.basis:
        buf.write("\n")
        for row in b:
            buf.write(" ".join("%r,%r" % (float(z.real), float(z.imag)) for z in row))
            buf.write("\n")
    return buf.getvalue()


def read_generator_file(text: str) -> GeneratorSet:
    """Parse the text format produced by write_generator_file.

    Raises ValueError with a line number on malformed input.
    """
    lines = text.splitlines()
    body = [(i + 1, ln.strip()) for i, ln in enumerate(lines)
            if ln.strip() and not ln.strip().startswith("#")]
    if not body:
        raise ValueError("empty generator file")
    head_no, head = body[0]
    parts = head.split()
    if len(parts) != 4:
        raise ValueError("line %d: header must be 'T N K c', got %r" % (head_no, head))
    try:
        t, n, k = int(parts[0]), int(parts[1]), int(parts[2])
        c = float(parts[3])
    except ValueError as exc:
        raise ValueError("line %d: bad header field (%s)" % (head_no, exc)) from None
    need = 2 * k * t
    rows = body[1:]
    if len(rows) != need:
        raise ValueError("expected %d matrix rows for T=%d K=%d, found %d"
                         % (need, t, k, len(rows)))
    mats = []
    for m in range(2 * k):
        block = np.empty((t, n), dtype=np.complex128)
        for r in range(t):
            no, ln = rows[m * t + r]
            cells = ln.split()
            if len(cells) != n:
                raise ValueError("line %d: expected %d entries, got %d" % (no, n, len(cells)))
            for j, cell in enumerate(cells):
                try:
                    re_s, im_s = cell.split(",")
                    block[r, j] = complex(float(re_s), float(im_s))
                except ValueError:
                    raise ValueError("line %d: bad entry %r, want 're,im'" % (no, cell)) from None
        mats.append(block)
    return GeneratorSet(t, n, k, tuple(mats), c)
