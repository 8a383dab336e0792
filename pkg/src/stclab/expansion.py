"""First-tier constellation expansion and its discernibility audits.

An expansion replaces a design constellation G by G union G*U*zeta, where U
is unitary and zeta unimodular.  Every expanded point is tagged BASE or
PRIMED, and each tag keeps its own generator quadruple: the primed basis is
the base one right-multiplied by U*zeta and satisfies the same Radon-Hurwitz
condition at the same scale.

Discernibility is decided from the total multiplier V = U*zeta alone, which
makes the classification invariant under the reparameterization
(U, zeta) -> (U*conj(w), zeta*w):

  * NOT_AN_EXPANSION  -- the image set coincides with G;
  * INDISCERNIBLE     -- V is a scalar w*I (pure symbol rotation);
  * DIRECT_DISCERNIBLE -- V already has an all-real eigenvalue spectrum;
  * INDIRECT_DISCERNIBLE -- some unimodular de-rotation w puts the spectrum
    of V*w on the real axis.

Inputs whose spectrum has two distinct eigenvalues that no scalar rotation
makes real sit outside the discernible taxonomy; they are reported as
INDISCERNIBLE with an explicit borderline note in the witness rather than
being promoted to a class whose separation guarantees they do not carry.
Scalar rotations with a genuinely complex w are flagged the same way: for
bases that do not span a rotation-closed subspace, G*w can leave the design
span entirely (the shipped 2x2 quadruple is such a case), so the in-span
reading of INDISCERNIBLE must not be taken on faith there.  The span audits
below always report measured numbers.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .designs import GeneratorSet, span_residuals, synthesize, analyze
from .linalg import as_complex_matrix, eigenvalues_2x2, frobenius_norm, is_unitary

SET_MATCH_TOL = 1e-10
DEROTATION_TOL = 1e-9
SPAN_SEPARATION_TOL = 1e-6


class Subconstellation(Enum):
    BASE = "BASE"
    PRIMED = "PRIMED"


class ExpansionKind(Enum):
    NOT_AN_EXPANSION = "NOT_AN_EXPANSION"
    INDISCERNIBLE = "INDISCERNIBLE"
    DIRECT_DISCERNIBLE = "DIRECT_DISCERNIBLE"
    INDIRECT_DISCERNIBLE = "INDIRECT_DISCERNIBLE"


@dataclass(frozen=True)
class ExpansionClass:
    kind: ExpansionKind
    witness: str


@dataclass(frozen=True, eq=False)
class TaggedPoint:
    """One expanded-constellation point with its direct-sum coordinates.

    chi_oplus has length 4K: the first 2K slots hold base-design coordinates,
    the last 2K primed-design coordinates, and exactly one half is nonzero.
    """

    matrix: np.ndarray
    tag: Subconstellation
    chi_oplus: np.ndarray


@dataclass(frozen=True, eq=False)
class ExpandedConstellation:
    base_generators: GeneratorSet
    primed_generators: GeneratorSet
    unitary: np.ndarray
    zeta: complex
    points: tuple
    degenerate: bool

    def base_points(self):
        return [p for p in self.points if p.tag is Subconstellation.BASE]

    def primed_points(self):
        return [p for p in self.points if p.tag is Subconstellation.PRIMED]


def _check_multiplier(unitary, zeta) -> tuple[np.ndarray, complex]:
    u = as_complex_matrix(unitary)
    if not is_unitary(u, tol=1e-10):
        raise ValueError("expansion matrix must be unitary within 1e-10")
    z = complex(zeta)
    if abs(abs(z) - 1.0) > 1e-12:
        raise ValueError("zeta must be unimodular, got |zeta|=%r" % abs(z))
    return u, z


def _round_key(m: np.ndarray) -> bytes:
    # identical after rounding to the 1e-12 grid <=> same key
    return np.round(m.view(np.float64), 12).tobytes()


def expand(g: GeneratorSet, point_chis, unitary, zeta=1.0) -> ExpandedConstellation:
    """Expand the constellation {S(chi)} by its image under U*zeta.

    Primed points keep the chi of their pre-image: S(chi)*U*zeta is exactly
    the primed-basis synthesis of the same coordinates.  If the image set
    collides with the base set (after rounding to 1e-12) the duplicates are
    collapsed and the expansion is marked degenerate.
    """
    u, z = _check_multiplier(unitary, zeta)
    if u.shape != (g.num_antennas, g.num_antennas):
        raise ValueError("expansion matrix must be %d x %d" % (g.num_antennas, g.num_antennas))
    chis = [np.asarray(c, dtype=np.float64).reshape(-1) for c in point_chis]
    if not chis:
        raise ValueError("point_chis must be nonempty")
    primed_basis = tuple(b @ u * z for b in g.basis)
    gp = GeneratorSet(g.block_len, g.num_antennas, g.num_symbols,
                      primed_basis, g.scale)
    two_k = 2 * g.num_symbols
    points = []
    seen = set()
    for chi in chis:
        s = synthesize(g, chi)
        co = np.zeros(2 * two_k)
        co[:two_k] = chi
        points.append(TaggedPoint(s, Subconstellation.BASE, co))
        seen.add(_round_key(s))
    degenerate = False
    for chi in chis:
        s = synthesize(gp, chi)
        if _round_key(s) in seen:
            degenerate = True
            continue
        co = np.zeros(2 * two_k)
        co[two_k:] = chi
        points.append(TaggedPoint(s, Subconstellation.PRIMED, co))
    return ExpandedConstellation(base_generators=g, primed_generators=gp,
                                 unitary=u, zeta=z, points=tuple(points),
                                 degenerate=degenerate)


def _sets_equal(a, b, tol: float) -> bool:
    """Greedy matching of two matrix lists under max-abs distance tol."""
    if len(a) != len(b):
        return False
    unused = list(range(len(b)))
    for m in a:
        hit = None
        for j in unused:
            if np.max(np.abs(m - b[j])) <= tol:
                hit = j
                break
        if hit is None:
            return False
        unused.remove(hit)
    return True


def _real_spectrum_derotations(eigs) -> list[complex]:
    """Unimodular w candidates putting every eigenvalue phase on {0, pi}."""
    out = []
    for lam in eigs:
        for shift in (0.0, np.pi):
            w = cmath.exp(1j * (shift - cmath.phase(lam)))
            ok = all(
                min(abs(_wrap(cmath.phase(mu * w))), abs(_wrap(cmath.phase(mu * w) - np.pi))) <= DEROTATION_TOL
                for mu in eigs)
            if ok and not any(abs(w - seen) <= 1e-9 for seen in out):
                out.append(w)
    return out


def _wrap(angle: float) -> float:
    return (angle + np.pi) % (2.0 * np.pi) - np.pi


def classify_expansion(unitary, zeta, g: GeneratorSet, point_chis) -> ExpansionClass:
    """Classify the expansion of {S(chi)} by U*zeta.

    Only 2x2 multipliers are supported (closed-form spectrum); larger
    dimensions would also need the more-than-two-distinct-eigenvalues clause.
    """
    u, z = _check_multiplier(unitary, zeta)
    if u.shape != (2, 2):
        raise ValueError("classification supports 2x2 multipliers only, got %s" % (u.shape,))
    v = u * z
    base = [synthesize(g, np.asarray(c, dtype=np.float64)) for c in point_chis]
    image = [s @ v for s in base]
    eye = np.eye(2)
    if (z == 1.0 and (np.max(np.abs(u - eye)) <= SET_MATCH_TOL
                      or np.max(np.abs(u + eye)) <= SET_MATCH_TOL)):
        return ExpansionClass(ExpansionKind.NOT_AN_EXPANSION,
                              "multiplier is +/-I with zeta=1; image is the base set")
    if _sets_equal(base, image, SET_MATCH_TOL):
        return ExpansionClass(ExpansionKind.NOT_AN_EXPANSION,
                              "image set coincides with the base set")
    off = max(abs(v[0, 1]), abs(v[1, 0]), abs(v[0, 0] - v[1, 1]))
    if off <= SET_MATCH_TOL:
        w = complex(v[0, 0])
        note = "total multiplier is scalar w*I, w=%.12g%+.12gj" % (w.real, w.imag)
        if abs(w.imag) > DEROTATION_TOL:
            note += ("; borderline: w is complex, so the rotated set can leave "
                     "the design span unless the span is rotation closed")
        return ExpansionClass(ExpansionKind.INDISCERNIBLE, note)
    eigs = eigenvalues_2x2(v)
    if all(abs(lam.imag) <= DEROTATION_TOL for lam in eigs):
        return ExpansionClass(
            ExpansionKind.DIRECT_DISCERNIBLE,
            "eigenvalues of U*zeta are real: %.12g, %.12g" % (eigs[0].real, eigs[1].real))
    ws = _real_spectrum_derotations(eigs)
    if ws:
        # candidates come out in spectrum order; the first maps the leading
        # eigenvalue to +1, which keeps the witness deterministic
        w = ws[0]
        rot = [lam * w for lam in eigs]
        return ExpansionClass(
            ExpansionKind.INDIRECT_DISCERNIBLE,
            "de-rotation w=%.12g%+.12gj makes the spectrum real: %.12g, %.12g"
            % (w.real, w.imag, rot[0].real, rot[1].real))
    return ExpansionClass(
        ExpansionKind.INDISCERNIBLE,
        "borderline: eigenvalues %r admit no scalar de-rotation to a real "
        "spectrum and the multiplier is not scalar; outside the discernible "
        "taxonomy" % (eigs,))


@dataclass(frozen=True)
class SpanAudit:
    """Residual report for a span-separation audit."""

    residuals: np.ndarray
    min_residual: float
    max_residual: float
    separated: bool


def theorem1_audit(e: ExpandedConstellation) -> SpanAudit:
    """Distance of each primed generator from the real span of the base ones.

    For a discernible expansion every residual must be bounded away from
    zero; separated reports min residual > 1e-6.
    """
    res = span_residuals(e.base_generators, e.primed_generators.basis)
    return SpanAudit(residuals=res, min_residual=float(res.min()),
                     max_residual=float(res.max()),
                     separated=bool(res.min() > SPAN_SEPARATION_TOL))


def corollary1_audit(e: ExpandedConstellation) -> SpanAudit:
    """Distance of each PRIMED point from the base design, via analyze().

    separated reports that every added point misses the design span by more
    than 1e-6, i.e. (G_e minus G) intersects the design only at 0.
    """
    res = []
    for p in e.primed_points():
        _, resid = analyze(e.base_generators, p.matrix)
        res.append(resid)
    arr = np.array(res) if res else np.zeros(0)
    mn = float(arr.min()) if arr.size else float("inf")
    mx = float(arr.max()) if arr.size else 0.0
    return SpanAudit(residuals=arr, min_residual=mn, max_residual=mx,
                     separated=bool(arr.size and mn > SPAN_SEPARATION_TOL))


def decompose_direct_sum(e: ExpandedConstellation, s) -> TaggedPoint:
    """Locate a matrix in the expanded constellation and return its tagged
    direct-sum coordinates.  Max-abs matching at 1e-10."""
    m = as_complex_matrix(s)
    for p in e.points:
        if np.max(np.abs(m - p.matrix)) <= SET_MATCH_TOL:
            return p
    raise ValueError("matrix does not match any point of the expanded constellation")


def tagged_difference_residual(e: ExpandedConstellation, i: int, j: int,
                               tol: float = 1e-12) -> float:
    """Pairwise semiunitary-difference defect for two like-tagged points.

    Mixed-tag pairs are rejected: the identity is a within-subconstellation
    statement, each tag carrying its own basis.
    """
    a, b = e.points[i], e.points[j]
    if a.tag is not b.tag:
        raise ValueError("pairwise difference identity needs points from the "
                         "same subconstellation, got %s vs %s" % (a.tag.value, b.tag.value))
    g = e.base_generators if a.tag is Subconstellation.BASE else e.primed_generators
    two_k = 2 * g.num_symbols
    sl = slice(0, two_k) if a.tag is Subconstellation.BASE else slice(two_k, 2 * two_k)
    d = a.matrix - b.matrix
    lhs = d.conj().T @ d
    gap = a.chi_oplus[sl] - b.chi_oplus[sl]
    expect = g.scale * float(np.sum(gap ** 2)) * np.eye(g.num_antennas)
    return float(np.max(np.abs(lhs - expect)))


def rotated_synthesis_residual(g: GeneratorSet, symbols, zeta) -> float:
    """Defect of the rotation identity: rotated-basis synthesis of z*zeta
    versus zeta * S(z).  Zero for every unimodular zeta."""
    from .designs import rotate_generators
    from .linalg import symbols_to_real_vector

    z = np.asarray(symbols, dtype=np.complex128).reshape(-1)
    rot = rotate_generators(g, zeta)
    lhs = synthesize(rot, symbols_to_real_vector(z * complex(zeta)))
    rhs = complex(zeta) * synthesize(g, symbols_to_real_vector(z))
    return float(np.max(np.abs(lhs - rhs)))
