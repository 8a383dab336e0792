import numpy as np
import pytest

from stclab.designs import alamouti_generators, radon_hurwitz_check
from stclab.expansion import (
    ExpansionKind,
    Subconstellation,
    classify_expansion,
    corollary1_audit,
    decompose_direct_sum,
    expand,
    rotated_synthesis_residual,
    tagged_difference_residual,
    theorem1_audit,
)

U_DIRECT = np.diag([1.0, -1.0])


def _grid():
    return [np.array([a, b, c, d], dtype=float)
            for a in (-1, 1) for b in (-1, 1) for c in (-1, 1) for d in (-1, 1)]


def _expanded():
    return expand(alamouti_generators(), _grid(), U_DIRECT)


def test_expand_structure_and_tags():
    e = _expanded()
    assert len(e.points) == 32 and not e.degenerate
    assert len(e.base_points()) == 16 and len(e.primed_points()) == 16
    for p in e.base_points():
        assert np.all(p.chi_oplus[4:] == 0) and np.all(np.abs(p.chi_oplus[:4]) == 1)
    for p in e.primed_points():
        assert np.all(p.chi_oplus[:4] == 0) and np.all(np.abs(p.chi_oplus[4:]) == 1)
    # primed basis really is base @ U and still satisfies the design condition
    for b, bp in zip(e.base_generators.basis, e.primed_generators.basis):
        assert np.allclose(b @ U_DIRECT, bp)
    assert radon_hurwitz_check(e.primed_generators).passed


def test_expand_identity_multiplier_is_degenerate():
    e = expand(alamouti_generators(), _grid(), np.eye(2))
    assert e.degenerate and len(e.points) == 16
    assert len(e.primed_points()) == 0


def test_expand_rejects_bad_multipliers():
    g = alamouti_generators()
    with pytest.raises(ValueError):
        expand(g, _grid(), np.diag([1.0, 2.0]))       # not unitary
    with pytest.raises(ValueError):
        expand(g, _grid(), U_DIRECT, zeta=2.0)        # not unimodular
    with pytest.raises(ValueError):
        expand(g, [], U_DIRECT)
    with pytest.raises(ValueError):
        expand(g, _grid(), np.eye(3))                 # wrong size


def test_classify_identity_multipliers():
    g = alamouti_generators()
    for u in (np.eye(2), -np.eye(2)):
        r = classify_expansion(u, 1.0, g, _grid())
        assert r.kind is ExpansionKind.NOT_AN_EXPANSION


def test_classify_set_coincidence():
    # diag(i,-i) maps the full 4PSK product set onto itself
    g = alamouti_generators()
    r = classify_expansion(np.diag([1j, -1j]), 1.0, g, _grid())
    assert r.kind is ExpansionKind.NOT_AN_EXPANSION
    assert "coincides" in r.witness


def test_classify_direct():
    g = alamouti_generators()
    r = classify_expansion(U_DIRECT, 1.0, g, _grid())
    assert r.kind is ExpansionKind.DIRECT_DISCERNIBLE
    r = classify_expansion(np.array([[0.0, 1.0], [1.0, 0.0]]), 1.0, g, _grid())
    assert r.kind is ExpansionKind.DIRECT_DISCERNIBLE


def test_classify_indirect_with_derotation():
    # over an asymmetric point set the quarter turn no longer folds back
    g = alamouti_generators()
    r = classify_expansion(np.diag([1j, -1j]), 1.0, g, _grid()[:5])
    assert r.kind is ExpansionKind.INDIRECT_DISCERNIBLE
    assert "de-rotation" in r.witness and "-1j" in r.witness


def test_classify_scalar_rotations_are_flagged():
    g = alamouti_generators()
    pts = _grid()[:5]
    for w in (1j, np.exp(1j * np.pi / 3)):
        r = classify_expansion(np.eye(2), w, g, pts)
        assert r.kind is ExpansionKind.INDISCERNIBLE
        assert "borderline" in r.witness
    # a real scalar shrug: U=I zeta=-1 means V=-I, still the base set
    r = classify_expansion(np.eye(2), -1.0, g, _grid())
    assert r.kind is ExpansionKind.NOT_AN_EXPANSION


def test_classify_borderline_non_scalar():
    t = 0.7
    rot = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    r = classify_expansion(rot, 1.0, alamouti_generators(), _grid()[:5])
    assert r.kind is ExpansionKind.INDISCERNIBLE
    assert "borderline" in r.witness


def test_classify_invariant_under_reparameterization():
    rng = np.random.default_rng(21)
    g = alamouti_generators()
    pts = _grid()[:5]
    cases = [U_DIRECT, np.diag([1j, -1j]), 1j * np.eye(2),
             np.array([[0.0, 1.0], [1.0, 0.0]])]
    for u in cases:
        ref = classify_expansion(u, 1.0, g, pts).kind
        for _ in range(10):
            w = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
            got = classify_expansion(u * np.conj(w), w, g, pts).kind
            assert got is ref


def test_theorem1_and_corollary1_separation():
    e = _expanded()
    t1 = theorem1_audit(e)
    assert t1.separated
    assert np.max(np.abs(t1.residuals - 1.0)) < 1e-10
    c1 = corollary1_audit(e)
    assert c1.separated and len(c1.residuals) == 16
    assert np.max(np.abs(c1.residuals - 2.0)) < 1e-10


def test_scalar_rotation_still_leaves_this_span():
    # i*B_l is orthogonal to the base span for this quadruple: the scalar
    # multiplier iI produces exactly the same separation numbers as U_DIRECT
    e = expand(alamouti_generators(), _grid(), 1j * np.eye(2))
    assert not e.degenerate
    t1 = theorem1_audit(e)
    assert np.max(np.abs(t1.residuals - 1.0)) < 1e-10
    c1 = corollary1_audit(e)
    assert np.max(np.abs(c1.residuals - 2.0)) < 1e-10


def test_decompose_direct_sum_round_trip():
    e = _expanded()
    for p in e.points:
        q = decompose_direct_sum(e, p.matrix.copy())
        assert q.tag is p.tag
        assert np.array_equal(q.chi_oplus, p.chi_oplus)
    with pytest.raises(ValueError):
        decompose_direct_sum(e, np.zeros((2, 2)))


def test_tagged_difference_identity_and_mixed_rejection():
    e = _expanded()
    base_idx = [i for i, p in enumerate(e.points) if p.tag is Subconstellation.BASE]
    primed_idx = [i for i, p in enumerate(e.points) if p.tag is Subconstellation.PRIMED]
    for ids in (base_idx, primed_idx):
        for a in ids[:6]:
            for b in ids[:6]:
                if a != b:
                    assert tagged_difference_residual(e, a, b) < 1e-12
    with pytest.raises(ValueError, match="same subconstellation"):
        tagged_difference_residual(e, base_idx[0], primed_idx[0])


def test_rotated_synthesis_residual_vanishes():
    rng = np.random.default_rng(22)
    g = alamouti_generators()
    for _ in range(100):
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        zeta = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        assert rotated_synthesis_residual(g, z, zeta) < 1e-13
