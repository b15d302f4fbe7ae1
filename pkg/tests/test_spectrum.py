import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rharmonic import spectrum as S
from rharmonic.errors import CertificateFailure
from rharmonic.spectrum import (
    CurveProblem,
    closed_form_block,
    closed_form_eigenvalues,
    first_variation,
    fourier_block,
    index_nullity,
    mode_basis,
    printed_basis_scale,
)


def _close(a, b, tol=1e-7):
    return np.max(np.abs(a - b)) < tol * max(1.0, np.max(np.abs(b)))


@pytest.mark.parametrize("r", [2, 3, 4])
@pytest.mark.parametrize("k", [1, 2])
def test_circle_blocks_match_closed_form(r, k):
    prob = CurveProblem("circle", r, k)
    for m in range(1, 5):
        assert _close(fourier_block(prob, m).matrix, closed_form_block(prob, m))


@pytest.mark.parametrize("r", [3, 4])
def test_paraboloid_blocks_match_closed_form(r):
    prob = CurveProblem("paraboloid", r)
    s = printed_basis_scale(prob)
    D = np.diag([1.0, 1.0, s, s])
    for m in range(1, 4):
        assert _close(D @ fourier_block(prob, m).matrix @ D, closed_form_block(prob, m))


def test_printed_scale_only_for_paraboloid_r3():
    assert printed_basis_scale(CurveProblem("paraboloid", 3)) == pytest.approx(np.sqrt(0.5))
    assert printed_basis_scale(CurveProblem("paraboloid", 4)) == 1.0
    assert printed_basis_scale(CurveProblem("circle", 3, 2)) == 1.0


def test_blocks_are_symmetric():
    for prob in (CurveProblem("circle", 3, 2), CurveProblem("paraboloid", 4)):
        for m in range(0, 4):
            H = fourier_block(prob, m).matrix
            assert np.max(np.abs(H - H.T)) < 1e-9 * max(1.0, np.max(np.abs(H)))


@pytest.mark.parametrize("prob", [CurveProblem("circle", 2, 1), CurveProblem("circle", 3, 2), CurveProblem("paraboloid", 3)])
def test_first_variation_vanishes(prob):
    for m in range(3):
        for V in mode_basis(prob, m)[0]:
            assert abs(first_variation(prob.curve, prob.r, V)) < 1e-9


@pytest.mark.parametrize("r", [2, 3])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_closed_form_eigenvalues_match_blocks(r, k):
    prob = CurveProblem("circle", r, k)
    for m in range(1, 5):
        lo, hi = closed_form_eigenvalues(prob, m)
        ev = np.sort(fourier_block(prob, m).eigenvalues)
        assert ev[0] == pytest.approx(lo, rel=1e-7, abs=1e-7)
        assert ev[-1] == pytest.approx(hi, rel=1e-7)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([("circle", 2), ("circle", 3), ("paraboloid", 3), ("paraboloid", 4)]), st.integers(1, 3), st.integers(1, 8))
def test_closed_form_pair_is_block_spectrum(case, k, m):
    kind, r = case
    prob = CurveProblem(kind, r, k if kind == "circle" else 1)
    lo, hi = closed_form_eigenvalues(prob, m)
    ev = np.linalg.eigvalsh(closed_form_block(prob, m))
    assert ev[0] == pytest.approx(lo, rel=1e-9, abs=1e-9 * abs(hi))
    assert ev[-1] == pytest.approx(hi, rel=1e-9)


def test_report_fields():
    rep = index_nullity(CurveProblem("circle", 2, 2), 8)
    assert (rep.index, rep.nullity) == (3, 3)
    assert rep.first_variation_max < 1e-9
    assert len(rep.blocks) == 9
    assert rep.certificate["growth_ratio"] > 1


def test_m_max_validation():
    with pytest.raises(ValueError):
        index_nullity(CurveProblem("circle", 2, 3), 5)


def test_certificate_failure(monkeypatch):
    real = S.fourier_block

    def flipped(problem, m, q=None):
        b = real(problem, m, q)
        return S.FourierBlock(b.mode, -b.matrix, b.basis)

    monkeypatch.setattr(S, "fourier_block", flipped)
    with pytest.raises(CertificateFailure):
        index_nullity(CurveProblem("circle", 2, 1), 5)
    rep = index_nullity(CurveProblem("circle", 2, 1), 5, require_certificate=False)
    assert not rep.certificate["certified"]


def test_problem_validation():
    with pytest.raises(ValueError):
        CurveProblem("ellipse", 2)
    with pytest.raises(ValueError):
        CurveProblem("paraboloid", 3, 2)
    assert closed_form_block(CurveProblem("circle", 5, 1), 1) is None
    assert closed_form_block(CurveProblem("circle", 2, 1), 0) is None
