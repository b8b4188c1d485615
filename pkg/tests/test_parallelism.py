import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from etk.parallelism import (
    JacobiError,
    ParallelismData,
    adjoint_gamma,
    bianchi_defect,
    curvature_constants,
    curvature_matrix,
    from_dict,
    jacobi_check,
    load,
    model_document,
    so3_constants,
    torsion_constants,
)

small = st.fractions(min_value=-2, max_value=2, max_denominator=3)


def zeros(n):
    return np.full((n, n, n), Fraction(0), dtype=object)


def ad(lam, i):
    # matrix [k][j] = lambda_ij^k
    return lam[i].T


def heisenberg():
    lam = zeros(3)
    lam[0, 1, 2], lam[1, 0, 2] = Fraction(1), Fraction(-1)
    return lam


def solvable():
    # [e1, e2] = e2, [e1, e3] = e3
    lam = zeros(3)
    lam[0, 1, 1], lam[1, 0, 1] = Fraction(1), Fraction(-1)
    lam[0, 2, 2], lam[2, 0, 2] = Fraction(1), Fraction(-1)
    return lam


def change_basis(lam, p):
    """Structure constants in the basis f_a = sum_i p[i][a] e_i."""
    n = lam.shape[0]
    pinv = oracle.mat_inverse(p)
    out = zeros(n)
    for a, b, c in itertools.product(range(n), repeat=3):
        out[a, b, c] = sum(
            p[i][a] * p[j][b] * lam[i, j, k] * pinv[c][k]
            for i, j, k in itertools.product(range(n), repeat=3)
            if lam[i, j, k]
        )
    return out


def test_jacobi_examples():
    assert jacobi_check(ParallelismData.from_arrays(zeros(3), zeros(3)))
    assert jacobi_check(ParallelismData.from_arrays(so3_constants(), zeros(3)))
    # [e1,e2] = e3, [e1,e3] = e1: the cyclic sum on (e1, e2, e3) is -e3
    lam = zeros(3)
    lam[0, 1, 2], lam[1, 0, 2] = Fraction(1), Fraction(-1)
    lam[0, 2, 0], lam[2, 0, 0] = Fraction(1), Fraction(-1)
    assert not jacobi_check(ParallelismData.from_arrays(lam, zeros(3)))


def test_sign_flipped_so3_is_still_a_lie_algebra():
    # brackets [e1,e2]=a e3, [e2,e3]=b e1, [e3,e1]=c e2 satisfy Jacobi for all a, b, c
    d = from_dict({"n": 3, "lambda": {"123": 1, "231": 1, "312": -1}})
    assert jacobi_check(d)


def test_torsion_examples():
    lam = so3_constants()
    assert torsion_constants(ParallelismData.from_arrays(zeros(3), zeros(3))).is_zero()
    assert torsion_constants(ParallelismData.from_arrays(lam, adjoint_gamma(lam))).is_zero()
    t = torsion_constants(ParallelismData.from_arrays(lam, zeros(3)))
    assert not np.any(t.array() + lam != 0)


def test_half_adjoint_curvature_on_so3():
    lam = so3_constants()
    r = curvature_constants(ParallelismData.from_arrays(lam, adjoint_gamma(lam)))
    expected = ad(lam, 2) * Fraction(-1, 4)
    assert not np.any(curvature_matrix(r, 0, 1) != expected)
    # the bracket formula behind that value
    formula = (ad(lam, 0).dot(ad(lam, 1)) - ad(lam, 1).dot(ad(lam, 0))) / 4 - ad(lam, 2) / 2
    assert not np.any(formula != expected)


def test_curvature_vanishes_for_flat_data():
    assert curvature_constants(ParallelismData.from_arrays(zeros(2), zeros(2))).is_zero()
    # abelian algebra, commuting Gamma_i (both diagonal)
    g = zeros(2)
    g[0, 0, 0], g[1, 1, 1] = Fraction(2), Fraction(-1)
    g[0, 1, 1], g[1, 0, 0] = Fraction(3), Fraction(5)
    assert curvature_constants(ParallelismData.from_arrays(zeros(2), g)).is_zero()


def test_jacobi_failure_blocks_constants():
    lam = zeros(3)
    lam[0, 1, 2], lam[1, 0, 2] = Fraction(1), Fraction(-1)
    lam[0, 2, 0], lam[2, 0, 0] = Fraction(1), Fraction(-1)
    d = ParallelismData.from_arrays(lam, zeros(3))
    with pytest.raises(JacobiError):
        torsion_constants(d)
    with pytest.raises(JacobiError):
        curvature_constants(d)


@st.composite
def torsion_free_models(draw):
    base = draw(st.sampled_from([so3_constants, heisenberg, solvable]))()
    # unit lower times unit upper triangular: always invertible
    lo = [[int(i == j) if i <= j else draw(st.integers(-2, 2)) for j in range(3)] for i in range(3)]
    up = [[int(i == j) if i >= j else draw(st.integers(-2, 2)) for j in range(3)] for i in range(3)]
    p = [[sum(lo[i][k] * up[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    lam = change_basis(base, p)
    # Gamma = lambda/2 + S with S symmetric in the lower indices
    s = zeros(3)
    for i, j, k in itertools.product(range(3), repeat=3):
        if i <= j:
            s[i, j, k] = s[j, i, k] = draw(small)
    return ParallelismData.from_arrays(lam, adjoint_gamma(lam) + s)


@settings(max_examples=25, deadline=None)
@given(torsion_free_models())
def test_torsion_free_curvature_satisfies_first_bianchi(d):
    assert jacobi_check(d)
    assert torsion_constants(d).is_zero()
    assert not np.any(bianchi_defect(curvature_constants(d)) != 0)


@settings(max_examples=25, deadline=None)
@given(st.lists(small, min_size=27, max_size=27))
def test_torsion_is_skew_for_any_gamma(g):
    t = torsion_constants(ParallelismData(3, (0,) * 27, tuple(g))).array()
    assert not np.any(t + t.transpose(1, 0, 2) != 0)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([so3_constants, heisenberg, solvable]))
def test_half_adjoint_is_torsion_free(base):
    lam = base()
    assert torsion_constants(ParallelismData.from_arrays(lam, adjoint_gamma(lam))).is_zero()


def test_json_input(tmp_path):
    d = from_dict({"n": 3, "lambda": {"1,2,3": 1, "231": "1", "312": 1}, "gamma": {"123": "1/2"}})
    lam = d.lam_array()
    assert lam[1, 0, 2] == -1 and lam[2, 1, 0] == -1
    assert d.gamma_array()[0, 1, 2] == Fraction(1, 2)
    with pytest.raises(ValueError):
        from_dict({"n": 3, "lambda": {"123": 1, "213": 1}})
    with pytest.raises(ValueError):
        from_dict({"n": 3, "lambda": {"124": 1}})
    with pytest.raises(ValueError):
        from_dict({"n": 2, "lambda": {"11": 1}})
    with pytest.raises(ValueError):
        ParallelismData(2, (1,) + (0,) * 7, (0,) * 8)
    path = tmp_path / "m.json"
    path.write_text('{"n": 2, "lambda": {"122": 1}}')
    assert load(path).lam_array()[1, 0, 1] == -1


def test_model_document_uses_one_based_keys():
    lam = so3_constants()
    doc = model_document(ParallelismData.from_arrays(lam, adjoint_gamma(lam)))
    assert doc["torsion_free"] and doc["first_bianchi_holds"]
    # R(e1, e2) e1 = -1/4 ad(e3) e1 = -1/4 e2
    assert doc["curvature"]["1,2,1,2"] == "-1/4"
