"""Torsion and curvature of a constant connection on a parallelized manifold.

The frame fields X_1..X_n close under brackets, [X_i, X_j] = lambda_ij^k X_k,
and the connection has constant symbols, nabla_{X_i} X_j = Gamma_ij^k X_k.
Arrays are indexed [i, j, k] with zero-based indices; JSON keys are
one-based, either as digit strings ("123") or comma separated ("1,2,3").
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .linalg import as_rational, format_rational, parse_rational
from .tensors import TensorElement, TensorSpec


class JacobiError(ValueError):
    pass


def _array(values, n: int) -> np.ndarray:
    arr = np.empty((n, n, n), dtype=object)
    flat = list(values)
    if len(flat) != n ** 3:
        raise ValueError(f"expected {n ** 3} constants, got {len(flat)}")
    arr.reshape(-1)[:] = [as_rational(x) for x in flat]
    return arr


@dataclass(frozen=True)
class ParallelismData:
    n: int
    lam: tuple[Fraction, ...]
    gamma: tuple[Fraction, ...]

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("n must be positive")
        object.__setattr__(self, "lam", tuple(_array(self.lam, self.n).reshape(-1)))
        object.__setattr__(self, "gamma", tuple(_array(self.gamma, self.n).reshape(-1)))
        lam = self.lam_array()
        if np.any(lam + lam.transpose(1, 0, 2) != 0):
            raise ValueError("structure constants must be skew in the lower indices")

    @classmethod
    def from_arrays(cls, lam, gamma) -> ParallelismData:
        lam = np.asarray(lam, dtype=object)
        return cls(lam.shape[0], tuple(lam.reshape(-1)), tuple(np.asarray(gamma, dtype=object).reshape(-1)))

    def lam_array(self) -> np.ndarray:
        return np.array(self.lam, dtype=object).reshape((self.n,) * 3)

    def gamma_array(self) -> np.ndarray:
        return np.array(self.gamma, dtype=object).reshape((self.n,) * 3)


# -- input ----------------------------------------------------------------------------

def _parse_key(key: str, n: int) -> tuple[int, int, int]:
    parts = key.split(",") if "," in key else list(key)
    try:
        idx = tuple(int(p) - 1 for p in parts)
    except ValueError:
        raise ValueError(f"bad index key {key!r}") from None
    if len(idx) != 3 or not all(0 <= i < n for i in idx):
        raise ValueError(f"index key {key!r} out of range for n = {n}")
    return idx  # type: ignore[return-value]


def from_dict(d: dict) -> ParallelismData:
    """Build model data from the sparse JSON form, completing lambda by skewness."""
    n = int(d["n"])
    if n <= 0:
        raise ValueError("n must be positive")
    lam = np.full((n, n, n), Fraction(0), dtype=object)
    given: dict[tuple[int, int, int], Fraction] = {}
    for key, value in (d.get("lambda") or {}).items():
        i, j, k = _parse_key(key, n)
        v = parse_rational(value)
        for idx, x in (((i, j, k), v), ((j, i, k), -v)):
            if idx in given and given[idx] != x:
                raise ValueError(f"structure constants for {key!r} contradict skewness")
            given[idx] = x
            lam[idx] = x
    gamma = np.full((n, n, n), Fraction(0), dtype=object)
    for key, value in (d.get("gamma") or {}).items():
        gamma[_parse_key(key, n)] = parse_rational(value)
    return ParallelismData.from_arrays(lam, gamma)


def load(path: str | Path) -> ParallelismData:
    return from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def so3_constants() -> np.ndarray:
    """[e_i, e_j] = e_k for (i, j, k) cyclic."""
    lam = np.full((3, 3, 3), Fraction(0), dtype=object)
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        lam[i, j, k] = Fraction(1)
        lam[j, i, k] = Fraction(-1)
    return lam


def adjoint_gamma(lam: np.ndarray, scale=Fraction(1, 2)) -> np.ndarray:
    """Gamma_ij^k = scale * lambda_ij^k, i.e. nabla_X Y = scale * [X, Y]."""
    return np.vectorize(lambda x: as_rational(scale) * x, otypes=[object])(lam)


# -- checks and constants -------------------------------------------------------------

def jacobi_defects(d: ParallelismData) -> np.ndarray:
    """J[i, j, k, l] = sum over m of the cyclic sum of lambda_ij^m lambda_mk^l."""
    lam = d.lam_array()
    # (i,j,k,l) <- lam[i,j,m] lam[m,k,l]
    t = np.tensordot(lam, lam, axes=([2], [0]))
    return t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)


def jacobi_check(d: ParallelismData) -> bool:
    return not np.any(jacobi_defects(d) != 0)


def _require_jacobi(d: ParallelismData) -> None:
    if not jacobi_check(d):
        bad = next(idx for idx in itertools.product(range(d.n), repeat=4) if jacobi_defects(d)[idx] != 0)
        raise JacobiError(f"structure constants violate the Jacobi identity at indices {tuple(i + 1 for i in bad)}")


def torsion_constants(d: ParallelismData) -> TensorElement:
    """T_ij^k = Gamma_ij^k - Gamma_ji^k - lambda_ij^k."""
    _require_jacobi(d)
    g = d.gamma_array()
    t = g - g.transpose(1, 0, 2) - d.lam_array()
    return TensorElement.from_array(TensorSpec(d.n, "(2,1)", frozenset({"skew12"})), t)


def gamma_matrices(d: ParallelismData) -> list[np.ndarray]:
    """Gamma_i with entry [k][j] = Gamma_ij^k, the matrix of nabla_{X_i}."""
    g = d.gamma_array()
    return [g[i].T for i in range(d.n)]


def curvature_constants(d: ParallelismData) -> TensorElement:
    """R(e_i, e_j) = Gamma_i Gamma_j - Gamma_j Gamma_i - sum_k lambda_ij^k Gamma_k."""
    _require_jacobi(d)
    n = d.n
    mats = gamma_matrices(d)
    lam = d.lam_array()
    arr = np.empty((n,) * 4, dtype=object)
    for i, j in itertools.product(range(n), repeat=2):
        m = mats[i].dot(mats[j]) - mats[j].dot(mats[i])
        for k in range(n):
            if lam[i, j, k]:
                m = m - lam[i, j, k] * mats[k]
        # coordinate [i, j, c, e] is component e of R(e_i, e_j) e_c
        arr[i, j] = m.T
    return TensorElement.from_array(TensorSpec(n, "(3,1)", frozenset({"skew12"})), arr)


def curvature_matrix(r: TensorElement, i: int, j: int) -> np.ndarray:
    """Matrix of R(e_i, e_j) acting on column vectors."""
    return r.array()[i, j].T


def bianchi_defect(r: TensorElement) -> np.ndarray:
    """R(u,v)w + R(v,w)u + R(w,u)v in coordinates."""
    a = r.array()
    return a + a.transpose(1, 2, 0, 3) + a.transpose(2, 0, 1, 3)


def _sparse_one_based(t: TensorElement) -> dict[str, int | str]:
    arr = t.array()
    return {
        ",".join(str(i + 1) for i in idx): format_rational(arr[idx])
        for idx in itertools.product(range(t.spec.n), repeat=arr.ndim)
        if arr[idx] != 0
    }


def model_document(d: ParallelismData) -> dict:
    """Torsion and curvature constants with one-based index keys."""
    t = torsion_constants(d)
    r = curvature_constants(d)
    return {
        "n": d.n,
        "jacobi": True,
        "torsion": _sparse_one_based(t),
        "torsion_free": t.is_zero(),
        "curvature": _sparse_one_based(r),
        "first_bianchi_holds": not np.any(bianchi_defect(r) != 0),
    }
