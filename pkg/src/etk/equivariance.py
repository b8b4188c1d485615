"""Invariance operators and the spaces of admissible characteristic tensors.

For a matrix L in the Lie algebra the derivation D_L acts on each slot of a
tensor: an output slot by L, an input slot by -L^T.  A group element g acts
by g on output slots and g^-T on input slots.  The admissible curvature,
torsion and inner torsion are the simultaneous kernels of these operators
intersected with the symmetry subspace of the tensor type.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .groups import GroupSpec, Violation, validate
from .linalg import (
    RatMatrix,
    Subspace,
    _Echelon,
    coset_reduce,
    _integer_row,
    _kernel_of_rows,
    _kernel_vectors,
    _dense,
)
from .tensors import TensorElement, TensorSpec, _constraint_rows, flat_index, symmetry_subspace


class InvalidGroupError(ValueError):
    def __init__(self, group: GroupSpec, violations: Sequence[Violation]):
        self.group = group
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{group.name} is not a valid group spec: {lines}")


@lru_cache(maxsize=None)
def _violations(group: GroupSpec) -> tuple[Violation, ...]:
    return tuple(validate(group))


def require_valid(group: GroupSpec) -> None:
    bad = _violations(group)
    if bad:
        raise InvalidGroupError(group, bad)


@dataclass(frozen=True)
class InvariantSpaceResult:
    spec: TensorSpec
    space: Subspace
    group: str
    filters: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return self.space.dim

    def elements(self) -> list[TensorElement]:
        return [TensorElement(self.spec, v) for v in self.space.vectors()]


@dataclass(frozen=True)
class InnerTorsionSolution:
    lambda_basis: tuple[TensorElement, ...]
    modulo: Subspace
    quotient_dim: int
    group: str = ""
    lifts: Subspace | None = field(default=None, compare=False)


# -- per-axis actions -----------------------------------------------------------------

def _check_square(m: RatMatrix, n: int) -> None:
    if m.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} matrix, got {m.rows}x{m.cols}")


def _derivation_axes(spec: TensorSpec, L: RatMatrix) -> list[RatMatrix]:
    neg_t = -L.T
    return [L if s == "out" else neg_t for s in spec.signature]


def _action_axes(spec: TensorSpec, g: RatMatrix) -> list[RatMatrix]:
    inv_t = g.inverse().T
    return [g if s == "out" else inv_t for s in spec.signature]


def _derivation_rows(spec: TensorSpec, L: RatMatrix) -> Iterable[dict[int, Fraction]]:
    """Rows of D_L = sum over slots of (I x .. x A_k x .. x I), built sparsely."""
    n = spec.n
    axes = _derivation_axes(spec, L)
    nz = [[[(e, a[i, e]) for e in range(n) if a[i, e] != 0] for i in range(n)] for a in axes]
    for idx in itertools.product(range(n), repeat=spec.order):
        row: dict[int, Fraction] = {}
        for k, i in enumerate(idx):
            for e, v in nz[k][i]:
                col = flat_index(idx[:k] + (e,) + idx[k + 1:], n)
                row[col] = row.get(col, 0) + v
        yield {c: v for c, v in row.items() if v}


def _rows_to_matrix(rows: Iterable[dict[int, Fraction]], ncols: int) -> RatMatrix:
    return RatMatrix((_dense(r, ncols) for r in rows), cols=ncols)


def apply_axes(spec: TensorSpec, mats: Sequence[RatMatrix], coords: Sequence) -> np.ndarray:
    """Apply one matrix along each slot of a coordinate array."""
    t = np.asarray(coords, dtype=object).reshape(spec.shape)
    for axis, m in enumerate(mats):
        a = np.array(m.tolist(), dtype=object)
        t = np.moveaxis(np.tensordot(a, t, axes=([1], [axis])), 0, axis)
    return t


def apply_derivation(spec: TensorSpec, L: RatMatrix, coords: Sequence) -> np.ndarray:
    t = np.asarray(coords, dtype=object).reshape(spec.shape)
    out = np.zeros(spec.shape, dtype=object)
    for axis, a in enumerate(_derivation_axes(spec, L)):
        arr = np.array(a.tolist(), dtype=object)
        out = out + np.moveaxis(np.tensordot(arr, t, axes=([1], [axis])), 0, axis)
    return out


def apply_action(spec: TensorSpec, g: RatMatrix, coords: Sequence) -> np.ndarray:
    return apply_axes(spec, _action_axes(spec, g), coords)


def infinitesimal_constraint(spec: TensorSpec, L: RatMatrix) -> RatMatrix:
    """Matrix of D_L on the full tensor space of ``spec``."""
    _check_square(L, spec.n)
    return _rows_to_matrix(_derivation_rows(spec, L), spec.dim)


def finite_constraint(spec: TensorSpec, g: RatMatrix) -> RatMatrix:
    """Matrix of rho(g) - Id; its kernel is the space of g-fixed tensors."""
    _check_square(g, spec.n)
    if g.det() == 0:
        raise ValueError("group element is singular")
    axes = [np.array(m.tolist(), dtype=object) for m in _action_axes(spec, g)]
    rho = axes[0]
    for a in axes[1:]:
        rho = np.kron(rho, a)
    rho = rho - np.eye(spec.dim, dtype=int).astype(object)
    return RatMatrix(rho.tolist(), cols=spec.dim)


# -- solving --------------------------------------------------------------------------

def _restrict(space: Subspace, images: list[np.ndarray]) -> Subspace:
    """Subspace of ``space`` whose combinations map to zero, given the images of its basis."""
    if not space.dim:
        return space
    eqs: dict[int, dict[int, Fraction]] = {}
    for k, img in enumerate(images):
        for j, x in enumerate(np.asarray(img, dtype=object).reshape(-1)):
            if x != 0:
                eqs.setdefault(j, {})[k] = x
    coeffs = _kernel_of_rows((_integer_row(e.items()) for e in eqs.values()), space.dim)
    return Subspace.span((space.combine(c) for c in coeffs.vectors()), space.ambient_dim)


def _fixed_by(space: Subspace, spec: TensorSpec, elements: Sequence[RatMatrix]) -> Subspace:
    for g in elements:
        if not space.dim:
            break
        vecs = space.vectors()
        images = [apply_action(spec, g, v) - np.asarray(v, dtype=object).reshape(spec.shape) for v in vecs]
        space = _restrict(space, images)
    return space


def invariant_tensors(group: GroupSpec, spec: TensorSpec) -> InvariantSpaceResult:
    """Tensors of type ``spec`` invariant under ``group``.

    Symmetry equations go in first, then one derivation per algebra basis
    element; the component representatives are imposed last on the
    (small) surviving space.
    """
    require_valid(group)
    if spec.n != group.n:
        raise ValueError(f"tensor dimension {spec.n} does not match group dimension {group.n}")
    if spec.valence == "inner-torsion-map":
        raise ValueError("use inner_torsion_space for inner-torsion maps")
    ech = _Echelon(spec.dim)
    for r in _constraint_rows(spec):
        ech.add(r)
    for L in group.lie_algebra_basis:
        for r in _derivation_rows(spec, L):
            if r:
                ech.add(_integer_row(r.items()))
    red = ech.reduced()
    space = Subspace._from_sparse(_kernel_vectors(red, spec.dim), spec.dim)
    space = _fixed_by(space, spec, group.component_reps)
    return InvariantSpaceResult(spec, space, group.name)


def is_invariant(group: GroupSpec, t: TensorElement) -> bool:
    """Direct check of the invariance relations for one tensor."""
    spec = t.spec
    if spec.n != group.n:
        raise ValueError("tensor and group dimensions differ")
    if spec.valence == "inner-torsion-map":
        return not any(any(x != 0 for x in v) for v in _inner_torsion_residuals(group, t.coords))
    for L in group.lie_algebra_basis:
        if np.any(apply_derivation(spec, L, t.coords) != 0):
            return False
    base = t.array()
    for g in group.component_reps:
        if np.any(apply_action(spec, g, t.coords) != base):
            return False
    return True


# -- inner torsion --------------------------------------------------------------------

_ITMAP = "inner-torsion-map"


def _slot_reducer(group: GroupSpec):
    """Coefficient form of coset reduction modulo g for each matrix entry.

    Returns the non-pivot entries q and, for each, the list of
    (entry, coefficient) pairs expressing entry q of the reduced matrix.
    """
    alg = group.algebra
    n2 = group.n * group.n
    pivots = set(alg.pivots)
    rows = alg.sparse_vectors()
    out = []
    for q in range(n2):
        if q in pivots:
            continue
        terms = [(q, Fraction(1))]
        for p, r in zip(alg.pivots, rows):
            c = r.get(q)
            if c:
                terms.append((p, -c))
        out.append((q, terms))
    return out


def _rep_rows(n: int, g: RatMatrix) -> list[dict[int, Fraction]]:
    """Rows of lambda -> Ad_g(lambda(e_i)) - lambda(g e_i), in (i, r, s) layout."""
    ginv = g.inverse()
    rows = []
    for i, r, s in itertools.product(range(n), repeat=3):
        row: dict[int, Fraction] = {}
        for r2 in range(n):
            grr = g[r, r2]
            if not grr:
                continue
            for s2 in range(n):
                v = grr * ginv[s2, s]
                if v:
                    k = flat_index((i, r2, s2), n)
                    row[k] = row.get(k, 0) + v
        for e in range(n):
            v = g[e, i]
            if v:
                k = flat_index((e, r, s), n)
                row[k] = row.get(k, 0) - v
        rows.append({k: v for k, v in row.items() if v})
    return rows


def _project_rows(rows: list[dict[int, Fraction]], n: int, reducer) -> Iterable[dict[int, Fraction]]:
    n2 = n * n
    for i in range(n):
        for q, terms in reducer:
            out: dict[int, Fraction] = {}
            for p, c in terms:
                for k, v in rows[i * n2 + p].items():
                    out[k] = out.get(k, 0) + c * v
            out = {k: v for k, v in out.items() if v}
            if out:
                yield out


def _inner_torsion_residuals(group: GroupSpec, coords: Sequence) -> list[tuple[Fraction, ...]]:
    """Residual of every relation, reduced modulo g slot by slot."""
    n = group.n
    spec = TensorSpec(n, _ITMAP)
    lam = np.asarray(coords, dtype=object).reshape(spec.shape)
    residuals = [apply_derivation(spec, L, coords) for L in group.lie_algebra_basis]
    for g in group.component_reps:
        ga = np.array(g.tolist(), dtype=object)
        gi = np.array(g.inverse().tolist(), dtype=object)
        ad = np.stack([ga.dot(lam[i]).dot(gi) for i in range(n)])
        moved = np.tensordot(ga.T, lam, axes=([1], [0]))
        residuals.append(ad - moved)
    return [
        coset_reduce(tuple(r[i].reshape(-1)), group.algebra)
        for r in residuals
        for i in range(n)
    ]


def _hom_into_algebra(group: GroupSpec) -> Subspace:
    n = group.n
    n2 = n * n
    vecs = []
    for i in range(n):
        for r in group.algebra.sparse_vectors():
            vecs.append({i * n2 + k: v for k, v in r.items()})
    return Subspace._from_sparse(vecs, n * n2)


def inner_torsion_space(group: GroupSpec) -> InnerTorsionSolution:
    """Admissible inner torsion, as canonical lifts modulo Hom(R^n, g)."""
    require_valid(group)
    n = group.n
    spec = TensorSpec(n, _ITMAP)
    N = spec.dim
    reducer = _slot_reducer(group)
    ech = _Echelon(N)
    if reducer:
        for L in group.lie_algebra_basis:
            rows = list(_derivation_rows(spec, L))
            for r in _project_rows(rows, n, reducer):
                ech.add(_integer_row(r.items()))
        for g in group.component_reps:
            for r in _project_rows(_rep_rows(n, g), n, reducer):
                ech.add(_integer_row(r.items()))
    lifts = Subspace._from_sparse(_kernel_vectors(ech.reduced(), N), N)
    modulo = _hom_into_algebra(group)
    reduced = [_dense(modulo._reduce_sparse(v), N) for v in lifts.sparse_vectors()]
    quotient = Subspace.span(reduced, N)
    basis = tuple(TensorElement(spec, v) for v in quotient.vectors())
    return InnerTorsionSolution(basis, modulo, quotient.dim, group.name, lifts)


# -- g-valuedness ---------------------------------------------------------------------

def g_valued_filter(result: InvariantSpaceResult, group: GroupSpec) -> InvariantSpaceResult:
    """Keep the curvature tensors R with R(e_i, e_j) in g for every pair i, j."""
    spec = result.spec
    if spec.valence != "(3,1)":
        raise ValueError("the g-valued filter applies to (3,1) tensors")
    if spec.n != group.n:
        raise ValueError("space and group dimensions differ")
    n = spec.n
    alg = group.algebra
    images = []
    for v in result.space.vectors():
        t = np.asarray(v, dtype=object).reshape(spec.shape)
        parts = []
        for i, j in itertools.product(range(n), repeat=2):
            # endomorphism R(e_i, e_j) has matrix entry [d][c] = t[i, j, c, d]
            end = {d * n + c: t[i, j, c, d] for c in range(n) for d in range(n) if t[i, j, c, d] != 0}
            red = alg._reduce_sparse(end)
            parts.append(_dense(red, n * n))
        images.append(np.array([x for p in parts for x in p], dtype=object))
    space = _restrict(result.space, images)
    return InvariantSpaceResult(spec, space, result.group, result.filters + ("g-valued",))


def endomorphism(t: TensorElement, i: int, j: int) -> RatMatrix:
    """The matrix of R(e_i, e_j) for a (3,1) tensor."""
    n = t.spec.n
    arr = t.array()
    return RatMatrix([[arr[i, j, c, d] for c in range(n)] for d in range(n)], cols=n)
