"""Finite-dimensional tensor spaces, their symmetry subspaces and named tensors.

Coordinates are flat vectors in row-major order (last index fastest).  The
slot layout per valence is:

* ``(2,1)``  ``T[a, b, d]``    = component d of T(e_a, e_b)
* ``(3,1)``  ``R[a, b, c, d]`` = component d of R(e_a, e_b) e_c
* ``(4,0)``  ``R[a, b, c, d]`` = R(e_a, e_b, e_c, e_d)
* inner-torsion map ``L[i, r, s]`` = entry (r, s) of the matrix lambda(e_i)

Lowering with the standard inner product sends R(u, v)w to
<R(u, v)w, z>, so the output slot of a (3,1) tensor becomes the fourth
argument and coordinates are unchanged.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .linalg import RatMatrix, Subspace, _integer_row, _kernel_of_rows, as_rational, contains

CONVENTION = "row-major, last-fastest"

VALENCES = ("(2,1)", "(3,1)", "(4,0)", "inner-torsion-map")
CONSTRAINTS = ("skew12", "skew34", "bianchi")

# "in" slots take vectors, "out" slots produce them
SIGNATURES = {
    "(2,1)": ("in", "in", "out"),
    "(3,1)": ("in", "in", "in", "out"),
    "(4,0)": ("in", "in", "in", "in"),
    "inner-torsion-map": ("in", "out", "in"),
}

_CONSTRAINT_ALIASES = {
    "skew12": "skew12",
    "skew-in-args-1-2": "skew12",
    "skew34": "skew34",
    "skew-in-args-3-4": "skew34",
    "bianchi": "bianchi",
    "first-bianchi": "bianchi",
    "first-Bianchi": "bianchi",
}


@dataclass(frozen=True)
class TensorSpec:
    n: int
    valence: str
    constraints: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("dimension must be positive")
        if self.valence not in VALENCES:
            raise ValueError(f"unknown valence {self.valence!r}")
        try:
            cons = frozenset(_CONSTRAINT_ALIASES[c] for c in self.constraints)
        except KeyError as exc:
            raise ValueError(f"unknown constraint {exc.args[0]!r}") from None
        object.__setattr__(self, "constraints", cons)
        if "bianchi" in cons and self.valence not in ("(3,1)", "(4,0)"):
            raise ValueError("first-Bianchi only applies to (3,1) and (4,0) tensors")
        if "skew34" in cons and self.valence != "(4,0)":
            raise ValueError("skew-in-args-3-4 only applies to (4,0) tensors")
        if "skew12" in cons and self.valence == "inner-torsion-map":
            raise ValueError("inner-torsion maps carry no slot symmetries")

    @property
    def signature(self) -> tuple[str, ...]:
        return SIGNATURES[self.valence]

    @property
    def order(self) -> int:
        return len(self.signature)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.order

    @property
    def dim(self) -> int:
        """Dimension of the unconstrained tensor space."""
        return self.n ** self.order

    @property
    def arity(self) -> int:
        return self.signature.count("in")

    def with_constraints(self, *constraints: str) -> TensorSpec:
        return TensorSpec(self.n, self.valence, frozenset(constraints))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "valence": self.valence,
            "constraints": sorted(self.constraints),
        }

    @classmethod
    def from_dict(cls, d: dict) -> TensorSpec:
        return cls(int(d["n"]), d["valence"], frozenset(d.get("constraints", ())))

    def label(self) -> str:
        cons = "+".join(sorted(self.constraints))
        return f"{self.valence}" + (f"+{cons}" if cons else "")


def flat_index(multi_index: Sequence[int], n: int) -> int:
    """Row-major position of a multi-index, last index fastest."""
    idx = 0
    for i in multi_index:
        if not 0 <= i < n:
            raise IndexError(f"index {i} out of range for dimension {n}")
        idx = idx * n + i
    return idx


def unflat_index(index: int, n: int, order: int) -> tuple[int, ...]:
    if not 0 <= index < n ** order:
        raise IndexError(f"flat index {index} out of range")
    out = []
    for _ in range(order):
        index, r = divmod(index, n)
        out.append(r)
    return tuple(reversed(out))


# slot permutations: each constraint reads "t + sum of permuted copies = 0"
def _constraint_perms(name: str) -> list[tuple[int, ...]]:
    if name == "skew12":
        return [(1, 0, 2, 3)]
    if name == "skew34":
        return [(0, 1, 3, 2)]
    # R(a,b,c,d) + R(a,c,d,b) + R(a,d,b,c)
    return [(0, 2, 3, 1), (0, 3, 1, 2)]


def _permuted(idx: tuple[int, ...], perm: tuple[int, ...]) -> tuple[int, ...]:
    # perm lists which original slot feeds each position of the permuted copy
    return tuple(idx[p] for p in perm)


def _constraint_rows(spec: TensorSpec) -> Iterable[dict[int, int]]:
    n, order = spec.n, spec.order
    for name in sorted(spec.constraints):
        perms = [p[:order] if order == 3 else p for p in _constraint_perms(name)]
        seen = set()
        for idx in itertools.product(range(n), repeat=order):
            row: dict[int, int] = {}
            for target in [idx] + [_permuted(idx, p) for p in perms]:
                k = flat_index(target, n)
                row[k] = row.get(k, 0) + 1
            row = {k: v for k, v in row.items() if v}
            key = tuple(sorted(row.items()))
            if row and key not in seen:
                seen.add(key)
                yield row


def constraint_defects(spec: TensorSpec, coords: Sequence) -> dict[str, np.ndarray]:
    """Residual of each declared constraint; all zero iff coords satisfy them."""
    t = np.array([as_rational(x) for x in coords], dtype=object).reshape(spec.shape)
    out = {}
    for name in sorted(spec.constraints):
        total = t.copy()
        for p in _constraint_perms(name):
            total = total + np.transpose(t, _inverse_perm(p[: t.ndim]))
        out[name] = total
    return out


def _inverse_perm(p: tuple[int, ...]) -> tuple[int, ...]:
    # np.transpose(t, q)[idx] = t[idx[q^-1]]; we need result[idx] = t[permuted(idx, p)]
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def satisfies_constraints(spec: TensorSpec, coords: Sequence) -> bool:
    return all(not np.any(d != 0) for d in constraint_defects(spec, coords).values())


_symmetry_cache: dict[TensorSpec, Subspace] = {}


def symmetry_subspace(spec: TensorSpec) -> Subspace:
    """Subspace of the full tensor space cut out by the declared constraints."""
    cached = _symmetry_cache.get(spec)
    if cached is None:
        if spec.constraints:
            cached = _kernel_of_rows(_constraint_rows(spec), spec.dim)
        else:
            cached = Subspace.full(spec.dim)
        _symmetry_cache[spec] = cached
    return cached


@dataclass(frozen=True)
class TensorElement:
    spec: TensorSpec
    coords: tuple

    def __post_init__(self):
        coords = tuple(as_rational(x) for x in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != self.spec.dim:
            raise ValueError(f"{self.spec.label()} needs {self.spec.dim} coordinates, got {len(coords)}")
        if not satisfies_constraints(self.spec, coords):
            raise ValueError(f"coordinates violate the constraints of {self.spec.label()}")

    @classmethod
    def from_array(cls, spec: TensorSpec, arr: np.ndarray) -> TensorElement:
        return cls(spec, tuple(np.asarray(arr, dtype=object).reshape(-1)))

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=object).reshape(self.spec.shape)

    def __getitem__(self, idx: tuple[int, ...]) -> Fraction:
        return self.coords[flat_index(idx, self.spec.n)]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def scale(self, c) -> TensorElement:
        c = as_rational(c)
        return TensorElement(self.spec, tuple(c * x for x in self.coords))

    def __add__(self, other: TensorElement) -> TensorElement:
        if other.spec != self.spec:
            raise ValueError("cannot add tensors of different specs")
        return TensorElement(self.spec, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: TensorElement) -> TensorElement:
        return self + other.scale(-1)

    def to_dict(self) -> dict:
        from .linalg import format_rational

        return {
            "convention": CONVENTION,
            "spec": self.spec.to_dict(),
            "coords": [format_rational(x) for x in self.coords],
        }

    @classmethod
    def from_dict(cls, d: dict) -> TensorElement:
        conv = d.get("convention", CONVENTION)
        if conv != CONVENTION:
            raise ValueError(f"unsupported index convention {conv!r}")
        return cls(TensorSpec.from_dict(d["spec"]), tuple(as_rational(x) for x in d["coords"]))


def in_symmetry_subspace(t: TensorElement) -> bool:
    return contains(symmetry_subspace(t.spec), t.coords)


def _mirror(spec: TensorSpec, valence: str) -> TensorSpec:
    cons = set(spec.constraints)
    if valence == "(3,1)":
        cons.discard("skew34")
    return TensorSpec(spec.n, valence, frozenset(cons))


def lower_index(t: TensorElement) -> TensorElement:
    """(3,1) -> (4,0) with R(u, v, w, z) = <R(u, v)w, z>."""
    if t.spec.valence != "(3,1)":
        raise ValueError("lower_index expects a (3,1) tensor")
    return TensorElement(_mirror(t.spec, "(4,0)"), t.coords)


def raise_index(t: TensorElement) -> TensorElement:
    """(4,0) -> (3,1), inverse of :func:`lower_index`.

    skew34 has no (3,1) counterpart in the constraint vocabulary and is
    dropped from the spec; the coordinates still satisfy it.
    """
    if t.spec.valence != "(4,0)":
        raise ValueError("raise_index expects a (4,0) tensor")
    return TensorElement(_mirror(t.spec, "(3,1)"), t.coords)


def evaluate(t: TensorElement, args: Sequence[Sequence]):
    """Multilinear evaluation.

    Returns a Fraction for (4,0) tensors and a coordinate tuple otherwise.
    The inner-torsion map takes (u, w) and returns lambda(u) w.
    """
    spec = t.spec
    if len(args) != spec.arity:
        raise ValueError(f"{spec.label()} takes {spec.arity} arguments, got {len(args)}")
    vecs = []
    for a in args:
        if len(a) != spec.n:
            raise ValueError(f"argument of length {len(a)} in dimension {spec.n}")
        vecs.append(np.array([as_rational(x) for x in a], dtype=object))
    arr = t.array()
    # contract "in" slots from the last to keep earlier axis numbers valid
    in_axes = [k for k, s in enumerate(spec.signature) if s == "in"]
    for axis, v in zip(reversed(in_axes), reversed(vecs)):
        arr = np.tensordot(arr, v, axes=([axis], [0]))
    if spec.arity == spec.order:
        return as_rational(arr.item() if hasattr(arr, "item") else arr)
    return tuple(as_rational(x) for x in arr.reshape(-1))


# -- named tensors -------------------------------------------------------------------

NAMED = ("K", "K0", "cross", "boldK", "K1", "K2")

_ACT = frozenset({"skew12", "skew34", "bianchi"})


def _curvature_form(g: np.ndarray) -> np.ndarray:
    """g(b,c) g(a,d) - g(a,c) g(b,d) as a 4-index array."""
    n = g.shape[0]
    out = np.empty((n,) * 4, dtype=object)
    for a, b, c, d in itertools.product(range(n), repeat=4):
        out[a, b, c, d] = g[b, c] * g[a, d] - g[a, c] * g[b, d]
    return out


def complex_structure(k: int) -> RatMatrix:
    """J = [[0, -I], [I, 0]] on R^(2k)."""
    n = 2 * k
    rows = [[0] * n for _ in range(n)]
    for i in range(k):
        rows[i][k + i] = -1
        rows[k + i][i] = 1
    return RatMatrix(rows, cols=n)


def _require(params: dict, *keys: str) -> list[int]:
    try:
        vals = [int(params[k]) for k in keys]
    except KeyError as exc:
        raise ValueError(f"missing parameter {exc.args[0]!r}") from None
    if any(v <= 0 for v in vals):
        raise ValueError("dimensions must be positive")
    return vals


def named_tensor(name: str, **params) -> TensorElement:
    """Exact coordinates of a named tensor.

    ``K`` and ``K0`` take ``n``; ``cross`` takes ``n=3``; ``boldK`` takes the
    complex dimension ``n`` and lives on R^(2n); ``K1``/``K2`` take ``n1``
    and ``n2`` and live on R^(n1+n2).
    """
    if name in ("K", "K0"):
        (n,) = _require(params, "n")
        arr = _curvature_form(np.eye(n, dtype=int).astype(object))
        if name == "K":
            return TensorElement.from_array(TensorSpec(n, "(4,0)", _ACT), arr)
        return TensorElement.from_array(TensorSpec(n, "(3,1)", frozenset({"skew12", "bianchi"})), arr)
    if name == "cross":
        (n,) = _require(params, "n")
        if n != 3:
            raise ValueError("the cross product needs n = 3")
        arr = np.zeros((3, 3, 3), dtype=object)
        for (a, b, c), s in _levi_civita3():
            arr[a, b, c] = s
        return TensorElement.from_array(TensorSpec(3, "(2,1)", frozenset({"skew12"})), arr)
    if name == "boldK":
        (k,) = _require(params, "n")
        n = 2 * k
        J = np.array(complex_structure(k).tolist(), dtype=object)
        g = np.eye(n, dtype=int).astype(object)
        arr = np.empty((n,) * 4, dtype=object)
        quarter = Fraction(1, 4)
        # <u, i v> = <u, J v> = J[u, v] on basis vectors
        for a, b, c, d in itertools.product(range(n), repeat=4):
            arr[a, b, c, d] = quarter * (
                g[a, c] * g[b, d] - g[a, d] * g[b, c]
                + J[a, c] * J[b, d] - J[a, d] * J[b, c]
                + 2 * J[a, b] * J[c, d]
            )
        return TensorElement.from_array(TensorSpec(n, "(4,0)", _ACT), arr)
    if name in ("K1", "K2"):
        n1, n2 = _require(params, "n1", "n2")
        n = n1 + n2
        proj = [int(i < n1) for i in range(n)] if name == "K1" else [int(i >= n1) for i in range(n)]
        g = np.diag(np.array(proj, dtype=object))
        return TensorElement.from_array(TensorSpec(n, "(4,0)", _ACT), _curvature_form(g))
    raise ValueError(f"unknown named tensor {name!r}; expected one of {', '.join(NAMED)}")


def _levi_civita3():
    for p in itertools.permutations(range(3)):
        inversions = sum(1 for i in range(3) for j in range(i + 1, 3) if p[i] > p[j])
        yield p, (-1) ** inversions


def basis_elements(spec: TensorSpec, space: Subspace) -> list[TensorElement]:
    return [TensorElement(spec, v) for v in space.vectors()]


def integer_coords(coords: Sequence) -> dict[int, int]:
    """Primitive integer multiple of a coordinate vector as a sparse dict."""
    return _integer_row(enumerate(coords))
