"""Matrix structure groups: definitions, validation and the builtin catalog.

A group is given by an exact basis of its Lie algebra plus finitely many
component representatives.  Invariance under the whole group is checked as
infinitesimal invariance under the algebra together with invariance under
each representative.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import NamedTuple, Sequence

from .linalg import RatMatrix, Subspace, as_rational, commutator, contains, format_rational
from .tensors import complex_structure

FAMILIES = (
    "trivial", "gl", "sl", "so", "o", "u", "diagonal", "block", "product_oo", "signs", "finite",
)


@dataclass(frozen=True)
class GroupSpec:
    name: str
    n: int
    lie_algebra_basis: tuple[RatMatrix, ...] = ()
    component_reps: tuple[RatMatrix, ...] = ()
    family: str | None = None
    params: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "lie_algebra_basis", tuple(self.lie_algebra_basis))
        object.__setattr__(self, "component_reps", tuple(self.component_reps))

    @cached_property
    def algebra(self) -> Subspace:
        """The Lie algebra as a subspace of gl(n), vectorized row-major."""
        return Subspace.span((m.vectorize() for m in self.lie_algebra_basis), self.n * self.n)

    @property
    def algebra_dim(self) -> int:
        return self.algebra.dim

    def describe(self) -> dict:
        return {
            "name": self.name,
            "family": self.family,
            "params": dict(self.params),
            "n": self.n,
            "lie_algebra_dim": len(self.lie_algebra_basis),
            "component_reps": len(self.component_reps),
        }

    def to_dict(self) -> dict:
        def mat(m: RatMatrix):
            return [[format_rational(x) for x in row] for row in m]

        return {
            "name": self.name,
            "n": self.n,
            "lie_algebra": [mat(m) for m in self.lie_algebra_basis],
            "component_reps": [mat(m) for m in self.component_reps],
        }

    @classmethod
    def from_dict(cls, d: dict) -> GroupSpec:
        n = int(d["n"])
        if n <= 0:
            raise ValueError("n must be positive")

        def mat(rows) -> RatMatrix:
            m = RatMatrix([[as_rational(x) for x in row] for row in rows])
            if m.shape != (n, n):
                raise ValueError(f"expected {n}x{n} matrices, got {m.rows}x{m.cols}")
            return m

        return cls(
            name=str(d.get("name", "custom")),
            n=n,
            lie_algebra_basis=tuple(mat(m) for m in d.get("lie_algebra", [])),
            component_reps=tuple(mat(m) for m in d.get("component_reps", [])),
        )


def load_group(path: str | Path) -> GroupSpec:
    return GroupSpec.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# -- builtin families -----------------------------------------------------------------

def _E(n: int, i: int, j: int) -> RatMatrix:
    return RatMatrix.unit(n, i, j)


def _skew(n: int, i: int, j: int) -> RatMatrix:
    return _E(n, i, j) - _E(n, j, i)


def _sign_flip(n: int, i: int) -> RatMatrix:
    return RatMatrix.diag([-1 if k == i else 1 for k in range(n)])


def _block(x: RatMatrix, y: RatMatrix) -> RatMatrix:
    """Real form [[X, -Y], [Y, X]] of the complex matrix X + iY."""
    k = x.rows
    rows = []
    for r in range(k):
        rows.append(list(x.row(r)) + [-v for v in y.row(r)])
    for r in range(k):
        rows.append(list(y.row(r)) + list(x.row(r)))
    return RatMatrix(rows, cols=2 * k)


def _so_basis(n: int, offset: int = 0, size: int | None = None) -> list[RatMatrix]:
    size = n if size is None else size
    return [
        _skew(n, offset + i, offset + j)
        for i in range(size)
        for j in range(i + 1, size)
    ]


def _u_basis(k: int) -> list[RatMatrix]:
    zero = RatMatrix.zeros(k, k)
    out = []
    for j in range(k):
        for l in range(j + 1, k):
            out.append(_block(_skew(k, j, l), zero))
            out.append(_block(zero, _E(k, j, l) + _E(k, l, j)))
        out.append(_block(zero, _E(k, j, j)))
    return out


def _check_n(n: int, family: str) -> None:
    if not isinstance(n, int) or n <= 0:
        raise ValueError(f"{family} needs a positive dimension, got {n!r}")


def builtin(family: str, **params) -> GroupSpec:
    """Construct one of the catalog groups.

    ``trivial``, ``gl``, ``sl``, ``so``, ``o``, ``diagonal`` and ``signs`` take
    ``n``; ``u`` takes the complex dimension ``n`` (acting on R^(2n));
    ``block`` takes ``n`` and ``s`` with 0 < s < n; ``product_oo`` takes
    ``n1`` and ``n2``; ``finite`` takes ``generators`` (square matrices).
    """
    if family == "finite":
        gens = [g if isinstance(g, RatMatrix) else RatMatrix(g) for g in params.get("generators", [])]
        if not gens:
            raise ValueError("finite needs at least one generator")
        n = gens[0].rows
        if any(g.shape != (n, n) for g in gens):
            raise ValueError("finite generators must be square matrices of one size")
        return GroupSpec(f"finite({len(gens)} generators)", n, (), tuple(gens), "finite", {"generators": len(gens)})
    if family == "product_oo":
        n1, n2 = int(params.get("n1", 0)), int(params.get("n2", 0))
        if n1 <= 0 or n2 <= 0:
            raise ValueError("product_oo needs positive n1 and n2")
        n = n1 + n2
        basis = _so_basis(n, 0, n1) + _so_basis(n, n1, n2)
        reps = (_sign_flip(n, 0), _sign_flip(n, n1))
        return GroupSpec(f"O({n1})xO({n2})", n, tuple(basis), reps, family, {"n1": n1, "n2": n2})
    if family not in FAMILIES:
        raise ValueError(f"unknown group family {family!r}")
    if "n" not in params:
        raise ValueError(f"{family} needs parameter n")
    n = int(params["n"])
    _check_n(n, family)
    if family == "trivial":
        return GroupSpec(f"{{1}} in GL({n})", n, (), (), family, {"n": n})
    if family == "gl":
        basis = [_E(n, i, j) for i in range(n) for j in range(n)]
        return GroupSpec(f"GL({n})", n, tuple(basis), (), family, {"n": n})
    if family == "sl":
        basis = [_E(n, i, j) for i in range(n) for j in range(n) if i != j]
        basis += [_E(n, i, i) - _E(n, i + 1, i + 1) for i in range(n - 1)]
        return GroupSpec(f"SL({n})", n, tuple(basis), (), family, {"n": n})
    if family == "so":
        return GroupSpec(f"SO({n})", n, tuple(_so_basis(n)), (), family, {"n": n})
    if family == "o":
        return GroupSpec(f"O({n})", n, tuple(_so_basis(n)), (_sign_flip(n, 0),), family, {"n": n})
    if family == "u":
        return GroupSpec(f"U({n})", 2 * n, tuple(_u_basis(n)), (), family, {"n": n})
    if family == "diagonal":
        basis = [_E(n, i, i) for i in range(n)]
        reps = tuple(_sign_flip(n, i) for i in range(n))
        return GroupSpec(f"D({n})", n, tuple(basis), reps, family, {"n": n})
    if family == "block":
        s = int(params.get("s", 0))
        if not 0 < s < n:
            raise ValueError(f"block needs 0 < s < n, got s={s}, n={n}")
        basis = [_E(n, i, j) for i in range(n) for j in range(n) if not (i >= s and j < s)]
        reps = (_sign_flip(n, 0), _sign_flip(n, n - 1))
        return GroupSpec(f"GL({n};R^{s})", n, tuple(basis), reps, family, {"n": n, "s": s})
    if family == "signs":
        return GroupSpec(f"{{+1,-1}} in GL({n})", n, (), (RatMatrix.identity(n).scale(-1),), family, {"n": n})
    raise ValueError(f"unknown group family {family!r}")  # pragma: no cover


def catalog(n: int = 3) -> list[dict]:
    """One row per builtin family with its Lie algebra dimension at size n."""
    rows = []
    for fam in FAMILIES:
        if fam == "finite":
            rows.append({"family": fam, "params": "generators", "ambient_n": None, "lie_algebra_dim": 0})
            continue
        if fam == "block":
            params = {"n": n, "s": 1} if n > 1 else None
        elif fam == "product_oo":
            params = {"n1": max(1, n // 2), "n2": max(1, n - n // 2)} if n > 1 else None
        else:
            params = {"n": n}
        if params is None:
            rows.append({"family": fam, "params": None, "ambient_n": None, "lie_algebra_dim": None})
            continue
        g = builtin(fam, **params)
        rows.append({
            "family": fam,
            "params": params,
            "name": g.name,
            "ambient_n": g.n,
            "lie_algebra_dim": len(g.lie_algebra_basis),
            "component_reps": len(g.component_reps),
        })
    return rows


# -- validation -----------------------------------------------------------------------

class Violation(NamedTuple):
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


def validate(g: GroupSpec) -> list[Violation]:
    """Check the Lie-subgroup hypotheses; an empty list means the spec is sound."""
    out: list[Violation] = []
    for k, m in enumerate(g.lie_algebra_basis + g.component_reps):
        if m.shape != (g.n, g.n):
            out.append(Violation("shape", f"matrix {k} is {m.rows}x{m.cols}, expected {g.n}x{g.n}"))
    if out:
        return out
    basis = g.lie_algebra_basis
    span = g.algebra
    if span.dim != len(basis):
        # name the first basis element that depends on its predecessors
        for k in range(len(basis)):
            prev = Subspace.span((m.vectorize() for m in basis[:k]), g.n * g.n)
            if contains(prev, basis[k].vectorize()):
                out.append(Violation("independence", f"basis element {k} lies in the span of elements 0..{k - 1}"))
    for i, j in itertools.combinations(range(len(basis)), 2):
        if not contains(span, commutator(basis[i], basis[j]).vectorize()):
            out.append(Violation("bracket", f"[basis {i}, basis {j}] leaves the algebra"))
    for r, rep in enumerate(g.component_reps):
        if rep.det() == 0:
            out.append(Violation("invertibility", f"component rep {r} is singular"))
            continue
        inv = rep.inverse()
        for k, a in enumerate(basis):
            if not contains(span, (rep @ a @ inv).vectorize()):
                out.append(Violation("ad-invariance", f"rep {r} conjugates basis {k} outside the algebra"))
    return out


# -- Cayley rotations and scalar census -----------------------------------------------

def cayley_orthogonal(s: RatMatrix) -> RatMatrix:
    """(I - S)^-1 (I + S) for skew-symmetric S: an exact rational rotation."""
    if not s.is_square() or s.T != -s:
        raise ValueError("Cayley transform needs a skew-symmetric matrix")
    eye = RatMatrix.identity(s.rows)
    try:
        return (eye - s).inverse() @ (eye + s)
    except ZeroDivisionError:
        raise ValueError("I - S is singular") from None


def seeded_cayley_elements(g: GroupSpec, count: int = 20, seed: int = 0, bound: int = 2) -> list[RatMatrix]:
    """Cayley images of pseudo-random small-integer combinations of the algebra basis.

    Only meaningful when the algebra consists of skew-symmetric matrices; the
    Cayley image of an algebra element then lies in the identity component.
    """
    basis = g.lie_algebra_basis
    if not basis:
        return []
    if any(m.T != -m for m in basis):
        raise ValueError(f"{g.name}: Cayley elements need a skew-symmetric algebra basis")
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        s = RatMatrix.zeros(g.n, g.n)
        for m in basis:
            c = rng.randint(-bound, bound)
            if c:
                s = s + m.scale(c)
        if s.is_zero():
            continue
        out.append(cayley_orthogonal(s))
    return out


def algebra_is_skew(g: GroupSpec) -> bool:
    return all(m.T == -m for m in g.lie_algebra_basis)


@dataclass(frozen=True)
class ScalarCensus:
    count_known_scalars: int | None  # None: a whole ray of scalars
    contains_minus_identity: bool
    witness: str

    def to_dict(self) -> dict:
        return {
            "count_known_scalars": "infinite" if self.count_known_scalars is None else self.count_known_scalars,
            "contains_minus_identity": self.contains_minus_identity,
            "witness": self.witness,
        }


def _half_turns(g: GroupSpec) -> list[RatMatrix]:
    """Rational elements exp(pi L / sqrt(c)) = I + 2 L^2 / c for L with L^3 = -c L.

    Candidates are the basis elements and, from each starting element, a
    greedy sum of basis elements whose pairwise products vanish.
    """
    basis = g.lie_algebra_basis
    eye = RatMatrix.identity(g.n)
    candidates: list[RatMatrix] = list(basis)
    for start in range(len(basis)):
        chosen = [basis[start]]
        for m in basis:
            if all((m @ c).is_zero() and (c @ m).is_zero() for c in chosen):
                chosen.append(m)
        if len(chosen) > 1:
            total = chosen[0]
            for m in chosen[1:]:
                total = total + m
            candidates.append(total)
    out = []
    for L in candidates:
        L2 = L @ L
        L3 = L2 @ L
        if L.is_zero() or L2.is_zero():
            continue
        # L^3 = -c L with c > 0
        k = next(i for i, x in enumerate(L.entries) if x != 0)
        c = -L3.entries[k] / L.entries[k]
        if c > 0 and L3 == L.scale(-c):
            h = eye + L2.scale(Fraction(2) / c)
            if h not in out:
                out.append(h)
    return out


def scalar_matrix_census(g: GroupSpec, max_word: int = 4) -> ScalarCensus:
    """Scalar matrices witnessed in the group.

    A ray of scalars is recorded when the identity lies in the algebra span.
    -I is searched among words of length <= max_word in the component reps and
    the rational half-turns of the identity component.
    """
    n = g.n
    eye = RatMatrix.identity(n)
    minus = eye.scale(-1)
    ray = g.lie_algebra_basis and contains(g.algebra, eye.vectorize())
    half = _half_turns(g)
    letters = list(g.component_reps) + half
    found = None
    if minus in letters:
        found = "component rep" if minus in g.component_reps else "half-turn in the identity component"
    else:
        frontier = {eye}
        seen = {eye}
        for length in range(1, max_word + 1):
            nxt = set()
            for w in frontier:
                for a in letters:
                    p = w @ a
                    if p not in seen:
                        seen.add(p)
                        nxt.add(p)
            if minus in nxt:
                found = f"word of length {length}"
                break
            frontier = nxt
    if ray:
        return ScalarCensus(None, found is not None, "identity in algebra span" + (f"; -I via {found}" if found else ""))
    if found:
        return ScalarCensus(2, True, f"-I via {found}")
    return ScalarCensus(1, False, "only the identity witnessed")


def parse_group_args(family: str, n: int | None = None, s: int | None = None,
                     n1: int | None = None, n2: int | None = None,
                     generators: Sequence | None = None) -> GroupSpec:
    params: dict = {}
    if family == "product_oo":
        params = {"n1": n1, "n2": n2}
    elif family == "finite":
        params = {"generators": generators or []}
    else:
        params = {"n": n}
        if family == "block":
            params["s"] = s
    if any(v is None for v in params.values()):
        missing = [k for k, v in params.items() if v is None]
        raise ValueError(f"{family} needs {', '.join('--' + m for m in missing)}")
    return builtin(family, **params)
