"""Per-group classification of the admissible characteristic tensors."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .equivariance import (
    InnerTorsionSolution,
    InvariantSpaceResult,
    apply_action,
    g_valued_filter,
    inner_torsion_space,
    invariant_tensors,
    require_valid,
)
from .groups import GroupSpec, algebra_is_skew, scalar_matrix_census, seeded_cayley_elements
from .linalg import Subspace, contains, format_rational, parse_rational
from .tensors import TensorElement, TensorSpec, evaluate, flat_index, named_tensor, raise_index, unflat_index

SCHEMA_VERSION = 1

CURVATURE = frozenset({"skew12", "bianchi"})
TORSION = frozenset({"skew12"})

CONCLUSIONS = {
    "trivial": "parallelism: a Lie algebra of frame fields with a constant connection",
    "gl": "all characteristic tensors vanish: locally flat affine space",
    "sl": "all characteristic tensors vanish: locally flat affine space with a parallel volume",
    "so": "constant sectional curvature (with vector-product torsion allowed in dimension 3)",
    "o": "torsion-free with constant sectional curvature",
    "u": "Kaehler structure of constant holomorphic sectional curvature",
    "diagonal": "all characteristic tensors vanish: a flat web",
    "block": "all characteristic tensors vanish: a flat distribution on affine space",
    "product_oo": "locally a product of two constant curvature factors",
    "signs": "torsion and inner torsion vanish since -I lies in the group",
}


@dataclass(frozen=True)
class NamedMatch:
    slot: str
    name: str
    scalar: Fraction | None  # None: candidate contained in a space of dim >= 2

    def to_dict(self) -> dict:
        return {
            "slot": self.slot,
            "name": self.name,
            "scalar": None if self.scalar is None else format_rational(self.scalar),
        }

    @classmethod
    def from_dict(cls, d: dict) -> NamedMatch:
        s = d["scalar"]
        return cls(d["slot"], d["name"], None if s is None else parse_rational(s))


@dataclass(frozen=True)
class Flag:
    check: str
    applicable: bool
    holds: bool
    detail: str

    def to_dict(self) -> dict:
        return {"check": self.check, "applicable": self.applicable, "holds": self.holds, "detail": self.detail}

    @classmethod
    def from_dict(cls, d: dict) -> Flag:
        return cls(d["check"], bool(d["applicable"]), bool(d["holds"]), d["detail"])


@dataclass(frozen=True)
class ClassificationReport:
    group: dict
    torsion: InvariantSpaceResult
    curvature: InvariantSpaceResult
    curvature_g_valued: InvariantSpaceResult | None
    inner_torsion: InnerTorsionSolution
    named_matches: tuple[NamedMatch, ...] = ()
    flags: tuple[Flag, ...] = ()

    @property
    def dims(self) -> tuple[int, int, int]:
        """(dim R, dim T, dim inner torsion)."""
        return self.curvature.dim, self.torsion.dim, self.inner_torsion.quotient_dim

    @property
    def admissible_dims(self) -> tuple[int, int, int]:
        """As ``dims`` but with the g-valued curvature when it was computed."""
        r = self.curvature_g_valued or self.curvature
        return r.dim, self.torsion.dim, self.inner_torsion.quotient_dim

    def failed_flags(self) -> list[Flag]:
        return [f for f in self.flags if f.applicable and not f.holds]


# -- named matching -------------------------------------------------------------------

def match_named(space: Subspace, candidates: Sequence[tuple[str, TensorElement]]) -> list[tuple[str, Fraction | None]]:
    """Name the space by the candidates it contains.

    For a line, returns (name, c) with basis vector = c * candidate.  For a
    larger space, returns (name, None) for each contained candidate.
    """
    out: list[tuple[str, Fraction | None]] = []
    if space.dim == 0:
        return out
    if space.dim == 1:
        (b,) = space.vectors()
        for name, t in candidates:
            k = next((i for i, x in enumerate(t.coords) if x != 0), None)
            if k is None or len(t.coords) != len(b):
                continue
            c = b[k] / t.coords[k]
            if all(x == c * y for x, y in zip(b, t.coords)):
                out.append((name, c))
        return out
    for name, t in candidates:
        if len(t.coords) == space.ambient_dim and not t.is_zero() and contains(space, t.coords):
            out.append((name, None))
    return out


def verify_match(basis: TensorElement, candidate: TensorElement, c: Fraction) -> bool:
    """Re-check basis = c * candidate by evaluating on all basis-vector arguments."""
    n = basis.spec.n
    units = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    for idx in unflat_all(n, basis.spec.arity):
        args = [units[i] for i in idx]
        lhs, rhs = evaluate(basis, args), evaluate(candidate, args)
        if isinstance(lhs, tuple):
            if any(x != c * y for x, y in zip(lhs, rhs)):
                return False
        elif lhs != c * rhs:
            return False
    return True


def unflat_all(n: int, arity: int):
    for k in range(n ** arity):
        yield unflat_index(k, n, arity)


def candidates_for(group: GroupSpec) -> dict[str, list[tuple[str, TensorElement]]]:
    """Named tensors worth matching, keyed by report slot."""
    fam, p, n = group.family, group.params, group.n
    curv: list[tuple[str, TensorElement]] = []
    tors: list[tuple[str, TensorElement]] = []
    if fam in ("so", "o"):
        curv.append(("K0", named_tensor("K0", n=n)))
        if n == 3:
            tors.append(("cross", named_tensor("cross", n=3)))
    elif fam == "u":
        curv.append(("raise(boldK)", raise_index(named_tensor("boldK", n=p["n"]))))
        curv.append(("K0", named_tensor("K0", n=n)))
    elif fam == "product_oo":
        curv.append(("raise(K)", raise_index(named_tensor("K", n=n))))
        for name in ("K1", "K2"):
            curv.append((f"raise({name})", raise_index(named_tensor(name, n1=p["n1"], n2=p["n2"]))))
    return {"curvature": curv, "curvature_g_valued": curv, "torsion": tors}


# -- consistency flags ----------------------------------------------------------------

def _flags(group: GroupSpec, torsion: InvariantSpaceResult, curvature: InvariantSpaceResult,
           inner: InnerTorsionSolution, seed: int) -> list[Flag]:
    census = scalar_matrix_census(group)
    scalars = census.count_known_scalars is None or census.count_known_scalars >= 2
    flags = [
        Flag(
            "two scalars force zero torsion",
            scalars,
            (torsion.dim == 0) if scalars else True,
            census.witness,
        ),
        Flag(
            "-I forces zero torsion and inner torsion",
            census.contains_minus_identity,
            (torsion.dim == 0 and inner.quotient_dim == 0) if census.contains_minus_identity else True,
            census.witness,
        ),
    ]
    if group.lie_algebra_basis and algebra_is_skew(group):
        elements = seeded_cayley_elements(group, count=20, seed=seed)
        ok = all(
            all(x == y for x, y in zip(apply_action(space.spec, g, v).reshape(-1), v))
            for space in (torsion, curvature)
            for v in space.space.vectors()
            for g in elements
        )
        flags.append(Flag("Cayley elements fix the invariant tensors", True, ok,
                          f"{len(elements)} elements, seed {seed}"))
    return flags


# -- orchestration --------------------------------------------------------------------

def classify(group: GroupSpec, apply_g_valued_filter: bool = False, seed: int = 0) -> ClassificationReport:
    require_valid(group)
    n = group.n
    torsion = invariant_tensors(group, TensorSpec(n, "(2,1)", TORSION))
    curvature = invariant_tensors(group, TensorSpec(n, "(3,1)", CURVATURE))
    filtered = None
    if apply_g_valued_filter or group.family == "product_oo":
        filtered = g_valued_filter(curvature, group)
    inner = inner_torsion_space(group)
    cands = candidates_for(group)
    matches = []
    for slot, res in (("curvature", curvature), ("curvature_g_valued", filtered), ("torsion", torsion)):
        if res is None:
            continue
        for name, c in match_named(res.space, cands[slot]):
            matches.append(NamedMatch(slot, name, c))
    return ClassificationReport(
        group=group.describe(),
        torsion=torsion,
        curvature=curvature,
        curvature_g_valued=filtered,
        inner_torsion=inner,
        named_matches=tuple(matches),
        flags=tuple(_flags(group, torsion, curvature, inner, seed)),
    )


# -- rendering ------------------------------------------------------------------------

def _sparse(spec_order: int, n: int, v: Sequence[Fraction]) -> dict[str, int | str]:
    return {",".join(map(str, unflat_index(k, n, spec_order))): format_rational(x) for k, x in enumerate(v) if x != 0}


def _unsparse(d: dict, n: int, dim: int) -> list[Fraction]:
    out = [Fraction(0)] * dim
    for key, x in d.items():
        out[flat_index(tuple(int(i) for i in key.split(",")), n)] = parse_rational(x)
    return out


def _space_doc(res: InvariantSpaceResult | None) -> dict | None:
    if res is None:
        return None
    spec = res.spec
    return {
        "spec": spec.to_dict(),
        "filters": list(res.filters),
        "dim": res.dim,
        "basis": [_sparse(spec.order, spec.n, v) for v in res.space.vectors()],
    }


def _space_from_doc(d: dict | None, group: str) -> InvariantSpaceResult | None:
    if d is None:
        return None
    spec = TensorSpec.from_dict(d["spec"])
    vecs = [_unsparse(b, spec.n, spec.dim) for b in d["basis"]]
    space = Subspace.span(vecs, spec.dim)
    if space.dim != d["dim"]:
        raise ValueError("basis does not match the stated dimension")
    return InvariantSpaceResult(spec, space, group, tuple(d["filters"]))


def to_dict(report: ClassificationReport) -> dict:
    inner = report.inner_torsion
    n = report.group["n"]
    return {
        "schema_version": SCHEMA_VERSION,
        "group": report.group,
        "torsion": _space_doc(report.torsion),
        "curvature": _space_doc(report.curvature),
        "curvature_g_valued": _space_doc(report.curvature_g_valued),
        "inner_torsion": {
            "dim": inner.quotient_dim,
            "basis": [_sparse(3, n, t.coords) for t in inner.lambda_basis],
            "modulo": [_sparse(3, n, v) for v in inner.modulo.vectors()],
        },
        "named_matches": [m.to_dict() for m in report.named_matches],
        "flags": [f.to_dict() for f in report.flags],
    }


def from_dict(d: dict) -> ClassificationReport:
    if d.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
    group = d["group"]
    name, n = group["name"], group["n"]
    it = d["inner_torsion"]
    spec = TensorSpec(n, "inner-torsion-map")
    lam = tuple(TensorElement(spec, _unsparse(b, n, spec.dim)) for b in it["basis"])
    modulo = Subspace.span([_unsparse(b, n, spec.dim) for b in it["modulo"]], spec.dim)
    return ClassificationReport(
        group=group,
        torsion=_space_from_doc(d["torsion"], name),
        curvature=_space_from_doc(d["curvature"], name),
        curvature_g_valued=_space_from_doc(d["curvature_g_valued"], name),
        inner_torsion=InnerTorsionSolution(lam, modulo, it["dim"], name),
        named_matches=tuple(NamedMatch.from_dict(m) for m in d["named_matches"]),
        flags=tuple(Flag.from_dict(f) for f in d["flags"]),
    )


def parse(document: str) -> ClassificationReport:
    return from_dict(json.loads(document))


def _text(report: ClassificationReport) -> str:
    g = report.group
    params = ", ".join(f"{k}={v}" for k, v in g["params"].items())
    lines = [f"group: {g['name']}" + (f" ({g['family']}; {params})" if g["family"] else "")]
    lines.append(f"ambient dimension: {g['n']}, Lie algebra dim: {g['lie_algebra_dim']}")
    lines.append(f"dim R = {report.curvature.dim}")
    if report.curvature_g_valued is not None:
        lines.append(f"dim R (g-valued) = {report.curvature_g_valued.dim}")
    lines.append(f"dim T = {report.torsion.dim}")
    lines.append(f"dim J = {report.inner_torsion.quotient_dim}")
    for m in report.named_matches:
        if m.scalar is None:
            lines.append(f"  {m.slot}: contains {m.name}")
        else:
            lines.append(f"  {m.slot}: basis = {format_rational(m.scalar)} * {m.name}")
    for f in report.flags:
        state = "n/a" if not f.applicable else ("ok" if f.holds else "FAILED")
        lines.append(f"check [{state}] {f.check} ({f.detail})")
    conclusion = CONCLUSIONS.get(g["family"] or "")
    if conclusion:
        lines.append(f"conclusion: {conclusion}")
    return "\n".join(lines) + "\n"


def render(report: ClassificationReport, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(to_dict(report), indent=2) + "\n"
    if fmt == "text":
        return _text(report)
    raise ValueError(f"unknown format {fmt!r}")
