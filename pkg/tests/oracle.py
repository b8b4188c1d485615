"""Independent brute-force reference computations.

Nothing here calls into etk's elimination or constraint code.  Matrices are
plain lists of rationals; ranks come from dense elimination in gmpy2
rationals carried out over a permuted column order.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from gmpy2 import mpq


def rank(rows, ncols, seed=None):
    """Rank by dense elimination; columns visited in reversed or shuffled order."""
    order = list(range(ncols))[::-1]
    if seed is not None:
        random.Random(seed).shuffle(order)
    # forward elimination, one incoming row at a time, in gmpy2 rationals
    pivots: list[tuple[int, list]] = []
    for row in rows:
        v = [mpq(row[c].numerator, row[c].denominator) if isinstance(row[c], Fraction) else mpq(row[c]) for c in order]
        for c, p in pivots:
            f = v[c]
            if f:
                v = [a - f * b for a, b in zip(v, p)]
        lead = next((c for c, x in enumerate(v) if x), None)
        if lead is None:
            continue
        inv = 1 / v[lead]
        pivots.append((lead, [x * inv for x in v]))
    return len(pivots)


def nullity(rows, ncols, seed=None):
    return ncols - rank(rows, ncols, seed)


def kernel_basis(rows, ncols):
    """Kernel vectors by plain Gauss-Jordan in natural column order."""
    m = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -m[i][free]
        basis.append(v)
    return basis


def mat_inverse(a):
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [row[n:] for row in m]


def det(a):
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


# -- tensor constraints by explicit index loops ---------------------------------------

SLOTS = {
    "(2,1)": "iio",
    "(3,1)": "iiio",
    "(4,0)": "iiii",
    "itmap": "ioi",
}


def _pos(idx, n):
    p = 0
    for i in idx:
        p = p * n + i
    return p


def symmetry_rows(n, valence, constraints):
    k = len(SLOTS[valence])
    size = n ** k
    rows = []
    for idx in itertools.product(range(n), repeat=k):
        if "skew12" in constraints:
            row = [0] * size
            row[_pos(idx, n)] += 1
            row[_pos((idx[1], idx[0]) + idx[2:], n)] += 1
            rows.append(row)
        if "skew34" in constraints:
            row = [0] * size
            row[_pos(idx, n)] += 1
            row[_pos(idx[:2] + (idx[3], idx[2]), n)] += 1
            rows.append(row)
        if "bianchi" in constraints:
            # cyclic over the last three of four slots
            a, b, c, d = idx
            row = [0] * size
            for j in ((a, b, c, d), (a, c, d, b), (a, d, b, c)):
                row[_pos(j, n)] += 1
            rows.append(row)
    return rows


def derivation_rows(n, valence, L):
    """Rows of the derivation: output slots by L, input slots by -L^T."""
    slots = SLOTS[valence]
    k = len(slots)
    size = n ** k
    rows = []
    for out in itertools.product(range(n), repeat=k):
        row = [Fraction(0)] * size
        for s, kind in enumerate(slots):
            for e in range(n):
                coef = L[out[s]][e] if kind == "o" else -L[e][out[s]]
                if coef:
                    src = out[:s] + (e,) + out[s + 1:]
                    row[_pos(src, n)] += coef
        rows.append(row)
    return rows


def action_rows(n, valence, g):
    """Rows of rho(g) - Id with g on output slots and g^-T on input slots."""
    slots = SLOTS[valence]
    k = len(slots)
    size = n ** k
    ginv = mat_inverse(g)
    mats = [g if kind == "o" else [[ginv[j][i] for j in range(n)] for i in range(n)] for kind in slots]
    rows = []
    for out in itertools.product(range(n), repeat=k):
        row = [Fraction(0)] * size
        for src in itertools.product(range(n), repeat=k):
            c = Fraction(1)
            for s in range(k):
                c *= mats[s][out[s]][src[s]]
                if not c:
                    break
            if c:
                row[_pos(src, n)] += c
        row[_pos(out, n)] -= 1
        rows.append(row)
    return rows


def invariant_dim(n, valence, constraints, algebra, reps, seed=None):
    rows = symmetry_rows(n, valence, constraints)
    for L in algebra:
        rows += derivation_rows(n, valence, L)
    for g in reps:
        rows += action_rows(n, valence, g)
    return nullity(rows, n ** len(SLOTS[valence]), seed)


def inner_torsion_dim(n, algebra, reps, seed=None):
    """Quotient dimension via auxiliary unknowns for the g-components.

    Unknowns are lambda (n^3 entries) plus, for every relation and every
    slot, coefficients on a basis of g.  Solutions with lambda valued in g are
    then divided out.
    """
    n3 = n ** 3
    basis = [[x for row in b for x in row] for b in algebra]
    # an independent subset of the algebra basis
    indep = []
    for b in basis:
        if rank(indep + [b], n * n) > len(indep):
            indep.append(b)
    d = len(indep)
    relations = [derivation_rows(n, "itmap", L) for L in algebra] + [_rep_relation(n, g) for g in reps]
    extra = len(relations) * n * d
    rows = []
    for r_index, rel in enumerate(relations):
        for i in range(n):
            for q in range(n * n):
                row = list(rel[i * n * n + q]) + [Fraction(0)] * extra
                for k in range(d):
                    row[n3 + (r_index * n + i) * d + k] = -indep[k][q]
                rows.append(row)
    sols = nullity(rows, n3 + extra, seed) if rows else n3
    return sols - n * d


def _rep_relation(n, g):
    ginv = mat_inverse(g)
    rows = []
    for i, r, s in itertools.product(range(n), repeat=3):
        row = [Fraction(0)] * n ** 3
        for a, b in itertools.product(range(n), repeat=2):
            row[_pos((i, a, b), n)] += Fraction(g[r][a]) * ginv[b][s]
        for e in range(n):
            row[_pos((e, r, s), n)] -= g[e][i]
        rows.append(row)
    return rows


# -- reference tensors ----------------------------------------------------------------

def k0(n):
    """R[a,b,c,d] = component d of <e_b,e_c> e_a - <e_a,e_c> e_b."""
    out = []
    for a, b, c, d in itertools.product(range(n), repeat=4):
        out.append(Fraction(int(b == c and a == d) - int(a == c and b == d)))
    return out


def levi_civita(n=3):
    out = []
    for i, j, k in itertools.product(range(n), repeat=3):
        out.append(Fraction((i - j) * (j - k) * (k - i), 2))
    return out
