"""Independent finite-set oracles.

Everything here is deliberately written from scratch against plain sets of
pairs, never through the package's fiber/reindex tables, so the two routes
stay independent.  Relations over range(n) are frozensets of pairs; the mask
encoding matches the fixture convention (pair (x, y) over carriers of sizes
(p, q) is the bit at x*q + y).
"""

from __future__ import annotations

import itertools


def rel_from_mask(mask: int, p: int, q: int) -> frozenset:
    return frozenset((x, y) for x in range(p) for y in range(q)
                     if (mask >> (x * q + y)) & 1)


def mask_from_rel(rel, p: int, q: int) -> int:
    m = 0
    for x, y in rel:
        m |= 1 << (x * q + y)
    return m


def set_from_mask(mask: int, n: int) -> frozenset:
    return frozenset(x for x in range(n) if (mask >> x) & 1)


def mask_from_set(s, n: int) -> int:
    m = 0
    for x in s:
        m |= 1 << x
    return m


def compose_rel(r, s) -> frozenset:
    """Diagrammatic: first r, then s."""
    return frozenset((x, z) for x, y in r for y2, z in s if y == y2)


def transpose_rel(r) -> frozenset:
    return frozenset((y, x) for x, y in r)


def identity_rel(n: int) -> frozenset:
    return frozenset((x, x) for x in range(n))


def full_rel(p: int, q: int) -> frozenset:
    return frozenset(itertools.product(range(p), range(q)))


def bool_matrix(rel, p: int, q: int):
    m = [[False] * q for _ in range(p)]
    for x, y in rel:
        m[x][y] = True
    return m


def bool_matmul(a, b):
    p, q, r = len(a), len(b), len(b[0]) if b else 0
    return [[any(a[i][k] and b[k][j] for k in range(q)) for j in range(r)]
            for i in range(p)]


def rel_from_matrix(m) -> frozenset:
    return frozenset((i, j) for i, row in enumerate(m)
                     for j, v in enumerate(row) if v)


def direct_image(fn: tuple, subset) -> frozenset:
    return frozenset(fn[x] for x in subset)


def preimage(fn: tuple, subset) -> frozenset:
    return frozenset(x for x in range(len(fn)) if fn[x] in subset)


def transitive_closure(r, n: int) -> frozenset:
    reach = {p: True for p in r}
    changed = True
    pairs = set(r)
    while changed:
        changed = False
        for (x, y) in list(pairs):
            for (y2, z) in list(pairs):
                if y == y2 and (x, z) not in pairs:
                    pairs.add((x, z))
                    changed = True
    return frozenset(pairs)


def is_per(r, n: int) -> bool:
    sym = all((y, x) in r for x, y in r)
    trans = all((x, z) in r for x, y in r for y2, z in r if y == y2)
    return sym and trans


def pers_on(n: int):
    """All symmetric transitive relations on range(n), mask order."""
    out = []
    for mask in range(1 << (n * n)):
        r = rel_from_mask(mask, n, n)
        if is_per(r, n):
            out.append(r)
    return out


def functional_relation_oracle(phi, rho, sigma, p: int, q: int,
                               strict_totality: bool = True) -> bool:
    """The five conditions on a relation between symmetric-transitive
    relations, evaluated directly set-theoretically."""
    dom_rho = {x for (x, x2) in rho if x == x2}
    dom_sig = {y for (y, y2) in sigma if y == y2}
    if not all(x in dom_rho and y in dom_sig for x, y in phi):
        return False
    # compatibility
    for (x, x2) in rho:
        for (x3, y) in phi:
            if x2 == x3 and (x, y) not in phi:
                return False
    for (x, y) in phi:
        for (y2, y3) in sigma:
            if y == y2 and (x, y3) not in phi:
                return False
    # single-valued
    for (x, y) in phi:
        for (x2, y2) in phi:
            if x == x2 and (y, y2) not in sigma:
                return False
    # totality
    if strict_totality:
        for x in dom_rho:
            if not any(x2 == x for (x2, _) in phi):
                return False
    else:
        for y in dom_sig:
            if not any(y2 == y for (_, y2) in phi):
                return False
    return True


def min_of_upper_set(cod_leq, dom_leq, elements, h_table, alpha):
    """Independent least-element search for adjoint checking: the minimum
    under dom_leq of {b : alpha cod_leq h(b)}, or None.  Both orders are
    given as sets of pairs including the diagonal."""
    upper = [b for b in elements if (alpha, h_table[b]) in cod_leq]
    for b in upper:
        if all((b, c) in dom_leq for c in upper):
            return b
    return None


def poset_reflection(arrows, factor):
    """Classes of `arrows` under mutual factorization, with representatives
    in list order; factor(f, g) says f factors through g."""
    classes = []
    for f in arrows:
        for cl in classes:
            if factor(f, cl[0]) and factor(cl[0], f):
                cl.append(f)
                break
        else:
            classes.append([f])
    return classes


def downset(leq_pairs, elements, top_of):
    return [x for x in elements if (x, top_of) in leq_pairs or x == top_of]
