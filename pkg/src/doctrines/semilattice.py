"""Finite inf-semilattices and monotone maps between them.

A fiber is a finite poset with a top element and binary meets, presented
extensionally: element list in canonical order, a boolean order table and a
precomputed meet table.  Meets are validated once at construction and then
used as O(1) lookups everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedPresentation


@dataclass
class FinInfSL:
    """A finite inf-semilattice: elements, order, top and meet tables."""

    elements: tuple[str, ...]
    leq: np.ndarray          # bool, shape (n, n); leq[i, j] iff i <= j
    top: int                 # index of the greatest element
    meet: np.ndarray         # int, shape (n, n); meet[i, j] = index of glb
    index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.index:
            self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise MalformedPresentation("duplicate element names in fiber")

    @property
    def n(self) -> int:
        return len(self.elements)

    def le(self, i: int, j: int) -> bool:
        return bool(self.leq[i, j])

    def meet_of(self, i: int, j: int) -> int:
        return int(self.meet[i, j])

    def meet_all(self, idxs) -> int:
        m = self.top
        for i in idxs:
            m = int(self.meet[m, i])
        return m

    def downset(self, i: int) -> list[int]:
        return [int(k) for k in np.flatnonzero(self.leq[:, i])]

    def upset(self, i: int) -> list[int]:
        return [int(k) for k in np.flatnonzero(self.leq[i, :])]

    def validate(self) -> str | None:
        """Return None if this is a genuine inf-semilattice, else a message."""
        n = self.n
        if self.leq.shape != (n, n):
            return "leq table has wrong shape"
        if not self.leq.diagonal().all():
            i = int(np.flatnonzero(~self.leq.diagonal())[0])
            return f"order not reflexive at {self.elements[i]}"
        sym = self.leq & self.leq.T
        if (sym & ~np.eye(n, dtype=bool)).any():
            i, j = map(int, np.argwhere(sym & ~np.eye(n, dtype=bool))[0])
            return f"order not antisymmetric at ({self.elements[i]}, {self.elements[j]})"
        closure = (self.leq.astype(np.uint8) @ self.leq.astype(np.uint8)) > 0
        if (closure & ~self.leq).any():
            i, j = map(int, np.argwhere(closure & ~self.leq)[0])
            return f"order not transitive: missing {self.elements[i]} <= {self.elements[j]}"
        if not self.leq[:, self.top].all():
            i = int(np.flatnonzero(~self.leq[:, self.top])[0])
            return f"top is not above {self.elements[i]}"
        # meet[i, j] must be the greatest lower bound of {i, j}
        below_i = self.leq.T  # below_i[i, k] iff k <= i
        for i in range(n):
            lower = below_i[i][None, :] & below_i  # lower[j, k] iff k <= i and k <= j
            m = self.meet[i]
            if not (np.take_along_axis(lower, m[:, None], axis=1)).all():
                j = int(np.flatnonzero(~np.take_along_axis(lower, m[:, None], axis=1).ravel())[0])
                return f"meet({self.elements[i]}, {self.elements[j]}) is not a lower bound"
            # every common lower bound k is below meet[i, j]
            ok = ~lower | self.leq[:, m].T
            if not ok.all():
                j, k = map(int, np.argwhere(~ok)[0])
                return (f"meet({self.elements[i]}, {self.elements[j]}) "
                        f"is not above lower bound {self.elements[k]}")
        return None

    def __eq__(self, other) -> bool:
        return (isinstance(other, FinInfSL)
                and self.elements == other.elements
                and self.top == other.top
                and np.array_equal(self.leq, other.leq)
                and np.array_equal(self.meet, other.meet))


def meets_from_leq(elements: tuple[str, ...], leq: np.ndarray) -> tuple[int, np.ndarray]:
    """Compute (top, meet table) from an order table; raise if either is missing."""
    n = len(elements)
    tops = np.flatnonzero(leq.all(axis=0))
    if len(tops) == 0:
        raise MalformedPresentation("poset has no top element")
    top = int(tops[0])
    if n > 64:
        # candidate = the common lower bound with the most elements below it,
        # verified to dominate every common lower bound
        rank = leq.sum(axis=0).astype(np.int32)
        lower3 = leq[:, :, None] & leq[:, None, :]            # (m, i, j): m <= i, m <= j
        scores = np.where(lower3, rank[:, None, None], -1)
        cand = scores.argmax(axis=0).astype(np.int32)
        ok = (~lower3 | leq[:, cand]).all(axis=0)
        in_lower = np.take_along_axis(lower3, cand[None, :, :], axis=0)[0]
        bad = ~(ok & in_lower)
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise MalformedPresentation(
                f"elements {elements[i]}, {elements[j]} have no meet")
        return top, cand
    meet = np.empty((n, n), dtype=np.int32)
    below = leq.T
    for i in range(n):
        for j in range(n):
            lower = np.flatnonzero(below[i] & below[j])
            if len(lower) == 0:
                raise MalformedPresentation(
                    f"elements {elements[i]}, {elements[j]} have no lower bound")
            greatest = [k for k in lower if leq[lower, k].all()]
            if not greatest:
                raise MalformedPresentation(
                    f"elements {elements[i]}, {elements[j]} have no meet")
            meet[i, j] = greatest[0]
    return top, meet


def lattice_from_leq(elements, leq) -> FinInfSL:
    leq = np.asarray(leq, dtype=bool)
    top, meet = meets_from_leq(tuple(elements), leq)
    return FinInfSL(tuple(elements), leq, top, meet)


def chain(names) -> FinInfSL:
    """Totally ordered fiber; names are listed from bottom to top."""
    names = tuple(names)
    n = len(names)
    leq = np.zeros((n, n), dtype=bool)
    for i in range(n):
        leq[i, i:] = True
    meet = np.minimum.outer(np.arange(n), np.arange(n)).astype(np.int32)
    return FinInfSL(names, leq, n - 1, meet)


def diamond(names=("bot", "a", "b", "top")) -> FinInfSL:
    """The four-element fiber with two incomparable midpoints whose meet is bottom."""
    bot, a, b, top = range(4)
    leq = np.eye(4, dtype=bool)
    leq[bot, :] = True
    leq[a, top] = leq[b, top] = True
    meet = np.array([[bot, bot, bot, bot],
                     [bot, a, bot, a],
                     [bot, bot, b, b],
                     [bot, a, b, top]], dtype=np.int32)
    return FinInfSL(tuple(names), leq, top, meet)


def powerset(k: int, prefix: str = "s") -> FinInfSL:
    """Subsets of a k-element set as bitmasks; element i is named '<prefix><i>'."""
    n = 1 << k
    masks = np.arange(n)
    leq = (masks[:, None] & ~masks[None, :]) == 0
    meet = (masks[:, None] & masks[None, :]).astype(np.int32)
    names = tuple(f"{prefix}{m}" for m in range(n))
    return FinInfSL(names, leq, n - 1, meet)


def sub_semilattice(parent: FinInfSL, idxs: list[int], names=None) -> FinInfSL:
    """The induced order on a subset of elements; meets must stay inside it."""
    idxs = list(idxs)
    pos = {p: i for i, p in enumerate(idxs)}
    leq = parent.leq[np.ix_(idxs, idxs)]
    n = len(idxs)
    meet = np.empty((n, n), dtype=np.int32)
    for i, p in enumerate(idxs):
        for j, q in enumerate(idxs):
            m = parent.meet_of(p, q)
            if m not in pos:
                raise MalformedPresentation(
                    f"subset not meet-closed at ({parent.elements[p]}, {parent.elements[q]})")
            meet[i, j] = pos[m]
    tops = [i for i in range(n) if leq[:, i].all()]
    if not tops:
        raise MalformedPresentation("subset has no top element")
    if names is None:
        names = tuple(parent.elements[p] for p in idxs)
    return FinInfSL(tuple(names), leq, tops[0], meet)


@dataclass
class MonotoneMap:
    """A monotone function between fibers, tabled on the domain."""

    dom: FinInfSL
    cod: FinInfSL
    table: np.ndarray  # int, len == dom.n; values are cod indices

    def __call__(self, i: int) -> int:
        return int(self.table[i])

    def compose(self, inner: "MonotoneMap") -> "MonotoneMap":
        """self after inner (inner.cod must be self.dom)."""
        return MonotoneMap(inner.dom, self.cod, self.table[inner.table])

    def is_monotone(self) -> bool:
        return bool((~self.dom.leq | self.cod.leq[self.table][:, self.table]).all())

    def is_homomorphism(self) -> bool:
        """Preserves top and binary meets (hence monotone)."""
        if int(self.table[self.dom.top]) != self.cod.top:
            return False
        lhs = self.table[self.dom.meet]
        rhs = self.cod.meet[self.table[:, None], self.table[None, :]]
        return bool(np.array_equal(lhs, rhs))

    def homomorphism_violation(self) -> str | None:
        """First top/meet preservation failure in canonical order, if any."""
        if int(self.table[self.dom.top]) != self.cod.top:
            return f"top {self.dom.elements[self.dom.top]} maps to non-top"
        lhs = self.table[self.dom.meet]
        rhs = self.cod.meet[self.table[:, None], self.table[None, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            i, j = map(int, bad[0])
            return (f"meet not preserved at "
                    f"({self.dom.elements[i]}, {self.dom.elements[j]})")
        return None

    def __eq__(self, other) -> bool:
        return (isinstance(other, MonotoneMap)
                and self.dom.elements == other.dom.elements
                and self.cod.elements == other.cod.elements
                and np.array_equal(self.table, other.table))


def identity_map(lat: FinInfSL) -> MonotoneMap:
    return MonotoneMap(lat, lat, np.arange(lat.n, dtype=np.int32))


@dataclass
class NoAdjoint:
    """Witness that a monotone map has no left adjoint at element `witness`."""

    witness: str
    upper_set: tuple[str, ...]


def left_adjoint(h: MonotoneMap) -> MonotoneMap | NoAdjoint:
    """Left adjoint of h: L -> M, i.e. e: M -> L with e(a) = min{b : a <= h(b)}.

    The minimum is searched exhaustively per element; a NoAdjoint answer
    carries the first element (in canonical order) whose upper set has no
    least member.  When h preserves top and meets the minimum always exists
    and equals the meet of the upper set.
    """
    L, M = h.dom, h.cod
    table = np.empty(M.n, dtype=np.int32)
    for a in range(M.n):
        cond = M.leq[a][h.table]          # cond[b] iff a <= h(b)
        cand = np.flatnonzero(cond)
        if len(cand) == 0:
            return NoAdjoint(M.elements[a], ())
        sub = L.leq[np.ix_(cand, cand)]
        minimal = np.flatnonzero(sub.all(axis=1))
        if len(minimal) == 0:
            return NoAdjoint(M.elements[a], tuple(L.elements[c] for c in cand))
        table[a] = cand[minimal[0]]
    return MonotoneMap(M, L, table)


def check_adjunction(e: MonotoneMap, h: MonotoneMap) -> bool:
    """Check e -| h via both unit and counit inequalities, exhaustively."""
    M, L = e.dom, e.cod
    unit = all(M.le(a, int(h.table[e.table[a]])) for a in range(M.n))
    counit = all(L.le(int(e.table[h.table[b]]), b) for b in range(L.n))
    return unit and counit
