"""Finite quasi-orders: tuple enumeration, cofinality, closures, filtrations.

A ``QuasiOrder`` stores the reflexive-transitive closure of user-supplied
pairs; antisymmetry is never required, so distinct equivalent elements
(x <= y <= x) are legal throughout. Index tuples are plain Python tuples of
element labels, weakly increasing under leq; ``face(t, i)`` deletes entry i.

Enumeration order matters: ``chains`` lists tuples lexicographically by the
position of elements in the user-supplied element list, and that order fixes
the row/column layout of every differential matrix downstream.
"""

from __future__ import annotations

from dataclasses import dataclass


class JoinNotUpperBoundError(ValueError):
    """join(x, y) failed to dominate one of its arguments."""


class JoinNotMonotoneError(ValueError):
    """join is not monotone in one of its arguments."""


class NotMonotoneError(ValueError):
    """A would-be monotone map reverses some relation."""


class QuasiOrder:
    """Finite quasi-order over hashable labels.

    ``elements`` keeps the user order (it drives all enumerations); ``leq``
    is the reflexive-transitive closure of the given pairs.
    """

    __slots__ = ("elements", "_pos", "_up")

    def __init__(self, elements, pairs=()):
        elements = tuple(elements)
        if len(set(elements)) != len(elements):
            raise ValueError("duplicate element labels")
        pos = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        up = [set([i]) for i in range(n)]
        for a, b in pairs:
            if a not in pos or b not in pos:
                raise ValueError(f"pair ({a!r}, {b!r}) mentions unknown element")
            up[pos[a]].add(pos[b])
        # Transitive closure by fixpoint iteration.
        changed = True
        while changed:
            changed = False
            for i in range(n):
                grown = set(up[i])
                for j in up[i]:
                    grown |= up[j]
                if len(grown) != len(up[i]):
                    up[i] = grown
                    changed = True
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "_pos", pos)
        object.__setattr__(self, "_up", tuple(frozenset(s) for s in up))

    def __setattr__(self, *_):
        raise AttributeError("QuasiOrder is immutable")

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, e) -> bool:
        return e in self._pos

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QuasiOrder)
            and self.elements == other.elements
            and self._up == other._up
        )

    def __hash__(self) -> int:
        return hash((self.elements, self._up))

    def __repr__(self) -> str:
        rels = [
            (self.elements[i], self.elements[j])
            for i in range(len(self.elements))
            for j in self._up[i]
            if i != j
        ]
        return f"QuasiOrder({list(self.elements)!r}, {rels!r})"

    def position(self, e) -> int:
        return self._pos[e]

    def leq(self, a, b) -> bool:
        return self._pos[b] in self._up[self._pos[a]]

    def equivalent(self, a, b) -> bool:
        return self.leq(a, b) and self.leq(b, a)

    def related_pairs(self, include_diagonal: bool = False):
        """Ordered pairs (a, b) with a <= b, in lexicographic position order."""
        out = []
        for i, a in enumerate(self.elements):
            for j in sorted(self._up[i]):
                if i == j and not include_diagonal:
                    continue
                out.append((a, self.elements[j]))
        return out

    def upper_bounds(self, a, b):
        ia, ib = self._pos[a], self._pos[b]
        common = self._up[ia] & self._up[ib]
        return [self.elements[k] for k in sorted(common)]

    def is_directed(self) -> bool:
        for i in range(len(self.elements)):
            for j in range(i + 1, len(self.elements)):
                if not (self._up[i] & self._up[j]):
                    return False
        return True

    def maximum(self):
        """First element (in user order) above everything, or None."""
        n = len(self.elements)
        for j in range(n):
            if all(j in self._up[i] for i in range(n)):
                return self.elements[j]
        return None

    def is_partial(self) -> bool:
        n = len(self.elements)
        for i in range(n):
            for j in self._up[i]:
                if j != i and i in self._up[j]:
                    return False
        return True

    def is_cofinal(self, subset) -> bool:
        idx = [self._pos[c] for c in subset]
        return all(any(j in self._up[i] for j in idx) for i in range(len(self.elements)))

    def down_closure(self, subset):
        """Elements below some member of subset, in user order."""
        idx = set(self._pos[c] for c in subset)
        return [
            e
            for i, e in enumerate(self.elements)
            if self._up[i] & idx or i in idx
        ]

    def restrict(self, subset) -> "QuasiOrder":
        keep = [e for e in self.elements if e in set(subset)]
        pairs = [(a, b) for a in keep for b in keep if self.leq(a, b)]
        return QuasiOrder(keep, pairs)

    def equivalence_classes(self):
        """Classes of mutually related elements, each in user order.

        Classes are listed by their first member's position; the first
        members form a canonical choice of representatives whose induced
        suborder is a partial order.
        """
        seen = set()
        out = []
        for i, e in enumerate(self.elements):
            if i in seen:
                continue
            cls = [j for j in sorted(self._up[i]) if i in self._up[j]]
            seen.update(cls)
            out.append([self.elements[j] for j in cls])
        return out


@dataclass(frozen=True)
class OrderReport:
    directed: bool
    has_max: bool
    partial: bool
    maximum: object = None


def validate_order(q: QuasiOrder) -> OrderReport:
    m = q.maximum()
    return OrderReport(
        directed=q.is_directed(),
        has_max=m is not None,
        partial=q.is_partial(),
        maximum=m,
    )


def chains(q: QuasiOrder, n: int, strict: bool = False):
    """All weakly increasing (n+1)-tuples of q, lexicographic by position.

    With ``strict`` (partial orders only), consecutive entries must be
    strictly increasing, which excludes every degenerate tuple.
    """
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if strict and not q.is_partial():
        raise ValueError("strict tuple enumeration requires a partial order")
    elems = q.elements
    m = len(elems)
    succ = []
    for i in range(m):
        nxt = [j for j in range(m) if q.leq(elems[i], elems[j])]
        if strict:
            nxt = [j for j in nxt if j != i]
        succ.append(sorted(nxt))
    out = []
    stack = [(i,) for i in reversed(range(m))]
    while stack:
        t = stack.pop()
        if len(t) == n + 1:
            out.append(tuple(elems[i] for i in t))
        else:
            for j in reversed(succ[t[-1]]):
                stack.append(t + (j,))
    return out


def face(t: tuple, i: int) -> tuple:
    """Delete entry i; weak increase is preserved by transitivity."""
    if not 0 <= i < len(t):
        raise IndexError(f"face index {i} out of range for tuple of length {len(t)}")
    return t[:i] + t[i + 1 :]


class MonotoneMap:
    """Order-preserving map between quasi-orders; checked at construction."""

    __slots__ = ("source", "target", "assignment")

    def __init__(self, source: QuasiOrder, target: QuasiOrder, assignment: dict):
        for e in source.elements:
            if e not in assignment:
                raise ValueError(f"assignment misses source element {e!r}")
            if assignment[e] not in target:
                raise ValueError(f"{e!r} maps to unknown target {assignment[e]!r}")
        for a, b in source.related_pairs(include_diagonal=False):
            if not target.leq(assignment[a], assignment[b]):
                raise NotMonotoneError(
                    f"{a!r} <= {b!r} but images {assignment[a]!r}, "
                    f"{assignment[b]!r} are not related"
                )
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "assignment", dict(assignment))

    def __setattr__(self, *_):
        raise AttributeError("MonotoneMap is immutable")

    def __call__(self, e):
        return self.assignment[e]

    def is_cofinal(self) -> bool:
        image = set(self.assignment[e] for e in self.source.elements)
        return self.target.is_cofinal(image)

    @classmethod
    def inclusion(cls, q: QuasiOrder, subset) -> "MonotoneMap":
        return cls(q.restrict(subset), q, {e: e for e in subset})


@dataclass(frozen=True)
class Filtration:
    order: QuasiOrder
    stages: tuple  # tuple of frozensets, increasing

    def validate(self, join) -> None:
        previous = frozenset()
        for stage in self.stages:
            if not previous <= stage:
                raise ValueError("filtration stages are not nested")
            if frozenset(self.order.down_closure(stage)) != stage:
                raise ValueError("stage not downward closed")
            for x in stage:
                for y in stage:
                    if join(x, y) not in stage:
                        raise ValueError("stage not join-closed")
            previous = stage
        if self.stages and self.stages[-1] != frozenset(self.order.elements):
            raise ValueError("final stage does not exhaust the order")


def build_filtration(q: QuasiOrder, join, enum=None) -> Filtration:
    """Increasing stages: close the first alpha enumerated elements under
    join, then downward.

    The join must be an upper bound of its arguments and monotone in both;
    both conditions are checked exhaustively up front. The enumeration must
    generate the whole order (its closure exhausts all elements).
    """
    elems = q.elements
    for x in elems:
        for y in elems:
            j = join(x, y)
            if j not in q:
                raise JoinNotUpperBoundError(f"join({x!r}, {y!r}) = {j!r} not in order")
            if not (q.leq(x, j) and q.leq(y, j)):
                raise JoinNotUpperBoundError(
                    f"join({x!r}, {y!r}) = {j!r} is not an upper bound"
                )
    for x in elems:
        for y in elems:
            for x2 in elems:
                if not q.leq(x2, x):
                    continue
                for y2 in elems:
                    if q.leq(y2, y) and not q.leq(join(x2, y2), join(x, y)):
                        raise JoinNotMonotoneError(
                            f"join({x2!r}, {y2!r}) exceeds join({x!r}, {y!r})"
                        )
    if enum is None:
        enum = elems
    enum = tuple(enum)
    for e in enum:
        if e not in q:
            raise ValueError(f"enumeration mentions unknown element {e!r}")
    stages = []
    for alpha in range(1, len(enum) + 1):
        closed = set(enum[:alpha])
        while True:
            new = set()
            for x in closed:
                for y in closed:
                    j = join(x, y)
                    if j not in closed:
                        new.add(j)
            if not new:
                break
            closed |= new
        stages.append(frozenset(q.down_closure(closed)))
    if stages and stages[-1] != frozenset(elems):
        raise ValueError("enumeration does not generate the whole order")
    filtration = Filtration(q, tuple(stages))
    filtration.validate(join)
    return filtration
