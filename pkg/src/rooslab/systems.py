"""Inverse systems of free modules over a finite quasi-order.

An ``InverseSystem`` holds a free module of known rank at every index element
and one bonding matrix per related ordered pair (lam <= mu), the matrix
mapping the module at mu to the module at lam. Bonds for pairs the caller did
not declare are derived by composing declared bonds along a shortest path;
functoriality of the result is something ``validate_system`` checks
exhaustively rather than something construction assumes.

``truncated_A`` builds the finite column-truncation of the direct-sum systems
over families of grid height functions, ordered by everywhere domination,
with coordinate-projection bonds. At a finite truncation the direct sum and
the product coincide, so the same constructor realizes both flavors and the
would-be quotient system degenerates to zero; ``TRUNCATION_NOTE`` records
that fact for reports.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .linalg import IntMatrix, Ring, cohomology_at
from .orders import MonotoneMap, QuasiOrder

TRUNCATION_NOTE = (
    "at a finite truncation the direct sum equals the product, so this system "
    "realizes both the sum-type and product-type constructions and their "
    "quotient degenerates to zero"
)


class BondError(ValueError):
    """A bond is missing, underivable, or has the wrong shape."""


class InverseSystem:
    __slots__ = ("index", "ring", "ranks", "_bonds")

    def __init__(self, index: QuasiOrder, ring: Ring, ranks: dict, bonds: dict):
        for e in index.elements:
            if e not in ranks:
                raise ValueError(f"missing rank for index element {e!r}")
            if ranks[e] < 0:
                raise ValueError(f"negative rank at {e!r}")
        full = {}
        declared = {}
        for (lam, mu), m in bonds.items():
            if lam not in index or mu not in index:
                raise BondError(f"bond ({lam!r}, {mu!r}) mentions unknown element")
            if not index.leq(lam, mu):
                raise BondError(f"bond declared for unrelated pair ({lam!r}, {mu!r})")
            if m.shape != (ranks[lam], ranks[mu]):
                raise BondError(
                    f"bond ({lam!r}, {mu!r}) has shape {m.shape}, "
                    f"expected {(ranks[lam], ranks[mu])}"
                )
            declared[(lam, mu)] = m
        for e in index.elements:
            ident = IntMatrix.identity(ranks[e])
            if (e, e) in declared and not ring.matrices_equal(declared[(e, e)], ident):
                raise BondError(f"diagonal bond at {e!r} is not the identity")
            full[(e, e)] = ident
        # Derive missing bonds by BFS through declared pairs (deterministic:
        # neighbors visited in element order, shortest path wins).
        neighbors = {}
        for (lam, mu) in declared:
            if lam != mu:
                neighbors.setdefault(lam, []).append(mu)
        for lam in neighbors:
            neighbors[lam].sort(key=index.position)
        for lam, mu in index.related_pairs():
            if (lam, mu) in declared:
                full[(lam, mu)] = declared[(lam, mu)]
                continue
            path = self._bfs_path(lam, mu, neighbors)
            if path is None:
                raise BondError(f"bond for ({lam!r}, {mu!r}) neither declared nor derivable")
            m = declared[(path[0], path[1])]
            for a, b in zip(path[1:], path[2:]):
                m = m @ declared[(a, b)]
            full[(lam, mu)] = m
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "ranks", dict(ranks))
        object.__setattr__(self, "_bonds", full)

    @staticmethod
    def _bfs_path(src, dst, neighbors):
        seen = {src: None}
        queue = deque([src])
        while queue:
            cur = queue.popleft()
            if cur == dst:
                path = []
                while cur is not None:
                    path.append(cur)
                    cur = seen[cur]
                return path[::-1]
            for nxt in neighbors.get(cur, ()):
                if nxt not in seen:
                    seen[nxt] = cur
                    queue.append(nxt)
        return None

    def __setattr__(self, *_):
        raise AttributeError("InverseSystem is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, InverseSystem)
            and self.index == other.index
            and self.ring == other.ring
            and self.ranks == other.ranks
            and self._bonds == other._bonds
        )

    def __repr__(self) -> str:
        return (
            f"InverseSystem(|index|={len(self.index)}, ring={self.ring.render()}, "
            f"ranks={self.ranks!r})"
        )

    def rank(self, e) -> int:
        return self.ranks[e]

    def bond(self, lam, mu) -> IntMatrix:
        """The matrix of p^mu_lam : G_mu -> G_lam (requires lam <= mu)."""
        try:
            return self._bonds[(lam, mu)]
        except KeyError:
            raise BondError(f"no bond for pair ({lam!r}, {mu!r})") from None

    def bonds(self) -> dict:
        return dict(self._bonds)

    def restrict(self, subset) -> "InverseSystem":
        sub = self.index.restrict(subset)
        ranks = {e: self.ranks[e] for e in sub.elements}
        bonds = {
            (a, b): self._bonds[(a, b)]
            for (a, b) in sub.related_pairs(include_diagonal=True)
        }
        return InverseSystem(sub, self.ring, ranks, bonds)


@dataclass(frozen=True)
class SystemReport:
    ok: bool
    violations: tuple
    surjective: dict = field(compare=False)
    all_surjective: bool = False


def validate_system(s: InverseSystem) -> SystemReport:
    """Exhaustive functoriality check plus a surjectivity flag per bond."""
    violations = []
    ring = s.ring
    elems = s.index.elements
    for lam in elems:
        for mu in elems:
            if not s.index.leq(lam, mu):
                continue
            for nu in elems:
                if not s.index.leq(mu, nu):
                    continue
                left = s.bond(lam, mu) @ s.bond(mu, nu)
                if not ring.matrices_equal(left, s.bond(lam, nu)):
                    violations.append((lam, mu, nu))
    surjective = {}
    for (lam, mu), m in s.bonds().items():
        coker = cohomology_at(m, IntMatrix.zeros(0, m.nrows), ring)
        surjective[(lam, mu)] = coker.is_trivial
    return SystemReport(
        ok=not violations,
        violations=tuple(violations),
        surjective=surjective,
        all_surjective=all(surjective.values()),
    )


def restrict(s: InverseSystem, subset) -> InverseSystem:
    return s.restrict(subset)


def collapse_equivalences(s: InverseSystem) -> InverseSystem:
    """Restrict to the first element of every equivalence class.

    Each element is isomorphic (mutually related, with mutually inverse
    bonds in any valid system) to its representative, so derived limits in
    every degree are unchanged; the tests confirm that on random systems,
    non-directed ones included, instead of taking it on faith. The payoff:
    the result is a partial order, whose tuple counts do not blow up the
    way equivalence-rich quasi-orders do.
    """
    reps = [cls[0] for cls in s.index.equivalence_classes()]
    return s.restrict(reps)


def pullback(s: InverseSystem, phi: MonotoneMap) -> InverseSystem:
    """Precompose the system with an order-preserving map into its index."""
    if phi.target != s.index:
        raise ValueError("map target is not the system's index order")
    src = phi.source
    ranks = {e: s.ranks[phi(e)] for e in src.elements}
    bonds = {}
    for a, b in src.related_pairs(include_diagonal=True):
        bonds[(a, b)] = s.bond(phi(a), phi(b))
    return InverseSystem(src, s.ring, ranks, bonds)


@dataclass(frozen=True)
class TruncationSpec:
    columns: int
    family: tuple
    ring: Ring = Ring.integers()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "family", tuple(tuple(int(v) for v in f) for f in self.family)
        )
        if not self.family:
            raise ValueError("family must be nonempty")
        for f in self.family:
            if len(f) != self.columns:
                raise ValueError(f"function {f} does not have {self.columns} columns")
            if any(v < 0 for v in f):
                raise ValueError(f"function {f} has negative heights")


def truncation_label(f) -> str:
    return ",".join(str(v) for v in f)


def grid_cells(f) -> list:
    """Cells (i, j) with j < f(i), in lexicographic order."""
    return [(i, j) for i, v in enumerate(f) for j in range(v)]


def truncated_A(spec: TruncationSpec) -> InverseSystem:
    """Finite truncation of the grid-supported sum/product systems.

    Index = the family under everywhere domination; the object at f is free
    of rank sum(f) with coordinates the grid cells of f in lexicographic
    order; the bond for f <= g projects away the cells of g outside f.
    """
    labels = []
    seen = {}
    for f in spec.family:
        base = truncation_label(f)
        if base in seen:
            seen[base] += 1
            labels.append(f"{base}#{seen[base]}")
        else:
            seen[base] = 0
            labels.append(base)
    funcs = dict(zip(labels, spec.family))
    pairs = [
        (a, b)
        for a in labels
        for b in labels
        if all(x <= y for x, y in zip(funcs[a], funcs[b]))
    ]
    index = QuasiOrder(labels, pairs)
    ranks = {lab: sum(funcs[lab]) for lab in labels}
    bonds = {}
    for a, b in index.related_pairs(include_diagonal=False):
        cells_a = grid_cells(funcs[a])
        col_of = {cell: j for j, cell in enumerate(grid_cells(funcs[b]))}
        rows = []
        for cell in cells_a:
            row = [0] * ranks[b]
            row[col_of[cell]] = 1
            rows.append(row)
        bonds[(a, b)] = IntMatrix(rows, ranks[b])
    return InverseSystem(index, spec.ring, ranks, bonds)


@dataclass(frozen=True)
class SystemSES:
    """Levelwise short exact sequence of systems over one index and ring.

    ``inject`` maps the sub system into the middle (one matrix per index,
    rank_mid x rank_sub); ``project`` maps the middle onto the quotient.
    """

    sub: InverseSystem
    mid: InverseSystem
    quot: InverseSystem
    inject: dict = field(compare=False)
    project: dict = field(compare=False)


@dataclass(frozen=True)
class SesReport:
    ok: bool
    violations: tuple


def validate_ses(e: SystemSES) -> SesReport:
    """Exact levelwise verification: shapes, injectivity, surjectivity,
    ker = im, and commutation of both maps with every bond."""
    violations = []
    ring = e.mid.ring
    if e.sub.ring != ring or e.quot.ring != ring:
        violations.append("rings differ between the three systems")
    if e.sub.index != e.mid.index or e.quot.index != e.mid.index:
        violations.append("index orders differ between the three systems")
        return SesReport(False, tuple(violations))
    for name, sys in (("sub", e.sub), ("mid", e.mid), ("quot", e.quot)):
        rep = validate_system(sys)
        if not rep.ok:
            violations.append(f"{name} system fails functoriality: {rep.violations[:3]}")
    idx = e.mid.index
    for lam in idx.elements:
        if lam not in e.inject or lam not in e.project:
            violations.append(f"missing inject/project matrix at {lam!r}")
            continue
        i_m = e.inject[lam]
        p_m = e.project[lam]
        if i_m.shape != (e.mid.rank(lam), e.sub.rank(lam)):
            violations.append(f"inject shape wrong at {lam!r}")
            continue
        if p_m.shape != (e.quot.rank(lam), e.mid.rank(lam)):
            violations.append(f"project shape wrong at {lam!r}")
            continue
        if not ring.is_zero_matrix(p_m @ i_m):
            violations.append(f"project * inject nonzero at {lam!r}")
            continue
        ker_i = cohomology_at(IntMatrix.zeros(e.sub.rank(lam), 0), i_m, ring)
        if not ker_i.is_trivial:
            violations.append(f"inject not injective at {lam!r}")
        coker_p = cohomology_at(p_m, IntMatrix.zeros(0, e.quot.rank(lam)), ring)
        if not coker_p.is_trivial:
            violations.append(f"project not surjective at {lam!r}")
        middle = cohomology_at(i_m, p_m, ring)
        if not middle.is_trivial:
            violations.append(f"not exact at middle for {lam!r}")
    for lam, mu in idx.related_pairs(include_diagonal=False):
        if lam not in e.inject or mu not in e.inject:
            continue
        left = e.inject[lam] @ e.sub.bond(lam, mu)
        right = e.mid.bond(lam, mu) @ e.inject[mu]
        if not ring.matrices_equal(left, right):
            violations.append(f"inject does not commute with bond ({lam!r}, {mu!r})")
        left = e.project[lam] @ e.mid.bond(lam, mu)
        right = e.quot.bond(lam, mu) @ e.project[mu]
        if not ring.matrices_equal(left, right):
            violations.append(f"project does not commute with bond ({lam!r}, {mu!r})")
    return SesReport(not violations, tuple(violations))
