"""The cochain complex of an inverse system and its cohomology.

Degree n of the complex is the product of one copy of G_{first entry} for
every weakly increasing (n+1)-tuple of the index order. The coboundary sends
a degree-(n-1) cochain x to the degree-n cochain whose entry at t is

    bond(t0, t1) applied to x at the 0th face of t,
    plus sum over i = 1..n of (-1)^i times x at the i-th face of t,

where the i-th face deletes entry i. Degenerate tuples (repeated entries) are
included by default; for partial orders a strict-tuples variant is available
behind a flag and must agree on cohomology (it is tested, never assumed).

Degree -1 is the zero module, so the degree-0 differential is a matrix with
zero columns, and cohomology in degree 0 is the kernel of the degree-1
differential — which is exactly the inverse limit; ``limit_direct`` computes
the same kernel from the equalizer description as an independent route.
"""

from __future__ import annotations

from .linalg import GroupInvariants, IntMatrix, Ring, cohomology_at
from .orders import QuasiOrder, chains, face
from .systems import InverseSystem, validate_system


class InvalidSystemError(ValueError):
    """The system failed functoriality validation; carries the violations."""

    def __init__(self, violations):
        super().__init__(f"system fails functoriality at triples {list(violations)[:5]}")
        self.violations = tuple(violations)


class IndexNotDominatingError(ValueError):
    """Contraction requires every index element to lie below the chosen one."""


class RoosComplex:
    """A bounded cochain complex with labeled block structure.

    ``blocks[n]`` lists the basis blocks of degree n (index tuples for system
    complexes, morphism chains for nerve complexes); ``diffs[n]`` is the
    matrix of the differential from degree n-1 into degree n, with
    ``diffs[0]`` a zero-column matrix. The complex identity (consecutive
    differentials compose to zero over the ring) is verified at construction.
    """

    __slots__ = ("ring", "n_max", "blocks", "block_ranks", "offsets", "total_ranks", "diffs", "strict", "system")

    def __init__(self, ring: Ring, blocks, block_ranks, diffs, strict: bool = False, system=None):
        n_max = len(blocks) - 1
        offsets = []
        totals = []
        for n in range(n_max + 1):
            offs = []
            acc = 0
            for r in block_ranks[n]:
                offs.append(acc)
                acc += r
            offsets.append(tuple(offs))
            totals.append(acc)
        for n in range(n_max + 1):
            expected = (totals[n], totals[n - 1] if n else 0)
            if diffs[n].shape != expected:
                raise ValueError(
                    f"differential {n} has shape {diffs[n].shape}, expected {expected}"
                )
        for n in range(1, n_max):
            if not ring.is_zero_matrix(diffs[n + 1] @ diffs[n]):
                raise ValueError(f"complex identity fails between degrees {n - 1}..{n + 1}")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "n_max", n_max)
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in blocks))
        object.__setattr__(self, "block_ranks", tuple(tuple(r) for r in block_ranks))
        object.__setattr__(self, "offsets", tuple(offsets))
        object.__setattr__(self, "total_ranks", tuple(totals))
        object.__setattr__(self, "diffs", tuple(diffs))
        object.__setattr__(self, "strict", strict)
        object.__setattr__(self, "system", system)

    def __setattr__(self, *_):
        raise AttributeError("RoosComplex is immutable")

    def dimension(self, n: int) -> int:
        return self.total_ranks[n]

    def differential(self, n: int) -> IntMatrix:
        """Matrix of the differential from degree n-1 into degree n."""
        return self.diffs[n]

    def block_position(self, n: int, label):
        i = self.blocks[n].index(label)
        return self.offsets[n][i], self.block_ranks[n][i]

    def cohomology(self, n: int) -> GroupInvariants:
        if not 0 <= n <= self.n_max - 1:
            raise ValueError(
                f"cohomology in degree {n} needs the complex built to degree {n + 1}"
            )
        return cohomology_at(self.diffs[n], self.diffs[n + 1], self.ring)


def build_complex(s: InverseSystem, n_max: int, strict: bool = False) -> RoosComplex:
    """Assemble differentials block-by-block over the tuple enumeration."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    rep = validate_system(s)
    if not rep.ok:
        raise InvalidSystemError(rep.violations)
    q = s.index
    blocks = [chains(q, n, strict=strict) for n in range(n_max + 1)]
    block_ranks = [[s.rank(t[0]) for t in blocks[n]] for n in range(n_max + 1)]
    offsets = []
    totals = []
    for n in range(n_max + 1):
        offs = {}
        acc = 0
        for t, r in zip(blocks[n], block_ranks[n]):
            offs[t] = acc
            acc += r
        offsets.append(offs)
        totals.append(acc)
    diffs = [IntMatrix.zeros(totals[0], 0)]
    for n in range(1, n_max + 1):
        rows = [[0] * totals[n - 1] for _ in range(totals[n])]
        for t, r0 in zip(blocks[n], block_ranks[n]):
            row_off = offsets[n][t]
            if r0 == 0:
                continue
            # Face 0 applies the bond from t1 down to t0.
            f0 = face(t, 0)
            col_off = offsets[n - 1][f0]
            b = s.bond(t[0], t[1])
            for i in range(r0):
                target = rows[row_off + i]
                brow = b.rows[i]
                for j, x in enumerate(brow):
                    if x:
                        target[col_off + j] += x
            # Faces 1..n keep the leading entry; alternating identity blocks.
            sign = 1
            for k in range(1, n + 1):
                sign = -sign
                fk = face(t, k)
                col_off = offsets[n - 1][fk]
                for i in range(r0):
                    rows[row_off + i][col_off + i] += sign
        diffs.append(IntMatrix(rows, totals[n - 1]))
    return RoosComplex(s.ring, blocks, block_ranks, diffs, strict=strict, system=s)


def derived_limit(s: InverseSystem, n: int, strict: bool = False) -> GroupInvariants:
    """lim^n of the system: degree-n cohomology of the complex built to n+1."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    return build_complex(s, n + 1, strict=strict).cohomology(n)


def limit_direct(s: InverseSystem) -> GroupInvariants:
    """The inverse limit as the kernel of the equalizer-style difference map.

    Rows are indexed by related pairs lam <= mu (one block of rank(lam)
    each), columns by the product of all objects; the row block is
    bond(lam, mu) at mu's columns minus the identity at lam's columns.
    """
    q = s.index
    col_off = {}
    acc = 0
    for e in q.elements:
        col_off[e] = acc
        acc += s.rank(e)
    pairs = q.related_pairs(include_diagonal=False)
    total_rows = sum(s.rank(lam) for lam, _ in pairs)
    rows = [[0] * acc for _ in range(total_rows)]
    r = 0
    for lam, mu in pairs:
        b = s.bond(lam, mu)
        for i in range(s.rank(lam)):
            target = rows[r + i]
            for j, x in enumerate(b.rows[i]):
                if x:
                    target[col_off[mu] + j] += x
            target[col_off[lam] + i] -= 1
        r += s.rank(lam)
    m = IntMatrix(rows, acc)
    return cohomology_at(IntMatrix.zeros(acc, 0), m, s.ring)


class Cochain:
    """A degree-n element of a built complex, stored as one flat vector."""

    __slots__ = ("complex", "degree", "vector")

    def __init__(self, complex: RoosComplex, degree: int, vector):
        if not 0 <= degree <= complex.n_max:
            raise ValueError(f"degree {degree} outside built range 0..{complex.n_max}")
        vector = tuple(complex.ring.reduce(int(x)) for x in vector)
        if len(vector) != complex.dimension(degree):
            raise ValueError(
                f"vector length {len(vector)} != degree-{degree} dimension "
                f"{complex.dimension(degree)}"
            )
        object.__setattr__(self, "complex", complex)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "vector", vector)

    def __setattr__(self, *_):
        raise AttributeError("Cochain is immutable")

    @classmethod
    def zero(cls, cx: RoosComplex, degree: int) -> "Cochain":
        return cls(cx, degree, [0] * cx.dimension(degree))

    @classmethod
    def from_values(cls, cx: RoosComplex, degree: int, values: dict) -> "Cochain":
        vec = [0] * cx.dimension(degree)
        for label, block in values.items():
            off, r = cx.block_position(degree, label)
            block = list(block)
            if len(block) != r:
                raise ValueError(f"block at {label!r} has length {len(block)}, rank is {r}")
            vec[off : off + r] = block
        return cls(cx, degree, vec)

    def value(self, label) -> tuple:
        off, r = self.complex.block_position(self.degree, label)
        return self.vector[off : off + r]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Cochain)
            and self.degree == other.degree
            and self.complex is other.complex
            and self.vector == other.vector
        )

    def __add__(self, other: "Cochain") -> "Cochain":
        self._match(other)
        return Cochain(
            self.complex, self.degree, [a + b for a, b in zip(self.vector, other.vector)]
        )

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._match(other)
        return Cochain(
            self.complex, self.degree, [a - b for a, b in zip(self.vector, other.vector)]
        )

    def scale(self, c: int) -> "Cochain":
        return Cochain(self.complex, self.degree, [c * a for a in self.vector])

    def _match(self, other: "Cochain") -> None:
        if self.complex is not other.complex or self.degree != other.degree:
            raise ValueError("cochains live in different complexes or degrees")

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.vector)


def delta(u: Cochain) -> Cochain:
    """Apply the coboundary; needs the complex built one degree further."""
    cx = u.complex
    if u.degree + 1 > cx.n_max:
        raise ValueError("complex not built deep enough to apply the coboundary")
    return Cochain(cx, u.degree + 1, cx.differential(u.degree + 1).matvec(u.vector))


def contract(u: Cochain, f) -> Cochain:
    """Evaluate u on tuples extended by a dominating index element f.

    The result v has degree one less, with v at h equal to u at (h, f).
    Satisfies delta(contract(u, f)) = contract(delta(u), f) - sign * u with
    sign = (-1) ** (u.degree + 1), which is the identity the induction on
    trivializations runs on (tested entrywise, not assumed).
    """
    cx = u.complex
    if cx.system is None:
        raise ValueError("contraction needs a complex built from a system")
    if cx.strict:
        raise ValueError("contraction needs the degenerate-tuple complex")
    if u.degree < 1:
        raise ValueError("contraction lowers degree; need degree >= 1")
    index = cx.system.index
    for e in index.elements:
        if not index.leq(e, f):
            raise IndexNotDominatingError(f"index element {e!r} is not below {f!r}")
    vec = []
    for t in cx.blocks[u.degree - 1]:
        vec.extend(u.value(t + (f,)))
    return Cochain(cx, u.degree - 1, vec)
