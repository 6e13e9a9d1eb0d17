"""Exact integer linear algebra over Z and Z/m.

Everything downstream (cochain complexes, derived limits, long exact
sequences) reduces to three primitives implemented here:

* ``smith_normal_form`` computes ``d = u * m * v`` with unimodular ``u``, ``v``
  and the full divisor chain on the diagonal, tracking all four transforms.
  The pivot rule is deterministic: smallest nonzero absolute value, ties
  broken by lowest row index, then lowest column index. This makes every
  decomposition reproducible across platforms.
* ``cohomology_at`` presents the subquotient ker(d_out)/im(d_in) of a free
  module as canonical invariants (free rank plus a divisor chain). The Z/m
  case is handled by lifting to Z and adjoining ``m * identity`` relations.
* ``solve`` finds the canonical solution of ``m x = b`` (free coordinates set
  to zero after SNF back-substitution), or reports that none exists.

Matrices are dense, immutable, and carry plain Python integers; at desk scale
exactness matters and machine precision does not.
"""

from __future__ import annotations

from dataclasses import dataclass


class ShapeMismatchError(ValueError):
    """Raised when matrix dimensions do not line up for an operation."""


class CompositionNotZeroError(ValueError):
    """Raised when a would-be complex has d_out * d_in != 0 over the ring."""


@dataclass(frozen=True)
class Ring:
    """Base ring for coefficients: Z (modulus 0) or Z/m with m >= 2."""

    modulus: int = 0

    def __post_init__(self) -> None:
        if self.modulus < 0 or self.modulus == 1:
            raise ValueError(f"modulus must be 0 (for Z) or >= 2, got {self.modulus}")

    @classmethod
    def integers(cls) -> "Ring":
        return cls(0)

    @classmethod
    def modular(cls, m: int) -> "Ring":
        if m < 2:
            raise ValueError(f"modular ring needs m >= 2, got {m}")
        return cls(m)

    @classmethod
    def parse(cls, text: str) -> "Ring":
        text = text.strip()
        if text == "Z":
            return cls.integers()
        if text.startswith("Z/"):
            try:
                m = int(text[2:])
            except ValueError:
                raise ValueError(f"cannot parse ring {text!r}") from None
            return cls.modular(m)
        raise ValueError(f"cannot parse ring {text!r}; expected 'Z' or 'Z/m'")

    def render(self) -> str:
        return "Z" if self.modulus == 0 else f"Z/{self.modulus}"

    @property
    def is_integers(self) -> bool:
        return self.modulus == 0

    def reduce(self, x: int) -> int:
        return x if self.modulus == 0 else x % self.modulus

    def is_zero_matrix(self, m: "IntMatrix") -> bool:
        if self.modulus == 0:
            return all(x == 0 for row in m.rows for x in row)
        k = self.modulus
        return all(x % k == 0 for row in m.rows for x in row)

    def matrices_equal(self, a: "IntMatrix", b: "IntMatrix") -> bool:
        if a.nrows != b.nrows or a.ncols != b.ncols:
            return False
        if self.modulus == 0:
            return a.rows == b.rows
        k = self.modulus
        return all(
            (x - y) % k == 0 for ra, rb in zip(a.rows, b.rows) for x, y in zip(ra, rb)
        )


class IntMatrix:
    """Immutable dense integer matrix with explicit shape (0-sized sides allowed)."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows, ncols: int | None = None):
        frozen = tuple(tuple(int(x) for x in row) for row in rows)
        if frozen:
            width = len(frozen[0])
            if any(len(r) != width for r in frozen):
                raise ShapeMismatchError("ragged rows in matrix literal")
            if ncols is not None and ncols != width:
                raise ShapeMismatchError(f"declared ncols={ncols} but rows have {width}")
        else:
            if ncols is None:
                ncols = 0
            width = ncols
        object.__setattr__(self, "rows", frozen)
        object.__setattr__(self, "nrows", len(frozen))
        object.__setattr__(self, "ncols", width)

    def __setattr__(self, *_):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def column(cls, entries) -> "IntMatrix":
        return cls([[int(x)] for x in entries], 1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.ncols, self.rows))

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.rows]!r}, ncols={self.ncols})"

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.rows for x in row)

    def entry(self, i: int, j: int) -> int:
        return self.rows[i][j]

    def mutable_rows(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def add(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ShapeMismatchError(f"add {self.shape} vs {other.shape}")
        return IntMatrix(
            [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)],
            self.ncols,
        )

    def sub(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ShapeMismatchError(f"sub {self.shape} vs {other.shape}")
        return IntMatrix(
            [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)],
            self.ncols,
        )

    def neg(self) -> "IntMatrix":
        return IntMatrix([[-x for x in row] for row in self.rows], self.ncols)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix([[c * x for x in row] for row in self.rows], self.ncols)

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        """Matrix product, with both factors' zeros skipped.

        The right factor's rows are scanned into (column, value) pairs once
        up front, so the inner loops touch only nonzero entries — the
        differentials this multiplies are overwhelmingly sparse.
        """
        if self.ncols != other.nrows:
            raise ShapeMismatchError(f"mul {self.shape} by {other.shape}")
        ocols = other.ncols
        sparse = [[(j, b) for j, b in enumerate(row) if b] for row in other.rows]
        out = [[0] * ocols for _ in range(self.nrows)]
        for i, arow in enumerate(self.rows):
            target = out[i]
            for k, a in enumerate(arow):
                if a:
                    if a == 1:
                        for j, b in sparse[k]:
                            target[j] += b
                    elif a == -1:
                        for j, b in sparse[k]:
                            target[j] -= b
                    else:
                        for j, b in sparse[k]:
                            target[j] += a * b
        return IntMatrix(out, ocols)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return self.mul(other)

    def matvec(self, v) -> list[int]:
        v = list(v)
        if len(v) != self.ncols:
            raise ShapeMismatchError(f"matvec {self.shape} by vector of {len(v)}")
        out = []
        for row in self.rows:
            acc = 0
            for a, x in zip(row, v):
                if a and x:
                    acc += a * x
            out.append(acc)
        return out

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            self.nrows,
        )

    def rows_at(self, idx) -> "IntMatrix":
        return IntMatrix([self.rows[i] for i in idx], self.ncols)

    def cols_at(self, idx) -> "IntMatrix":
        idx = list(idx)
        return IntMatrix([[row[j] for j in idx] for row in self.rows], len(idx))

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.nrows != other.nrows:
            raise ShapeMismatchError(f"hstack {self.shape} with {other.shape}")
        return IntMatrix(
            [list(ra) + list(rb) for ra, rb in zip(self.rows, other.rows)],
            self.ncols + other.ncols,
        )

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.ncols:
            raise ShapeMismatchError(f"vstack {self.shape} with {other.shape}")
        return IntMatrix(list(self.rows) + list(other.rows), self.ncols)

    def reduced(self, ring: Ring) -> "IntMatrix":
        if ring.is_integers:
            return self
        k = ring.modulus
        return IntMatrix([[x % k for x in row] for row in self.rows], self.ncols)


@dataclass(frozen=True)
class GroupInvariants:
    """A finitely generated abelian group in canonical form.

    ``free_rank`` copies of Z plus cyclic factors Z/d_1 + ... + Z/d_k with
    d_1 | d_2 | ... and every d_i >= 2.
    """

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise ValueError("free rank cannot be negative")
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"torsion divisor {d} < 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise ValueError(f"torsion chain {self.torsion} violates divisibility")

    @classmethod
    def trivial(cls) -> "GroupInvariants":
        return cls(0, ())

    @classmethod
    def free(cls, rank: int) -> "GroupInvariants":
        return cls(rank, ())

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion


@dataclass(frozen=True)
class SmithDecomposition:
    """Result of ``smith_normal_form``: d = u * m * v.

    ``u``/``v`` are unimodular; ``u_inv``/``v_inv`` their inverses, tracked
    during the reduction rather than recomputed. Transform fields are None
    exactly when the caller opted out of them.
    """

    d: IntMatrix
    u: IntMatrix | None
    v: IntMatrix | None
    u_inv: IntMatrix | None
    v_inv: IntMatrix | None

    @property
    def diagonal(self) -> list[int]:
        n = min(self.d.nrows, self.d.ncols)
        return [self.d.rows[i][i] for i in range(n)]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)

    @property
    def invariant_factors(self) -> list[int]:
        return [x for x in self.diagonal if x != 0]


def _find_pivot(a, t, nrows, ncols):
    """Smallest |entry| in a[t:, t:], ties to lowest row then column.

    A row-major scan that stops at the first +-1 is equivalent to the full
    scan under this rule, since no smaller value exists and any later +-1 has
    a higher row, or the same row and a higher column.
    """
    best = None
    best_pos = None
    for i in range(t, nrows):
        row = a[i]
        for j in range(t, ncols):
            v = row[j]
            if v:
                av = -v if v < 0 else v
                if av == 1:
                    return (i, j)
                if best is None or av < best:
                    best = av
                    best_pos = (i, j)
    return best_pos


def smith_normal_form(
    m: IntMatrix,
    *,
    want_u: bool = True,
    want_v: bool = True,
    want_u_inv: bool = True,
    want_v_inv: bool = True,
) -> SmithDecomposition:
    """Smith normal form over Z with deterministic pivoting.

    Returns ``d`` diagonal with nonnegative entries satisfying
    d_1 | d_2 | ... , and transforms with ``d = u * m * v``. Row operations on
    ``m`` are mirrored on ``u`` (and inverted on ``u_inv``); column operations
    on ``v`` / ``v_inv``. Heavy callers disable the transforms they do not
    need: the kernel-side only requires ``v`` and ``v_inv``.
    """
    nrows, ncols = m.nrows, m.ncols
    a = m.mutable_rows()
    u = [[1 if i == j else 0 for j in range(nrows)] for i in range(nrows)] if want_u else None
    uinv = [[1 if i == j else 0 for j in range(nrows)] for i in range(nrows)] if want_u_inv else None
    v = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)] if want_v else None
    vinv = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)] if want_v_inv else None

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        if u is not None:
            u[i], u[k] = u[k], u[i]
        if uinv is not None:
            for r in uinv:
                r[i], r[k] = r[k], r[i]

    def row_sub(i, k, q, start):
        # row_i -= q * row_k
        ai, ak = a[i], a[k]
        for j in range(start, ncols):
            x = ak[j]
            if x:
                ai[j] -= q * x
        if u is not None:
            ui, uk = u[i], u[k]
            for j in range(nrows):
                x = uk[j]
                if x:
                    ui[j] -= q * x
        if uinv is not None:
            for r in uinv:
                x = r[i]
                if x:
                    r[k] += q * x

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        if u is not None:
            u[i] = [-x for x in u[i]]
        if uinv is not None:
            for r in uinv:
                r[i] = -r[i]

    def swap_cols(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        if v is not None:
            for r in v:
                r[j], r[k] = r[k], r[j]
        if vinv is not None:
            vinv[j], vinv[k] = vinv[k], vinv[j]

    def col_sub(j, k, q):
        # col_j -= q * col_k
        for r in a:
            x = r[k]
            if x:
                r[j] -= q * x
        if v is not None:
            for r in v:
                x = r[k]
                if x:
                    r[j] -= q * x
        if vinv is not None:
            rj, rk = vinv[j], vinv[k]
            for idx in range(ncols):
                x = rj[idx]
                if x:
                    rk[idx] += q * x

    t = 0
    limit = min(nrows, ncols)
    while t < limit:
        piv = _find_pivot(a, t, nrows, ncols)
        if piv is None:
            break
        pi, pj = piv
        if pi != t:
            swap_rows(pi, t)
        if pj != t:
            swap_cols(pj, t)
        while True:
            # Clear column t. A nonzero remainder is strictly smaller than the
            # pivot; swapping it in and repeating is Euclid's algorithm.
            cleared = False
            while not cleared:
                if a[t][t] < 0:
                    negate_row(t)
                p = a[t][t]
                cleared = True
                for i in range(nrows):
                    if i == t:
                        continue
                    x = a[i][t]
                    if x:
                        q = x // p
                        if q:
                            row_sub(i, t, q, t)
                        if a[i][t]:
                            swap_rows(i, t)
                            cleared = False
                            break
            # Clear row t. A remainder swap here exchanges column j with
            # column t and can dirty column t again, hence the outer loop.
            cleared = False
            while not cleared:
                p = a[t][t]
                cleared = True
                for j in range(ncols):
                    if j == t:
                        continue
                    x = a[t][j]
                    if x:
                        q = x // p
                        if q:
                            col_sub(j, t, q)
                        if a[t][j]:
                            swap_cols(j, t)
                            cleared = False
                            break
            if any(a[i][t] for i in range(nrows) if i != t):
                continue
            # Divisibility sweep: the pivot must divide the whole tail block.
            p = a[t][t]
            if p != 1 and p != 0:
                viol = None
                for i in range(t + 1, nrows):
                    row = a[i]
                    for j in range(t + 1, ncols):
                        if row[j] % p:
                            viol = i
                            break
                    if viol is not None:
                        break
                if viol is not None:
                    row_sub(t, viol, -1, t)
                    continue
            break
        t += 1

    wrap = lambda rows, width: IntMatrix(rows, width)
    return SmithDecomposition(
        d=wrap(a, ncols),
        u=wrap(u, nrows) if u is not None else None,
        v=wrap(v, ncols) if v is not None else None,
        u_inv=wrap(uinv, nrows) if uinv is not None else None,
        v_inv=wrap(vinv, ncols) if vinv is not None else None,
    )


def _kernel_column_indices(snf: SmithDecomposition) -> list[int]:
    diag = snf.diagonal
    ncols = snf.d.ncols
    return [j for j in range(ncols) if j >= len(diag) or diag[j] == 0]


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Columns form a basis of the integer kernel lattice {x : m x = 0}."""
    snf = smith_normal_form(m, want_u=False, want_u_inv=False, want_v_inv=False)
    return snf.v.cols_at(_kernel_column_indices(snf))


def _lifted_pair(d_in: IntMatrix, d_out: IntMatrix, ring: Ring):
    """Over Z/m, replace d_out by [d_out | m I] and d_in by [d_in | m I].

    The projection of ker[d_out | m I] onto the first block of coordinates is
    a bijection onto the lattice {x : d_out x = 0 mod m} (the discarded block
    is determined by x), and carries a basis to a basis. Relation columns of
    [d_in | m I] lift uniquely into that kernel as well.
    """
    k = ring.modulus
    r_out = d_out.nrows
    c = d_out.ncols
    a = d_out.hstack(IntMatrix.identity(r_out).scale(k))
    b = d_in.hstack(IntMatrix.identity(c).scale(k))
    return a, b


def cohomology_at(d_in: IntMatrix, d_out: IntMatrix, ring: Ring) -> GroupInvariants:
    """Invariants of ker(d_out)/im(d_in) at a single cochain position.

    ``d_in`` maps into the ambient free module (ambient-rank rows), ``d_out``
    maps out of it (ambient-rank columns); d_out * d_in must vanish over the
    ring. The kernel is read off the column transform of one Smith
    decomposition; relation columns are expressed in kernel coordinates via
    ``v_inv`` (no second linear solve needed), and their Smith diagonal gives
    the divisor chain.
    """
    if d_out.ncols != d_in.nrows:
        raise ShapeMismatchError(
            f"ambient rank mismatch: d_out has {d_out.ncols} columns, "
            f"d_in has {d_in.nrows} rows"
        )
    if not ring.is_zero_matrix(d_out @ d_in):
        raise CompositionNotZeroError("d_out * d_in is nonzero over " + ring.render())

    if ring.is_integers:
        a, b_full = d_out, d_in
    else:
        a, b_full = _lifted_pair(d_in, d_out, ring)
        # Lift each relation column into the kernel lattice of [d_out | m I]:
        # the second block is -(d_out * column) / m, integral by the
        # composition check above.
        k = ring.modulus
        tail = d_out @ d_in  # (r_out x s); entries divisible by k
        lift_in = IntMatrix(
            [[-x // k for x in row] for row in tail.rows], tail.ncols
        )
        # m I block of b_full lifts with second block -d_out (since
        # d_out * (m e_j) / m = d_out e_j).
        lift_mod = d_out.neg()
        b_full = b_full.vstack(lift_in.hstack(lift_mod))

    snf = smith_normal_form(a, want_u=False, want_u_inv=False)
    kernel_idx = _kernel_column_indices(snf)
    kernel_set = set(kernel_idx)
    coords = snf.v_inv @ b_full
    for i in range(coords.nrows):
        if i not in kernel_set and any(coords.rows[i]):
            raise CompositionNotZeroError(
                "relations do not land in the kernel (inconsistent complex)"
            )
    y = coords.rows_at(kernel_idx)
    snf_y = smith_normal_form(y, want_u=False, want_v=False, want_u_inv=False, want_v_inv=False)
    factors = snf_y.invariant_factors
    free_rank = len(kernel_idx) - len(factors)
    torsion = tuple(d for d in factors if d >= 2)
    if not ring.is_integers and free_rank != 0:
        raise AssertionError("modular subquotient came out infinite")
    return GroupInvariants(free_rank, torsion)


def solve(m: IntMatrix, b, ring: Ring) -> list[int] | None:
    """Canonical solution of m x = b over the ring, or None.

    Diagonalize, back-substitute c = u b through the divisor chain, set free
    coordinates to zero, map back through v. Over Z/m the system is augmented
    with the modulus columns first and answers are reduced to [0, m).
    """
    b = [int(x) for x in b]
    if len(b) != m.nrows:
        raise ShapeMismatchError(f"solve: matrix {m.shape} vs rhs of length {len(b)}")
    if ring.is_integers:
        a = m
    else:
        a = m.hstack(IntMatrix.identity(m.nrows).scale(ring.modulus))
    snf = smith_normal_form(a, want_u_inv=False, want_v_inv=False)
    c = snf.u.matvec(b)
    diag = snf.diagonal
    y = [0] * a.ncols
    for i, ci in enumerate(c):
        d = diag[i] if i < len(diag) else 0
        if d:
            if ci % d:
                return None
            y[i] = ci // d
        elif ci:
            return None
    x_full = snf.v.matvec(y)
    x = x_full[: m.ncols]
    if not ring.is_integers:
        x = [v % ring.modulus for v in x]
    return x
