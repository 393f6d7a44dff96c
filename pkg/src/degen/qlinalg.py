"""Exact linear algebra over Q and Z.

Rational matrices are immutable ``Mat`` values with Fraction entries.
Rank uses fraction-free (Bareiss) elimination on an integer-scaled copy;
kernels, solving and quotient projections use reduced row echelon form so
that every basis and every coordinate system is canonical: the same input
always yields the identical output object.

Integer matrices (plain nested lists/tuples of int) get a Smith normal
form with unimodular transforms, and on top of that finitely presented
abelian groups with exact kernel and cokernel orders for maps between
them.  Orders are returned as ``int`` when finite and ``None`` when the
group has positive rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

__all__ = [
    "Mat",
    "rank",
    "rref",
    "kernel_basis",
    "solve",
    "quotient_projection",
    "quotient_dim",
    "SmithForm",
    "smith_normal_form",
    "FPAbelianGroup",
    "AbGroupMap",
    "kernel_order",
    "cokernel_order",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not an exact scalar: {x!r}")


@dataclass(frozen=True)
class Mat:
    """Immutable rational matrix; ``entries`` is a tuple of row tuples."""

    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimension")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(
                f"entry grid does not match declared shape {self.rows}x{self.cols}"
            )

    @staticmethod
    def from_rows(rows: Sequence[Sequence], cols: int | None = None) -> "Mat":
        """Build from an iterable of rows; ``cols`` disambiguates 0-row shapes."""
        ent = tuple(tuple(_frac(x) for x in row) for row in rows)
        if ent:
            width = len(ent[0])
        else:
            width = 0 if cols is None else cols
        return Mat(len(ent), width, ent)

    @staticmethod
    def zero(rows: int, cols: int) -> "Mat":
        return Mat(rows, cols, tuple((Fraction(0),) * cols for _ in range(rows)))

    @staticmethod
    def identity(n: int) -> "Mat":
        return Mat(
            n,
            n,
            tuple(
                tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
            ),
        )

    @staticmethod
    def column(values: Sequence) -> "Mat":
        return Mat.from_rows([[v] for v in values], cols=1)

    @staticmethod
    def hstack(blocks: Sequence["Mat"]) -> "Mat":
        blocks = list(blocks)
        if not blocks:
            raise ValueError("hstack of nothing")
        r = blocks[0].rows
        if any(b.rows != r for b in blocks):
            raise ValueError("hstack: row counts differ")
        ent = tuple(
            tuple(x for b in blocks for x in b.entries[i]) for i in range(r)
        )
        return Mat(r, sum(b.cols for b in blocks), ent)

    @staticmethod
    def vstack(blocks: Sequence["Mat"]) -> "Mat":
        blocks = list(blocks)
        if not blocks:
            raise ValueError("vstack of nothing")
        c = blocks[0].cols
        if any(b.cols != c for b in blocks):
            raise ValueError("vstack: column counts differ")
        return Mat(sum(b.rows for b in blocks), c, tuple(r for b in blocks for r in b.entries))

    @staticmethod
    def block(grid: Sequence[Sequence["Mat | None"]], row_dims: Sequence[int], col_dims: Sequence[int]) -> "Mat":
        """Assemble from a grid of optional blocks; ``None`` means a zero block."""
        rows = []
        for bi, rdim in enumerate(row_dims):
            row_blocks = []
            for bj, cdim in enumerate(col_dims):
                blk = grid[bi][bj]
                if blk is None:
                    blk = Mat.zero(rdim, cdim)
                elif blk.rows != rdim or blk.cols != cdim:
                    raise ValueError(
                        f"block ({bi},{bj}) has shape {blk.rows}x{blk.cols}, "
                        f"expected {rdim}x{cdim}"
                    )
                row_blocks.append(blk)
            if row_blocks:
                rows.append(Mat.hstack(row_blocks) if len(row_blocks) > 1 else row_blocks[0])
            else:
                rows.append(Mat.zero(rdim, 0))
        if not rows:
            return Mat.zero(0, sum(col_dims))
        return Mat.vstack(rows) if len(rows) > 1 else rows[0]

    def __add__(self, other: "Mat") -> "Mat":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in addition")
        return Mat(
            self.rows,
            self.cols,
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            ),
        )

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def __neg__(self) -> "Mat":
        return self.scale(-1)

    def scale(self, c) -> "Mat":
        c = _frac(c)
        return Mat(
            self.rows,
            self.cols,
            tuple(tuple(c * x for x in row) for row in self.entries),
        )

    def __mul__(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise ValueError(
                f"shape mismatch in product: {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        ot = other.transpose().entries
        return Mat(
            self.rows,
            other.cols,
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in ot)
                for row in self.entries
            ),
        )

    def transpose(self) -> "Mat":
        return Mat(
            self.cols,
            self.rows,
            tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)),
        )

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list["Mat"]:
        return [Mat.column(self.col(j)) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def apply(self, vec: Sequence) -> tuple[Fraction, ...]:
        """Multiply onto a plain vector, returning a plain tuple."""
        v = [_frac(x) for x in vec]
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def __repr__(self) -> str:  # compact, for test failure messages
        if self.rows == 0 or self.cols == 0:
            return f"Mat({self.rows}x{self.cols})"
        body = "; ".join(" ".join(str(x) for x in row) for row in self.entries)
        return f"Mat[{body}]"


def _int_rows(m: Mat) -> list[list[int]]:
    # Clear denominators row by row; rank is unchanged.
    out = []
    for row in m.entries:
        mult = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * mult) for x in row])
    return out


def rank(m: Mat) -> int:
    """Rank over Q by fraction-free Bareiss elimination."""
    a = _int_rows(m)
    nr, nc = m.rows, m.cols
    r = 0
    prev = 1
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, nr):
            for j in range(c + 1, nc):
                a[i][j] = (a[i][j] * a[r][c] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        r += 1
        if r == nr:
            break
    return r


def rref(m: Mat) -> tuple[Mat, tuple[int, ...]]:
    """Reduced row echelon form and its pivot columns."""
    a = [list(row) for row in m.entries]
    nr, nc = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c]
        a[r] = [x / inv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return Mat(nr, nc, tuple(tuple(row) for row in a)), tuple(pivots)


def kernel_basis(m: Mat) -> Mat:
    """Canonical basis of the right kernel, one column per free variable.

    The basis vector for free column f has entry 1 at f and the negated
    reduced column above the pivots, the standard echelon-form kernel.
    """
    r, pivots = rref(m)
    pivset = set(pivots)
    free = [j for j in range(m.cols) if j not in pivset]
    cols = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r.entries[i][f]
        cols.append(v)
    if not cols:
        return Mat.zero(m.cols, 0)
    return Mat(m.cols, len(cols), tuple(zip(*cols)))


def solve(a: Mat, b: Mat) -> Mat | None:
    """One rational solution of a X = b (columnwise), or None if inconsistent."""
    if a.rows != b.rows:
        raise ValueError("shape mismatch in solve")
    aug = Mat.hstack([a, b])
    r, pivots = rref(aug)
    if any(p >= a.cols for p in pivots):
        return None
    sol_rows = [[Fraction(0)] * b.cols for _ in range(a.cols)]
    for i, p in enumerate(pivots):
        sol_rows[p] = list(r.entries[i][a.cols:])
    return Mat.from_rows(sol_rows, cols=b.cols)


def quotient_projection(modulo: Mat) -> Mat:
    """Canonical projection of the ambient space onto coordinates for
    ``Q^n / span(columns of modulo)``.

    Returns a (n - rank) x n matrix whose kernel is exactly the span.
    Coordinates are the non-pivot positions after reducing against the
    echelon rows of the subspace, so the projection is canonical.
    """
    n = modulo.rows
    r, pivots = rref(modulo.transpose())
    pivset = set(pivots)
    free = [j for j in range(n) if j not in pivset]
    # v maps to its residue after killing pivot coordinates, read off at free ones:
    # residue_f = v_f - sum_i r[i][f] * v_{pivot_i}
    rows = []
    for f in free:
        row = [Fraction(0)] * n
        row[f] = Fraction(1)
        for i, p in enumerate(pivots):
            row[p] = -r.entries[i][f]
        rows.append(row)
    return Mat.from_rows(rows, cols=n)


def quotient_dim(vectors: Mat, modulo: Mat | None = None) -> int:
    """Dimension of the image of span(vectors) in the quotient by span(modulo)."""
    if modulo is None:
        return rank(vectors)
    if vectors.rows != modulo.rows:
        raise ValueError("ambient dimensions differ")
    return rank(Mat.hstack([modulo, vectors])) - rank(modulo)


# ---------------------------------------------------------------------------
# Integer matrices and finitely presented abelian groups.

IntMatrix = list[list[int]]


def _as_int_matrix(m, rows: int | None = None, cols: int | None = None) -> list[list[int]]:
    out = [list(map(int, row)) for row in m]
    if rows is not None and len(out) != rows:
        raise ValueError("integer matrix has wrong number of rows")
    if out and cols is not None and any(len(r) != cols for r in out):
        raise ValueError("integer matrix has ragged or wrong-width rows")
    return out


@dataclass(frozen=True)
class SmithForm:
    """d = u @ a @ v with u, v unimodular and d diagonal, d_1 | d_2 | ..."""

    u: tuple[tuple[int, ...], ...]
    d: tuple[tuple[int, ...], ...]
    v: tuple[tuple[int, ...], ...]

    @property
    def diag(self) -> tuple[int, ...]:
        n = min(len(self.d), len(self.d[0]) if self.d else 0)
        return tuple(self.d[i][i] for i in range(n))

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diag if x != 0)


def _imat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    if not a or not b:
        return [[0] * (len(b[0]) if b else 0) for _ in a]
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def smith_normal_form(a) -> SmithForm:
    """Smith normal form by elementary row/column operations.

    Deterministic: the pivot is the smallest-magnitude nonzero entry of
    the remaining block, earliest position on ties.  The divisibility
    chain is enforced inside the main loop: a pivot is only accepted once
    it divides every entry of the remaining block.
    """
    m = _as_int_matrix(a)
    nr = len(m)
    nc = len(m[0]) if m else 0
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def row_op(i, j, f):  # row i -= f * row j
        m[i] = [x - f * y for x, y in zip(m[i], m[j])]
        u[i] = [x - f * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, f):  # col i -= f * col j
        for row in m:
            row[i] -= f * row[j]
        for row in v:
            row[i] -= f * row[j]

    def swap_rows(i, j):
        if i != j:
            m[i], m[j] = m[j], m[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        if i != j:
            for row in m:
                row[i], row[j] = row[j], row[i]
            for row in v:
                row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = abs(m[i][j])
                if x and (best is None or x < best[0]):
                    best = (x, i, j)
        if best is None:
            break
        _, bi, bj = best
        swap_rows(t, bi)
        swap_cols(t, bj)
        dirty = False
        for i in range(t + 1, nr):
            if m[i][t]:
                row_op(i, t, m[i][t] // m[t][t])
                if m[i][t]:
                    dirty = True
        for j in range(t + 1, nc):
            if m[t][j]:
                col_op(j, t, m[t][j] // m[t][t])
                if m[t][j]:
                    dirty = True
        if dirty:
            continue  # nonzero remainders are smaller than the pivot; re-pick
        # pivot must divide the rest of the block for the divisor chain
        offender = None
        for i in range(t + 1, nr):
            for j in range(t + 1, nc):
                if m[i][j] % m[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_op(t, offender, -1)  # fold the offending row in and redo
            continue
        t += 1

    for i in range(min(nr, nc)):
        if m[i][i] < 0:
            for row in m:
                row[i] = -row[i]
            for row in v:
                row[i] = -row[i]

    return SmithForm(
        tuple(tuple(r) for r in u),
        tuple(tuple(r) for r in m),
        tuple(tuple(r) for r in v),
    )


@dataclass(frozen=True)
class FPAbelianGroup:
    """Z^generators modulo the column span of ``relations``."""

    generators: int
    relations: tuple[tuple[int, ...], ...]  # generators x num_relations

    @staticmethod
    def make(generators: int, relations) -> "FPAbelianGroup":
        rel = _as_int_matrix(relations, rows=generators)
        width = len(rel[0]) if rel else 0
        for r in rel:
            if len(r) != width:
                raise ValueError("ragged relations matrix")
        return FPAbelianGroup(generators, tuple(tuple(r) for r in rel))

    @property
    def relation_count(self) -> int:
        return len(self.relations[0]) if self.relations else 0

    def order(self) -> int | None:
        """Group order, or None when the rank is positive."""
        if self.generators == 0:
            return 1
        sf = smith_normal_form(self.relations)
        if sf.rank < self.generators:
            return None
        out = 1
        for x in sf.diag[: self.generators]:
            out *= x
        return out


def _lattice_basis(gens: list[list[int]]) -> list[list[int]]:
    """Columns forming a Z-basis of the column lattice of ``gens``."""
    if not gens:
        return []
    sf = smith_normal_form(gens)
    # gens @ v has columns u_inv @ d; nonzero ones are independent
    gv = _imat_mul(gens, [list(r) for r in sf.v])
    cols = []
    for j in range(len(gv[0]) if gv else 0):
        col = [gv[i][j] for i in range(len(gv))]
        if any(col):
            cols.append(col)
    return [list(r) for r in zip(*cols)] if cols else [[] for _ in gens]


def _quotient_order_of_lattices(big: list[list[int]], small: list[list[int]]) -> int | None:
    """Order of (lattice spanned by big) / (lattice spanned by small).

    Assumes the small lattice is contained in the big one.
    """
    basis = _lattice_basis(big)
    nb = len(basis[0]) if basis and basis[0] else 0
    if nb == 0:
        return 1
    bmat = Mat.from_rows(basis, cols=nb)
    smat = Mat.from_rows(small, cols=len(small[0]) if small else 0)
    coeff = solve(bmat, smat)
    if coeff is None:
        raise ValueError("small lattice not contained in big lattice")
    coeff_int = [[int(x) if x.denominator == 1 else None for x in row] for row in coeff.entries]
    if any(x is None for row in coeff_int for x in row):
        raise ValueError("small lattice not contained in big lattice")
    sf = smith_normal_form(coeff_int)
    if sf.rank < nb:
        return None
    out = 1
    for x in sf.diag[:nb]:
        out *= x
    return out


@dataclass(frozen=True)
class AbGroupMap:
    """Map between finitely presented abelian groups, given on generators."""

    source: FPAbelianGroup
    target: FPAbelianGroup
    matrix: tuple[tuple[int, ...], ...]  # target.generators x source.generators

    @staticmethod
    def make(source: FPAbelianGroup, target: FPAbelianGroup, matrix) -> "AbGroupMap":
        m = _as_int_matrix(matrix, rows=target.generators, cols=source.generators)
        f = AbGroupMap(source, target, tuple(tuple(r) for r in m))
        if not f._compatible():
            raise ValueError("matrix does not send source relations into target relations")
        return f

    def _compatible(self) -> bool:
        if self.source.relation_count == 0:
            return True
        img = _imat_mul([list(r) for r in self.matrix], [list(r) for r in self.source.relations])
        tg = self.target
        for j in range(len(img[0]) if img else 0):
            col = [[img[i][j]] for i in range(len(img))]
            if not _column_in_lattice(col, [list(r) for r in tg.relations], tg.generators):
                return False
        return True


def _column_in_lattice(col: list[list[int]], rel: list[list[int]], n: int) -> bool:
    if n == 0:
        return True
    if not rel or not rel[0]:
        return all(c[0] == 0 for c in col)
    sf = smith_normal_form(rel)
    uc = _imat_mul([list(r) for r in sf.u], col)
    diag = sf.diag
    for i in range(n):
        x = uc[i][0]
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if x != 0:
                return False
        elif x % d != 0:
            return False
    return True


def kernel_order(f: AbGroupMap) -> int | None:
    """Exact order of ker(f), or None when the kernel has positive rank.

    The preimage lattice K = { x : M x lies in the target relation lattice }
    is the x-projection of the integer kernel of [M | R_target]; the kernel
    of f is K modulo the source relation lattice.
    """
    ga = f.source.generators
    if ga == 0:
        return 1
    m = [list(r) for r in f.matrix]
    rb = [list(r) for r in f.target.relations]
    stacked = [m[i] + (rb[i] if rb else []) for i in range(f.target.generators)]
    width = ga + (len(rb[0]) if rb and rb[0] else 0)
    if f.target.generators == 0:
        # everything maps to 0; K is all of Z^ga
        kgens = [[1 if i == j else 0 for j in range(ga)] for i in range(ga)]
    else:
        sf = smith_normal_form(stacked)
        v = [list(r) for r in sf.v]
        diag = sf.diag
        kcols = []
        for j in range(width):
            if j >= len(diag) or diag[j] == 0:
                kcols.append([v[i][j] for i in range(width)])
        kgens = (
            [[c[i] for c in kcols] for i in range(ga)]
            if kcols
            else [[] for _ in range(ga)]
        )
    ra = [list(r) for r in f.source.relations]
    return _quotient_order_of_lattices(kgens, ra)


def cokernel_order(f: AbGroupMap) -> int | None:
    """Exact order of coker(f) = target / (image + target relations)."""
    gb = f.target.generators
    if gb == 0:
        return 1
    m = [list(r) for r in f.matrix]
    rb = [list(r) for r in f.target.relations]
    stacked = [m[i] + (rb[i] if rb else []) for i in range(gb)]
    sf = smith_normal_form(stacked)
    if sf.rank < gb:
        return None
    out = 1
    for x in sf.diag[:gb]:
        out *= x
    return out
