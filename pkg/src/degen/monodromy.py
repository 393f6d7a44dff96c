"""Monodromy double complex of a semistable fibre and its mapping cone.

The triple-indexed space K^{i,j,k} is CH^{(i+j-2k+n)/2}(Y^{(2k-i+1)}) when
k >= max(0, i), the parity works out and the level is positive, and zero
otherwise.  Three maps act on it:

    d' = rho:        (i, j, k) -> (i+1, j+1, k+1)   restriction, level up
    d'' = -gamma:    (i, j, k) -> (i+1, j+1, k)     Gysin, level down
    N = identity:    (i, j, k) -> (i+2, j, k+1)     same level, shifted twist

For a fixed twist index "star", the degree-q slice along the diagonal
(i, j) = (q - 2*star, q - dim_y) is a cochain complex under d' + d'' (the
"total row"); N is a degree-zero chain map from the row at star to the row
at star - 1, given by identity blocks on the shared level summands.  The
cohomology of Cone(N) computes the v-adic weight spectral bookkeeping, and
it agrees with a short explicit complex built from gamma, i^*i_* and rho
(check_quasi_iso verifies the agreement instance by instance).
"""

from __future__ import annotations

from dataclasses import dataclass

from .qlinalg import Mat, rank
from .strata import Fibre, build_level, gamma, ii_map, rho

__all__ = [
    "ComplexError",
    "CochainComplex",
    "cohomology_dims",
    "euler_characteristic",
    "mapping_cone",
    "KComplex",
    "build_K",
    "d_prime",
    "d_doubleprime",
    "n_op",
    "TwistRow",
    "total_rows",
    "cone_of_N",
    "build_C",
    "QuasiIsoResult",
    "check_quasi_iso",
]


class ComplexError(ValueError):
    """A differential fails to square to zero or a chain map fails to chain."""


@dataclass(frozen=True)
class CochainComplex:
    """Finitely supported cochain complex; absent degrees are zero."""

    dims: dict[int, int]
    diffs: dict[int, Mat]  # diffs[q]: degree q -> q+1

    def dim(self, q: int) -> int:
        return self.dims.get(q, 0)

    def diff(self, q: int) -> Mat:
        d = self.diffs.get(q)
        if d is None:
            return Mat.zero(self.dim(q + 1), self.dim(q))
        return d

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(q for q, d in self.dims.items() if d > 0))

    def check(self) -> None:
        for q, d in self.diffs.items():
            if (d.rows, d.cols) != (self.dim(q + 1), self.dim(q)):
                raise ComplexError(
                    f"differential at degree {q} has shape {d.rows}x{d.cols}, "
                    f"expected {self.dim(q + 1)}x{self.dim(q)}"
                )
        for q in self.support():
            comp = self.diff(q + 1) * self.diff(q)
            if not comp.is_zero():
                raise ComplexError(f"d.d != 0 out of degree {q}")


def cohomology_dims(c: CochainComplex) -> dict[int, int]:
    """Nonzero cohomology dimensions, assuming d.d = 0 holds."""
    out = {}
    for q in c.support():
        h = c.dim(q) - rank(c.diff(q)) - rank(c.diff(q - 1))
        if h:
            out[q] = h
    return out


def euler_characteristic(c: CochainComplex) -> int:
    return sum((-1) ** q * d for q, d in c.dims.items())


def mapping_cone(
    f_maps: dict[int, Mat], source: CochainComplex, target: CochainComplex
) -> CochainComplex:
    """Cone of a chain map f: Cone^q = A^q + B^{q-1}, D(a,b) = (da, fa - db)."""

    def f_at(q: int) -> Mat:
        m = f_maps.get(q)
        if m is None:
            return Mat.zero(target.dim(q), source.dim(q))
        if (m.rows, m.cols) != (target.dim(q), source.dim(q)):
            raise ComplexError(
                f"chain map at degree {q} has shape {m.rows}x{m.cols}, "
                f"expected {target.dim(q)}x{source.dim(q)}"
            )
        return m

    degrees = set(source.dims) | {q + 1 for q in target.dims}
    for q in sorted(set(source.dims) | set(target.dims)):
        lhs = f_at(q + 1) * source.diff(q)
        rhs = target.diff(q) * f_at(q)
        if lhs != rhs:
            raise ComplexError(f"not a chain map at degree {q}")
    dims = {}
    diffs = {}
    for q in degrees:
        dims[q] = source.dim(q) + target.dim(q - 1)
    for q in degrees:
        top = Mat.hstack([source.diff(q), Mat.zero(source.dim(q + 1), target.dim(q - 1))])
        bottom = Mat.hstack([f_at(q), target.diff(q - 1).scale(-1)])
        diffs[q] = Mat.vstack([top, bottom])
    return CochainComplex({q: d for q, d in dims.items() if d}, diffs)


# ---------------------------------------------------------------------------
# The triple-indexed complex itself.


@dataclass(frozen=True)
class KComplex:
    fibre: Fibre
    bound: int

    def codim_level(self, i: int, j: int, k: int) -> tuple[int, int] | None:
        """(codim, level) of K^{i,j,k}, or None when the piece is zero."""
        if max(abs(i), abs(j), abs(k)) > self.bound:
            return None
        if k < max(0, i):
            return None
        r = 2 * k - i + 1
        if r < 1:
            return None
        num = i + j - 2 * k + self.fibre.dim_y
        if num % 2 != 0:
            return None
        p = num // 2
        if p < 0:
            return None
        return p, r

    def piece_dim(self, i: int, j: int, k: int) -> int:
        pl = self.codim_level(i, j, k)
        if pl is None:
            return 0
        p, r = pl
        return build_level(self.fibre, r, p).total


def build_K(f: Fibre, bound: int | None = None) -> KComplex:
    """Bounded window of the double complex; default bound is dim_y + 2."""
    if bound is None:
        bound = f.dim_y + 2
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    return KComplex(f, bound)


def _structure_map(kc: KComplex, at: tuple[int, int, int], shift: tuple[int, int, int], kind: str) -> Mat:
    i, j, k = at
    ti, tj, tk = i + shift[0], j + shift[1], k + shift[2]
    src = kc.codim_level(i, j, k)
    tgt = kc.codim_level(ti, tj, tk)
    src_dim = kc.piece_dim(i, j, k)
    tgt_dim = kc.piece_dim(ti, tj, tk)
    if src is None or tgt is None or src_dim == 0 or tgt_dim == 0:
        return Mat.zero(tgt_dim, src_dim)
    p, r = src
    if kind == "rho":
        return rho(kc.fibre, r, p)
    if kind == "gamma":
        return gamma(kc.fibre, r, p).scale(-1)
    if kind == "n":
        return Mat.identity(src_dim)
    raise AssertionError(kind)  # pragma: no cover


def d_prime(kc: KComplex, at: tuple[int, int, int]) -> Mat:
    """d' = rho: K^{i,j,k} -> K^{i+1,j+1,k+1}."""
    return _structure_map(kc, at, (1, 1, 1), "rho")


def d_doubleprime(kc: KComplex, at: tuple[int, int, int]) -> Mat:
    """d'' = -gamma: K^{i,j,k} -> K^{i+1,j+1,k}."""
    return _structure_map(kc, at, (1, 1, 0), "gamma")


def n_op(kc: KComplex, at: tuple[int, int, int]) -> Mat:
    """N = identity blocks: K^{i,j,k} -> K^{i+2,j,k+1}."""
    return _structure_map(kc, at, (2, 0, 1), "n")


# ---------------------------------------------------------------------------
# Total rows along (i, j) = (q - 2 star, q - n) and the cone of N.


@dataclass(frozen=True)
class TwistRow:
    """One twist's diagonal row of the double complex, totalized over k."""

    star: int
    summands: dict[int, tuple[tuple[int, int], ...]]  # q -> ((level, dim), ...)
    complex: CochainComplex

    def levels_at(self, q: int) -> tuple[tuple[int, int], ...]:
        return self.summands.get(q, ())


def _row_summands(kc: KComplex, star: int, q: int) -> tuple[tuple[int, int], ...]:
    f = kc.fibre
    out = []
    r = abs(q - 2 * star) + 1
    if (q + 1 - r) % 2 != 0:
        r += 1
    while r <= f.max_level:
        p = (q + 1 - r) // 2
        if p < 0:
            break  # p only shrinks as r grows
        i = q - 2 * star
        k = (r + i - 1) // 2
        if kc.codim_level(i, q - f.dim_y, k) is not None:
            d = build_level(f, r, p).total
            if d:
                out.append((r, d))
        r += 2
    return tuple(out)


def total_rows(kc: KComplex, star: int) -> TwistRow:
    """Realize the star-th row as an explicit cochain complex."""
    f = kc.fibre
    lo = 2 * star - kc.bound - f.dim_y - 2
    hi = 2 * star + kc.bound + f.dim_y + 2
    summands = {}
    for q in range(lo, hi + 1):
        s = _row_summands(kc, star, q)
        if s:
            summands[q] = s
    dims = {q: sum(d for _, d in s) for q, s in summands.items()}
    diffs = {}
    for q in sorted(summands):
        src = summands[q]
        tgt = summands.get(q + 1, ())
        if not tgt:
            continue
        grid = []
        for tr, _ in tgt:
            row = []
            for sr, _ in src:
                p = (q + 1 - sr) // 2
                if tr == sr + 1:
                    row.append(rho(f, sr, p))
                elif tr == sr - 1:
                    row.append(gamma(f, sr, p).scale(-1))
                else:
                    row.append(None)
            grid.append(row)
        diffs[q] = Mat.block(
            grid, [d for _, d in tgt], [d for _, d in src]
        )
    cx = CochainComplex(dims, diffs)
    cx.check()
    return TwistRow(star, summands, cx)


def cone_of_N(source_row: TwistRow, target_row: TwistRow) -> CochainComplex:
    """Cone of the monodromy chain map from the row at star to star - 1."""
    if target_row.star != source_row.star - 1:
        raise ValueError("monodromy connects twist star to star - 1")
    n_maps = {}
    degrees = set(source_row.summands) | set(target_row.summands)
    for q in degrees:
        src = source_row.levels_at(q)
        tgt = target_row.levels_at(q)
        if not src or not tgt:
            continue
        grid = []
        for tr, td in tgt:
            row = []
            for sr, sd in src:
                row.append(Mat.identity(sd) if tr == sr else None)
            grid.append(row)
        n_maps[q] = Mat.block(grid, [d for _, d in tgt], [d for _, d in src])
    cone = mapping_cone(n_maps, source_row.complex, target_row.complex)
    cone.check()
    return cone


# ---------------------------------------------------------------------------
# The short explicit complex quasi-isomorphic to the cone.


def build_C(f: Fibre, q: int, star: int) -> CochainComplex:
    """Explicit small complex matching Cone(N) for this twist.

    Degrees m in [star, 2 star - 1] carry CH^{m-star}(Y^{(2 star - m)})
    with differential -gamma; from degree 2 star on it is CH^{star} of
    increasing levels with differential rho; the hinge between the two
    branches is -i^*i_* on the first level.  The parameter q is only the
    report's focus degree, the complex itself depends on star alone.
    """
    del q  # focus degree does not affect the construction
    n = f.dim_y
    dims = {}
    spaces = {}
    lo = star
    hi = 2 * star + n + 1
    for m in range(lo, hi + 1):
        if m <= 2 * star - 1:
            p, r = m - star, 2 * star - m
        else:
            p, r = star, m - 2 * star + 1
        if p < 0 or r < 1:
            continue
        d = build_level(f, r, p).total
        if d:
            dims[m] = d
        spaces[m] = (p, r, d)
    diffs = {}
    for m in range(lo, hi):
        if m not in spaces or (m + 1) not in spaces:
            continue
        p, r, d = spaces[m]
        _, _, d2 = spaces[m + 1]
        if d == 0 and d2 == 0:
            continue
        if m <= 2 * star - 2:
            diffs[m] = gamma(f, r, p).scale(-1)
        elif m == 2 * star - 1:
            diffs[m] = ii_map(f, star - 1).scale(-1)
        else:
            diffs[m] = rho(f, r, p)
    cx = CochainComplex(dims, diffs)
    cx.check()
    return cx


@dataclass(frozen=True)
class QuasiIsoResult:
    star: int
    focus_q: int
    cone_cohomology: dict[int, int]
    small_cohomology: dict[int, int]

    @property
    def ok(self) -> bool:
        return self.cone_cohomology == self.small_cohomology


def check_quasi_iso(f: Fibre, q: int, star: int, bound: int | None = None) -> QuasiIsoResult:
    """Compare cohomology of Cone(N) with the explicit small complex."""
    kc = build_K(f, bound)
    cone = cone_of_N(total_rows(kc, star), total_rows(kc, star - 1))
    small = build_C(f, q, star)
    return QuasiIsoResult(
        star=star,
        focus_q=q,
        cone_cohomology=cohomology_dims(cone),
        small_cohomology=cohomology_dims(small),
    )
