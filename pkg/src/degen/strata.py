"""Stratum combinatorics of a strict normal crossings fibre.

A fibre descriptor lists the closed strata Y_I (I a strictly increasing
tuple of component indices), an exact Chow table dim CH^p(Y_I, j) keyed by
(stratum, codim, higher index), and the raw unsigned restriction and Gysin
blocks of the inclusions delta(u): Y_I -> Y_{I minus its u-th index}.
Levels Y^{(r)} are disjoint unions over |I| = r in lexicographic order,
and the two signed maps are assembled blockwise:

    gamma = sum_u (-1)^{u-1} delta(u)_*   (level r -> r-1, codim p -> p+1)
    rho   = sum_u (-1)^{u-1} delta(u)^*   (level r -> r+1, codim fixed)

The ambient model itself (level 0) is excluded throughout; validate()
checks gamma^2 = 0, rho^2 = 0 and the anticommutation gamma rho + rho
gamma = 0 wherever both composites avoid level 0.

A stratum may be disconnected (several double points sharing the same
index set); its Chow space then just has higher dimension, which is how
the 2-gon carries two nodes on the single stratum (1, 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .qlinalg import Mat

__all__ = [
    "DescriptorError",
    "Stratum",
    "GradedSpace",
    "Fibre",
    "build_level",
    "gamma",
    "rho",
    "compose_ii",
    "ii_map",
    "validate",
    "ValidationReport",
    "generator_ngon",
    "generator_smooth",
    "is_prime_power",
]

Stratum = tuple[int, ...]


class DescriptorError(ValueError):
    """A fibre descriptor violates a structural rule."""


def is_prime_power(n: int) -> bool:
    if n < 2:
        return False
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            return n == 1
        p += 1
    return True  # n itself is prime


def _check_stratum(s: Sequence[int], components: int) -> Stratum:
    t = tuple(int(x) for x in s)
    if not t:
        raise DescriptorError("empty stratum index")
    if any(a >= b for a, b in zip(t, t[1:])):
        raise DescriptorError(f"stratum indices not strictly increasing: {t}")
    if t[0] < 1 or t[-1] > components:
        raise DescriptorError(f"stratum {t} uses component outside 1..{components}")
    return t


@dataclass(frozen=True)
class GradedSpace:
    """Q-vector space attached to one level: ordered strata with dimensions."""

    level: int
    codim: int
    j: int
    pieces: tuple[tuple[Stratum, int], ...]

    @property
    def total(self) -> int:
        return sum(d for _, d in self.pieces)

    def offset(self, stratum: Stratum) -> int:
        off = 0
        for s, d in self.pieces:
            if s == stratum:
                return off
            off += d
        raise KeyError(stratum)

    def dim_of(self, stratum: Stratum) -> int:
        for s, d in self.pieces:
            if s == stratum:
                return d
        return 0


@dataclass
class Fibre:
    """Combinatorial model of one semistable special fibre."""

    components: int
    dim_y: int
    q_v: int
    strata: tuple[Stratum, ...]
    chow: dict[tuple[Stratum, int, int], int]
    pushforward: dict[tuple[Stratum, int, int, int], Mat]
    pullback: dict[tuple[Stratum, int, int, int], Mat]
    ii_matrices: dict[tuple[int, int], Mat] = field(default_factory=dict)
    higher_chow: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        if self.components < 1:
            raise DescriptorError("fibre needs at least one component")
        if self.dim_y < 0:
            raise DescriptorError("negative fibre dimension")
        if not is_prime_power(self.q_v):
            raise DescriptorError(f"q_v = {self.q_v} is not a prime power")
        seen = set()
        cleaned = []
        for s in self.strata:
            t = _check_stratum(s, self.components)
            if len(t) > self.dim_y + 1:
                raise DescriptorError(
                    f"stratum {t} deeper than the fibre dimension allows"
                )
            if t in seen:
                raise DescriptorError(f"duplicate stratum {t}")
            seen.add(t)
            cleaned.append(t)
        for i in range(1, self.components + 1):
            if (i,) not in seen:
                raise DescriptorError(f"component ({i},) missing from the strata list")
        for t in cleaned:
            for k in range(len(t)):
                sub = t[:k] + t[k + 1 :]
                if sub and sub not in seen:
                    raise DescriptorError(
                        f"strata not downward closed: {t} present but {sub} missing"
                    )
        self.strata = tuple(sorted(cleaned))
        for (s, p, j), d in self.chow.items():
            if s not in seen:
                raise DescriptorError(f"chow entry references unknown stratum {s}")
            if p < 0 or d < 0:
                raise DescriptorError(f"bad chow entry at {(s, p, j)}")
        self._check_block_shapes()

    def _check_block_shapes(self):
        for key, m in self.pushforward.items():
            s, u, p, j = key
            tgt = _removed(s, u)
            want_rows = self.chow_dim(tgt, p + 1, j)
            want_cols = self.chow_dim(s, p, j)
            if (m.rows, m.cols) != (want_rows, want_cols):
                raise DescriptorError(
                    f"pushforward block {key} has shape {m.rows}x{m.cols}, "
                    f"expected {want_rows}x{want_cols}"
                )
        for key, m in self.pullback.items():
            s, u, p, j = key
            src = _removed(s, u)
            want_rows = self.chow_dim(s, p, j)
            want_cols = self.chow_dim(src, p, j)
            if (m.rows, m.cols) != (want_rows, want_cols):
                raise DescriptorError(
                    f"pullback block {key} has shape {m.rows}x{m.cols}, "
                    f"expected {want_rows}x{want_cols}"
                )

    def chow_dim(self, stratum: Stratum, p: int, j: int = 0) -> int:
        return self.chow.get((tuple(stratum), p, j), 0)

    def level_strata(self, r: int) -> tuple[Stratum, ...]:
        return tuple(s for s in self.strata if len(s) == r)

    @property
    def max_level(self) -> int:
        return max((len(s) for s in self.strata), default=0)

    def observed_js(self) -> tuple[int, ...]:
        return tuple(sorted({j for (_, _, j) in self.chow}))


def _removed(s: Stratum, u: int) -> Stratum:
    if not 1 <= u <= len(s):
        raise DescriptorError(f"position {u} out of range for stratum {s}")
    return s[: u - 1] + s[u:]


def build_level(f: Fibre, r: int, p: int, j: int = 0) -> GradedSpace:
    """CH^p(Y^{(r)}, j) as an ordered direct sum over |I| = r (lex order)."""
    if r < 1:
        return GradedSpace(r, p, j, ())
    pieces = tuple((s, f.chow_dim(s, p, j)) for s in f.level_strata(r))
    return GradedSpace(r, p, j, tuple((s, d) for s, d in pieces if d > 0))


def gamma(f: Fibre, r: int, p: int, j: int = 0) -> Mat:
    """Signed Gysin map CH^p(Y^{(r)}, j) -> CH^{p+1}(Y^{(r-1)}, j)."""
    src = build_level(f, r, p, j)
    tgt = build_level(f, r - 1, p + 1, j)
    return _assemble(f, src, tgt, mode="push")


def rho(f: Fibre, r: int, p: int, j: int = 0) -> Mat:
    """Signed restriction map CH^p(Y^{(r)}, j) -> CH^p(Y^{(r+1)}, j)."""
    src = build_level(f, r, p, j)
    tgt = build_level(f, r + 1, p, j)
    return _assemble(f, src, tgt, mode="pull")


def _assemble(f: Fibre, src: GradedSpace, tgt: GradedSpace, mode: str) -> Mat:
    rows = [[Fraction(0)] * src.total for _ in range(tgt.total)]
    if mode == "push":
        # iterate source strata I, remove position u to land in the target
        for stratum, sdim in src.pieces:
            for u in range(1, len(stratum) + 1):
                other = _removed(stratum, u)
                tdim = tgt.dim_of(other)
                if sdim == 0 or tdim == 0:
                    continue
                block = f.pushforward.get((stratum, u, src.codim, src.j))
                if block is None:
                    raise DescriptorError(
                        f"missing pushforward block for stratum {stratum}, "
                        f"position {u}, codim {src.codim}, j {src.j}"
                    )
                _add_block(rows, tgt.offset(other), src.offset(stratum), block, (-1) ** (u - 1))
    elif mode == "pull":
        # iterate target strata I, remove position u to find the source
        for stratum, tdim in tgt.pieces:
            for u in range(1, len(stratum) + 1):
                other = _removed(stratum, u)
                sdim = src.dim_of(other)
                if sdim == 0 or tdim == 0:
                    continue
                block = f.pullback.get((stratum, u, src.codim, src.j))
                if block is None:
                    raise DescriptorError(
                        f"missing pullback block for stratum {stratum}, "
                        f"position {u}, codim {src.codim}, j {src.j}"
                    )
                _add_block(rows, tgt.offset(stratum), src.offset(other), block, (-1) ** (u - 1))
    else:  # pragma: no cover
        raise AssertionError(mode)
    return Mat.from_rows(rows, cols=src.total)


def _add_block(rows, r0: int, c0: int, block: Mat, sign: int):
    for i in range(block.rows):
        for k in range(block.cols):
            rows[r0 + i][c0 + k] += sign * block.entries[i][k]


def compose_ii(f: Fibre, p: int, j: int = 0) -> Mat:
    """The composite gamma(level 2) . rho(level 1): CH^p(Y^{(1)}) -> CH^{p+1}(Y^{(1)}).

    This is the convenience normalization of i^* i_* used when no explicit
    matrix is supplied; the opposite order rho . gamma lives one level up
    and is exposed through validate()'s anticommutator checks instead.
    """
    return gamma(f, 2, p, j) * rho(f, 1, p, j)


def ii_map(f: Fibre, p: int, j: int = 0) -> Mat:
    """i^* i_*: CH^p(Y^{(1)}, j) -> CH^{p+1}(Y^{(1)}, j), explicit or composed."""
    explicit = f.ii_matrices.get((p, j))
    if explicit is not None:
        src = build_level(f, 1, p, j)
        tgt = build_level(f, 1, p + 1, j)
        if (explicit.rows, explicit.cols) != (tgt.total, src.total):
            raise DescriptorError(
                f"ii matrix at codim {p}, j {j} has shape "
                f"{explicit.rows}x{explicit.cols}, expected {tgt.total}x{src.total}"
            )
        return explicit
    return compose_ii(f, p, j)


@dataclass(frozen=True)
class ValidationReport:
    failures: tuple[tuple[str, int, int, int], ...]  # (identity, r, p, j)
    checked: int

    @property
    def ok(self) -> bool:
        return not self.failures


def validate(f: Fibre) -> ValidationReport:
    """Check the sign identities wherever they avoid the excluded level 0.

    gamma^2 needs sources at level >= 3 (two steps down stay positive),
    rho^2 is safe from level 1 up (overshooting the deepest stratum just
    hits zero spaces), and the anticommutator needs level >= 2 so that the
    rho-after-gamma route never passes through the ambient model.
    """
    failures = []
    checked = 0
    js = f.observed_js() or (0,)
    max_r = f.max_level
    for j in js:
        for p in range(0, f.dim_y + 2):
            for r in range(3, max_r + 1):
                src = build_level(f, r, p, j)
                if src.total == 0:
                    continue
                checked += 1
                if not (gamma(f, r - 1, p + 1, j) * gamma(f, r, p, j)).is_zero():
                    failures.append(("gamma.gamma", r, p, j))
            for r in range(1, max_r + 1):
                src = build_level(f, r, p, j)
                if src.total == 0:
                    continue
                checked += 1
                if not (rho(f, r + 1, p, j) * rho(f, r, p, j)).is_zero():
                    failures.append(("rho.rho", r, p, j))
            for r in range(2, max_r + 1):
                src = build_level(f, r, p, j)
                if src.total == 0:
                    continue
                checked += 1
                anti = gamma(f, r + 1, p, j) * rho(f, r, p, j) + rho(f, r - 1, p + 1, j) * gamma(
                    f, r, p, j
                )
                if not anti.is_zero():
                    failures.append(("gamma.rho+rho.gamma", r, p, j))
    return ValidationReport(tuple(failures), checked)


# ---------------------------------------------------------------------------
# Built-in generators.


def generator_ngon(n: int, q_v: int) -> Fibre:
    """Cycle of n rational curves (the Kodaira I_n shape).

    For n = 2 the two nodes share the stratum (1, 2), which then carries a
    two-dimensional CH^0.
    """
    if n < 2:
        raise DescriptorError("an n-gon needs at least two components")
    comps = list(range(1, n + 1))
    node_pairs: list[Stratum] = []
    for i in range(1, n):
        node_pairs.append((i, i + 1))
    node_pairs.append((1, n) if n > 2 else (1, 2))
    # count nodes per index pair (only n = 2 collapses)
    counts: dict[Stratum, int] = {}
    for pair in node_pairs:
        counts[pair] = counts.get(pair, 0) + 1
    strata: list[Stratum] = [(i,) for i in comps] + sorted(counts)
    chow: dict[tuple[Stratum, int, int], int] = {}
    for i in comps:
        chow[((i,), 0, 0)] = 1
        chow[((i,), 1, 0)] = 1
    for pair, c in counts.items():
        chow[(pair, 0, 0)] = c
    push: dict[tuple[Stratum, int, int, int], Mat] = {}
    pull: dict[tuple[Stratum, int, int, int], Mat] = {}
    for pair, c in counts.items():
        ones_row = Mat.from_rows([[1] * c], cols=c)
        ones_col = Mat.from_rows([[1]] * c, cols=1)
        for u in (1, 2):
            push[(pair, u, 0, 0)] = ones_row
            pull[(pair, u, 0, 0)] = ones_col
    return Fibre(
        components=n,
        dim_y=1,
        q_v=q_v,
        strata=tuple(strata),
        chow=chow,
        pushforward=push,
        pullback=pull,
    )


def generator_smooth(dims: Mapping[tuple[int, int], int], dim_y: int, q_v: int) -> Fibre:
    """Smooth fibre: one component, no deeper strata, given Chow dimensions."""
    chow = {((1,), p, j): d for (p, j), d in dims.items() if d > 0}
    return Fibre(
        components=1,
        dim_y=dim_y,
        q_v=q_v,
        strata=((1,),),
        chow=chow,
        pushforward={},
        pullback={},
    )
