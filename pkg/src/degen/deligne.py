"""v-adic Deligne cohomology groups as exact quotients, and the maps into them.

For cohomological degree q and twist a there are two regimes:

* higher regime, q - 2a > 1: the group is a declared motivic dimension
  (the higher Chow input at codim q - a - 1, higher index q - 2a - 1);
  nothing about the special fibre enters beyond that table.

* boundary regime, q - 2a = 1: the group has the exact presentation

      ker( i^*i_*: CH^a(Y^{(1)}) -> CH^{a+1}(Y^{(1)}) ) / im( gamma )

  with gamma the signed Gysin map CH^{a-1}(Y^{(2)}) -> CH^a(Y^{(1)}).
  For a validated fibre im(gamma) automatically lies in the kernel (the
  anticommutator identity folds i^*i_* gamma into gamma gamma = 0); with
  an explicit i^*i_* matrix this becomes a real compatibility check.

The cycle-class side: a datum (xi, tau) is mapped into the quotient by
first reducing xi to its canonical representative modulo the image of
the one-step-lower i^*i_* (this makes the outcome independent of the
chosen representative), then applying tau, then taking canonical quotient
coordinates.  Everything is plain Fraction linear algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

from .qlinalg import (
    AbGroupMap,
    Mat,
    cokernel_order,
    kernel_basis,
    kernel_order,
    quotient_dim,
    quotient_projection,
    rank,
    rref,
    solve,
)
from .strata import DescriptorError, Fibre, build_level, gamma, ii_map

__all__ = [
    "DeligneGroup",
    "deligne_group",
    "boundary_in_kernel",
    "CycleDatum",
    "z_map",
    "residue_reduction",
    "ConjectureAResult",
    "conjecture_A_check",
    "integral_orders",
]


@dataclass(frozen=True)
class DeligneGroup:
    """One v-adic Deligne cohomology group with its exact presentation."""

    q: int
    a: int
    kind: str  # "higher" or "boundary"
    dim: int
    ambient_dim: int
    kernel: Mat | None  # columns: canonical basis of ker(i^*i_*)
    modulo: Mat | None  # columns: generators of im(gamma)

    def coords_in_quotient(self, vectors: Mat) -> Mat | None:
        """Canonical quotient coordinates of ambient vectors, or None if
        some column lies outside ker(i^*i_*)."""
        if self.kind != "boundary":
            raise ValueError("only the boundary presentation has ambient coordinates")
        assert self.kernel is not None and self.modulo is not None
        in_kernel = solve(self.kernel, vectors)
        if in_kernel is None:
            return None
        mod_coords = solve(self.kernel, self.modulo)
        assert mod_coords is not None, "im(gamma) must lie in the kernel"
        return quotient_projection(mod_coords) * in_kernel


def deligne_group(
    f: Fibre, q: int, a: int, higher_chow_dim: int | None = None
) -> DeligneGroup:
    """The group at (q, a); see the module docstring for the two regimes."""
    gap = q - 2 * a
    if gap > 1:
        if higher_chow_dim is None:
            higher_chow_dim = f.higher_chow.get((q - a - 1, q - 2 * a - 1), 0)
        return DeligneGroup(
            q=q, a=a, kind="higher", dim=higher_chow_dim,
            ambient_dim=0, kernel=None, modulo=None,
        )
    if gap == 1:
        ambient = build_level(f, 1, a).total
        ii = ii_map(f, a)
        g = gamma(f, 2, a - 1) if a >= 1 else Mat.zero(ambient, 0)
        if not (ii * g).is_zero():
            raise DescriptorError(
                f"im(gamma) does not lie in ker(i^*i_*) at codim {a}"
            )
        ker = kernel_basis(ii)
        dim = ker.cols - rank(g)
        return DeligneGroup(
            q=q, a=a, kind="boundary", dim=dim,
            ambient_dim=ambient, kernel=ker, modulo=g,
        )
    raise DescriptorError(
        f"(q, a) = ({q}, {a}) lies outside the supported range q - 2a >= 1"
    )


def boundary_in_kernel(f: Fibre, a: int) -> bool:
    """Does im(gamma) lie in ker(i^*i_*) at codim a?  True for valid data."""
    ii = ii_map(f, a)
    if a < 1:
        return True
    g = gamma(f, 2, a - 1)
    return (ii * g).is_zero()


@dataclass(frozen=True)
class CycleDatum:
    """Cycle-class input: xi columns in CH^a(Y^{(1)}) plus optional tau."""

    b_rank: int
    xi: Mat
    tau: Mat | None = None


def residue_reduction(modulo: Mat) -> Mat:
    """Ambient endomorphism sending v to its canonical representative mod
    the column span: pivot coordinates (echelon form of the span) are
    eliminated, so equivalent vectors get equal outputs."""
    n = modulo.rows
    r, pivots = rref(modulo.transpose())
    correction = [[r.entries[i][m] for i in range(len(pivots))] for m in range(n)]
    out = []
    for m in range(n):
        row = list(Mat.identity(n).entries[m])
        for i, p in enumerate(pivots):
            row[p] -= correction[m][i]
        out.append(row)
    return Mat.from_rows(out, cols=n)


def z_map(f: Fibre, a: int, cyc: CycleDatum) -> Mat:
    """Ambient-valued cycle classes: tau applied to the canonical residue
    of xi modulo im(i^*i_*) one codimension down."""
    ambient = build_level(f, 1, a).total
    if cyc.xi.rows != ambient or cyc.xi.cols != cyc.b_rank:
        raise DescriptorError(
            f"xi has shape {cyc.xi.rows}x{cyc.xi.cols}, expected {ambient}x{cyc.b_rank}"
        )
    lower_ii = ii_map(f, a - 1) if a >= 1 else Mat.zero(ambient, 0)
    reduced = residue_reduction(lower_ii) * cyc.xi
    tau = cyc.tau
    if tau is None:
        tau = Mat.identity(ambient)
    if (tau.rows, tau.cols) != (ambient, ambient):
        raise DescriptorError(
            f"tau has shape {tau.rows}x{tau.cols}, expected {ambient}x{ambient}"
        )
    return tau * reduced


@dataclass(frozen=True)
class ConjectureAResult:
    kind: str
    dim: int
    expected_sources: int
    achieved_rank: int
    in_kernel: bool

    @property
    def ok(self) -> bool:
        return (
            self.in_kernel
            and self.expected_sources == self.dim
            and self.achieved_rank == self.dim
        )


def conjecture_A_check(
    g: DeligneGroup, reg: Mat | None, cycle_images: Mat | None = None
) -> ConjectureAResult:
    """Is (regulator [+ cycle classes]) an isomorphism onto the group?

    In the higher regime the regulator columns are abstract coordinates of
    length dim; in the boundary regime both blocks are ambient vectors and
    the rank is taken in the quotient presentation.
    """
    if g.kind == "higher":
        m = reg if reg is not None else Mat.zero(g.dim, 0)
        if m.rows != g.dim:
            raise DescriptorError(
                f"regulator matrix has {m.rows} rows, expected {g.dim}"
            )
        return ConjectureAResult(
            kind="A1",
            dim=g.dim,
            expected_sources=m.cols,
            achieved_rank=rank(m),
            in_kernel=True,
        )
    blocks = []
    for m in (reg, cycle_images):
        if m is not None and m.cols:
            if m.rows != g.ambient_dim:
                raise DescriptorError(
                    f"matrix has {m.rows} rows, expected ambient {g.ambient_dim}"
                )
            blocks.append(m)
    combined = Mat.hstack(blocks) if blocks else Mat.zero(g.ambient_dim, 0)
    assert g.kernel is not None and g.modulo is not None
    in_kernel = solve(g.kernel, combined) is not None
    achieved = (
        quotient_dim(combined, g.modulo) if in_kernel else -1
    )
    return ConjectureAResult(
        kind="A2",
        dim=g.dim,
        expected_sources=combined.cols,
        achieved_rank=achieved,
        in_kernel=in_kernel,
    )


def integral_orders(f_map: AbGroupMap) -> tuple[int | None, int | None]:
    """(kernel order, cokernel order) of an integral regulator; None = infinite."""
    return kernel_order(f_map), cokernel_order(f_map)
