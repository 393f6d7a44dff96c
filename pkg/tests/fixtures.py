"""Shared fibre fixtures and descriptor randomizers for the test suite.

The surface fixture is the smallest descriptor on which all three sign
identities are nonvacuous: three surface components meeting pairwise in
lines with a single triple point.  Unit intersection blocks would violate
the anticommutator (the composite is then 3*id on CH^0 of the double
lines), so the fixture carries self-restriction -1, cross-restriction 2
and triple-point pushes of weight 2, which satisfy all identities exactly.

Randomizers produce new valid descriptors from valid ones: tensoring all
Chow data with an identity of size c and conjugating every Chow space by
a random invertible matrix both preserve the identities on the nose.
"""

from __future__ import annotations

import random
from fractions import Fraction

from degen.qlinalg import Mat, solve
from degen.strata import Fibre
from oracles import random_invertible

F = Fraction


def simplex_surface(q_v: int = 2) -> Fibre:
    """Three surfaces, three double lines, one triple point."""
    planes = [1, 2, 3]
    lines = [(1, 2), (1, 3), (2, 3)]
    point = (1, 2, 3)

    def plane_basis(i: int) -> list[tuple[int, int]]:
        # CH^1 of a component: classes of the two lines on it, lex order
        return [l for l in lines if i in l]

    chow = {}
    for i in planes:
        chow[((i,), 0, 0)] = 1
        chow[((i,), 1, 0)] = 2
        chow[((i,), 2, 0)] = 1
    for l in lines:
        chow[(l, 0, 0)] = 1
        chow[(l, 1, 0)] = 1
    chow[(point, 0, 0)] = 1

    push = {}
    pull = {}
    for l in lines:
        for u in (1, 2):
            target_plane = l[1] if u == 1 else l[0]
            basis = plane_basis(target_plane)
            # CH^0(line) -> CH^1(plane): the class of the line itself
            push[(l, u, 0, 0)] = Mat.from_rows(
                [[1 if b == l else 0] for b in basis], cols=1
            )
            # CH^1(line) -> CH^2(plane): point class to point class
            push[(l, u, 1, 0)] = Mat.from_rows([[1]])
            # CH^0(plane) -> CH^0(line)
            pull[(l, u, 0, 0)] = Mat.from_rows([[1]])
            # CH^1(plane) -> CH^1(line): self-restriction -1, cross 2
            pull[(l, u, 1, 0)] = Mat.from_rows(
                [[-1 if b == l else 2 for b in basis]], cols=2
            )
    for u in (1, 2, 3):
        push[(point, u, 0, 0)] = Mat.from_rows([[2]])
        pull[(point, u, 0, 0)] = Mat.from_rows([[1]])

    return Fibre(
        components=3,
        dim_y=2,
        q_v=q_v,
        strata=tuple([(i,) for i in planes] + lines + [point]),
        chow=chow,
        pushforward=push,
        pullback=pull,
    )


def _kron_identity(m: Mat, c: int) -> Mat:
    rows = []
    for i in range(m.rows):
        for a in range(c):
            row = []
            for k in range(m.cols):
                for b in range(c):
                    row.append(m.entries[i][k] if a == b else F(0))
            rows.append(row)
    return Mat.from_rows(rows, cols=m.cols * c)


def tensored(f: Fibre, c: int) -> Fibre:
    """Tensor every Chow space with Q^c; identities are preserved."""
    return Fibre(
        components=f.components,
        dim_y=f.dim_y,
        q_v=f.q_v,
        strata=f.strata,
        chow={k: d * c for k, d in f.chow.items()},
        pushforward={k: _kron_identity(m, c) for k, m in f.pushforward.items()},
        pullback={k: _kron_identity(m, c) for k, m in f.pullback.items()},
        ii_matrices={k: _kron_identity(m, c) for k, m in f.ii_matrices.items()},
        higher_chow={k: d * c for k, d in f.higher_chow.items()},
    )


def conjugated(f: Fibre, rng: random.Random) -> Fibre:
    """Change basis in every Chow space by a random invertible matrix."""
    ts: dict[tuple, Mat] = {}
    tinvs: dict[tuple, Mat] = {}

    def t_of(stratum, p, j) -> tuple[Mat, Mat]:
        key = (tuple(stratum), p, j)
        if key not in ts:
            d = f.chow_dim(stratum, p, j)
            t = random_invertible(rng, d)
            ts[key] = t
            inv = solve(t, Mat.identity(d))
            assert inv is not None
            tinvs[key] = inv
        return ts[key], tinvs[key]

    push = {}
    for (s, u, p, j), m in sorted(f.pushforward.items()):
        tgt = s[: u - 1] + s[u:]
        t_tgt, _ = t_of(tgt, p + 1, j)
        _, t_src_inv = t_of(s, p, j)
        push[(s, u, p, j)] = t_tgt * m * t_src_inv
    pull = {}
    for (s, u, p, j), m in sorted(f.pullback.items()):
        src = s[: u - 1] + s[u:]
        t_tgt, _ = t_of(s, p, j)
        _, t_src_inv = t_of(src, p, j)
        pull[(s, u, p, j)] = t_tgt * m * t_src_inv

    def level_one_transform(p, j, inverse=False):
        singles = [s for s in f.strata if len(s) == 1 and f.chow_dim(s, p, j) > 0]
        blocks = []
        for s in singles:
            t, tinv = t_of(s, p, j)
            blocks.append(tinv if inverse else t)
        dims = [b.rows for b in blocks]
        grid = [
            [blocks[i] if i == k else None for k in range(len(blocks))]
            for i in range(len(blocks))
        ]
        return Mat.block(grid, dims, dims) if blocks else Mat.zero(0, 0)

    ii = {}
    for (p, j), m in sorted(f.ii_matrices.items()):
        ii[(p, j)] = level_one_transform(p + 1, j) * m * level_one_transform(p, j, inverse=True)
    return Fibre(
        components=f.components,
        dim_y=f.dim_y,
        q_v=f.q_v,
        strata=f.strata,
        chow=dict(f.chow),
        pushforward=push,
        pullback=pull,
        ii_matrices=ii,
        higher_chow=dict(f.higher_chow),
    )


def with_flipped_sign(f: Fibre, key, kind: str = "push") -> Fibre:
    """Negate one raw block; on the surface fixture this breaks an identity."""
    push = dict(f.pushforward)
    pull = dict(f.pullback)
    if kind == "push":
        push[key] = push[key].scale(-1)
    else:
        pull[key] = pull[key].scale(-1)
    return Fibre(
        components=f.components,
        dim_y=f.dim_y,
        q_v=f.q_v,
        strata=f.strata,
        chow=dict(f.chow),
        pushforward=push,
        pullback=pull,
        ii_matrices=dict(f.ii_matrices),
        higher_chow=dict(f.higher_chow),
    )
