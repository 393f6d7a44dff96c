"""Flat-file instance format: everything one run needs, in one JSON object.

A bundle collects the special fibres at the marked places, Frobenius data
for the local Euler factors, the motivic inputs (regulator images and
cycle classes), the global L-function as an exact rational function in
t = q^{-s}, and optionally an integral regulator presentation.  All
rational numbers travel as strings ("p/q" or "n") so files are exact and
serialization is byte-stable.

Only "params" and "fibres" are mandatory; check commands that need a
missing section report it rather than crash.  In strict mode (default)
unknown keys anywhere in the file are rejected, which catches typos like
"pushfoward" before they silently weaken a run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .deligne import CycleDatum
from .lfun import RatFunc
from .qlinalg import AbGroupMap, FPAbelianGroup, Mat
from .strata import DescriptorError, Fibre, is_prime_power

__all__ = [
    "BundleError",
    "Params",
    "Place",
    "RegulatorDatum",
    "MotivicDatum",
    "GlobalL",
    "Bundle",
    "load",
    "loads",
    "save",
    "dumps",
]


class BundleError(ValueError):
    """Raised when a bundle file is malformed or internally inconsistent."""


def _expect(obj, required: dict, optional: dict, where: str, strict: bool) -> dict:
    """Pull typed fields out of a JSON object, enforcing key discipline."""
    if not isinstance(obj, dict):
        raise BundleError(f"{where}: expected an object")
    out = {}
    for key, kind in required.items():
        if key not in obj:
            raise BundleError(f"{where}: missing required key {key!r}")
        out[key] = _coerce(obj[key], kind, f"{where}.{key}")
    for key, kind in optional.items():
        if key in obj and obj[key] is not None:
            out[key] = _coerce(obj[key], kind, f"{where}.{key}")
        else:
            out[key] = None
    if strict:
        known = set(required) | set(optional)
        extra = sorted(set(obj) - known)
        if extra:
            raise BundleError(f"{where}: unknown keys {extra}")
    return out


def _coerce(value, kind, where: str):
    if kind == "int":
        if not isinstance(value, int) or isinstance(value, bool):
            raise BundleError(f"{where}: expected an integer")
        return value
    if kind == "list":
        if not isinstance(value, list):
            raise BundleError(f"{where}: expected a list")
        return value
    if kind == "dict":
        if not isinstance(value, dict):
            raise BundleError(f"{where}: expected an object")
        return value
    raise AssertionError(kind)


def _fraction(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise BundleError(f"{where}: booleans are not numbers")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise BundleError(f"{where}: bad rational {value!r}") from exc
    raise BundleError(f"{where}: expected a rational as string or integer")


def _mat_from_json(obj, where: str, strict: bool) -> Mat:
    got = _expect(obj, {"rows": "int", "cols": "int", "entries": "list"}, {}, where, strict)
    rows, cols, entries = got["rows"], got["cols"], got["entries"]
    if rows < 0 or cols < 0:
        raise BundleError(f"{where}: negative shape")
    if len(entries) != rows * cols:
        raise BundleError(
            f"{where}: {len(entries)} entries for a {rows}x{cols} matrix"
        )
    grid = [
        [_fraction(entries[r * cols + c], f"{where}.entries[{r * cols + c}]") for c in range(cols)]
        for r in range(rows)
    ]
    return Mat.from_rows(grid, cols=cols)


def _mat_to_json(m: Mat) -> dict:
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [str(x) for row in m.entries for x in row],
    }


def _int_rows(value, where: str) -> list[list[int]]:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise BundleError(f"{where}: expected a list of integer rows")
    out = []
    for i, row in enumerate(value):
        cleaned = []
        for j, x in enumerate(row):
            if not isinstance(x, int) or isinstance(x, bool):
                raise BundleError(f"{where}[{i}][{j}]: expected an integer")
            cleaned.append(x)
        out.append(cleaned)
    return out


def _poly_from_json(value, where: str) -> tuple[Fraction, ...]:
    if not isinstance(value, list):
        raise BundleError(f"{where}: expected ascending coefficient list")
    return tuple(_fraction(x, f"{where}[{i}]") for i, x in enumerate(value))


# ---------------------------------------------------------------------------
# Sections.


@dataclass(frozen=True)
class Params:
    q_coh: int
    a: int
    field_q: int


@dataclass(frozen=True)
class Place:
    deg_v: int
    frob: Mat


@dataclass(frozen=True)
class RegulatorDatum:
    motivic_rank: int
    matrix: Mat


@dataclass(frozen=True)
class MotivicDatum:
    regulator: RegulatorDatum | None = None
    cycle_class: CycleDatum | None = None


@dataclass(frozen=True)
class GlobalL:
    """Global L-function plus the data its analysis needs.

    conductor = (alpha, beta) means the completed function is
    q^alpha * t^beta * z; the t-power folds into the rational function,
    the q-power only ever scales leading coefficients.
    """

    z: RatFunc
    weight_w: int
    conductor: tuple[Fraction, int] | None = None


@dataclass(frozen=True)
class Bundle:
    params: Params
    fibres: dict[str, Fibre]
    places: dict[str, Place] = field(default_factory=dict)
    motivic: dict[str, MotivicDatum] = field(default_factory=dict)
    global_l: GlobalL | None = None
    integral: AbGroupMap | None = None


# ---------------------------------------------------------------------------
# Parsing.


def _parse_fibre(obj, where: str, strict: bool) -> Fibre:
    got = _expect(
        obj,
        {
            "components": "int",
            "dim_y": "int",
            "q_v": "int",
            "strata": "list",
            "chow": "list",
            "pushforward": "list",
            "pullback": "list",
        },
        {"ii_matrices": "list", "higher_chow": "list"},
        where,
        strict,
    )
    strata = []
    for i, s in enumerate(got["strata"]):
        if not isinstance(s, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in s
        ):
            raise BundleError(f"{where}.strata[{i}]: expected a list of integers")
        strata.append(tuple(s))

    chow = {}
    for i, entry in enumerate(got["chow"]):
        e = _expect(
            entry,
            {"stratum": "list", "codim": "int", "j": "int", "dim": "int"},
            {},
            f"{where}.chow[{i}]",
            strict,
        )
        key = (tuple(e["stratum"]), e["codim"], e["j"])
        if key in chow:
            raise BundleError(f"{where}.chow[{i}]: duplicate entry for {key}")
        chow[key] = e["dim"]

    def parse_blocks(name: str) -> dict:
        blocks = {}
        for i, entry in enumerate(got[name]):
            e = _expect(
                entry,
                {
                    "stratum": "list",
                    "position": "int",
                    "codim": "int",
                    "j": "int",
                    "matrix": "dict",
                },
                {},
                f"{where}.{name}[{i}]",
                strict,
            )
            key = (tuple(e["stratum"]), e["position"], e["codim"], e["j"])
            if key in blocks:
                raise BundleError(f"{where}.{name}[{i}]: duplicate entry for {key}")
            blocks[key] = _mat_from_json(e["matrix"], f"{where}.{name}[{i}].matrix", strict)
        return blocks

    pushforward = parse_blocks("pushforward")
    pullback = parse_blocks("pullback")

    ii_matrices = {}
    if got["ii_matrices"] is not None:
        for i, entry in enumerate(got["ii_matrices"]):
            e = _expect(
                entry,
                {"codim": "int", "j": "int", "matrix": "dict"},
                {},
                f"{where}.ii_matrices[{i}]",
                strict,
            )
            ii_matrices[(e["codim"], e["j"])] = _mat_from_json(
                e["matrix"], f"{where}.ii_matrices[{i}].matrix", strict
            )

    higher_chow = {}
    if got["higher_chow"] is not None:
        for i, entry in enumerate(got["higher_chow"]):
            e = _expect(
                entry,
                {"codim": "int", "j": "int", "dim": "int"},
                {},
                f"{where}.higher_chow[{i}]",
                strict,
            )
            higher_chow[(e["codim"], e["j"])] = e["dim"]

    try:
        return Fibre(
            components=got["components"],
            dim_y=got["dim_y"],
            q_v=got["q_v"],
            strata=tuple(strata),
            chow=chow,
            pushforward=pushforward,
            pullback=pullback,
            ii_matrices=ii_matrices,
            higher_chow=higher_chow,
        )
    except DescriptorError as exc:
        raise BundleError(f"{where}: {exc}") from exc


def _parse_group(obj, where: str, strict: bool) -> FPAbelianGroup:
    got = _expect(obj, {"generators": "int", "relations": "list"}, {}, where, strict)
    rows = _int_rows(got["relations"], f"{where}.relations")
    if not rows:
        rows = [[] for _ in range(got["generators"])]
    return FPAbelianGroup.make(got["generators"], rows)


def loads(text: str, strict: bool = True) -> Bundle:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleError(f"not valid JSON: {exc}") from exc

    top = _expect(
        data,
        {"params": "dict", "fibres": "dict"},
        {"places": "dict", "motivic": "dict", "global": "dict", "integral": "dict"},
        "bundle",
        strict,
    )

    p = _expect(
        top["params"],
        {"q_coh": "int", "a": "int", "field_q": "int"},
        {},
        "params",
        strict,
    )
    if not is_prime_power(p["field_q"]):
        raise BundleError(f"params.field_q: {p['field_q']} is not a prime power")
    params = Params(q_coh=p["q_coh"], a=p["a"], field_q=p["field_q"])

    fibres = {}
    for name in sorted(top["fibres"]):
        fibres[name] = _parse_fibre(top["fibres"][name], f"fibres.{name}", strict)
    if not fibres:
        raise BundleError("fibres: at least one marked place is required")

    places = {}
    if top["places"] is not None:
        for name in sorted(top["places"]):
            e = _expect(
                top["places"][name],
                {"deg_v": "int", "frob": "list"},
                {},
                f"places.{name}",
                strict,
            )
            if e["deg_v"] < 1:
                raise BundleError(f"places.{name}.deg_v: must be positive")
            rows = e["frob"]
            n = len(rows)
            grid = []
            for i, row in enumerate(rows):
                if not isinstance(row, list) or len(row) != n:
                    raise BundleError(f"places.{name}.frob: expected a square matrix")
                grid.append(
                    [_fraction(x, f"places.{name}.frob[{i}][{j}]") for j, x in enumerate(row)]
                )
            places[name] = Place(deg_v=e["deg_v"], frob=Mat.from_rows(grid, cols=n))
        if set(places) != set(fibres):
            raise BundleError(
                "places: must list exactly the marked places "
                f"(fibres: {sorted(fibres)}, places: {sorted(places)})"
            )
        for name, place in places.items():
            expected = params.field_q**place.deg_v
            if fibres[name].q_v != expected:
                raise BundleError(
                    f"fibres.{name}.q_v: {fibres[name].q_v} != field_q^deg_v = {expected}"
                )

    motivic = {}
    if top["motivic"] is not None:
        for name in sorted(top["motivic"]):
            if name not in fibres:
                raise BundleError(f"motivic.{name}: no such marked place")
            e = _expect(
                top["motivic"][name],
                {},
                {"regulator": "dict", "cycle_class": "dict"},
                f"motivic.{name}",
                strict,
            )
            regulator = None
            if e["regulator"] is not None:
                r = _expect(
                    e["regulator"],
                    {"motivic_rank": "int", "matrix": "dict"},
                    {},
                    f"motivic.{name}.regulator",
                    strict,
                )
                matrix = _mat_from_json(r["matrix"], f"motivic.{name}.regulator.matrix", strict)
                if matrix.cols != r["motivic_rank"]:
                    raise BundleError(
                        f"motivic.{name}.regulator: matrix has {matrix.cols} columns, "
                        f"declared rank {r['motivic_rank']}"
                    )
                regulator = RegulatorDatum(motivic_rank=r["motivic_rank"], matrix=matrix)
            cycle_class = None
            if e["cycle_class"] is not None:
                c = _expect(
                    e["cycle_class"],
                    {"b_rank": "int", "xi": "dict"},
                    {"tau": "dict"},
                    f"motivic.{name}.cycle_class",
                    strict,
                )
                xi = _mat_from_json(c["xi"], f"motivic.{name}.cycle_class.xi", strict)
                if xi.cols != c["b_rank"]:
                    raise BundleError(
                        f"motivic.{name}.cycle_class: xi has {xi.cols} columns, "
                        f"declared rank {c['b_rank']}"
                    )
                tau = None
                if c["tau"] is not None:
                    tau = _mat_from_json(c["tau"], f"motivic.{name}.cycle_class.tau", strict)
                cycle_class = CycleDatum(b_rank=c["b_rank"], xi=xi, tau=tau)
            motivic[name] = MotivicDatum(regulator=regulator, cycle_class=cycle_class)

    global_l = None
    if top["global"] is not None:
        g = _expect(
            top["global"],
            {"z_num": "list", "z_den": "list", "weight_w": "int"},
            {"conductor": "list"},
            "global",
            strict,
        )
        num = _poly_from_json(g["z_num"], "global.z_num")
        den = _poly_from_json(g["z_den"], "global.z_den")
        try:
            z = RatFunc.make(num, den)
        except (ValueError, ZeroDivisionError) as exc:
            raise BundleError(f"global: bad rational function: {exc}") from exc
        conductor = None
        if g["conductor"] is not None:
            pair = g["conductor"]
            if len(pair) != 2:
                raise BundleError("global.conductor: expected [alpha, beta]")
            alpha = _fraction(pair[0], "global.conductor[0]")
            if not isinstance(pair[1], int) or isinstance(pair[1], bool):
                raise BundleError("global.conductor[1]: expected an integer")
            conductor = (alpha, pair[1])
        global_l = GlobalL(z=z, weight_w=g["weight_w"], conductor=conductor)

    integral = None
    if top["integral"] is not None:
        e = _expect(
            top["integral"],
            {"source": "dict", "target": "dict", "matrix": "list"},
            {},
            "integral",
            strict,
        )
        source = _parse_group(e["source"], "integral.source", strict)
        target = _parse_group(e["target"], "integral.target", strict)
        matrix = _int_rows(e["matrix"], "integral.matrix")
        if not matrix:
            matrix = [[] for _ in range(target.generators)]
        try:
            integral = AbGroupMap.make(source, target, matrix)
        except ValueError as exc:
            raise BundleError(f"integral: {exc}") from exc

    return Bundle(
        params=params,
        fibres=fibres,
        places=places,
        motivic=motivic,
        global_l=global_l,
        integral=integral,
    )


def load(path, strict: bool = True) -> Bundle:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read(), strict=strict)


# ---------------------------------------------------------------------------
# Serialization (canonical: sorted keys, stable entry order).


def _fibre_to_json(f: Fibre) -> dict:
    out = {
        "components": f.components,
        "dim_y": f.dim_y,
        "q_v": f.q_v,
        "strata": [list(s) for s in sorted(f.strata, key=lambda s: (len(s), s))],
        "chow": [
            {"stratum": list(k[0]), "codim": k[1], "j": k[2], "dim": v}
            for k, v in sorted(f.chow.items())
        ],
        "pushforward": [
            {
                "stratum": list(k[0]),
                "position": k[1],
                "codim": k[2],
                "j": k[3],
                "matrix": _mat_to_json(v),
            }
            for k, v in sorted(f.pushforward.items())
        ],
        "pullback": [
            {
                "stratum": list(k[0]),
                "position": k[1],
                "codim": k[2],
                "j": k[3],
                "matrix": _mat_to_json(v),
            }
            for k, v in sorted(f.pullback.items())
        ],
    }
    if f.ii_matrices:
        out["ii_matrices"] = [
            {"codim": k[0], "j": k[1], "matrix": _mat_to_json(v)}
            for k, v in sorted(f.ii_matrices.items())
        ]
    if f.higher_chow:
        out["higher_chow"] = [
            {"codim": k[0], "j": k[1], "dim": v}
            for k, v in sorted(f.higher_chow.items())
        ]
    return out


def _group_to_json(g: FPAbelianGroup) -> dict:
    return {
        "generators": g.generators,
        "relations": [list(row) for row in g.relations],
    }


def dumps(b: Bundle) -> str:
    data: dict = {
        "params": {
            "q_coh": b.params.q_coh,
            "a": b.params.a,
            "field_q": b.params.field_q,
        },
        "fibres": {name: _fibre_to_json(f) for name, f in sorted(b.fibres.items())},
    }
    if b.places:
        data["places"] = {
            name: {
                "deg_v": p.deg_v,
                "frob": [[str(x) for x in row] for row in p.frob.entries],
            }
            for name, p in sorted(b.places.items())
        }
    if b.motivic:
        section = {}
        for name, m in sorted(b.motivic.items()):
            entry = {}
            if m.regulator is not None:
                entry["regulator"] = {
                    "motivic_rank": m.regulator.motivic_rank,
                    "matrix": _mat_to_json(m.regulator.matrix),
                }
            if m.cycle_class is not None:
                cc = {
                    "b_rank": m.cycle_class.b_rank,
                    "xi": _mat_to_json(m.cycle_class.xi),
                }
                if m.cycle_class.tau is not None:
                    cc["tau"] = _mat_to_json(m.cycle_class.tau)
                entry["cycle_class"] = cc
            section[name] = entry
        data["motivic"] = section
    if b.global_l is not None:
        g: dict = {
            "z_num": [str(x) for x in b.global_l.z.num],
            "z_den": [str(x) for x in b.global_l.z.den],
            "weight_w": b.global_l.weight_w,
        }
        if b.global_l.conductor is not None:
            alpha, beta = b.global_l.conductor
            g["conductor"] = [str(alpha), beta]
        data["global"] = g
    if b.integral is not None:
        data["integral"] = {
            "source": _group_to_json(b.integral.source),
            "target": _group_to_json(b.integral.target),
            "matrix": [list(row) for row in b.integral.matrix],
        }
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def save(b: Bundle, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(b))
