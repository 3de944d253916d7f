"""Instance files: a ground set, one zoo function, named points and sets.

Files are YAML::

    format_version: 1
    ground_set: {n: 3, labels: [a, b, c]}
    function:
      family: graph_cut
      edges: [[0, 1, 1.0], [1, 2, 1.0], [0, 2, 1.0]]
      offset: 0.0
      flags: {submodular: true}     # optional; merged onto family defaults
    points:
      g: [1.0, 1.0, 1.0]
    sets:
      X: [0]

Element indices are 0-based everywhere; sets are sorted index lists.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .core import (
    ConcaveOverModular,
    Coverage,
    Flags,
    GraphCut,
    GroundSet,
    MatroidRank,
    Modular,
    SetFunction,
    SquaredCardinality,
    SubmodError,
    ValidationReport,
    check_declared_flags,
    exhaustive_cap,
)

FORMAT_VERSION = 1
FLAG_NAMES = ("submodular", "monotone", "normalized", "m_natural_concave")


class InstanceError(SubmodError):
    code = "parse"


class FlagValidationError(SubmodError):
    code = "validation"

    def __init__(self, reports: list[ValidationReport]):
        self.reports = reports
        r = reports[0]
        cx = r.counterexample.to_dict() if r.counterexample else {}
        super().__init__(f"declared flag failed {r.property} check: {cx}")


@dataclass(frozen=True)
class InstanceFile:
    ground_set: GroundSet
    function: SetFunction
    points: dict[str, tuple[float, ...]] = field(default_factory=dict)
    sets: dict[str, tuple[int, ...]] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.ground_set.n

    def digest(self) -> str:
        text = json.dumps(to_record(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _req(rec: dict, key: str, where: str):
    if not isinstance(rec, dict) or key not in rec:
        raise InstanceError(f"missing field {where}.{key}")
    return rec[key]


def _float_list(v, where: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in v)
    except (TypeError, ValueError):
        raise InstanceError(f"{where} must be a list of numbers") from None


def _index_list(v, n: int, where: str) -> tuple[int, ...]:
    try:
        idx = [int(x) for x in v]
    except (TypeError, ValueError):
        raise InstanceError(f"{where} must be a list of element indices") from None
    if any(not 0 <= j < n for j in idx):
        raise InstanceError(f"{where} has an index outside 0..{n - 1}")
    return tuple(sorted(set(idx)))


def function_from_record(rec: dict, n: int) -> SetFunction:
    family = _req(rec, "family", "function")
    offset = float(rec.get("offset", 0.0))
    extra = set(rec) - {"family", "offset", "flags"}
    try:
        if family == "modular":
            f = Modular(_float_list(_req(rec, "weights", "function"), "function.weights"), offset)
        elif family == "coverage":
            covers = _req(rec, "covers", "function")
            iw = rec.get("item_weights")
            f = Coverage(
                tuple(tuple(int(i) for i in c) for c in covers),
                None if iw is None else _float_list(iw, "function.item_weights"),
                offset,
            )
        elif family == "graph_cut":
            edges = tuple(tuple(e) for e in _req(rec, "edges", "function"))
            f = GraphCut(n, edges, offset)
        elif family == "concave_over_modular":
            f = ConcaveOverModular(
                _req(rec, "shape", "function"),
                _float_list(_req(rec, "weights", "function"), "function.weights"),
                rec.get("budget"),
                offset,
            )
        elif family == "matroid_rank":
            kind = _req(rec, "kind", "function")
            if kind == "uniform":
                f = MatroidRank.uniform(n, int(_req(rec, "rank", "function")), offset=offset)
            else:
                f = MatroidRank(
                    n,
                    kind,
                    blocks=tuple(tuple(int(j) for j in b) for b in _req(rec, "blocks", "function")),
                    capacities=tuple(int(c) for c in _req(rec, "capacities", "function")),
                    offset=offset,
                )
        elif family == "squared_cardinality":
            f = SquaredCardinality(n, offset)
        else:
            raise InstanceError(f"function.family: unknown family {family!r}")
    except InstanceError:
        raise
    except SubmodError as e:
        raise InstanceError(f"function: {e}") from None
    except (TypeError, ValueError, IndexError) as e:
        raise InstanceError(f"function: malformed parameters for {family}: {e}") from None

    allowed = {
        "modular": {"weights"},
        "coverage": {"covers", "item_weights"},
        "graph_cut": {"edges"},
        "concave_over_modular": {"shape", "weights", "budget"},
        "matroid_rank": {"kind", "rank", "blocks", "capacities"},
        "squared_cardinality": set(),
    }[family]
    if extra - allowed:
        raise InstanceError(f"function: unexpected fields {sorted(extra - allowed)} for {family}")
    if f.n != n:
        raise InstanceError(f"function acts on {f.n} elements but ground_set.n is {n}")

    if "flags" in rec:
        flags = rec["flags"]
        if not isinstance(flags, dict) or set(flags) - set(FLAG_NAMES):
            raise InstanceError(f"function.flags must map a subset of {FLAG_NAMES} to booleans")
        merged = {**f.flags.to_dict(), **{k: bool(v) for k, v in flags.items()}}
        f = replace(f, declared=Flags(**merged))
    return f


def function_to_record(f: SetFunction) -> dict:
    rec: dict = {"family": f.family}
    if isinstance(f, Modular):
        rec["weights"] = list(f.weights)
    elif isinstance(f, Coverage):
        rec["covers"] = [list(c) for c in f.covers]
        rec["item_weights"] = list(f.item_weights)
    elif isinstance(f, GraphCut):
        rec["edges"] = [[u, v, w] for u, v, w in f.edges]
    elif isinstance(f, ConcaveOverModular):
        rec["shape"] = f.shape
        rec["weights"] = list(f.weights)
        if f.budget is not None:
            rec["budget"] = f.budget
    elif isinstance(f, MatroidRank):
        rec["kind"] = f.kind
        if f.kind == "uniform":
            rec["rank"] = f.rank
        else:
            rec["blocks"] = [list(b) for b in f.blocks]
            rec["capacities"] = list(f.capacities)
    elif not isinstance(f, SquaredCardinality):
        raise InstanceError(f"family {f.family!r} has no file representation")
    rec["offset"] = f.offset
    if f.declared is not None:
        rec["flags"] = f.declared.to_dict()
    return rec


def from_record(rec, trust_flags: bool = False, cap: int | None = None) -> InstanceFile:
    if not isinstance(rec, dict):
        raise InstanceError("instance must be a mapping")
    version = rec.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise InstanceError(f"unsupported format_version {version!r}")
    extra = set(rec) - {"format_version", "ground_set", "function", "points", "sets"}
    if extra:
        raise InstanceError(f"unexpected top-level fields {sorted(extra)}")
    gs = _req(rec, "ground_set", "instance")
    try:
        ground = GroundSet(int(_req(gs, "n", "ground_set")), gs.get("labels"))
    except SubmodError as e:
        raise InstanceError(f"ground_set: {e}") from None
    n = ground.n
    f = function_from_record(_req(rec, "function", "instance"), n)

    points = {}
    for name, v in (rec.get("points") or {}).items():
        p = _float_list(v, f"points.{name}")
        if len(p) != n:
            raise InstanceError(f"points.{name} has {len(p)} coordinates, expected {n}")
        points[str(name)] = p
    sets = {str(name): _index_list(v, n, f"sets.{name}") for name, v in (rec.get("sets") or {}).items()}

    inst = InstanceFile(ground, f, points, sets)
    limit = exhaustive_cap() if cap is None else cap
    if not trust_flags and n <= limit:
        failed = check_declared_flags(f, cap=limit)
        if failed:
            raise FlagValidationError(failed)
    return inst


def to_record(inst: InstanceFile) -> dict:
    gs: dict = {"n": inst.ground_set.n}
    if inst.ground_set.labels is not None:
        gs["labels"] = list(inst.ground_set.labels)
    rec = {"format_version": FORMAT_VERSION, "ground_set": gs, "function": function_to_record(inst.function)}
    if inst.points:
        rec["points"] = {k: list(v) for k, v in inst.points.items()}
    if inst.sets:
        rec["sets"] = {k: list(v) for k, v in inst.sets.items()}
    return rec


def parse_instance(source, trust_flags: bool = False, cap: int | None = None) -> InstanceFile:
    """Parse an instance from a path or from YAML text."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).is_file()):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    try:
        rec = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise InstanceError(f"YAML error{where}: {e.problem}") from None
    return from_record(rec, trust_flags, cap)


def serialize_instance(inst: InstanceFile) -> str:
    return yaml.safe_dump(to_record(inst), sort_keys=False, default_flow_style=None)
