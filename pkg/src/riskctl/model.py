"""Domain types of the risk-modelling language, include resolution, and
static validation.

A parsed `Model` is immutable by convention: `resolve_includes` returns a
new model, and nothing in the toolchain mutates a model after validation,
so models can be shared freely across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .diagnostics import Diagnostic, ModelError, SourcePos
from .gradients import GradientMatrix

MATRIX_DIMENSIONS = ("safmod", "act")

# Mode attributes carrying performance estimates, in emission order.
MODE_PARAMS = ("disruption", "nuisance", "effort")


@dataclass(frozen=True)
class ModeRef:
    """Reference to a mode, optionally qualified with a namespace tag.

    `namespace` is None for a bare name, "" for a dotted ref with an empty
    prefix (`.HRWres`), and the tag text otherwise (`SHARE.HRWdet`).  The
    tag is stored uninterpreted.
    """

    name: str
    namespace: str | None = None

    def __str__(self) -> str:
        if self.namespace is None:
            return self.name
        return f"{self.namespace}.{self.name}"


@dataclass
class Activity:
    name: str
    includes: list[str] = field(default_factory=list)
    successors: list[str] = field(default_factory=list)
    factors: list[str] = field(default_factory=list)
    pos: SourcePos | None = field(default=None, compare=False)


@dataclass
class RiskFactor:
    name: str
    desc: str = ""
    guard: str | None = None
    detected_by: list[ModeRef] = field(default_factory=list)
    mitigated_by: list[ModeRef] = field(default_factory=list)
    resumed_by: list[ModeRef] = field(default_factory=list)
    requires: list[str] = field(default_factory=list)
    prevents: list[str] = field(default_factory=list)
    mit_prevents_mit: list[str] = field(default_factory=list)
    requires_n_of: tuple[int, tuple[str, ...]] | None = None
    mis: str | None = None
    prob: float | None = None
    sev: float | None = None
    final: bool = False
    hook: str | None = None
    pos: SourcePos | None = field(default=None, compare=False)


@dataclass
class Mode:
    name: str
    desc: str = ""
    guard: str | None = None
    update: str | None = None
    target: tuple[str, str] | None = None
    embodied_by: list[str] = field(default_factory=list)
    params: dict[str, str] = field(default_factory=dict)
    pos: SourcePos | None = field(default=None, compare=False)


@dataclass
class Item:
    name: str
    kind: str  # AGENT or CONTROLLER
    valid_acts: list[str] = field(default_factory=list)
    local_vars: dict[str, str] = field(default_factory=dict)
    pos: SourcePos | None = field(default=None, compare=False)


@dataclass
class WeightRow:
    guard: str = ""
    values: dict[str, str] = field(default_factory=dict)


@dataclass
class WeightTable:
    """Per-action weights merged across all Weights blocks.

    `columns` excludes the leading `guard` column.  Missing entries are
    filled with `none` during merging so every row covers every column.
    """

    columns: list[str] = field(default_factory=list)
    rows: dict[str, WeightRow] = field(default_factory=dict)

    def merge_block(self, columns: list[str], rows: list[tuple[str, str, list[str], SourcePos | None]]) -> list[Diagnostic]:
        diags: list[Diagnostic] = []
        for col in columns:
            if col not in self.columns:
                self.columns.append(col)
        for action, guard, values, pos in rows:
            row = self.rows.setdefault(action, WeightRow())
            if row.guard and guard and row.guard != guard:
                diags.append(Diagnostic(
                    f"conflicting guards for weight row {action}: "
                    f"{row.guard!r} vs {guard!r}", pos))
            if guard:
                row.guard = guard
            for col, value in zip(columns, values):
                old = row.values.get(col)
                if old is not None and old != value:
                    diags.append(Diagnostic(
                        f"conflicting values for weight row {action}, "
                        f"column {col}: {old!r} vs {value!r}", pos))
                row.values[col] = value
        return diags

    def finalize(self) -> None:
        for row in self.rows.values():
            for col in self.columns:
                row.values.setdefault(col, "none")


@dataclass
class Model:
    activities: dict[str, Activity] = field(default_factory=dict)
    factors: dict[str, RiskFactor] = field(default_factory=dict)
    modes: dict[str, Mode] = field(default_factory=dict)
    items: dict[str, Item] = field(default_factory=dict)
    matrices: dict[str, GradientMatrix] = field(default_factory=dict)
    weights: WeightTable = field(default_factory=WeightTable)
    application: dict[str, str] = field(default_factory=dict)
    application_name: str = "app"
    includes_resolved: bool = field(default=False, compare=False)

    @property
    def controller_item(self) -> Item | None:
        controllers = [i for i in self.items.values() if i.kind == "CONTROLLER"]
        if len(controllers) == 1:
            return controllers[0]
        return None


def resolve_includes(model: Model) -> Model:
    """Propagate successors and owned factors along `include` edges.

    Each activity ends up with the union of its own and all transitively
    included activities' successors/factors, duplicates removed, first-seen
    order preserved.  Raises ModelError on an include cycle, naming it.
    """

    order: list[str] = []
    state: dict[str, int] = {}  # 0 visiting, 1 done
    stack: list[str] = []

    def visit(name: str) -> None:
        if state.get(name) == 1:
            return
        if state.get(name) == 0:
            cycle = stack[stack.index(name):] + [name]
            raise ModelError("include cycle: " + " -> ".join(cycle),
                             model.activities[name].pos)
        state[name] = 0
        stack.append(name)
        act = model.activities.get(name)
        if act is not None:
            for inc in act.includes:
                if inc in model.activities:
                    visit(inc)
        stack.pop()
        state[name] = 1
        order.append(name)

    for name in model.activities:
        visit(name)

    resolved: dict[str, Activity] = {}
    for name in order:
        act = model.activities[name]
        successors = list(act.successors)
        factors = list(act.factors)
        for inc in act.includes:
            base = resolved.get(inc)
            if base is None:
                continue
            successors += [s for s in base.successors if s not in successors]
            factors += [f for f in base.factors if f not in factors]
        resolved[name] = replace(act, successors=successors, factors=factors)

    new_activities = {name: resolved[name] for name in model.activities}
    return replace(model, activities=new_activities, includes_resolved=True)


_NUMBER_RE = re.compile(r"^-?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$")


def _weight_value_names(expr: str) -> list[str]:
    """Identifiers occurring in a weight value expression."""
    return [t for t in re.findall(r"[A-Za-z_][A-Za-z0-9_]*", expr)]


def validate(model: Model) -> list[Diagnostic]:
    """Check all model invariants; returns diagnostics sorted by position.

    An empty result means the model is well-formed.  Controller presence is
    not checked here (only synthesis requires it).
    """

    diags: list[Diagnostic] = []

    def err(msg: str, pos: SourcePos | None) -> None:
        diags.append(Diagnostic(msg, pos))

    for act in model.activities.values():
        for inc in act.includes:
            if inc not in model.activities:
                err(f"unresolved include {inc} in activity {act.name}", act.pos)
        for suc in act.successors:
            if suc not in model.activities:
                err(f"unresolved successor {suc} in activity {act.name}", act.pos)
        for fac in act.factors:
            if fac not in model.factors:
                err(f"unresolved hazard {fac} in activity {act.name}", act.pos)

    try:
        resolve_includes(model)
    except ModelError as exc:
        diags.append(Diagnostic(str(exc).split(": ", 1)[-1]
                                if exc.pos else str(exc), exc.pos))

    for fac in model.factors.values():
        for attr, names in (("requires", fac.requires),
                            ("prevents", fac.prevents),
                            ("mitPreventsMit", fac.mit_prevents_mit)):
            for name in names:
                if name not in model.factors:
                    err(f"unresolved factor reference {name} in {attr} of {fac.name}", fac.pos)
                if name == fac.name:
                    err(f"factor {fac.name} depends on itself in {attr}", fac.pos)
        if fac.requires_n_of is not None:
            n, names = fac.requires_n_of
            if not 1 <= n <= len(names):
                err(f"requiresNOf threshold {n} outside 1..{len(names)} in {fac.name}", fac.pos)
            for name in names:
                if name not in model.factors:
                    err(f"unresolved factor reference {name} in requiresNOf of {fac.name}", fac.pos)
                if name == fac.name:
                    err(f"factor {fac.name} depends on itself in requiresNOf", fac.pos)
        for attr, refs in (("detectedBy", fac.detected_by),
                           ("mitigatedBy", fac.mitigated_by),
                           ("resumedBy", fac.resumed_by)):
            for ref in refs:
                mode = model.modes.get(ref.name)
                if mode is None:
                    err(f"unresolved mode {ref.name} in {attr} of {fac.name}", fac.pos)
                    continue
                if attr == "mitigatedBy" and mode.target is None and mode.update is None:
                    err(f"mode {mode.name} used in mitigatedBy has neither target nor update", mode.pos)
                if attr == "detectedBy" and mode.guard is None:
                    err(f"mode {mode.name} used in detectedBy has no guard", mode.pos)
        if (fac.prob is not None) != (fac.mis is not None):
            if fac.prob is not None:
                err(f"prob without mis in factor {fac.name}", fac.pos)
            else:
                err(f"mis without prob in factor {fac.name}", fac.pos)
        if fac.prob is not None and not 0.0 <= fac.prob <= 1.0:
            err(f"prob {fac.prob} outside [0,1] in factor {fac.name}", fac.pos)
        if fac.sev is not None and fac.sev < 0:
            err(f"negative sev in factor {fac.name}", fac.pos)
        if fac.mis is not None and fac.mis == "":
            err(f"empty mis action label in factor {fac.name}", fac.pos)
        if fac.hook is not None and fac.hook not in model.items:
            err(f"unresolved hook item {fac.hook} in factor {fac.name}", fac.pos)

    for mode in model.modes.values():
        for item in mode.embodied_by:
            if item not in model.items:
                err(f"unresolved item {item} in embodiedBy of mode {mode.name}", mode.pos)
        for param, value in mode.params.items():
            try:
                num = float(value)
            except ValueError:
                err(f"non-numeric {param} in mode {mode.name}", mode.pos)
                continue
            if num < 0:
                err(f"negative {param} in mode {mode.name}", mode.pos)

    for item in model.items.values():
        for act in item.valid_acts:
            if act not in model.activities:
                err(f"unresolved activity {act} in validActs of {item.name}", item.pos)

    for dim in model.matrices:
        if dim not in MATRIX_DIMENSIONS:
            err(f"unknown matrix dimension {dim} (expected one of {', '.join(MATRIX_DIMENSIONS)})", None)

    for action, row in model.weights.rows.items():
        for col, value in row.values.items():
            if value == "none" or _NUMBER_RE.match(value):
                continue
            unknown = [n for n in _weight_value_names(value)
                       if n not in model.application]
            if unknown:
                err(f"weight value {value!r} for {action}/{col} references "
                    f"undefined name {unknown[0]}", None)

    diags.sort(key=Diagnostic.sort_key)
    return diags
