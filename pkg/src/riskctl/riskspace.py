"""Abstract risk state machine over factor life-cycle phases.

Each factor cycles through inact -> act -> mit -> sfd (safed: handled,
safety function withdrawn, pending re-arm) and back, with an absorbing
mis phase for factors that can end in a mishap.  The module provides the
event rules, exhaustive reachability (`explore`), and a seeded symbolic
simulation of occurrence and handling.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .diagnostics import EngineError, ModelError
from .model import Model, RiskFactor


class Phase(Enum):
    INACT = "inact"
    ACT = "act"
    MIT = "mit"
    SFD = "sfd"
    MIS = "mis"

    def __str__(self) -> str:
        return self.value


PHASE_ORDER = (Phase.INACT, Phase.ACT, Phase.MIT, Phase.SFD, Phase.MIS)


@dataclass(frozen=True)
class RiskState:
    names: tuple[str, ...]
    values: tuple[Phase, ...]

    @classmethod
    def initial(cls, model: Model) -> RiskState:
        names = tuple(model.factors)
        return cls(names, tuple(Phase.INACT for _ in names))

    @property
    def phases(self) -> dict[str, Phase]:
        return dict(zip(self.names, self.values))

    def phase(self, name: str) -> Phase:
        return self.values[self.names.index(name)]

    def with_phase(self, name: str, phase: Phase) -> RiskState:
        i = self.names.index(name)
        return RiskState(self.names, self.values[:i] + (phase,) + self.values[i + 1:])

    def __str__(self) -> str:
        inner = ",".join(f"{n}={p}" for n, p in zip(self.names, self.values))
        return f"({inner})"


_EVENT_KINDS = ("endangerment", "mitigation", "resumption", "settle", "mishap")


@dataclass(frozen=True)
class RiskEvent:
    kind: str
    factor: str
    option: int | None = None

    def __str__(self) -> str:
        if self.kind == "mitigation":
            return f"mitigation({self.factor},{self.option})"
        return f"{self.kind}({self.factor})"

    def sort_key(self) -> tuple:
        return (_EVENT_KINDS.index(self.kind), self.factor,
                -1 if self.option is None else self.option)


def _endangerment_enabled(factor: RiskFactor, state: RiskState, model: Model) -> bool:
    phases = state.phases
    if phases[factor.name] not in (Phase.INACT, Phase.SFD):
        return False
    if any(phases.get(g) != Phase.ACT for g in factor.requires):
        return False
    for other in model.factors.values():
        if factor.name in other.prevents and phases[other.name] == Phase.ACT:
            return False
    if factor.requires_n_of is not None:
        n, names = factor.requires_n_of
        if sum(1 for g in names if phases.get(g) == Phase.ACT) < n:
            return False
    return True


def _mitigation_enabled(factor: RiskFactor, state: RiskState, model: Model) -> bool:
    phases = state.phases
    if phases[factor.name] != Phase.ACT:
        return False
    for other in model.factors.values():
        if factor.name in other.mit_prevents_mit and phases[other.name] == Phase.MIT:
            return False
    return True


def enabled_events(state: RiskState, model: Model) -> list[RiskEvent]:
    """All events enabled in `state`, in canonical (deterministic) order."""

    events: list[RiskEvent] = []
    for factor in model.factors.values():
        phase = state.phase(factor.name)
        if _endangerment_enabled(factor, state, model):
            events.append(RiskEvent("endangerment", factor.name))
        if _mitigation_enabled(factor, state, model):
            for i in range(len(factor.mitigated_by)):
                events.append(RiskEvent("mitigation", factor.name, i))
        if phase == Phase.MIT:
            events.append(RiskEvent("resumption", factor.name))
        if phase == Phase.SFD:
            events.append(RiskEvent("settle", factor.name))
        if phase == Phase.ACT and factor.mis is not None:
            events.append(RiskEvent("mishap", factor.name))
    events.sort(key=RiskEvent.sort_key)
    return events


_STEP_TARGET = {
    "endangerment": Phase.ACT,
    "mitigation": Phase.MIT,
    "resumption": Phase.SFD,
    "settle": Phase.INACT,
    "mishap": Phase.MIS,
}


def step(state: RiskState, event: RiskEvent, model: Model | None = None) -> RiskState:
    """Apply `event`; all other factors keep their phase.

    When `model` is given the event is checked against enabled_events and
    an EngineError is raised if it is not enabled.
    """

    if event.kind not in _STEP_TARGET:
        raise EngineError(f"unknown event kind {event.kind}")
    if model is not None and event not in enabled_events(state, model):
        raise EngineError(f"event {event} not enabled in {state}")
    return state.with_phase(event.factor, _STEP_TARGET[event.kind])


@dataclass
class RiskLts:
    states: list[RiskState]
    transitions: list[tuple[int, RiskEvent, int]]
    initial: int = 0
    index: dict[RiskState, int] = field(default_factory=dict, repr=False)


def explore(model: Model, state_cap: int = 10**6) -> RiskLts:
    """BFS closure of `step` over `enabled_events` from the all-inact state.

    State numbering is deterministic: BFS order with the canonical event
    order as tie-break.
    """

    if any(f for f in model.factors.values()
           if f.requires_n_of and not 1 <= f.requires_n_of[0] <= len(f.requires_n_of[1])):
        raise ModelError("requiresNOf threshold out of range")
    init = RiskState.initial(model)
    states = [init]
    index = {init: 0}
    transitions: list[tuple[int, RiskEvent, int]] = []
    queue = deque([0])
    while queue:
        src = queue.popleft()
        for event in enabled_events(states[src], model):
            succ = step(states[src], event)
            dst = index.get(succ)
            if dst is None:
                if len(states) >= state_cap:
                    raise EngineError(f"risk state cap exceeded ({state_cap})")
                dst = len(states)
                index[succ] = dst
                states.append(succ)
                queue.append(dst)
            transitions.append((src, event, dst))
    return RiskLts(states, transitions, 0, index)


@dataclass
class Trace:
    states: list[RiskState]
    events: list[RiskEvent]

    def render(self) -> str:
        if not self.events:
            return str(self.states[0]) + "\n"
        lines = []
        for i, event in enumerate(self.events):
            lines.append(f"{self.states[i]} --{event}--> {self.states[i + 1]}")
        return "\n".join(lines) + "\n"


def simulate(model: Model, seed: int, steps: int) -> Trace:
    """Pseudo-random walk choosing uniformly among enabled events.

    Uses a dedicated Mersenne-Twister stream seeded with `seed`; identical
    seeds give identical traces.  Stops early when nothing is enabled.
    """

    rng = random.Random(seed)
    state = RiskState.initial(model)
    trace = Trace([state], [])
    for _ in range(steps):
        events = enabled_events(state, model)
        if not events:
            break
        event = events[rng.randrange(len(events))]
        state = step(state, event)
        trace.states.append(state)
        trace.events.append(event)
    return trace


def export_risk_dot(lts: RiskLts) -> str:
    """DOT digraph of a risk LTS; deterministic ordering, initial state
    gets a doubled border."""

    lines = ["digraph riskspace {", "  rankdir=LR;"]
    for i, state in enumerate(lts.states):
        label = "\\n".join(f"{n}={p}" for n, p in zip(state.names, state.values))
        attrs = f' [label="{label}"'
        if i == lts.initial:
            attrs += ", peripheries=2"
        attrs += "]"
        lines.append(f'  "s{i}"{attrs};')
    for src, event, dst in lts.transitions:
        lines.append(f'  "s{src}" -> "s{dst}" [label="{event}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
