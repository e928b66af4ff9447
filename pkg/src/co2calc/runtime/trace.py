"""Running a system: traces under a scheduling strategy, and their JSON form."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

from ..errors import Co2Error
from ..terms import ContractModel
from .congruence import Config
from .reduction import Reducer, Step

# chooser(enabled steps, step number) -> index into the list, or None to stop
Chooser = Callable[[list[Step], int], "int | None"]


def step_json(n: int, step: Step, model: ContractModel) -> dict:
    from .. import pretty

    out: dict = {"step": n, "rule": step.rule, "agents": [str(a) for a in step.agents]}
    if step.session is not None:
        out["session"] = str(step.session)
    if step.label is not None:
        out["label"] = [f"{who} says {model.pretty_atom(a)}" for who, a in step.label.entries]
    if step.sigma:
        out["sigma"] = {str(k): str(v) for k, v in sorted(step.sigma.items())}
    out["state"] = pretty.system(step.target, model, with_restricted=True)
    return out


def first_strategy() -> Chooser:
    return lambda steps, n: 0


def random_strategy(seed: int) -> Chooser:
    rng = random.Random(seed)
    return lambda steps, n: rng.randrange(len(steps))


def index_strategy(indices: Iterable[int]) -> Chooser:
    """Replay a list of choices; the run stops when the list is used up."""
    it = iter(list(indices))

    def choose(steps, n):
        i = next(it, None)
        if i is None:
            return None
        if not 0 <= i < len(steps):
            raise Co2Error(f"step {n}: choice {i} out of range (0..{len(steps) - 1})")
        return i

    return choose


def parse_strategy(spec: str) -> Chooser:
    """``first``, ``random:SEED`` or ``indices:0,1,0``."""
    if spec == "first":
        return first_strategy()
    if spec.startswith("random:"):
        return random_strategy(int(spec.split(":", 1)[1]))
    if spec.startswith("indices:"):
        body = spec.split(":", 1)[1]
        return index_strategy(int(t) for t in body.split(",") if t.strip())
    raise Co2Error(f"unknown strategy {spec!r} (use first, random:SEED or indices:I,J,...)")


@dataclass
class TraceRecord:
    initial: Config
    steps: list[Step] = field(default_factory=list)
    stuck: bool = False
    max_steps_exceeded: bool = False

    @property
    def final(self) -> Config:
        return self.steps[-1].target if self.steps else self.initial

    @property
    def rules(self) -> list[str]:
        return [s.rule for s in self.steps]

    def to_json(self, model: ContractModel) -> dict:
        from .. import pretty

        return {
            "initial": pretty.system(self.initial, model, with_restricted=True),
            "steps": [step_json(i + 1, s, model) for i, s in enumerate(self.steps)],
            "final": pretty.system(self.final, model, with_restricted=True),
            "stuck": self.stuck,
            "maxStepsExceeded": self.max_steps_exceeded,
        }


def run_trace(cfg: Config, reducer: Reducer, strategy: Chooser | str = "first",
              max_steps: int = 1000) -> TraceRecord:
    choose = parse_strategy(strategy) if isinstance(strategy, str) else strategy
    rec = TraceRecord(cfg)
    cur = cfg
    while True:
        enabled = reducer.steps(cur)
        if not enabled:
            rec.stuck = True
            return rec
        if len(rec.steps) >= max_steps:
            rec.max_steps_exceeded = True
            return rec
        i = choose(enabled, len(rec.steps) + 1)
        if i is None:
            return rec
        rec.steps.append(enabled[i])
        cur = enabled[i].target
