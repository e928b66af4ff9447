"""Surface-syntax printing of processes, systems and source files.

The output is accepted by :mod:`co2calc.parser`, and printing a parsed
term again gives the same text.
"""
from __future__ import annotations

from .runtime.congruence import Config
from .runtime.syntax import (
    Agent, Ask, Call, Choice, Definition, Do, Fuse, Latent, PDelim, PPar, Process,
    SDelim, Session, SPar, System, Tau, Tell,
)
from .terms import ContractModel


def prefix(p, model: ContractModel) -> str:
    if isinstance(p, Tau):
        return "tau"
    if isinstance(p, Do):
        return f"do {p.target} {model.pretty_atom(p.atom)}"
    if isinstance(p, Tell):
        return f"tell {p.target} {{{p.var}: {model.pretty_contract(p.contract)}}}"
    if isinstance(p, Ask):
        vs = f" [{', '.join(map(str, p.vars))}]" if p.vars else ""
        return f"ask {p.target}{vs} ({model.pretty_observable(p.observable)})"
    if isinstance(p, Fuse):
        return f"fuse {p.var} ({model.pretty_observable(p.observable)})"
    raise TypeError(p)


def process(p: Process, model: ContractModel) -> str:
    def go(t: Process, ctx: int) -> str:
        # ctx 0: parallel level; 1: operand of | ; 2: continuation / delimiter body
        if isinstance(t, Choice):
            if not t.branches:
                return "0"
            items = []
            for pre, k in t.branches:
                text = prefix(pre, model)
                if k != Choice(()):
                    text += " . " + go(k, 2)
                items.append(text)
            text = " + ".join(items)
            return f"({text})" if len(items) > 1 and ctx == 2 else text
        if isinstance(t, PPar):
            text = " | ".join(go(q, 1) for q in t.parts)
            return text if ctx == 0 else f"({text})"
        if isinstance(t, PDelim):
            vars_ = [t.var]
            body = t.body
            while isinstance(body, PDelim):
                vars_.append(body.var)
                body = body.body
            return f"({', '.join(map(str, vars_))}) " + go(body, 2)
        if isinstance(t, Latent):
            return f"{{{t.var}: {model.pretty_contract(t.contract)}}}"
        if isinstance(t, Call):
            return f"{t.name}({', '.join(map(str, t.args))})"
        raise TypeError(t)

    return go(p, 0)


def system(s: System | Config, model: ContractModel, with_restricted: bool = False) -> str:
    if isinstance(s, Config):
        s = s.to_system(with_restricted)

    def go(t: System, ctx: int) -> str:
        if isinstance(t, SPar):
            if not t.parts:
                return "0"
            text = " | ".join(go(q, 1) for q in t.parts)
            return text if ctx == 0 or len(t.parts) == 1 else f"({text})"
        if isinstance(t, SDelim):
            vars_ = [t.var]
            body = t.body
            while isinstance(body, SDelim):
                vars_.append(body.var)
                body = body.body
            return f"({', '.join(map(str, vars_))}) " + go(body, 2)
        if isinstance(t, Agent):
            return f"{t.principal}[{process(t.process, model)}]"
        if isinstance(t, Session):
            inner = ", ".join(model.pretty_contract(c) for c in t.contracts) or "0"
            return f"{t.name}[{inner}]"
        raise TypeError(t)

    return go(s, 0)


def definition(d: Definition, model: ContractModel) -> str:
    return f"def {d.name}({', '.join(map(str, d.params))}) = {process(d.body, model)};"
