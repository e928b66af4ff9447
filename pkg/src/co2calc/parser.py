"""Parser for ``.co2`` source files and for standalone contracts/formulae.

A source file is::

    model pcl                       # or: model ccs
    contract cE = ... ;             # optional contract abbreviations, used as $cE
    def X(u, v) = <process> ;       # optional process equations
    system <system>

Identifier sorts follow the naming convention: an uppercase initial is a
principal name; lowercase identifiers are variables when delimited (their
sort is inferred from how they are used) and session names otherwise.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Callable

from . import ccs, ltl, pcl
from .errors import Diagnostic, ParseError
from .runtime.syntax import (
    NIL, Agent, Ask, Call, Choice, Definition, Do, Fuse, Latent, PDelim, PPar, Process,
    SDelim, Session, SPar, System, Tau, Tell, rename,
)
from .terms import ContractModel, Ident, Kind

KEYWORDS = {
    "model", "def", "contract", "system", "tau", "do", "tell", "ask", "fuse", "says",
    "rec", "true", "false",
}
LTL_OPERATORS = {"U", "X"}  # reserved inside observables only

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<op>-->>|->|/\\|\\/|<>)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:/[A-Za-z_][A-Za-z0-9_']*)?)
  | (?P<num>\d+)
  | (?P<punct>[.+|()\[\]{},:=;!?^$])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int
    adjacent: bool  # no whitespace before this token


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, col = 0, 1, 1
    prev_ws = True
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError([Diagnostic("error", line, col, f"unexpected character {text[pos]!r}")])
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            out.append(Token(kind, chunk, line, col, not prev_ws))
        prev_ws = kind == "ws"
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    out.append(Token("eof", "", line, col, False))
    return out


@dataclass
class _Binder:
    text: str
    uid: int
    line: int
    col: int
    demands: set = field(default_factory=set)
    calls: list = field(default_factory=list)  # (def name, arg index)


@dataclass
class SourceFile:
    model_name: str
    model: ContractModel
    defs: dict[str, Definition]
    contracts: dict[str, Any]
    system: System


def make_model(name: str) -> ContractModel:
    if name == "ccs":
        return ccs.CcsModel()
    if name == "pcl":
        return pcl.PclModel()
    raise ValueError(f"unknown contract model {name!r}")


class Parser:
    def __init__(self, text: str, model_name: str | None = None, free_vars: bool = False):
        self.toks = tokenize(text)
        self.i = 0
        self.model_name = model_name
        self.scopes: list[dict[str, _Binder]] = []
        self.binders: dict[int, _Binder] = {}
        self.abbrevs: dict[str, Any] = {}
        self.defs_params: dict[str, list[_Binder]] = {}
        self.free_vars = free_vars  # standalone formulas: free lowercase principals are variables
        self.diagnostics: list[Diagnostic] = []

    # -- token helpers ------------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None, hint: str | None = None):
        t = tok or self.tok
        raise ParseError([Diagnostic("error", t.line, t.col, msg, hint)])

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str, opener: Token | None = None) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            if opener is not None:
                self.error(f"unclosed {opener.text!r} opened at {opener.line}:{opener.col}: expected {text!r}, found {found!r}", self.tok)
            self.error(f"expected {text!r}, found {found!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self, what: str = "identifier") -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error(f"expected {what}, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    # -- scoping -------------------------------------------------------------------

    def bind(self, tok: Token) -> _Binder:
        if tok.text[0].isupper():
            self.error(f"principal name {tok.text} cannot be delimited", tok,
                       "variables and session names are lowercase")
        b = _Binder(tok.text, len(self.binders), tok.line, tok.col)
        self.binders[b.uid] = b
        self.scopes[-1][tok.text] = b
        return b

    def lookup(self, text: str) -> _Binder | None:
        for scope in reversed(self.scopes):
            if text in scope:
                return scope[text]
        return None

    @staticmethod
    def placeholder(b: _Binder) -> Ident:
        return Ident(Kind.SESSION_VAR, f"{b.text}#{b.uid}")

    def use(self, tok: Token, demand: str, call: tuple | None = None) -> Ident:
        """An identifier occurrence; ``demand`` is 'P' (principal), 'S' (session), 'N' (session
        declaration) or '?' (either)."""
        text = tok.text
        if text[0].isupper():
            if demand in ("S", "N"):
                self.error(f"{text} is a principal name, a session is expected here", tok,
                           "session names and variables are lowercase")
            return Ident(Kind.PRINCIPAL_NAME, text)
        b = self.lookup(text)
        if b is None:
            if demand == "P":
                if self.free_vars:
                    return Ident(Kind.PRINCIPAL_VAR, text)
                self.error(f"unbound principal variable {text}", tok,
                           "principal names start with an uppercase letter; variables must be delimited")
            return Ident(Kind.SESSION_NAME, text)
        b.demands.add(demand)
        if call is not None:
            b.calls.append(call)
        return self.placeholder(b)

    def principal_ref(self) -> Ident:
        return self.use(self.ident("principal"), "P")

    # -- files -----------------------------------------------------------------------

    def source(self) -> SourceFile:
        if self.tok.kind == "eof":
            self.error("missing system block", hint="a file is 'model ccs|pcl', optional definitions, then 'system ...'")
        if not self.accept("model"):
            self.error("missing model declaration", hint="start the file with 'model ccs' or 'model pcl'")
        t = self.ident("model name")
        if t.text not in ("ccs", "pcl"):
            self.error(f"unknown contract model {t.text!r}", t, "use 'ccs' or 'pcl'")
        self.model_name = t.text
        model = make_model(t.text)
        raw_defs: list[tuple[Token, list[_Binder], Process]] = []
        while self.at("def") or self.at("contract"):
            if self.accept("contract"):
                name = self.ident("contract name")
                self.expect("=")
                self.scopes.append({})
                self.abbrevs[name.text] = self.contract()
                self.scopes.pop()
                self.expect(";")
            else:
                self.i += 1
                name = self.ident("process identifier")
                if name.text[0].islower():
                    self.error("process identifiers start with an uppercase letter", name)
                opener = self.expect("(")
                self.scopes.append({})
                params = []
                if not self.at(")"):
                    params.append(self.bind(self.ident("parameter")))
                    while self.accept(","):
                        params.append(self.bind(self.ident("parameter")))
                self.expect(")", opener)
                self.defs_params[name.text] = params
                self.expect("=")
                body = self.process()
                self.scopes.pop()
                self.expect(";")
                raw_defs.append((name, params, body))
        if not self.accept("system"):
            if self.tok.kind == "eof":
                self.error("missing system block", hint="add 'system <agents and sessions>'")
            self.error(f"expected 'def', 'contract' or 'system', found {self.tok.text!r}")
        self.scopes.append({})
        sys_ = self.system()
        self.scopes.pop()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r} after the system")
        kinds = self.resolve()
        fix = self._fixer(kinds)
        defs = {}
        for name, params, body in raw_defs:
            if name.text in defs:
                self.diagnostics.append(Diagnostic("error", name.line, name.col, f"{name.text} defined twice"))
            defs[name.text] = Definition(name.text, tuple(fix(self.placeholder(p)) for p in params),
                                         rename(body, fix, model))
        sys_ = rename(sys_, fix, model)
        self._check_calls(sys_, defs, model)
        if self.diagnostics:
            raise ParseError(self.diagnostics)
        return SourceFile(t.text, model, defs, dict(self.abbrevs), sys_)

    def resolve(self) -> dict[int, Kind]:
        kinds: dict[int, Kind] = {}
        pending = dict(self.binders)
        for _ in range(len(pending) + 2):
            progress = False
            for uid, b in list(pending.items()):
                d = set(b.demands)
                for name, idx in b.calls:
                    params = self.defs_params.get(name)
                    if params and idx < len(params) and params[idx].uid in kinds:
                        k = kinds[params[idx].uid]
                        d.add("P" if k.is_principal else "S")
                if "P" in d and ({"S", "N"} & d):
                    self.diagnostics.append(Diagnostic(
                        "error", b.line, b.col,
                        f"{b.text} is used both as a principal and as a session",
                        "use distinct variables for the two sorts"))
                    kinds[uid] = Kind.SESSION_VAR
                elif "N" in d:
                    kinds[uid] = Kind.SESSION_NAME
                elif "P" in d:
                    kinds[uid] = Kind.PRINCIPAL_VAR
                elif "S" in d or not b.calls:
                    kinds[uid] = Kind.SESSION_VAR
                else:
                    continue
                del pending[uid]
                progress = True
            if not progress:
                break
        for uid in pending:
            kinds[uid] = Kind.SESSION_VAR
        return kinds

    def _fixer(self, kinds: dict[int, Kind]) -> Callable[[Ident], Ident]:
        def fix(i: Ident) -> Ident:
            if "#" in i.text:
                text, uid = i.text.rsplit("#", 1)
                return Ident(kinds[int(uid)], text)
            return i
        return fix

    def _check_calls(self, sys_, defs, model):
        def walk(p):
            if isinstance(p, Call):
                if p.name not in defs:
                    self.diagnostics.append(Diagnostic("error", 0, 0, f"undefined process identifier {p.name}"))
                elif len(defs[p.name].params) != len(p.args):
                    self.diagnostics.append(Diagnostic("error", 0, 0, f"{p.name} expects {len(defs[p.name].params)} arguments"))
            elif isinstance(p, Choice):
                for _, k in p.branches:
                    walk(k)
            elif isinstance(p, (PPar, SPar)):
                for q in p.parts:
                    walk(q)
            elif isinstance(p, (PDelim, SDelim)):
                walk(p.body)
            elif isinstance(p, Agent):
                walk(p.process)
        walk(sys_)
        for d in defs.values():
            walk(d.body)
            if not _guarded(d.body):
                self.diagnostics.append(Diagnostic("error", 0, 0, f"body of {d.name} has an unguarded process identifier"))

    # -- systems -----------------------------------------------------------------------

    def system(self) -> System:
        parts = [self.system_atom()]
        while self.accept("|"):
            parts.append(self.system_atom())
        return parts[0] if len(parts) == 1 else SPar(tuple(parts))

    def _delim_ahead(self) -> bool:
        """``(`` lowercase-ident {``,`` lowercase-ident} ``)`` followed by more input."""
        if not self.at("("):
            return False
        k = 1
        while True:
            t = self.peek(k)
            if t.kind != "ident" or t.text in KEYWORDS or not t.text[0].islower():
                return False
            nxt = self.peek(k + 1)
            if nxt.text == ")":
                return True
            if nxt.text != ",":
                return False
            k += 2

    def _delim_vars(self) -> list[Token]:
        self.expect("(")
        vs = [self.ident("variable")]
        while self.accept(","):
            vs.append(self.ident("variable"))
        self.expect(")")
        return vs

    def system_atom(self) -> System:
        t = self.tok
        if self._delim_ahead():
            vs = self._delim_vars()
            self.scopes.append({})
            binders = [self.bind(v) for v in vs]
            body = self.system_atom()
            self.scopes.pop()
            for b in reversed(binders):
                body = SDelim(self.placeholder(b), body)
            return body
        if self.accept("("):
            inner = self.system()
            self.expect(")", t)
            return inner
        if t.kind == "num" and t.text == "0":
            self.i += 1
            return SPar(())
        name = self.ident("agent or session")
        opener = self.expect("[")
        if name.text[0].isupper():
            proc = NIL if self.at("]") else self.process()
            self.expect("]", opener)
            return Agent(Ident(Kind.PRINCIPAL_NAME, name.text), proc)
        sess = self.use(name, "N")
        contracts = []
        if self.at("0") and self.peek().text == "]":
            self.i += 1
        elif not self.at("]"):
            contracts.append(self.contract())
            while self.accept(","):
                contracts.append(self.contract())
        self.expect("]", opener)
        return Session(sess, tuple(contracts))

    # -- processes -------------------------------------------------------------------------

    def process(self) -> Process:
        parts = [self.sum_()]
        while self.accept("|"):
            parts.append(self.sum_())
        return parts[0] if len(parts) == 1 else PPar(tuple(parts))

    def sum_(self) -> Process:
        start = self.tok
        first = self.pre()
        if not self.at("+"):
            return first
        operands = [(start, first)]
        while self.accept("+"):
            start = self.tok
            operands.append((start, self.pre()))
        branches = []
        for tok, op in operands:
            if not isinstance(op, Choice):
                self.error("sum operands must be prefix-guarded", tok, "wrap parallel or delimited processes under a prefix")
            branches.extend(op.branches)
        return Choice(tuple(branches))

    def pre(self) -> Process:
        t = self.tok
        if self._delim_ahead():
            vs = self._delim_vars()
            self.scopes.append({})
            binders = [self.bind(v) for v in vs]
            body = self.pre()
            self.scopes.pop()
            for b in reversed(binders):
                body = PDelim(self.placeholder(b), body)
            return body
        if self.accept("("):
            inner = self.process()
            self.expect(")", t)
            return inner
        if t.kind == "num" and t.text == "0":
            self.i += 1
            return NIL
        if self.at("{"):
            return self.latent()
        if t.kind == "ident" and t.text[0].isupper() and t.text not in KEYWORDS and self.peek().text == "(":
            self.i += 1
            opener = self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.ident("argument"))
                while self.accept(","):
                    args.append(self.ident("argument"))
            self.expect(")", opener)
            return Call(t.text, tuple(self.use(a, "?", (t.text, k)) for k, a in enumerate(args)))
        p = self.prefix()
        cont = NIL
        if self.accept("."):
            cont = self.pre()
        return Choice(((p, cont),))

    def latent(self) -> Latent:
        opener = self.expect("{")
        var = self.use(self.ident("latent variable"), "S")
        self.expect(":")
        c = self.contract()
        self.expect("}", opener)
        return Latent(var, c)

    def prefix(self):
        t = self.tok
        if self.accept("tau"):
            return Tau()
        if self.accept("do"):
            target = self.use(self.ident("session"), "S")
            return Do(target, self.action_atom())
        if self.accept("tell"):
            target = self.principal_ref()
            lat = self.latent()
            return Tell(target, lat.var, lat.contract)
        if self.accept("ask"):
            target = self.use(self.ident("session"), "S")
            vars_ = []
            if self.at("["):
                opener = self.expect("[")
                vars_.append(self.use(self.ident("variable"), "?"))
                while self.accept(","):
                    vars_.append(self.use(self.ident("variable"), "?"))
                self.expect("]", opener)
            opener = self.expect("(")
            obs = self.observable()
            self.expect(")", opener)
            return Ask(target, tuple(vars_), obs)
        if self.accept("fuse"):
            var = self.use(self.ident("session variable"), "S")
            opener = self.expect("(")
            obs = self.observable()
            self.expect(")", opener)
            return Fuse(var, obs)
        self.error(f"expected a process, found {t.text or 'end of input'!r}",
                   hint="prefixes are tau, do, tell, ask and fuse")

    # -- model-specific parts -------------------------------------------------------------------

    def contract(self):
        return self.ccs_contract() if self.model_name == "ccs" else self.pcl_formula()

    def observable(self):
        return self.ltl() if self.model_name == "ccs" else self.pcl_formula()

    def action_atom(self):
        if self.model_name == "ccs":
            return self.ccs_atom()
        t = self.ident("action")
        if self.at("!") and self.tok.adjacent:
            self.error("actions are promises; do x a records both a and !a", self.tok)
        return pcl.PAtom(t.text)

    def ccs_atom(self) -> ccs.CcsAtom:
        t = self.tok
        if t.kind == "ident" and self._suffixed():  # keywords such as tau are fine as action names
            self.i += 1
        else:
            t = self.ident("action")
        s = self.tok
        if s.text in ("?", "!", "^") and s.adjacent:
            self.i += 1
            return ccs.CcsAtom(t.text, {"?": ccs.INPUT, "!": ccs.OUTPUT, "^": ccs.AUTONOMOUS}[s.text])
        self.error(f"action {t.text} needs a polarity suffix", t, f"write {t.text}? (input), {t.text}! (output) or {t.text}^ (autonomous)")

    # CCS contracts: par > sum > prefix
    def ccs_contract(self) -> ccs.Contract:
        parts = [self.ccs_sum()]
        while self.accept("|"):
            parts.append(self.ccs_sum())
        return parts[0] if len(parts) == 1 else ccs.Par(tuple(parts))

    def ccs_sum(self) -> ccs.Contract:
        start = self.tok
        first = self.ccs_pre()
        if not self.at("+"):
            return first
        ops = [(start, first)]
        while self.accept("+"):
            ops.append((self.tok, self.ccs_pre()))
        branches = []
        for tok, op in ops:
            if not isinstance(op, ccs.Sum):
                self.error("sum operands must be prefix-guarded", tok)
            branches.extend(op.branches)
        return ccs.Sum(tuple(branches))

    def ccs_pre(self) -> ccs.Contract:
        t = self.tok
        if self.accept("("):
            inner = self.ccs_contract()
            self.expect(")", t)
            return inner
        if t.kind == "num" and t.text == "0":
            self.i += 1
            return ccs.ZERO
        if self.accept("$"):
            return self._abbrev()
        if self.accept("rec"):
            v = self.ident("recursion variable")
            self.expect("=")
            return ccs.Rec(v.text, self.ccs_sum())
        if t.kind == "ident" and self.peek().text == "says":
            who = self.principal_ref()
            self.expect("says")
            return ccs.Says(who, self.ccs_pre())
        if t.kind == "ident" and t.text[0].isupper() and not (self.peek().text in "?!^" and self.peek().adjacent):
            self.i += 1
            return ccs.ProcVar(t.text)
        a = self.ccs_atom()
        cont = ccs.ZERO
        if self.accept("."):
            cont = self.ccs_pre()
        return ccs.Sum(((a, cont),))

    def _abbrev(self):
        t = self.ident("contract name")
        if t.text not in self.abbrevs:
            self.error(f"undefined contract {t.text}", t)
        return self.abbrevs[t.text]

    # LTL: or < and < until < unary
    def _suffixed(self) -> bool:
        nxt = self.peek()
        return nxt.text in ("?", "!", "^") and nxt.adjacent

    def ltl(self) -> ltl.Formula:
        left = self.ltl_and()
        while self.accept("\\/"):
            left = ltl.Or(left, self.ltl_and())
        return left

    def ltl_and(self) -> ltl.Formula:
        left = self.ltl_until()
        while self.accept("/\\"):
            left = ltl.And(left, self.ltl_until())
        return left

    def ltl_until(self) -> ltl.Formula:
        left = self.ltl_unary()
        if self.at("U") and not self._suffixed():
            self.i += 1
            return ltl.Until(left, self.ltl_until())
        return left

    def ltl_unary(self) -> ltl.Formula:
        t = self.tok
        if self.accept("!"):
            return ltl.Not(self.ltl_unary())
        if self.accept("<>"):
            return ltl.Eventually(self.ltl_unary())
        if self.at("[") and self.peek().text == "]":
            self.i += 2
            return ltl.Always(self.ltl_unary())
        if self.at("X") and not self._suffixed():
            self.i += 1
            return ltl.Next(self.ltl_unary())
        if self.accept("true"):
            return ltl.TRUE
        if self.accept("false"):
            return ltl.FALSE
        if self.accept("("):
            inner = self.ltl()
            self.expect(")", t)
            return inner
        return ltl.Prop(self.ccs_atom())

    # PCL: -> / -->> (right assoc) < \/ < /\ < says, atoms
    def pcl_formula(self) -> pcl.Formula:
        left = self.pcl_or()
        if self.accept("->"):
            return pcl.PImp(left, self.pcl_formula())
        if self.accept("-->>"):
            return pcl.PCImp(left, self.pcl_formula())
        return left

    def pcl_or(self) -> pcl.Formula:
        parts = [self.pcl_and()]
        while self.accept("\\/"):
            parts.append(self.pcl_and())
        return parts[0] if len(parts) == 1 else pcl.POr(tuple(parts))

    def pcl_and(self) -> pcl.Formula:
        parts = [self.pcl_unary()]
        while self.accept("/\\"):
            parts.append(self.pcl_unary())
        return parts[0] if len(parts) == 1 else pcl.PAnd(tuple(parts))

    def pcl_unary(self) -> pcl.Formula:
        t = self.tok
        if self.accept("("):
            inner = self.pcl_formula()
            self.expect(")", t)
            return inner
        if self.accept("true"):
            return pcl.TOP
        if self.accept("false"):
            return pcl.BOTTOM
        if self.accept("$"):
            return self._abbrev()
        if self.accept("!"):
            a = self.ident("atom")
            return pcl.PAtom(a.text, True)
        if t.kind == "ident" and self.peek().text == "says":
            who = self.principal_ref()
            self.expect("says")
            return pcl.PSays(who, self.pcl_unary())
        a = self.ident("atom")
        return pcl.PAtom(a.text)


def _guarded(p: Process) -> bool:
    if isinstance(p, Call):
        return False
    if isinstance(p, PPar):
        return all(_guarded(q) for q in p.parts)
    if isinstance(p, PDelim):
        return _guarded(p.body)
    return True


# -- entry points --------------------------------------------------------------------------

def parse_source(text: str) -> SourceFile:
    return Parser(text).source()


def parse_file(path: str) -> SourceFile:
    with open(path, encoding="utf-8") as fh:
        return parse_source(fh.read())


def _standalone(text: str, model_name: str, method: str):
    p = Parser(text, model_name, free_vars=True)
    p.scopes.append({})
    value = getattr(p, method)()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return value


def parse_contract(text: str, model_name: str):
    return _standalone(text, model_name, "contract")


def parse_observable(text: str, model_name: str):
    return _standalone(text, model_name, "observable")


def parse_pcl(text: str) -> pcl.Formula:
    return _standalone(text, "pcl", "pcl_formula")


def parse_ccs(text: str) -> ccs.Contract:
    return _standalone(text, "ccs", "ccs_contract")


def parse_ltl(text: str) -> ltl.Formula:
    return _standalone(text, "ccs", "ltl")


def parse_contracts(text: str, model_name: str) -> list:
    """A comma-separated list of contracts (e.g. a session environment)."""
    p = Parser(text, model_name, free_vars=True)
    p.scopes.append({})
    out = [p.contract()]
    while p.accept(","):
        out.append(p.contract())
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return out
