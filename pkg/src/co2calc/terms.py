"""Names, variables, substitutions, action labels and the contract-model interface.

Every other module is written against these types.  A runtime system is
parameterised by one :class:`ContractModel`; the two shipped models live in
:mod:`co2calc.ccs` and :mod:`co2calc.pcl`.
"""
from __future__ import annotations

import abc
import enum
import functools
import re
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, Mapping

from .errors import SortError


class Kind(enum.Enum):
    PRINCIPAL_NAME = "principal name"
    SESSION_NAME = "session name"
    PRINCIPAL_VAR = "principal variable"
    SESSION_VAR = "session variable"

    @property
    def is_name(self) -> bool:
        return self in (Kind.PRINCIPAL_NAME, Kind.SESSION_NAME)

    @property
    def is_var(self) -> bool:
        return not self.is_name

    @property
    def is_principal(self) -> bool:
        return self in (Kind.PRINCIPAL_NAME, Kind.PRINCIPAL_VAR)

    @property
    def is_session(self) -> bool:
        return not self.is_principal


@functools.total_ordering
@dataclass(frozen=True)
class Ident:
    kind: Kind
    text: str

    def __post_init__(self):
        if not self.text:
            raise SortError("empty identifier")

    def __str__(self) -> str:
        return self.text

    def __repr__(self) -> str:
        return f"{self.text}:{_KIND_TAG[self.kind]}"

    def __lt__(self, other: "Ident") -> bool:
        return (_KIND_TAG[self.kind], self.text) < (_KIND_TAG[other.kind], other.text)

    @property
    def is_name(self) -> bool:
        return self.kind.is_name

    @property
    def is_var(self) -> bool:
        return self.kind.is_var


_KIND_TAG = {
    Kind.PRINCIPAL_NAME: "P",
    Kind.SESSION_NAME: "S",
    Kind.PRINCIPAL_VAR: "p",
    Kind.SESSION_VAR: "s",
}


def principal(text: str) -> Ident:
    return Ident(Kind.PRINCIPAL_NAME, text)


def session(text: str) -> Ident:
    return Ident(Kind.SESSION_NAME, text)


def pvar(text: str) -> Ident:
    return Ident(Kind.PRINCIPAL_VAR, text)


def svar(text: str) -> Ident:
    return Ident(Kind.SESSION_VAR, text)


class Substitution(Mapping[Ident, Ident]):
    """A finite, sort-respecting partial map from variables to names."""

    __slots__ = ("_map", "_hash")

    def __init__(self, bindings: Mapping[Ident, Ident] | Iterable[tuple[Ident, Ident]] = ()):
        items = dict(bindings)
        for var, name in items.items():
            if not var.is_var:
                raise SortError(f"substitution domain must be variables, got {var!r}")
            if not name.is_name:
                raise SortError(f"substitution range must be names, got {name!r}")
            if var.kind.is_principal != name.kind.is_principal:
                raise SortError(f"ill-sorted binding {var!r} -> {name!r}")
        self._map = items
        self._hash = None

    def __getitem__(self, key: Ident) -> Ident:
        return self._map[key]

    def __iter__(self) -> Iterator[Ident]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Substitution):
            return self._map == other._map
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}->{v}" for k, v in sorted(self._map.items()))
        return "{" + inner + "}"

    def __call__(self, ident: Ident) -> Ident:
        return self._map.get(ident, ident)

    def restrict(self, domain: Iterable[Ident]) -> "Substitution":
        keep = set(domain)
        return Substitution({k: v for k, v in self._map.items() if k in keep})

    def without(self, domain: Iterable[Ident]) -> "Substitution":
        drop = set(domain)
        return Substitution({k: v for k, v in self._map.items() if k not in drop})

    def union(self, other: Mapping[Ident, Ident]) -> "Substitution":
        merged = dict(self._map)
        merged.update(other)
        return Substitution(merged)

    def issubset(self, other: "Substitution") -> bool:
        return all(other.get(k) == v for k, v in self._map.items())

    def is_identity(self) -> bool:
        return not self._map


EMPTY_SUBST = Substitution()


@dataclass(frozen=True)
class ActionLabel:
    """A tuple <A1 says a1, ..., Aj says aj> of closed principals paired with atoms."""

    entries: tuple[tuple[Ident, Any], ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("an action label needs at least one entry")
        for who, _ in self.entries:
            if who.kind is not Kind.PRINCIPAL_NAME:
                raise SortError(f"action label principal must be a principal name, got {who!r}")

    @property
    def principals(self) -> tuple[Ident, ...]:
        return tuple(who for who, _ in self.entries)

    @property
    def atoms(self) -> tuple[Any, ...]:
        return tuple(atom for _, atom in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        return "<" + ", ".join(f"{who} says {atom}" for who, atom in self.entries) + ">"


_SESSION_RE = re.compile(r"^s(\d+)$")


def fresh_session_name(universe: Iterable[Ident]) -> Ident:
    """Lowest-indexed name from the scheme s1, s2, ... that does not occur in ``universe``."""
    used = set()
    for ident in universe:
        m = _SESSION_RE.match(ident.text)
        if m:
            used.add(int(m.group(1)))
    k = 1
    while k in used:
        k += 1
    return session(f"s{k}")


def fresh_text(base: str, taken: set[str]) -> str:
    """``base`` if unused, otherwise ``base_1``, ``base_2``, ... (lowest free suffix)."""
    if base not in taken:
        return base
    stem = base.split("_")[0] if re.fullmatch(r".+_\d+", base) else base
    k = 1
    while f"{stem}_{k}" in taken:
        k += 1
    return f"{stem}_{k}"


class ContractModel(abc.ABC):
    """The pluggable contract model the calculus is parameterised over.

    Contract multisets are plain tuples kept in the model's canonical order
    (see :meth:`normalize`).  ``step`` and ``entails`` are only ever called on
    closed arguments.
    """

    name: str = "abstract"
    max_label_arity: int = 1

    @abc.abstractmethod
    def says(self, who: Ident, contract: Any) -> Any: ...

    @abc.abstractmethod
    def normalize(self, contracts: Iterable[Any]) -> tuple: ...

    @abc.abstractmethod
    def step(self, contracts: tuple, label: ActionLabel) -> list[tuple]: ...

    @abc.abstractmethod
    def entails(self, contracts: tuple, observable: Any) -> bool: ...

    @abc.abstractmethod
    def fulfilled(self, contracts: tuple, who: Ident) -> bool: ...

    def obligations(self, contracts: tuple, who: Ident) -> list[str]:
        return []

    @abc.abstractmethod
    def map_contract(self, contract: Any, fn: Callable[[Ident], Ident]) -> Any: ...

    @abc.abstractmethod
    def map_observable(self, observable: Any, fn: Callable[[Ident], Ident]) -> Any: ...

    @abc.abstractmethod
    def contract_idents(self, contract: Any) -> Iterator[Ident]: ...

    @abc.abstractmethod
    def observable_idents(self, observable: Any) -> Iterator[Ident]: ...

    @abc.abstractmethod
    def pretty_contract(self, contract: Any) -> str: ...

    @abc.abstractmethod
    def pretty_observable(self, observable: Any) -> str: ...

    @abc.abstractmethod
    def pretty_atom(self, atom: Any) -> str: ...

    # derived helpers

    def subst_contract(self, contract: Any, sigma: Substitution) -> Any:
        if sigma.is_identity():
            return contract
        return self.map_contract(contract, sigma)

    def subst_observable(self, observable: Any, sigma: Substitution) -> Any:
        if sigma.is_identity():
            return observable
        return self.map_observable(observable, sigma)

    def contract_fv(self, contract: Any) -> set[Ident]:
        return {i for i in self.contract_idents(contract) if i.is_var}

    def observable_fv(self, observable: Any) -> set[Ident]:
        return {i for i in self.observable_idents(observable) if i.is_var}
