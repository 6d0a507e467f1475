"""Orbit models: Conley-Zehnder index rules, gradings and orientation signs.

An :class:`OrbitModel` fixes everything needed to turn the abstract algebra
into the algebra of one closed Reeb orbit ``gamma`` and its iterates:

* ``m`` with ``dim V = 2m - 1``,
* a rule ``n -> CZ(gamma^n)``,
* a sign assignment ``epsilon`` on index vectors.

Gradings: ``|q_n| = m - 3 + CZ(gamma^n)``, ``|p_n| = m - 3 - CZ(gamma^n)``.
An iterate is bad when ``CZ(gamma^n)`` and ``CZ(gamma)`` differ mod 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .algebra import BadOrbitError, OrbitVariable


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Circle:
    kind = "circle"

    def cz(self, n: int) -> int:
        return 0

    def to_json(self):
        return {"kind": "circle"}


@dataclass(frozen=True)
class Hyperbolic:
    """Multiplicative index: ``CZ(gamma^n) = n * c``."""

    c: int
    kind = "hyperbolic"

    def cz(self, n: int) -> int:
        return n * self.c

    def to_json(self):
        return {"kind": "hyperbolic", "c": self.c}


@dataclass(frozen=True)
class Elliptic:
    """Standard elliptic model ``CZ(gamma^n) = 2 floor(n theta) + 1``.

    Offered for experimentation; ``theta`` is an exact rational (pass a long
    decimal string to approximate an irrational rotation number).
    """

    theta: Fraction
    kind = "elliptic"

    def cz(self, n: int) -> int:
        return 2 * math.floor(n * self.theta) + 1

    def to_json(self):
        return {"kind": "elliptic", "theta": str(self.theta)}


@dataclass(frozen=True)
class Table:
    """Explicit list ``CZ(gamma^1), ..., CZ(gamma^N)``."""

    values: tuple
    kind = "table"

    def cz(self, n: int) -> int:
        if not 1 <= n <= len(self.values):
            raise ModelError(f"CZ table covers n <= {len(self.values)}, asked for {n}")
        return self.values[n - 1]

    def to_json(self):
        return {"kind": "table", "values": list(self.values)}


@dataclass(frozen=True)
class DefaultSigns:
    kind = "default"

    def sign(self, nvec: tuple) -> int:
        return 1

    def to_json(self):
        return {"kind": "default"}


@dataclass(frozen=True)
class MultiplicativeSigns:
    """``epsilon(n) = prod_i s[n_i]``; indices not listed get +1."""

    signs: tuple  # ((k, +-1), ...) sorted by k
    kind = "multiplicative"

    def __post_init__(self):
        for _, s in self.signs:
            if s not in (1, -1):
                raise ModelError("multiplicative signs must be +1 or -1")

    @classmethod
    def from_mapping(cls, mapping) -> "MultiplicativeSigns":
        return cls(tuple(sorted((int(k), int(s)) for k, s in mapping.items())))

    def sign(self, nvec: tuple) -> int:
        table = dict(self.signs)
        out = 1
        for k in nvec:
            out *= table.get(k, 1)
        return out

    def to_json(self):
        return {"kind": "multiplicative", "signs": {str(k): s for k, s in self.signs}}


@dataclass(frozen=True)
class TableSigns:
    """Explicit signs keyed by the sorted index vector."""

    entries: tuple  # ((sorted index tuple, sign), ...)
    default: int = 1
    kind = "table"

    def __post_init__(self):
        for _, s in self.entries:
            if s not in (-1, 0, 1):
                raise ModelError("table signs must lie in {-1, 0, 1}")

    def sign(self, nvec: tuple) -> int:
        return dict(self.entries).get(tuple(sorted(nvec)), self.default)

    def to_json(self):
        return {"kind": "table", "default": self.default,
                "entries": [{"n": list(n), "sign": s} for n, s in self.entries]}


@dataclass(frozen=True)
class OrbitModel:
    m: int
    cz_rule: object = Circle()
    signs: object = DefaultSigns()
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.m < 1:
            raise ModelError("m must be a positive integer")

    @classmethod
    def circle(cls, m: int = 1, signs=None) -> "OrbitModel":
        return cls(m, Circle(), signs or DefaultSigns())

    @classmethod
    def hyperbolic(cls, m: int, c: int, signs=None) -> "OrbitModel":
        return cls(m, Hyperbolic(c), signs or DefaultSigns())

    @classmethod
    def elliptic(cls, m: int, theta, signs=None) -> "OrbitModel":
        return cls(m, Elliptic(Fraction(theta)), signs or DefaultSigns())

    @classmethod
    def table(cls, m: int, values: Iterable[int], signs=None) -> "OrbitModel":
        return cls(m, Table(tuple(values)), signs or DefaultSigns())

    def with_signs(self, signs) -> "OrbitModel":
        return OrbitModel(self.m, self.cz_rule, signs)

    @property
    def cutoff(self) -> int | None:
        return len(self.cz_rule.values) if isinstance(self.cz_rule, Table) else None

    @property
    def hbar_degree(self) -> int:
        return 2 * (self.m - 3)

    def cz(self, n: int) -> int:
        if n < 1:
            raise ModelError("iterate number must be positive")
        return self.cz_rule.cz(n)

    def is_bad(self, n: int) -> bool:
        return (self.cz(n) - self.cz(1)) % 2 != 0

    def variable(self, k: int) -> OrbitVariable:
        """The formal variable ``q_k`` (``k > 0``) or ``p_{|k|}`` (``k < 0``).

        Bad orbits still get an object (with ``good=False``) so callers can
        report them; the algebra refuses to use such variables.
        """
        var = self._cache.get(k)
        if var is None:
            if k == 0:
                raise ModelError("variable index must be nonzero")
            n = abs(k)
            cz = self.cz(n)
            grading = self.m - 3 + cz if k > 0 else self.m - 3 - cz
            var = OrbitVariable(k, grading, n, not self.is_bad(n))
            self._cache[k] = var
        return var

    def good_variable(self, k: int) -> OrbitVariable:
        var = self.variable(k)
        if not var.good:
            raise BadOrbitError(f"gamma^{abs(k)} is a bad orbit")
        return var

    def grading(self, k: int) -> int:
        return self.variable(k).grading

    def epsilon(self, nvec) -> int:
        nvec = tuple(nvec)
        if any(self.is_bad(abs(k)) for k in nvec):
            return 0
        return self.signs.sign(nvec)

    def good_indices(self, cutoff: int) -> list[int]:
        return [n for n in range(1, cutoff + 1) if not self.is_bad(n)]

    def to_json(self) -> dict:
        return {"m": self.m, "cz": self.cz_rule.to_json(), "signs": self.signs.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "OrbitModel":
        try:
            m = int(data["m"])
            cz = data.get("cz", {"kind": "circle"})
            kind = cz["kind"]
            if kind == "circle":
                rule = Circle()
            elif kind == "hyperbolic":
                rule = Hyperbolic(int(cz["c"]))
            elif kind == "elliptic":
                rule = Elliptic(Fraction(str(cz["theta"])))
            elif kind == "table":
                rule = Table(tuple(int(v) for v in cz["values"]))
            else:
                raise ModelError(f"unknown CZ rule {kind!r}")
            return cls(m, rule, signs_from_json(data.get("signs", {"kind": "default"})))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ModelError):
                raise
            raise ModelError(f"malformed orbit model: {exc}") from exc


def signs_from_json(data: dict):
    kind = data.get("kind", "default")
    if kind == "default":
        return DefaultSigns()
    if kind == "multiplicative":
        return MultiplicativeSigns.from_mapping(data["signs"])
    if kind == "table":
        entries = tuple(sorted((tuple(sorted(int(k) for k in e["n"])), int(e["sign"]))
                               for e in data["entries"]))
        return TableSigns(entries, int(data.get("default", 1)))
    raise ModelError(f"unknown sign assignment {kind!r}")


CIRCLE = OrbitModel.circle()
