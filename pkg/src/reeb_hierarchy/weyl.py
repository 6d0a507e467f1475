"""hbar-deformed Weyl algebra of an orbit and its action on cobordism potentials.

A :class:`WeylElement` is a finite sum of normal-ordered words (all ``q``
letters, ascending, then all ``p`` letters, ascending) times ``hbar^e``.  The
star product rewrites concatenated words with

    p_n q_n = (-1)^{|p_n||q_n|} q_n p_n + kappa_n hbar

and the Koszul rule for every other transposition.  All elements here are
polynomial, so products are exact and finite; ``hbar_order`` only discards
terms with ``e > hbar_order`` (``None`` keeps everything).

A :class:`DElement` lives over two alphabets, ``q^-`` (variables of the
negative end) and ``p^+`` (of the positive end).  Words are stored as signed
tuples: positive entries are ``q^-_n``, negative entries ``p^+_n`` (as
``-n``).  Weyl elements of the negative end act from the left with
``p^-_n -> kappa_n hbar d/dq^-_n``; those of the positive end act from the
right with ``q^+_n -> kappa_n hbar d/dp^+_n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .algebra import BadOrbitError, Polynomial, _partial_term, koszul_sort


class TruncationError(ValueError):
    """The requested hbar order cannot represent the result consistently."""


class AlphabetError(ValueError):
    pass


def _word_key(k: int):
    return (0, k) if k > 0 else (1, k)


def _ksort(word, parity):
    """Koszul sort into normal order (q block then p block, each ascending)."""
    word = list(word)
    sign = 1
    for i in range(1, len(word)):
        j = i
        while j > 0 and _word_key(word[j - 1]) > _word_key(word[j]):
            if parity(word[j - 1]) and parity(word[j]):
                sign = -sign
            word[j - 1], word[j] = word[j], word[j - 1]
            j -= 1
    for a, b in zip(word, word[1:]):
        if a == b and parity(a):
            return tuple(word), 0
    return tuple(word), sign


def _parity_fn(model):
    def par(k):
        var = model.variable(k)
        if not var.good:
            raise BadOrbitError(f"{var.name} belongs to a bad orbit")
        return var.parity
    return par


@lru_cache(maxsize=100_000)
def _normal_order(word: tuple, model) -> tuple:
    """Normal-order an arbitrary word; returns ((word, hbar shift, coeff), ...)."""
    par = _parity_fn(model)
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a < 0 < b:
            swapped = word[:i] + (b, a) + word[i + 2:]
            sign = -1 if par(a) and par(b) else 1
            out: dict = {}
            for w, dh, c in _normal_order(swapped, model):
                out[(w, dh)] = out.get((w, dh), 0) + sign * c
            if a == -b:
                contracted = word[:i] + word[i + 2:]
                for w, dh, c in _normal_order(contracted, model):
                    out[(w, dh + 1)] = out.get((w, dh + 1), 0) + b * c
            return tuple((w, dh, c) for (w, dh), c in out.items() if c)
    w, sign = _ksort(word, par)
    return ((w, 0, sign),) if sign else ()


def _trim(terms: dict, order):
    return {k: c for k, c in terms.items() if c and (order is None or k[1] <= order)}


class WeylElement:
    """Normal-ordered element of the Weyl algebra of one orbit model."""

    __slots__ = ("_terms", "model")

    def __init__(self, terms=None, model=None):
        if model is None:
            raise TypeError("an orbit model is required")
        self.model = model
        acc: dict = {}
        for (word, h), c in (terms or {}).items():
            for w, dh, s in _normal_order(tuple(word), model):
                key = (w, h + dh)
                acc[key] = acc.get(key, 0) + s * Fraction(c)
        self._terms = {k: c for k, c in acc.items() if c}

    @classmethod
    def _raw(cls, terms, model):
        obj = cls.__new__(cls)
        obj.model = model
        obj._terms = {k: Fraction(c) for k, c in terms.items() if c}
        return obj

    @classmethod
    def from_polynomial(cls, poly: Polynomial, hbar: int = 0) -> "WeylElement":
        """Embed a supercommutative polynomial (no contractions, Koszul signs only)."""
        par = _parity_fn(poly.grading)
        terms = {}
        for mono, c in poly.items():
            w, s = _ksort(mono, par)
            if s:
                terms[(w, hbar)] = terms.get((w, hbar), 0) + s * c
        return cls._raw(terms, poly.grading)

    @classmethod
    def var(cls, k: int, model, hbar: int = 0) -> "WeylElement":
        return cls({((k,), hbar): 1}, model)

    @classmethod
    def hbar_power(cls, e: int, model, coeff=1) -> "WeylElement":
        return cls._raw({((), e): coeff}, model)

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return iter(self._terms.items())

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, WeylElement):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        if self.model != other.model:
            raise AlphabetError("Weyl elements over different orbit models")
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0) + c
        return WeylElement._raw(acc, self.model)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "WeylElement":
        return WeylElement._raw({k: c * v for k, v in self._terms.items()}, self.model)

    def truncate(self, order) -> "WeylElement":
        return WeylElement._raw(_trim(self._terms, order), self.model)

    def hbar_coefficient(self, e: int) -> Polynomial:
        """The ``hbar^e`` part, moved back into the supercommutative algebra."""
        par = _parity_fn(self.model)
        out = {}
        for (w, h), c in self._terms.items():
            if h == e:
                mono, s = koszul_sort(w, par)
                out[mono] = out.get(mono, 0) + s * c
        return Polynomial({m: c for m, c in out.items() if c}, self.model, _trusted=True)

    def min_hbar(self):
        return min((h for _, h in self._terms), default=None)

    def term_degree(self, key) -> int:
        w, h = key
        return sum(self.model.variable(k).grading for k in w) + h * self.model.hbar_degree

    def term_parity(self, key) -> int:
        return self.term_degree(key) % 2

    def parity(self):
        ps = {self.term_parity(k) for k in self._terms}
        if not ps:
            return 0
        return ps.pop() if len(ps) == 1 else None

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for (w, h), c in sorted(self._terms.items(), key=lambda t: (t[0][1], len(t[0][0]), t[0][0])):
            letters = "*".join(f"q{k}" if k > 0 else f"p{-k}" for k in w) or "1"
            parts.append(f"{c}*hbar^{h}*{letters}")
        return " + ".join(parts)


def star(f: WeylElement, g: WeylElement, hbar_order=None) -> WeylElement:
    if f.model != g.model:
        raise AlphabetError("Weyl elements over different orbit models")
    acc: dict = {}
    for (wa, ha), ca in f._terms.items():
        for (wb, hb), cb in g._terms.items():
            base = ha + hb
            for w, dh, s in _normal_order(wa + wb, f.model):
                h = base + dh
                if hbar_order is not None and h > hbar_order:
                    continue
                acc[(w, h)] = acc.get((w, h), 0) + s * ca * cb
    return WeylElement._raw(acc, f.model)


def commutator(f: WeylElement, g: WeylElement, hbar_order=None) -> WeylElement:
    """Graded commutator ``f*g - (-1)^{|f||g|} g*f``, term by term in parity."""
    acc: dict = {}
    for ka, ca in f._terms.items():
        a = WeylElement._raw({ka: ca}, f.model)
        pa = f.term_parity(ka)
        for kb, cb in g._terms.items():
            b = WeylElement._raw({kb: cb}, g.model)
            sign = -1 if pa and g.term_parity(kb) else 1
            for k, c in star(a, b, hbar_order)._terms.items():
                acc[k] = acc.get(k, 0) + c
            for k, c in star(b, a, hbar_order)._terms.items():
                acc[k] = acc.get(k, 0) - sign * c
    return WeylElement._raw(acc, f.model)


@dataclass
class MasterReport:
    passed: bool
    residual: WeylElement
    hbar_order: int | None

    def to_json(self):
        from .serialize import weyl_to_json
        return {"passed": self.passed, "hbar_order": self.hbar_order,
                "residual": weyl_to_json(self.residual)}


def check_master(H: WeylElement, hbar_order=None) -> MasterReport:
    """Whether ``[H, H]`` vanishes up to ``hbar_order``."""
    residual = commutator(H, H, hbar_order)
    return MasterReport(not residual, residual, hbar_order)


# ---------------------------------------------------------------- D elements


class DElement:
    """Element of the cobordism space: polynomials in ``q^-`` and ``p^+``."""

    __slots__ = ("_terms", "minus", "plus")

    def __init__(self, terms=None, minus=None, plus=None):
        if minus is None:
            raise TypeError("orbit model for the negative end is required")
        self.minus = minus
        self.plus = plus if plus is not None else minus
        par = self.parity_fn()
        acc: dict = {}
        for (word, h), c in (terms or {}).items():
            w, s = _ksort(tuple(word), par)
            if s:
                acc[(w, h)] = acc.get((w, h), 0) + s * Fraction(c)
        self._terms = {k: c for k, c in acc.items() if c}

    @classmethod
    def _raw(cls, terms, minus, plus):
        obj = cls.__new__(cls)
        obj.minus, obj.plus = minus, plus
        obj._terms = {k: Fraction(c) for k, c in terms.items() if c}
        return obj

    def _like(self, terms):
        return DElement._raw(terms, self.minus, self.plus)

    @classmethod
    def one(cls, minus, plus=None) -> "DElement":
        return cls({((), 0): 1}, minus, plus)

    def parity_fn(self):
        pm, pp = _parity_fn(self.minus), _parity_fn(self.plus)
        return lambda k: pm(k) if k > 0 else pp(k)

    def degree_fn(self):
        return lambda k: (self.minus if k > 0 else self.plus).variable(k).grading

    def term_parity(self, key) -> int:
        w, h = key
        deg = self.degree_fn()
        return (sum(deg(k) for k in w) + h * self.minus.hbar_degree) % 2

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return iter(self._terms.items())

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, DElement):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def _check(self, other):
        if self.minus != other.minus or self.plus != other.plus:
            raise AlphabetError("D elements over different alphabets")

    def __add__(self, other):
        self._check(other)
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0) + c
        return self._like(acc)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return self._like({k: c * v for k, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, DElement):
            return self.scale(other)
        self._check(other)
        par = self.parity_fn()
        acc: dict = {}
        for (wa, ha), ca in self._terms.items():
            for (wb, hb), cb in other._terms.items():
                w, s = _ksort(wa + wb, par)
                if s:
                    acc[(w, ha + hb)] = acc.get((w, ha + hb), 0) + s * ca * cb
        return self._like(acc)

    def truncate(self, order):
        return self._like(_trim(self._terms, order))

    def derivative(self, k: int, side: str) -> "DElement":
        """Graded derivative in ``q^-_k`` (k > 0) or ``p^+_{|k|}`` (k < 0)."""
        par = self.parity_fn()
        acc: dict = {}
        for (w, h), c in self._terms.items():
            res = _partial_term(w, k, side, par)
            if res is None:
                continue
            rest, factor = res
            acc[(rest, h)] = acc.get((rest, h), 0) + factor * c
        return self._like(acc)

    def min_hbar(self):
        return min((h for _, h in self._terms), default=None)

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for (w, h), c in sorted(self._terms.items(), key=lambda t: (t[0][1], len(t[0][0]), t[0][0])):
            letters = "*".join(f"q-{k}" if k > 0 else f"p+{-k}" for k in w) or "1"
            parts.append(f"{c}*hbar^{h}*{letters}")
        return " + ".join(parts)


def _letter_left(k: int, x: DElement, dF: dict | None) -> DElement:
    """One letter of a negative-end Weyl word acting from the left."""
    if k > 0:
        return DElement._raw({((k,), 0): 1}, x.minus, x.plus) * x
    n = -k
    out = x.derivative(n, "left")
    if dF is not None and n in dF:
        out = out + dF[n] * x
    return _shift(out, n)


def _letter_right(k: int, x: DElement, dF: dict | None) -> DElement:
    """One letter of a positive-end Weyl word acting from the right."""
    if k < 0:
        return x * DElement._raw({((k,), 0): 1}, x.minus, x.plus)
    out = x.derivative(-k, "right")
    if dF is not None and k in dF:
        out = out + x * dF[k]
    return _shift(out, k)


def _shift(x: DElement, kappa: int) -> DElement:
    return x._like({(w, h + 1): kappa * c for (w, h), c in x._terms.items()})


def _apply(H: WeylElement, side: str, x: DElement, hbar_order, dF=None) -> DElement:
    if side == "left":
        if H.model != x.minus:
            raise AlphabetError("left action needs a Weyl element of the negative end")
    elif side == "right":
        if H.model != x.plus:
            raise AlphabetError("right action needs a Weyl element of the positive end")
    else:
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    total = x._like({})
    for (word, h), c in H._terms.items():
        y = x
        letters = reversed(word) if side == "left" else word
        step = _letter_left if side == "left" else _letter_right
        for k in letters:
            y = step(k, y, dF)
            if not y:
                break
        if y:
            total = total + y._like({(w, hh + h): c * v for (w, hh), v in y._terms.items()})
    return total.truncate(hbar_order)


def apply_action(H: WeylElement, side: str, x: DElement, hbar_order=None) -> DElement:
    """``->H (x)`` for ``side='left'`` or ``(x) H<-`` for ``side='right'``."""
    return _apply(H, side, x, hbar_order)


def _require_even(F: DElement):
    for key in F._terms:
        if F.term_parity(key):
            raise ValueError("the potential F must be even")


def _grad(F: DElement, side: str, sign: int) -> dict:
    """``{n: d F / d(var_n)}``; ``sign`` picks q^- (+1) or p^+ (-1) variables."""
    idx = {abs(k) for w, _ in F._terms for k in w if (k > 0) == (sign > 0)}
    return {n: F.derivative(sign * n, side) for n in idx}


def cobordism_differential(g: DElement, F: DElement | None, Hminus: WeylElement | None,
                           Hplus: WeylElement | None, hbar_order=None) -> DElement:
    """``D^F g = e^{-F} ->H^-(g e^F) - (-1)^{|g|} (g e^F) H^+<- e^{-F}``.

    The conjugation by ``e^F`` is carried out exactly: each ``p^-_n`` acts as
    ``kappa_n hbar (d/dq^-_n + dF/dq^-_n)`` and each ``q^+_n`` as
    ``kappa_n hbar (<-d/dp^+_n + F<-d/dp^+_n)``, so no exponential needs to be
    expanded.  ``F`` must be even.
    """
    left_grad = right_grad = None
    if F is not None and F:
        F._check(g)
        _require_even(F)
        left_grad = _grad(F, "left", 1)
        right_grad = _grad(F, "right", -1)
    out = g._like({})
    if Hminus is not None and Hminus:
        out = out + _apply(Hminus, "left", g, None, left_grad)
    if Hplus is not None and Hplus:
        for key, c in g._terms.items():
            piece = g._like({key: c})
            sign = -1 if g.term_parity(key) else 1
            out = out - _apply(Hplus, "right", piece, None, right_grad).scale(sign)
    return out.truncate(hbar_order)


def exp(F: DElement, hbar_order, max_terms: int = 64) -> DElement:
    """``sum_k F^k / k!`` truncated at ``hbar_order``.

    Raises :class:`TruncationError` if the series does not terminate within
    ``max_terms`` powers (e.g. a non-nilpotent ``F`` with an ``hbar^0`` part).
    """
    result = DElement.one(F.minus, F.plus)
    power = DElement.one(F.minus, F.plus)
    fact = 1
    for k in range(1, max_terms + 1):
        power = (power * F).truncate(hbar_order)
        if not power:
            return result
        fact *= k
        result = result + power.scale(Fraction(1, fact))
    raise TruncationError(
        f"e^F does not terminate within {max_terms} terms at hbar order {hbar_order}")


def master_residual(F: DElement, Hminus: WeylElement | None, Hplus: WeylElement | None,
                    hbar_order=None, conjugated: bool = True) -> DElement:
    """Residual of ``e^F H^+<- - ->H^- e^F``.

    With ``conjugated=True`` (the default) the residual is returned multiplied
    by ``e^{-F}``, which vanishes exactly when the residual does and needs no
    exponential.  With ``conjugated=False`` ``e^F`` is expanded explicitly.
    """
    one = DElement.one(F.minus, F.plus)
    if conjugated:
        if F:
            _require_even(F)
        lg = _grad(F, "left", 1) if F else None
        rg = _grad(F, "right", -1) if F else None
        right = _apply(Hplus, "right", one, None, rg) if Hplus is not None else one._like({})
        left = _apply(Hminus, "left", one, None, lg) if Hminus is not None else one._like({})
        return (right - left).truncate(hbar_order)
    eF = exp(F, hbar_order)
    right = apply_action(Hplus, "right", eF) if Hplus is not None else one._like({})
    left = apply_action(Hminus, "left", eF) if Hminus is not None else one._like({})
    return (right - left).truncate(hbar_order)


def d_basis(minus, plus, indices, max_length: int) -> list[DElement]:
    """All monomials in ``q^-_n``, ``p^+_n`` (n in ``indices``) up to ``max_length``."""
    from itertools import combinations_with_replacement

    letters = sorted(set(indices) | {-n for n in indices}, key=_word_key)
    out = []
    seen = set()
    for length in range(max_length + 1):
        for combo in combinations_with_replacement(letters, length):
            x = DElement({(combo, 0): 1}, minus, plus)
            if x and frozenset(x._terms) not in seen:
                seen.add(frozenset(x._terms))
                out.append(x)
    return out
