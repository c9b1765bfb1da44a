"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a map from integer exponent tuples to nonzero ``Fraction``
coefficients, tagged with the variable names so that mixing rings is caught
early. Terms are ordered lexicographically by exponent tuple (first variable
most significant); that order drives division and the canonical sign rule.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping

Exponent = tuple[int, ...]


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("float coefficients are not allowed; use Fraction or int")
    return Fraction(value)


class SparsePoly:
    __slots__ = ("names", "terms", "_hash")

    def __init__(self, names: Iterable[str], terms: Mapping[Exponent, object] | None = None):
        self.names = tuple(names)
        clean: dict[Exponent, Fraction] = {}
        n = len(self.names)
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise ValueError(f"exponent {exp} does not match variables {self.names}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent {exp}")
            c = _frac(c)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
                if not clean[exp]:
                    del clean[exp]
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, names, value) -> "SparsePoly":
        names = tuple(names)
        return cls(names, {(0,) * len(names): value})

    @classmethod
    def variable(cls, names, name: str) -> "SparsePoly":
        names = tuple(names)
        exp = tuple(1 if v == name else 0 for v in names)
        if sum(exp) != 1:
            raise ValueError(f"unknown variable {name!r} for ring {names}")
        return cls(names, {exp: 1})

    @classmethod
    def monomial(cls, names, exponent: Exponent, coeff=1) -> "SparsePoly":
        return cls(names, {tuple(exponent): coeff})

    def zero(self) -> "SparsePoly":
        return SparsePoly(self.names)

    def one(self) -> "SparsePoly":
        return SparsePoly.constant(self.names, 1)

    # -- basic predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.names), Fraction(0))

    def degree(self, var: str | int) -> int:
        i = self._index(var)
        return max((e[i] for e in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def order(self) -> int:
        """Minimal total degree over all terms (vanishing order at the origin)."""
        if not self.terms:
            raise ValueError("the zero polynomial has no vanishing order")
        return min(sum(e) for e in self.terms)

    def leading(self) -> tuple[Exponent, Fraction]:
        exp = max(self.terms)
        return exp, self.terms[exp]

    def _index(self, var: str | int) -> int:
        if isinstance(var, int):
            return var
        return self.names.index(var)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            if other.names != self.names:
                raise ValueError(f"ring mismatch: {self.names} vs {other.names}")
            return other
        return SparsePoly.constant(self.names, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return SparsePoly(self.names, out)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly(self.names, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            c = _frac(other)
            return SparsePoly(self.names, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return SparsePoly(self.names, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, SparsePoly):
            q = self.exact_div(other)
            if q is None:
                raise ArithmeticError("polynomial division is not exact")
            return q
        c = _frac(other)
        return SparsePoly(self.names, {e: v / c for e, v in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = self.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.names == other.names and self.terms == other.terms
        try:
            return self == self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.names, frozenset(self.terms.items())))
        return self._hash

    # -- structure ----------------------------------------------------------
    def monomial_content(self) -> Exponent:
        """Componentwise minimum exponent: the largest monomial dividing self."""
        if not self.terms:
            return (0,) * len(self.names)
        return tuple(min(col) for col in zip(*self.terms))

    def shift_down(self, exponent: Exponent) -> "SparsePoly":
        """Divide by the monomial with the given exponent (must divide)."""
        out = {}
        for e, c in self.terms.items():
            ne = tuple(a - b for a, b in zip(e, exponent))
            if any(x < 0 for x in ne):
                raise ArithmeticError(f"monomial {exponent} does not divide the polynomial")
            out[ne] = c
        return SparsePoly(self.names, out)

    def integer_content(self) -> Fraction:
        """Positive rational c with self / c having coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        dens = reduce(lcm, (c.denominator for c in self.terms.values()), 1)
        nums = reduce(gcd, (abs(c.numerator) * (dens // c.denominator) for c in self.terms.values()), 0)
        return Fraction(nums, dens)

    def primitive(self) -> "SparsePoly":
        return self / self.integer_content() if self.terms else self

    def exact_div(self, divisor: "SparsePoly") -> "SparsePoly | None":
        """Quotient if divisor divides self exactly, otherwise None (lex division)."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        dlead, dcoef = divisor.leading()
        quotient: dict[Exponent, Fraction] = {}
        rem = dict(self.terms)
        while rem:
            lead = max(rem)
            shift = tuple(a - b for a, b in zip(lead, dlead))
            if any(s < 0 for s in shift):
                return None
            q = rem[lead] / dcoef
            quotient[shift] = quotient.get(shift, 0) + q
            for e, c in divisor.terms.items():
                ne = tuple(a + b for a, b in zip(e, shift))
                v = rem.get(ne, 0) - q * c
                if v:
                    rem[ne] = v
                else:
                    rem.pop(ne, None)
        return SparsePoly(self.names, quotient)

    def substitute(self, mapping: Mapping[str, "SparsePoly | int | Fraction"], names=None) -> "SparsePoly":
        """Replace variables by polynomials (in the ring ``names``, default self's)."""
        names = tuple(names) if names is not None else self.names
        images = []
        for v in self.names:
            if v in mapping:
                img = mapping[v]
                if not isinstance(img, SparsePoly):
                    img = SparsePoly.constant(names, img)
                elif img.names != names:
                    raise ValueError(f"substitution image for {v} lives in {img.names}, expected {names}")
            else:
                if v not in names:
                    raise ValueError(f"variable {v} has no image in ring {names}")
                img = SparsePoly.variable(names, v)
            images.append(img)
        out = SparsePoly(names)
        power_cache: dict[tuple[int, int], SparsePoly] = {}
        for e, c in self.terms.items():
            term = SparsePoly.constant(names, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in power_cache:
                        power_cache[key] = images[i] ** k
                    term = term * power_cache[key]
            out = out + term
        return out

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        total = Fraction(0)
        vals = [_frac(values[v]) for v in self.names]
        for e, c in self.terms.items():
            t = c
            for x, k in zip(vals, e):
                if k:
                    t *= x**k
            total += t
        return total

    def restrict(self, values: Mapping[str, object]) -> "SparsePoly":
        """Evaluate some variables, keeping the ring (evaluated ones get exponent 0)."""
        idx = {self.names.index(v): _frac(x) for v, x in values.items()}
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            t = c
            ne = list(e)
            for i, x in idx.items():
                if e[i]:
                    t *= x ** e[i]
                ne[i] = 0
            ne = tuple(ne)
            out[ne] = out.get(ne, 0) + t
        return SparsePoly(self.names, out)

    def homogeneous_part(self, degree: int) -> "SparsePoly":
        return SparsePoly(self.names, {e: c for e, c in self.terms.items() if sum(e) == degree})

    def coefficients_in(self, var: str) -> dict[int, "SparsePoly"]:
        """Group by powers of ``var``: {power: coefficient polynomial (var-free)}."""
        i = self._index(var)
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            ne = e[:i] + (0,) + e[i + 1 :]
            out.setdefault(e[i], {})[ne] = c
        return {k: SparsePoly(self.names, t) for k, t in sorted(out.items())}

    # -- printing -----------------------------------------------------------
    def sorted_terms(self, descending: bool = True):
        """Terms by total degree then lex; stable order used by every printer."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=descending)

    def to_string(self, power: str = "^", times: str = "*", descending: bool = True, latex: bool = False) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms(descending):
            factors = []
            for name, k in zip(self.names, e):
                if k == 0:
                    continue
                if k == 1:
                    factors.append(name)
                elif latex and k >= 10:
                    factors.append(f"{name}{power}{{{k}}}")
                else:
                    factors.append(f"{name}{power}{k}")
            mag = abs(c)
            coef = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            if factors:
                body = times.join(factors)
                body = body if mag == 1 else f"{coef}{times}{body}"
            else:
                body = coef
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += sign + body
        return out

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"SparsePoly({self.names}, {self.to_string()!r})"
