"""Fixed-point localization for weighted projective models, done exactly.

All class expressions live in Q(a1, a2, k): a1, a2 are the torus weights and
k scales the line bundle. A weight such as a1/5 is the ordinary polynomial
(1/5)*a1, so the ring never needs fractional exponents.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Mapping, Sequence

import numpy as np

from .errors import ConsistencyError, DomainError
from .polynomial import SparsePoly

RING = ("a1", "a2", "k")


def _poly(value) -> SparsePoly:
    if isinstance(value, SparsePoly):
        if value.names != RING:
            raise ValueError(f"expected a polynomial in {RING}, got {value.names}")
        return value
    return SparsePoly.constant(RING, value)


def var(name: str) -> SparsePoly:
    return SparsePoly.variable(RING, name)


A1, A2, K = var("a1"), var("a2"), var("k")


class MultivariateRational:
    """num/den over Q[a1, a2, k], kept in a canonical (not fully reduced) form.

    Canonical means: integer coefficients with no common integer factor across
    numerator and denominator, no common monomial factor, and the lex-leading
    denominator coefficient positive. Polynomial gcds are not taken; ``cancel``
    divides out known factors by trial division instead.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num, den = _poly(num), _poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        self.num, self.den = _canonical(num, den)

    @classmethod
    def _raw(cls, num: SparsePoly, den: SparsePoly) -> "MultivariateRational":
        obj = cls.__new__(cls)
        obj.num, obj.den = num, den
        return obj

    def normalized(self) -> "MultivariateRational":
        return MultivariateRational(self.num, self.den)

    # arithmetic
    def _lift(self, other) -> "MultivariateRational":
        return other if isinstance(other, MultivariateRational) else MultivariateRational(other)

    def __add__(self, other):
        other = self._lift(other)
        if self.den == other.den:
            return MultivariateRational(self.num + other.num, self.den)
        return MultivariateRational(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return MultivariateRational._raw(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        return MultivariateRational(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return MultivariateRational(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return MultivariateRational(self.den**-n, self.num**-n)
        return MultivariateRational(self.num**n, self.den**n)

    def __eq__(self, other):
        try:
            other = self._lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        # equal values can have different canonical forms, so hash only what is invariant
        return hash("MultivariateRational")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def cancel(self, factors: Sequence[SparsePoly]) -> "MultivariateRational":
        """Divide out each known factor as often as it divides both parts."""
        num, den = self.num, self.den
        for f in factors:
            f = _poly(f).primitive()
            if f.is_constant():
                continue
            while True:
                qn, qd = num.exact_div(f), den.exact_div(f)
                if qn is None or qd is None:
                    break
                num, den = qn, qd
        return MultivariateRational(num, den)

    def substitute(self, values: Mapping[str, object]) -> "MultivariateRational":
        """Fix some variables to rational values (ring unchanged)."""
        den = self.den.restrict(values)
        if den.is_zero():
            raise ZeroDivisionError(f"denominator vanishes at {dict(values)}")
        return MultivariateRational(self.num.restrict(values), den)

    def as_polynomial(self) -> SparsePoly | None:
        """The quotient if the denominator divides the numerator, else None."""
        if self.den.is_constant():
            return self.num / self.den.constant_term()
        return self.num.exact_div(self.den)

    def to_string(self) -> str:
        if self.den == 1:
            return self.num.to_string()
        if self.den.is_constant():
            body = self.num.to_string()
            return f"{body}/{self.den.to_string()}" if len(self.num.terms) == 1 else f"({body})/{self.den.to_string()}"
        return f"({self.num.to_string()})/({self.den.to_string()})"

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"MultivariateRational({self.to_string()!r})"


def _canonical(num: SparsePoly, den: SparsePoly) -> tuple[SparsePoly, SparsePoly]:
    if num.is_zero():
        return num, den.one()
    mono = tuple(min(a, b) for a, b in zip(num.monomial_content(), den.monomial_content()))
    if any(mono):
        num, den = num.shift_down(mono), den.shift_down(mono)
    coeffs = list(num.terms.values()) + list(den.terms.values())
    scale = Fraction(reduce(lcm, (c.denominator for c in coeffs), 1))
    g = reduce(gcd, (abs(c.numerator) * (scale.numerator // c.denominator) for c in coeffs), 0)
    factor = scale / g
    if den.leading()[1] < 0:
        factor = -factor
    return num * factor, den * factor


# -- weighted models ---------------------------------------------------------
@dataclass(frozen=True)
class WeightedModel:
    """Weighted projective line or plane with the bundle of weight fiber_scale*k.

    weights are the coordinate weights (w0, w1[, w2]); the torus acts on the
    coordinates with weights (a1, 0) in dimension one and (a1, a2, 0) in
    dimension two. The jackpot model is weights (5, 1, 1) with fiber 5k.
    Weights must be pairwise coprime so that the isotropy at coordinate point j
    is exactly the cyclic group of order w_j, and every weight must divide
    fiber_scale so that the index is a polynomial in k rather than a
    quasi-polynomial.
    """

    weights: tuple[int, ...] = (5, 1, 1)
    fiber_scale: int = 5

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if len(self.weights) not in (2, 3):
            raise DomainError("only complex dimension 1 and 2 are implemented")
        if any(w < 1 for w in self.weights):
            raise DomainError(f"weights must be positive integers, got {self.weights}")
        for i, wi in enumerate(self.weights):
            for wj in self.weights[i + 1 :]:
                if gcd(wi, wj) != 1:
                    raise DomainError(f"weights must be pairwise coprime, got {self.weights}")
        if self.fiber_scale < 1 or any(self.fiber_scale % w for w in self.weights):
            raise DomainError(
                f"fiber scale {self.fiber_scale} must be a positive multiple of every weight {self.weights}"
            )

    @property
    def dimension(self) -> int:
        return len(self.weights) - 1

    @property
    def torus(self) -> tuple[SparsePoly, ...]:
        zero = SparsePoly(RING)
        return (A1, zero) if self.dimension == 1 else (A1, A2, zero)

    @property
    def fiber(self) -> SparsePoly:
        return K * self.fiber_scale


@dataclass(frozen=True)
class FixedPointDatum:
    label: str
    tangent_weights: tuple[MultivariateRational, ...]
    fiber_weight: MultivariateRational
    orbifold_order: int


def _label(j: int, n: int) -> str:
    return "[" + ",".join("1" if i == j else "0" for i in range(n)) + "]"


def fixed_point_data(model: WeightedModel) -> list[FixedPointDatum]:
    """Tangent weights (w_i/w_j) a_j - a_i, fiber (w_f/w_j) a_j, order w_j."""
    w, a = model.weights, model.torus
    out = []
    for j in range(len(w)):
        tangent = tuple(
            MultivariateRational(a[j] * Fraction(w[i], w[j]) - a[i]) for i in range(len(w)) if i != j
        )
        fiber = MultivariateRational(model.fiber * a[j] * Fraction(1, w[j]))
        out.append(FixedPointDatum(_label(j, len(w)), tangent, fiber, w[j]))
    return out


def euler_class(d: FixedPointDatum) -> MultivariateRational:
    for x in d.tangent_weights:
        if x.is_zero():
            raise DomainError(f"fixed point {d.label} is degenerate: a tangent weight vanishes")
    return reduce(lambda p, q: p * q, d.tangent_weights)


def chern_character(d: FixedPointDatum, dimension: int = 2) -> tuple[MultivariateRational, ...]:
    """(1, w, w^2/2) truncated at the real dimension of the base."""
    w = d.fiber_weight
    parts = (MultivariateRational(1), w, w * w * Fraction(1, 2))
    return parts[: dimension + 1]


def todd_class(d: FixedPointDatum) -> tuple[MultivariateRational, ...]:
    """Graded Todd class from the tangent weights (rank one or two)."""
    xs = d.tangent_weights
    one = MultivariateRational(1)
    if len(xs) == 1:
        return one, xs[0] * Fraction(1, 2)
    x1, x2 = xs
    return one, (x1 + x2) * Fraction(1, 2), (x1 * x1 + x2 * x2 + x1 * x2 * 3) * Fraction(1, 12)


def point_contributions(d: FixedPointDatum, dimension: int) -> tuple[MultivariateRational, ...]:
    """Per-point terms grouped by power of k: (td_top, ch_2 td_{top-2}, ...)/(order * e)."""
    e = euler_class(d) * d.orbifold_order
    ch, td = chern_character(d, dimension), todd_class(d)
    terms = tuple(ch[i] * td[dimension - i] for i in range(dimension + 1))
    factors = [x.num for x in d.tangent_weights]
    return tuple((t / e).cancel(factors) for t in terms)


def twisted_sector(d: FixedPointDatum, weights: Sequence[int], j: int) -> Fraction:
    """Constant contribution of the nontrivial isotropy elements at point j.

    With w_j dividing the fiber scale the fiber character is trivial on the
    isotropy group, leaving (1/w_j) sum_{zeta != 1} 1/prod_i (1 - zeta^{w_i}).
    The sum is rational; it is evaluated in floating point and snapped to the
    nearest fraction with denominator dividing w_j^dim, then verified.
    """
    n = d.orbifold_order
    if n == 1:
        return Fraction(0)
    others = [w for i, w in enumerate(weights) if i != j]
    zetas = np.exp(2j * np.pi * np.arange(1, n) / n)
    terms = np.ones_like(zetas)
    for w in others:
        terms = terms / (1 - zetas**w)
    value = terms.sum() / n
    bound = n ** (len(others) + 1)
    snapped = Fraction(round(value.real * bound), bound)
    if abs(value.imag) > 1e-9 or abs(float(snapped) - value.real) > 1e-9:
        raise ConsistencyError(f"twisted sector at {d.label} did not evaluate to a rational: {value}")
    return snapped


@dataclass(frozen=True)
class LocalizationResult:
    polynomial: SparsePoly  # in k only (ring RING, a-exponents zero)
    graded: tuple[SparsePoly, ...]  # k^0, k^1, ... parts
    per_point: dict[str, MultivariateRational]

    def coefficient(self, power: int) -> Fraction:
        return self.polynomial.terms.get((0, 0, power), Fraction(0))

    def coefficients(self) -> dict[int, Fraction]:
        deg = self.polynomial.degree("k")
        return {p: self.coefficient(p) for p in range(deg, -1, -1)}

    def __call__(self, k) -> Fraction:
        return self.polynomial.evaluate({"a1": 0, "a2": 0, "k": k})

    def to_json(self) -> dict:
        return {
            "coefficients": {f"k^{p}": _frac_str(c) for p, c in self.coefficients().items()},
            "graded": {f"k^{p}": g.to_string() for p, g in enumerate(self.graded)},
            "per_point": {label: r.to_string() for label, r in self.per_point.items()},
        }


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _as_k_polynomial(r: MultivariateRational, what: str) -> SparsePoly:
    p = r.as_polynomial()
    if p is None or p.degree("a1") or p.degree("a2"):
        raise ConsistencyError(f"{what} still depends on the torus weights: {r}")
    return p


def localized_index(model: WeightedModel = WeightedModel()) -> LocalizationResult:
    """Sum the fixed-point contributions; the torus weights must cancel."""
    data = fixed_point_data(model)
    n = model.dimension
    factors = [x.num for d in data for x in d.tangent_weights]
    per_point, graded_sums = {}, [MultivariateRational(0)] * (n + 1)
    for j, d in enumerate(data):
        parts = point_contributions(d, n)
        parts = (parts[0] + twisted_sector(d, model.weights, j),) + parts[1:]
        per_point[d.label] = reduce(lambda p, q: p + q, parts).cancel(factors)
        graded_sums = [s + p for s, p in zip(graded_sums, parts)]
    graded = tuple(_as_k_polynomial(s.cancel(factors), f"the k^{i} part") for i, s in enumerate(graded_sums))
    total = reduce(lambda p, q: p + q, graded)
    return LocalizationResult(total, graded, per_point)


def localized_index_at(model: WeightedModel, a1, a2) -> SparsePoly:
    """The same sum with the torus weights fixed to numbers; a polynomial in k."""
    n = model.dimension
    total = MultivariateRational(0)
    for j, d in enumerate(fixed_point_data(model)):
        total = total + twisted_sector(d, model.weights, j)
        for part in point_contributions(d, n):
            total = total + part.substitute({"a1": a1, "a2": a2})
    return _as_k_polynomial(total, "the specialized sum")


# -- the projective line -----------------------------------------------------
KRING = ("k",)


@dataclass(frozen=True)
class TruncatedClass:
    """c0 + c1*h with h^2 = 0; h is the positive generator integrating to 1."""

    c0: SparsePoly
    c1: SparsePoly

    def __mul__(self, other: "TruncatedClass") -> "TruncatedClass":
        return TruncatedClass(self.c0 * other.c0, self.c0 * other.c1 + self.c1 * other.c0)

    def integral(self) -> SparsePoly:
        return self.c1


def line_bundle_character(k: SparsePoly | int) -> TruncatedClass:
    """ch(L_k) = exp(k h) truncated = 1 + k h, since F_k = k F_1."""
    k = k if isinstance(k, SparsePoly) else SparsePoly.constant(KRING, k)
    return TruncatedClass(k.one(), k)


def tangent_todd() -> TruncatedClass:
    """td of the tangent bundle, isomorphic to L_2: 2h/(1 - e^{-2h}) = 1 + h."""
    return TruncatedClass(SparsePoly.constant(KRING, 1), SparsePoly.constant(KRING, 1))


def cp1_index(k: int | None = None):
    """ch(L_k) td(T) on the projective line.

    With k None the product class is returned (coefficients (1, k+1)); with an
    integer k the integral k + 1 is returned.
    """
    kk = SparsePoly.variable(KRING, "k") if k is None else SparsePoly.constant(KRING, k)
    product = line_bundle_character(kk) * tangent_todd()
    if k is None:
        return product
    return int(product.integral().constant_term())


def curvature_quadrature(radius: float, steps: int = 4096) -> float:
    """(1/2pi) times the circulation of Im(conj(z) dz)/(|z|^2 + 1) around |z| = R.

    Periodic trapezoid rule in the angle; the exact value is R^2/(R^2 + 1),
    which tends to 1 as the circle sweeps out the whole chart.
    """
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")
    if steps < 16:
        raise DomainError(f"need at least 16 quadrature steps, got {steps}")
    theta = np.linspace(0.0, 2.0 * np.pi, steps, endpoint=False)
    z = radius * np.exp(1j * theta)
    dz = 1j * z  # dz/dtheta
    integrand = np.imag(np.conj(z) * dz) / (np.abs(z) ** 2 + 1.0)
    return float(integrand.sum() * (2.0 * np.pi / steps) / (2.0 * np.pi))
