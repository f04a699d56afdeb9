"""Coefficient fields, sparse polynomials, evaluation domains and identity testing.

Every object in the package (circuits and the branching-program family) is
evaluated through a *domain*: a small object that knows how to add and multiply
values and how to interpret an edge/gate label.  The same evaluator code then
computes a field value at one point, a batch of points at once, an expanded
:class:`SparsePoly`, or a circuit (see :class:`membp.circuits.CircuitBuilder`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

MERSENNE_61 = (1 << 61) - 1


class BudgetExceeded(RuntimeError):
    """Raised when an exact oracle or evaluator runs past its configured budget."""


@dataclass(frozen=True, order=True)
class Var:
    """The variable ``X_index`` (indices start at 1)."""

    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 1:
            raise ValueError(f"variable index must be a positive integer, got {self.index!r}")

    def __repr__(self):
        return f"X{self.index}"


# A gate or edge label: a constant or a variable.
Weight = Union[int, Fraction, Var]


def parse_constant(text: str | int | Fraction) -> int | Fraction:
    """Parse ``"5"``, ``"-3"`` or ``"7/2"`` into an exact constant."""
    if isinstance(text, (int, Fraction)) and not isinstance(text, bool):
        return text
    value = Fraction(str(text).strip())
    return value.numerator if value.denominator == 1 else value


def format_constant(value: int | Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# -- fields ---------------------------------------------------------------


class PrimeField:
    """Integers modulo a prime ``p``; elements are plain ints in ``[0, p)``."""

    rational = False

    def __init__(self, p: int = MERSENNE_61):
        if p < 2:
            raise ValueError("modulus must be a prime >= 2")
        self.p = p

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("prime", self.p))

    zero = 0
    one = 1

    def element(self, x) -> int:
        if isinstance(x, Fraction):
            return self.mul(x.numerator % self.p, self.inv(x.denominator % self.p))
        if isinstance(x, str):
            return self.element(parse_constant(x))
        return int(x) % self.p

    def add(self, a: int, b: int) -> int:
        s = a + b
        return s - self.p if s >= self.p else s

    def sub(self, a: int, b: int) -> int:
        s = a - b
        return s + self.p if s < 0 else s

    def neg(self, a: int) -> int:
        return self.p - a if a else 0

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, -1, self.p)

    def random_elements(self, rng: np.random.Generator, size) -> list:
        draws = rng.integers(0, self.p, size=size, dtype=np.uint64)
        return draws.tolist()

    @property
    def sample_size(self) -> int:
        return self.p

    def to_json(self):
        return {"prime": str(self.p)}


class RationalField:
    """Exact rational arithmetic, for cross-checking the modular results."""

    rational = True
    zero = Fraction(0)
    one = Fraction(1)
    # random points are drawn from integers in [-SAMPLE/2, SAMPLE/2)
    SAMPLE = 1 << 32

    def __repr__(self):
        return "RationalField()"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("rational")

    def element(self, x) -> Fraction:
        if isinstance(x, str):
            x = parse_constant(x)
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return 1 / Fraction(a)

    def random_elements(self, rng: np.random.Generator, size) -> list:
        draws = rng.integers(-self.SAMPLE // 2, self.SAMPLE // 2, size=size, dtype=np.int64)
        return np.vectorize(Fraction, otypes=[object])(draws).tolist()

    @property
    def sample_size(self) -> int:
        return self.SAMPLE

    def to_json(self):
        return "rational"


Field = Union[PrimeField, RationalField]
DEFAULT_FIELD = PrimeField()


def field_from_json(doc) -> Field:
    if doc == "rational":
        return RationalField()
    if isinstance(doc, Mapping) and "prime" in doc:
        return PrimeField(int(doc["prime"]))
    raise ValueError(f"unrecognised field declaration {doc!r}")


# -- sparse polynomials ---------------------------------------------------

Monomial = tuple  # sorted tuple of (variable index, exponent) pairs


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    powers = dict(m1)
    for var, exp in m2:
        powers[var] = powers.get(var, 0) + exp
    return tuple(sorted(powers.items()))


class SparsePoly:
    """A multivariate polynomial stored as ``{monomial: coefficient}``.

    Zero coefficients are never stored, so two equal polynomials over the same
    field have identical term maps.  Instances are treated as immutable.
    """

    __slots__ = ("field", "terms")

    def __init__(self, field: Field, terms: Mapping[Monomial, object] | None = None):
        self.field = field
        clean = {}
        for mono, coeff in (terms or {}).items():
            c = field.element(coeff)
            if c != field.zero:
                clean[tuple(sorted(mono))] = c
        self.terms = clean

    @classmethod
    def _raw(cls, field, terms):
        poly = cls.__new__(cls)
        poly.field = field
        poly.terms = terms
        return poly

    @classmethod
    def constant(cls, field: Field, c) -> SparsePoly:
        return cls(field, {(): c})

    @classmethod
    def variable(cls, field: Field, index: int) -> SparsePoly:
        return cls._raw(field, {((index, 1),): field.one})

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: SparsePoly) -> SparsePoly:
        f = self.field
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = f.add(out.get(mono, f.zero), c)
            if s == f.zero:
                out.pop(mono, None)
            else:
                out[mono] = s
        return SparsePoly._raw(f, out)

    def __neg__(self) -> SparsePoly:
        return SparsePoly._raw(self.field, {m: self.field.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other: SparsePoly) -> SparsePoly:
        return self + (-other)

    def __mul__(self, other: SparsePoly) -> SparsePoly:
        f = self.field
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                s = f.add(out.get(mono, f.zero), f.mul(c1, c2))
                if s == f.zero:
                    out.pop(mono, None)
                else:
                    out[mono] = s
        return SparsePoly._raw(f, out)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e for _, e in mono) for mono in self.terms)

    def variables(self) -> set[int]:
        return {v for mono in self.terms for v, _ in mono}

    def __call__(self, point: Sequence):
        f = self.field
        total = f.zero
        for mono, c in self.terms.items():
            term = c
            for var, exp in mono:
                term = f.mul(term, pow(point[var - 1], exp, f.p) if not f.rational else point[var - 1] ** exp)
            total = f.add(total, term)
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items()):
            factors = [f"X{v}" + (f"^{e}" if e > 1 else "") for v, e in mono]
            if c != self.field.one or not factors:
                factors.insert(0, str(c))
            parts.append("*".join(factors))
        return " + ".join(parts)


# -- evaluation domains ---------------------------------------------------


class FieldDomain:
    """Evaluate at a single point; ``point[i - 1]`` is the value of ``X_i``."""

    def __init__(self, field: Field, point: Sequence):
        self.field = field
        self.point = [field.element(x) for x in point]
        self.zero = field.zero
        self.one = field.one
        self.add = field.add
        self.mul = field.mul

    def weight(self, w: Weight):
        if isinstance(w, Var):
            try:
                return self.point[w.index - 1]
            except IndexError:
                raise ValueError(f"assignment of length {len(self.point)} does not cover {w}") from None
        return self.field.element(w)


class BatchDomain:
    """Evaluate at many points at once; values are tuples, one entry per point.

    The evaluators' structural work (loops, dictionary lookups) is shared by
    all points, which is what makes 20- and 50-point identity tests cheap.
    """

    def __init__(self, field: Field, points: Sequence[Sequence]):
        self.field = field
        self.points = [[field.element(x) for x in pt] for pt in points]
        k = len(self.points)
        self.zero = (field.zero,) * k
        self.one = (field.one,) * k
        self._consts: dict = {}

    def add(self, a, b):
        if isinstance(self.field, PrimeField):
            p = self.field.p
            return tuple([(x + y) % p for x, y in zip(a, b)])
        return tuple([x + y for x, y in zip(a, b)])

    def mul(self, a, b):
        if isinstance(self.field, PrimeField):
            p = self.field.p
            return tuple([x * y % p for x, y in zip(a, b)])
        return tuple([x * y for x, y in zip(a, b)])

    def weight(self, w: Weight):
        cached = self._consts.get(w)
        if cached is not None:
            return cached
        if isinstance(w, Var):
            try:
                value = tuple(pt[w.index - 1] for pt in self.points)
            except IndexError:
                raise ValueError(f"assignment does not cover {w}") from None
        else:
            value = (self.field.element(w),) * len(self.points)
        self._consts[w] = value
        return value


class PolyDomain:
    """Expand into a :class:`SparsePoly`, failing once ``max_terms`` is exceeded."""

    def __init__(self, field: Field = DEFAULT_FIELD, max_terms: int = 10_000):
        self.field = field
        self.max_terms = max_terms
        self.zero = SparsePoly(field)
        self.one = SparsePoly.constant(field, 1)

    def _check(self, poly: SparsePoly) -> SparsePoly:
        if len(poly) > self.max_terms:
            raise BudgetExceeded(f"expansion exceeded {self.max_terms} terms")
        return poly

    def add(self, a, b):
        return self._check(a + b)

    def mul(self, a, b):
        return self._check(a * b)

    def weight(self, w: Weight):
        if isinstance(w, Var):
            return SparsePoly.variable(self.field, w.index)
        return SparsePoly.constant(self.field, w)


def domain_sum(domain, values: Iterable):
    total = None
    for v in values:
        total = v if total is None else domain.add(total, v)
    return domain.zero if total is None else total


# -- field_ops ------------------------------------------------------------


def field_ops(op: str, a, b=None, field: Field = DEFAULT_FIELD):
    """Apply ``add``/``sub``/``mul``/``inv``/``neg`` in ``field``."""
    a = field.element(a)
    if op == "inv":
        return field.inv(a)
    if op == "neg":
        return field.neg(a)
    b = field.element(b)
    if op in ("add", "sub", "mul"):
        return getattr(field, op)(a, b)
    raise ValueError(f"unknown field operation {op!r}")


# -- exact expansion and identity testing --------------------------------


def _evaluator(obj) -> Callable:
    if hasattr(obj, "evaluate"):
        return obj.evaluate
    if callable(obj):
        return obj
    raise TypeError(f"{type(obj).__name__} cannot be evaluated")


def poly_expand_small(obj, max_terms: int = 10_000, field: Field = DEFAULT_FIELD) -> SparsePoly:
    """Fully expand the polynomial computed by ``obj``.

    ``obj`` is anything with an ``evaluate(domain)`` method (circuits and
    branching programs) or a callable taking a domain.  Raises
    :class:`BudgetExceeded` when an intermediate result has more than
    ``max_terms`` terms; callers are expected to fall back to :func:`pit_equal`.
    """
    return _evaluator(obj)(PolyDomain(field, max_terms))


@dataclass(frozen=True)
class PitResult:
    equal: bool
    trials: int
    seed: int
    witness: tuple | None = None
    values: tuple | None = None

    def __bool__(self):
        return self.equal

    @property
    def verdict(self) -> str:
        return "equal-whp" if self.equal else "unequal"


def random_points(n_vars: int, trials: int, seed: int, field: Field = DEFAULT_FIELD) -> list[list]:
    """Uniform points from ``field`` drawn with numpy's PCG64 generator."""
    rng = np.random.Generator(np.random.PCG64(seed))
    if n_vars == 0:
        return [[] for _ in range(trials)]
    return field.random_elements(rng, (trials, n_vars))


def _max_var(obj) -> int:
    return obj.max_var() if hasattr(obj, "max_var") else 0


def _degree(obj):
    return obj.degree_bound() if hasattr(obj, "degree_bound") else None


def pit_equal(
    f,
    g,
    trials: int = 50,
    seed: int = 0,
    field: Field = DEFAULT_FIELD,
    n_vars: int | None = None,
    error_exponent: int = 20,
) -> PitResult:
    """Randomised identity test of two evaluable objects.

    All ``trials`` points are evaluated; the first point on which the values
    differ is returned as the witness.  Raises ``ValueError`` when a degree
    bound ``d`` of either side makes a single trial's false-positive rate
    ``d / |sample set|`` larger than ``2**-error_exponent``.
    """
    if n_vars is None:
        n_vars = max(_max_var(f), _max_var(g))
    for obj in (f, g):
        d = _degree(obj)
        if d is not None and d > field.sample_size >> error_exponent:
            raise ValueError(f"degree bound {d} too large for sample size {field.sample_size}")
    points = random_points(n_vars, trials, seed, field)
    domain = BatchDomain(field, points)
    fa = _evaluator(f)(domain)
    ga = _evaluator(g)(domain)
    for k, (x, y) in enumerate(zip(fa, ga)):
        if x != y:
            return PitResult(False, trials, seed, tuple(domain.points[k]), (x, y))
    return PitResult(True, trials, seed)
