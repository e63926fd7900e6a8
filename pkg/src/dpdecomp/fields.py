"""Exact arithmetic in prime fields GF(p) and the polynomial ring GF(p)[x].

Field elements are plain Python ints kept reduced to 0..p-1; a PrimeField
object carries the modulus and the operations, so no per-element wrapper is
allocated.  Polynomials store their coefficient tuple lowest degree first
with trailing zeros stripped, so the zero polynomial is the empty tuple and
``degree`` is -1 for it (the sentinel sorts below every true degree).

Exact rational values elsewhere in the package use fractions.Fraction, which
already guarantees lowest terms and a positive denominator.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence


def is_prime(n: int) -> bool:
    """Trial-division primality test; adequate for the small moduli used here."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class PrimeField:
    """The field GF(p) for a prime modulus p, with elements as reduced ints."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or isinstance(p, bool):
            raise ValueError(f"modulus must be an int, got {p!r}")
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        self.p = p

    def element(self, a: int) -> int:
        """Reduce an integer into canonical form 0..p-1."""
        return a % self.p

    def elements(self) -> range:
        return range(self.p)

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        """Multiplicative inverse by Fermat's little theorem.

        Raises ZeroDivisionError for the zero element.
        """
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            return pow(self.inv(a), -k, self.p)
        return pow(a % self.p, k, self.p)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"


class Poly:
    """A univariate polynomial over GF(p).

    Immutable.  Coefficients run from the constant term upward; the tuple
    never ends in a zero, so equal polynomials compare equal structurally.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: PrimeField, coeffs: Iterable[int] = ()):
        cs = [c % field.p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("Poly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, field: PrimeField) -> "Poly":
        return cls(field, ())

    @classmethod
    def one(cls, field: PrimeField) -> "Poly":
        return cls(field, (1,))

    @classmethod
    def constant(cls, field: PrimeField, c: int) -> "Poly":
        return cls(field, (c,))

    @classmethod
    def x(cls, field: PrimeField) -> "Poly":
        return cls(field, (0, 1))

    @classmethod
    def monomial(cls, field: PrimeField, k: int, c: int = 1) -> "Poly":
        return cls(field, (0,) * k + (c,))

    # -- basic structure ---------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree, with -1 standing in for the degree of the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def monic(self) -> "Poly":
        """Scale to leading coefficient 1 (the zero polynomial is returned as is)."""
        if self.is_zero or self.is_monic:
            return self
        return self.scale(self.field.inv(self.lead()))

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Poly") -> None:
        if not isinstance(other, Poly) or other.field != self.field:
            raise ValueError("polynomials must share a field")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.field, (self[k] + other[k] for k in range(n)))

    def __sub__(self, other: "Poly") -> "Poly":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.field, (self[k] - other[k] for k in range(n)))

    def __neg__(self) -> "Poly":
        return Poly(self.field, (-c for c in self.coeffs))

    def scale(self, c: int) -> "Poly":
        return Poly(self.field, (c * a for a in self.coeffs))

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        if self.is_zero or other.is_zero:
            return Poly.zero(self.field)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(self.field, out)

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative polynomial powers are not defined")
        result = Poly.one(self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        self._check(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        field = self.field
        rem = list(self.coeffs)
        div = other.coeffs
        dd = len(div) - 1
        inv_lead = field.inv(div[-1])
        quot = [0] * max(len(rem) - dd, 0)
        for k in range(len(rem) - dd - 1, -1, -1):
            c = (rem[k + dd] * inv_lead) % field.p
            if c:
                quot[k] = c
                for j, b in enumerate(div):
                    rem[k + j] = (rem[k + j] - c * b) % field.p
        return Poly(field, quot), Poly(field, rem[:dd])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def divides(self, other: "Poly") -> bool:
        return (other % self).is_zero

    def gcd(self, other: "Poly") -> "Poly":
        """Monic greatest common divisor; gcd(0, 0) is 0."""
        self._check(other)
        a, b = self, other
        while not b.is_zero:
            a, b = b, a % b
        return a.monic()

    def derivative(self) -> "Poly":
        return Poly(self.field, (k * c for k, c in enumerate(self.coeffs) if k))

    def pth_root(self) -> "Poly":
        """The p-th root of a polynomial in x^p.

        Valid exactly when the derivative vanishes; coefficients of GF(p) are
        their own p-th roots.
        """
        p = self.field.p
        if any(c and k % p for k, c in enumerate(self.coeffs)):
            raise ValueError("polynomial is not a p-th power")
        return Poly(self.field, self.coeffs[::p])

    def __call__(self, a: int) -> int:
        """Evaluate at a scalar by Horner's rule."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * a + c) % self.field.p
        return acc

    # -- comparisons and text ---------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Poly)
            and other.field == self.field
            and other.coeffs == self.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __repr__(self) -> str:
        if self.is_zero:
            return f"Poly(0 mod {self.field.p})"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self[k]
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                xk = "x" if k == 1 else f"x^{k}"
                terms.append(xk if c == 1 else f"{c}*{xk}")
        return f"Poly({' + '.join(terms)} mod {self.field.p})"


def poly_from_coeffs(field: PrimeField, coeffs: Sequence[int]) -> Poly:
    return Poly(field, coeffs)


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Module-level spelling of the monic polynomial gcd."""
    return f.gcd(g)


def all_polys(field: PrimeField, degree: int) -> Iterator[Poly]:
    """Yield every polynomial of exactly the given degree (used by tests)."""
    if degree < 0:
        yield Poly.zero(field)
        return
    p = field.p
    for code in range(p**degree, p ** (degree + 1)):
        digits = []
        c = code
        for _ in range(degree + 1):
            digits.append(c % p)
            c //= p
        yield Poly(field, digits)
