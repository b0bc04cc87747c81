"""Ordinals below omega^omega as finitely supported coefficient vectors.

An `OrdVec` (m0, m1, ..., mk) denotes ... + w^2*m2 + w*m1 + m0.  The prime
coding `rho` maps it to the integer p0^m0 * p1^m1 * ..., which is the
interchange form for ordinal codes; the vector is the working form.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    BINARY_TYPES,
    Bang,
    DSequent,
    Formula,
    Sequent,
    Star,
    contains_star,
    star_under_bang,
)


@dataclass(frozen=True, repr=False)
class OrdVec:
    coeffs: tuple = ()

    def __post_init__(self):
        c = tuple(self.coeffs)
        while c and c[-1] == 0:
            c = c[:-1]
        if any(x < 0 for x in c):
            raise ValueError("negative coefficient")
        object.__setattr__(self, "coeffs", c)

    def __repr__(self):
        return f"OrdVec{self.coeffs}"

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coeffs) + ")"

    def __bool__(self):
        return bool(self.coeffs)

    def _key(self):
        return tuple(reversed(self.coeffs))

    def __lt__(self, other):
        return ord_compare(self, other) < 0

    def __le__(self, other):
        return ord_compare(self, other) <= 0

    def __gt__(self, other):
        return ord_compare(self, other) > 0

    def __ge__(self, other):
        return ord_compare(self, other) >= 0

    @property
    def degree(self) -> int:
        """Index of the highest non-zero coefficient (-1 for zero)."""
        return len(self.coeffs) - 1

    def symbolic(self) -> str:
        """Human-readable expansion such as ``w^2*3 + w*1 + 4``."""
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            m = self.coeffs[i]
            if m == 0:
                continue
            if i == 0:
                parts.append(str(m))
            elif i == 1:
                parts.append(f"w*{m}")
            else:
                parts.append(f"w^{i}*{m}")
        return " + ".join(parts)


ORD_ZERO = OrdVec()
ORD_ONE = OrdVec((1,))


def ordvec(*coeffs) -> OrdVec:
    return OrdVec(tuple(coeffs))


def ord_compare(a: OrdVec, b: OrdVec) -> int:
    """-1, 0 or 1 comparing the denoted ordinals."""
    la, lb = len(a.coeffs), len(b.coeffs)
    for i in range(max(la, lb) - 1, -1, -1):
        ma = a.coeffs[i] if i < la else 0
        mb = b.coeffs[i] if i < lb else 0
        if ma != mb:
            return -1 if ma < mb else 1
    return 0


def ord_add(a: OrdVec, b: OrdVec) -> OrdVec:
    """Coefficient-wise natural sum."""
    la, lb = len(a.coeffs), len(b.coeffs)
    n = max(la, lb)
    return OrdVec(
        tuple(
            (a.coeffs[i] if i < la else 0) + (b.coeffs[i] if i < lb else 0)
            for i in range(n)
        )
    )


def ord_shift(a: OrdVec) -> OrdVec:
    """Prepend a zero coefficient: multiply the denoted ordinal by w."""
    if not a.coeffs:
        return a
    return OrdVec((0,) + a.coeffs)


def ord_max(a: OrdVec, b: OrdVec) -> OrdVec:
    return b if ord_compare(a, b) < 0 else a


def _primes():
    known = [2]
    yield 2
    n = 3
    while True:
        if all(n % p for p in known if p * p <= n):
            known.append(n)
            yield n
        n += 2


def rho(a: OrdVec) -> int:
    """Prime-power code p0^m0 * p1^m1 * ...; rho of zero is 1."""
    code = 1
    gen = _primes()
    for m in a.coeffs:
        p = next(gen)
        code *= p**m
    return code


def rho_inv(code: int) -> OrdVec:
    if code < 1:
        raise ValueError("ordinal codes are positive integers")
    coeffs = []
    n = code
    gen = _primes()
    while n > 1:
        p = next(gen)
        m = 0
        while n % p == 0:
            n //= p
            m += 1
        coeffs.append(m)
    return OrdVec(tuple(coeffs))


def base_step(a: OrdVec):
    """Unique split a = base + step with base a limit (or zero) and step < w."""
    step = a.coeffs[0] if a.coeffs else 0
    base = OrdVec((0,) + a.coeffs[1:]) if len(a.coeffs) > 1 else ORD_ZERO
    return base, step


def lift(a: OrdVec, n: int) -> OrdVec:
    """base(a) + step(a)*n + 1 for n >= 1."""
    if n < 1:
        raise ValueError("lift requires n >= 1")
    base, step = base_step(a)
    return ord_add(base, OrdVec((step * n + 1,)))


# ---------------------------------------------------------------------------
# the star-nesting measure

class StarUnderBangError(ValueError):
    pass


_MU3 = OrdVec((3,))


def mu(f: Formula) -> OrdVec:
    """Ordinal measure of star nesting; undefined when `^*` occurs under `!`."""
    if star_under_bang(f):
        raise StarUnderBangError(f"star under bang in {f}")
    return _mu(f)


def _mu(f: Formula) -> OrdVec:
    if isinstance(f, Bang):
        return ORD_ZERO
    if not contains_star(f):
        return ORD_ZERO
    if isinstance(f, Star):
        return ord_add(ord_shift(_mu(f.body)), _MU3)
    if isinstance(f, BINARY_TYPES):
        return ord_add(_mu(f.left), _mu(f.right))
    return ORD_ZERO


def mu_sequent(s) -> OrdVec:
    """Natural sum of the measures of all antecedent parts and the succedent.

    The !-zone of a dyadic sequent is ignored (it is star-free by shape).
    """
    if isinstance(s, (Sequent, DSequent)):
        out = _checked_mu(s.succedent)
        for f in s.antecedent:
            out = ord_add(out, _checked_mu(f))
        return out
    raise TypeError(f"not a sequent: {s!r}")


def _checked_mu(f: Formula) -> OrdVec:
    if star_under_bang(f):
        raise StarUnderBangError(f"star under bang in {f}")
    return _mu(f)
