"""Exact arithmetic in Z[zeta_p] for an odd prime p.

Elements are stored in the integral basis {1, zeta, ..., zeta^(p-2)},
reduced eagerly with 1 + zeta + ... + zeta^(p-1) = 0, so equality of
values is equality of coefficient tuples.  Coefficients are Python ints
and may grow without bound; nothing here assumes they stay small.

All additive-character values, Kloosterman sums and Gauss sums produced
elsewhere in the package live in this ring.
"""

from __future__ import annotations

from typing import Iterable

import mpmath

from .errors import DomainError, NonRationalError


class CycInt:
    """An element of Z[zeta_p] in canonical reduced form."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Iterable[int]):
        coeffs = tuple(int(c) for c in coeffs)
        if p < 3 or p % 2 == 0:
            raise DomainError(f"p must be an odd prime, got {p}")
        if len(coeffs) != p - 1:
            raise DomainError(
                f"need exactly {p - 1} coefficients for p={p}, got {len(coeffs)}"
            )
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("CycInt is immutable")

    # ----- constructors -------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> "CycInt":
        return cls(p, (0,) * (p - 1))

    @classmethod
    def one(cls, p: int) -> "CycInt":
        return cls.integer(p, 1)

    @classmethod
    def integer(cls, p: int, n: int) -> "CycInt":
        return cls(p, (n,) + (0,) * (p - 2))

    @classmethod
    def zeta_power(cls, p: int, e: int) -> "CycInt":
        """zeta^e, reduced.  e is taken mod p."""
        counts = [0] * p
        counts[e % p] = 1
        return cls.from_exponents(p, counts)

    @classmethod
    def from_exponents(cls, p: int, counts: Iterable[int]) -> "CycInt":
        """Build sum_c counts[c] * zeta^c from a length-p weight vector.

        This is the natural output shape of character-sum kernels; the top
        weight is folded away with zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2)).
        """
        counts = list(counts)
        if len(counts) != p:
            raise DomainError(f"need {p} exponent weights, got {len(counts)}")
        top = counts[p - 1]
        return cls(p, tuple(counts[i] - top for i in range(p - 1)))

    # ----- ring structure -----------------------------------------------

    def _check_same_ring(self, other: "CycInt") -> None:
        if self.p != other.p:
            raise DomainError(f"mismatched cyclotomic rings: p={self.p} vs p={other.p}")

    def __add__(self, other):
        if isinstance(other, int):
            other = CycInt.integer(self.p, other)
        if not isinstance(other, CycInt):
            return NotImplemented
        self._check_same_ring(other)
        return CycInt(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, int):
            other = CycInt.integer(self.p, other)
        if not isinstance(other, CycInt):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.p, tuple(other * a for a in self.coeffs))
        if not isinstance(other, CycInt):
            return NotImplemented
        self._check_same_ring(other)
        p = self.p
        # Convolve in Z[x]/(x^p - 1), then fold the zeta^(p-1) weight.
        prod = [0] * p
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                prod[(i + j) % p] += a * b
        return CycInt.from_exponents(p, prod)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise DomainError("CycInt supports nonnegative powers only")
        result = CycInt.one(self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self == CycInt.integer(self.p, other)
        if not isinstance(other, CycInt):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        return f"CycInt(p={self.p}, coeffs={list(self.coeffs)})"

    # ----- Galois action --------------------------------------------------

    def galois_apply(self, t: int) -> "CycInt":
        """Apply the automorphism zeta -> zeta^t for t a unit mod p."""
        p = self.p
        t %= p
        if t == 0:
            raise DomainError(f"t must be a unit mod {p}")
        if t == 1:
            return self
        counts = [0] * p
        for i, a in enumerate(self.coeffs):
            counts[(t * i) % p] += a
        return CycInt.from_exponents(p, counts)

    def conjugates(self):
        """All Galois conjugates, in the order t = 1, ..., p-1."""
        return [self.galois_apply(t) for t in range(1, self.p)]

    # ----- numeric realization --------------------------------------------

    def embed(self, precision: int = 64) -> mpmath.mpc:
        """Evaluate at zeta = exp(2*pi*i/p) as a high-precision complex number.

        Computed with precision+16 working bits; the result is accurate to
        within about (p+2) * max|coeff| units in the last working place,
        far below 2^-precision relative for the sizes handled here.
        """
        if precision < 64:
            raise DomainError("precision must be at least 64 bits")
        p = self.p
        with mpmath.workprec(precision + 16):
            total = mpmath.mpc(0)
            for i, a in enumerate(self.coeffs):
                if a:
                    total += a * mpmath.expjpi(mpmath.mpf(2 * i) / p)
            return +total

    def as_rational_integer(self) -> int:
        """Return n when the value equals n * zeta^0, else raise.

        In the canonical basis a value is rational exactly when every
        coefficient of zeta, ..., zeta^(p-2) vanishes.
        """
        if any(self.coeffs[1:]):
            raise NonRationalError(
                f"value is not a rational integer: {self!r}", element=self
            )
        return self.coeffs[0]

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_json(self) -> dict:
        return {"p": self.p, "coeffs": [str(c) for c in self.coeffs]}
