"""Construction of F_{p^n} with deterministic tables.

Elements are dense residue indices 0..q-1: the index sum(c_i * p^i)
stands for the polynomial sum(c_i * x^i) in F_p[x]/(modulus).  The
modulus is always the lexicographically smallest monic irreducible of
the requested degree (ordering candidates by that same integer
encoding), and the generator is the smallest primitive element in
encoding order, so every table is bit-reproducible across runs and
machines.

For q up to ``table_threshold`` the field carries exp/log tables over
the fixed generator, a Zech-logarithm table for addition in the log
representation, and an absolute-trace table covering all of F_q.
Larger fields fall back to on-the-fly polynomial arithmetic; the unit
trace sequence the character-sum kernels need is then produced from a
linear recurrence instead of table lookups.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import DomainError, ResourceLimitError

TABLE_THRESHOLD_DEFAULT = 1 << 22
MAX_FIELD_SIZE_DEFAULT = 1 << 26
CACHE_VERSION = 1

_EXP_BLOCK = 512


def is_prime(n: int) -> bool:
    """Trial-division primality test; ample for the sizes used here."""
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


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division, as {prime: multiplicity}."""
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


# ----- polynomial arithmetic over F_p ------------------------------------
# Polynomials are tuples of ints, low degree first, trailing zeros trimmed.


def _poly_trim(a):
    i = len(a)
    while i > 0 and a[i - 1] == 0:
        i -= 1
    return tuple(a[:i])


def _poly_mulmod(a, b, mod, p):
    if not a or not b:
        return ()
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            prod[i + j] = (prod[i + j] + ai * bj) % p
    return _poly_divmod(prod, mod, p)[1]


def _poly_divmod(a, b, p):
    a = list(a)
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p)
    quot = [0] * max(len(a) - db, 0)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c == 0:
            continue
        factor = (c * inv_lead) % p
        quot[i - db] = factor
        for j in range(db + 1):
            a[i - db + j] = (a[i - db + j] - factor * b[j]) % p
    return _poly_trim(quot), _poly_trim(a)


def _poly_powmod(base, e, mod, p):
    result = (1,)
    base = _poly_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _poly_gcd(a, b, p):
    while b:
        a, b = b, _poly_divmod(a, b, p)[1]
    return a


def _is_irreducible(f, p) -> bool:
    """Monic f of degree n is irreducible iff x^(p^n) = x mod f and
    gcd(x^(p^(n/d)) - x, f) = 1 for every prime d dividing n."""
    n = len(f) - 1
    if n < 1 or f[-1] != 1:
        return False
    if n == 1:
        return True
    x = (0, 1)
    xq = x
    for _ in range(n):
        xq = _poly_powmod(xq, p, f, p)
    if _poly_trim(tuple((a - b) % p for a, b in _pad(xq, x))) != ():
        return False
    for d in factorize(n):
        xe = x
        for _ in range(n // d):
            xe = _poly_powmod(xe, p, f, p)
        diff = _poly_trim(tuple((a - b) % p for a, b in _pad(xe, x)))
        if diff == ():
            return False
        if len(_poly_gcd(f, diff, p)) - 1 != 0:
            return False
    return True


def _pad(a, b):
    n = max(len(a), len(b))
    return zip(tuple(a) + (0,) * (n - len(a)), tuple(b) + (0,) * (n - len(b)))


def _newton_power_sums(f, p, count):
    """First ``count`` power sums of the roots of monic f, mod p.

    s_0 = deg f, then Newton's identities drive a linear recurrence in
    the coefficients of f.
    """
    n = len(f) - 1
    s = [n % p]
    for m in range(1, count):
        if m <= n:
            total = (m * f[n - m]) % p
            for t in range(1, m):
                total = (total + f[n - t] * s[m - t]) % p
            s.append((-total) % p)
        else:
            total = 0
            for t in range(1, n + 1):
                total = (total + f[n - t] * s[m - t]) % p
            s.append((-total) % p)
    return s


class FqTable:
    """An explicit finite field F_{p^n} = F_p[x]/(modulus).

    Attributes
    ----------
    p, n, q      characteristic, extension degree, field size
    modulus      monic irreducible, coefficient tuple of length n+1
    generator    encoding of the fixed multiplicative generator
    exp, log     unit tables (present when q <= table_threshold)
    trace        absolute trace of every element, length q
    zech         zech[i] = log(1 + g^i), -1 where 1 + g^i = 0
    """

    def __init__(self, p, n, modulus, generator, tr_basis,
                 exp=None, log=None, trace=None, zech=None):
        self.p = p
        self.n = n
        self.q = p**n
        self.modulus = tuple(modulus)
        self.generator = generator
        self.tr_basis = tuple(tr_basis)
        self.exp = exp
        self.log = log
        self.trace = trace
        self.zech = zech
        self._unit_traces = None

    @property
    def has_tables(self) -> bool:
        return self.exp is not None

    def __repr__(self):
        return (f"FqTable(p={self.p}, n={self.n}, q={self.q}, "
                f"modulus={list(self.modulus)}, generator={self.generator})")

    # ----- encoding helpers ----------------------------------------------

    def digits(self, x: int):
        out = []
        for _ in range(self.n):
            out.append(x % self.p)
            x //= self.p
        return out

    def encode(self, coeffs) -> int:
        x = 0
        for c in reversed(list(coeffs)):
            x = x * self.p + (c % self.p)
        return x

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    # ----- field arithmetic -----------------------------------------------

    def add(self, x: int, y: int) -> int:
        return self.encode(a + b for a, b in zip(self.digits(x), self.digits(y)))

    def neg(self, x: int) -> int:
        return self.encode(-a for a in self.digits(x))

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        if self.exp is not None:
            return int(self.exp[(int(self.log[x]) + int(self.log[y])) % (self.q - 1)])
        prod = _poly_mulmod(_poly_trim(self.digits(x)), _poly_trim(self.digits(y)),
                            self.modulus, self.p)
        return self.encode(prod + (0,) * (self.n - len(prod)))

    def inverse(self, x: int) -> int:
        if x == 0:
            raise DomainError("0 has no multiplicative inverse")
        if self.exp is not None:
            return int(self.exp[(self.q - 1 - int(self.log[x])) % (self.q - 1)])
        return self.pow(x, self.q - 2)

    def pow(self, x: int, e: int) -> int:
        if x == 0:
            if e == 0:
                return 1
            if e < 0:
                raise DomainError("0 has no negative powers")
            return 0
        e %= self.q - 1
        if self.exp is not None:
            return int(self.exp[(int(self.log[x]) * e) % (self.q - 1)])
        poly = _poly_powmod(_poly_trim(self.digits(x)), e, self.modulus, self.p)
        return self.encode(poly + (0,) * (self.n - len(poly)))

    def trace_of(self, x: int) -> int:
        """Absolute trace Tr_{F_q/F_p}(x) as a residue in 0..p-1."""
        if self.trace is not None:
            return int(self.trace[x])
        return sum(c * t for c, t in zip(self.digits(x), self.tr_basis)) % self.p

    def add_units_log(self, i: int, j: int):
        """log(g^i + g^j) via the Zech table; None when the sum is 0."""
        if self.zech is None:
            raise DomainError("field was built without unit tables")
        N = self.q - 1
        i, j = i % N, j % N
        z = int(self.zech[(j - i) % N])
        if z < 0:
            return None
        return (i + z) % N

    def unit_traces_by_log(self) -> np.ndarray:
        """Tr(g^i) for i = 0 .. q-2, the input of the batch kernels.

        With tables this is a gather through exp; otherwise the traces of
        generator powers form a linear recurrence whose characteristic
        polynomial is the generator's minimal polynomial, seeded by
        Newton's identities.
        """
        if self._unit_traces is not None:
            return self._unit_traces
        if self.trace is not None and self.exp is not None:
            out = self.trace[self.exp].astype(np.int64)
        else:
            minpoly = self.minimal_polynomial(self.generator)
            seq = _newton_power_sums(minpoly, self.p, self.q - 1)
            seq[0] = self.n % self.p  # Tr(g^0) = Tr(1) = n
            out = np.array(seq, dtype=np.int64)
        self._unit_traces = out
        return out

    def minimal_polynomial(self, x: int):
        """Minimal polynomial of x over F_p as a monic coefficient tuple."""
        conjugates = []
        c = x
        while c not in conjugates:
            conjugates.append(c)
            c = self.pow(c, self.p)
        # expand prod (X - c) with coefficients in F_q
        poly = [1]
        for c in conjugates:
            nxt = [0] * (len(poly) + 1)
            for i, a in enumerate(poly):
                nxt[i + 1] = self.add(nxt[i + 1], a)
                nxt[i] = self.add(nxt[i], self.mul(self.neg(c), a))
            poly = nxt
        for a in poly:
            if a >= self.p:
                raise ArithmeticError("minimal polynomial not over F_p")
        return tuple(poly)


def _find_modulus(p: int, n: int):
    """Smallest monic irreducible of degree n in the integer encoding order."""
    if n == 1:
        return (0, 1)  # the polynomial x; prime-field convention
    for m in range(p**n):
        coeffs = []
        mm = m
        for _ in range(n):
            coeffs.append(mm % p)
            mm //= p
        f = tuple(coeffs) + (1,)
        if _is_irreducible(f, p):
            return f
    raise ArithmeticError(f"no irreducible of degree {n} over F_{p}")


def _find_generator(field: FqTable) -> int:
    N = field.q - 1
    prime_divisors = list(factorize(N))
    for cand in range(2, field.q):
        if all(field.pow(cand, N // ell) != 1 for ell in prime_divisors):
            return cand
    raise ArithmeticError("no generator found; field construction is broken")


def _mul_by_element_matrix(field: FqTable, g: int) -> np.ndarray:
    """Matrix of multiplication by g on the basis {1, x, ..., x^(n-1)}."""
    n = field.n
    M = np.zeros((n, n), dtype=np.int64)
    for j in range(n):
        col = field.mul(g, field.p**j)
        M[:, j] = field.digits(col)
    return M

def _matpow_mod(M: np.ndarray, e: int, p: int) -> np.ndarray:
    R = np.eye(M.shape[0], dtype=np.int64)
    B = M % p
    while e:
        if e & 1:
            R = (R @ B) % p
        B = (B @ B) % p
        e >>= 1
    return R


def _build_tables(field: FqTable) -> None:
    p, n, q = field.p, field.n, field.q
    N = q - 1
    g = field.generator

    # exp table: generator powers in blocks of matrix-vector chains
    M = _mul_by_element_matrix(field, g)
    B = min(_EXP_BLOCK, N)
    U = np.zeros((n, B), dtype=np.int64)
    U[0, 0] = 1
    for b in range(1, B):
        U[:, b] = (M @ U[:, b - 1]) % p
    MB = _matpow_mod(M, B, p)
    weights = np.array([p**i for i in range(n)], dtype=np.int64)
    exp = np.empty(N, dtype=np.int64)
    pos = 0
    while pos < N:
        take = min(B, N - pos)
        exp[pos:pos + take] = weights @ U[:, :take]
        pos += take
        if pos < N:
            U = (MB @ U) % p
    field.exp = exp

    log = np.full(q, -1, dtype=np.int64)
    log[exp] = np.arange(N, dtype=np.int64)
    field.log = log

    # trace over all encodings, built digit by digit from the basis traces
    t = np.zeros(1, dtype=np.int64)
    for j in range(n):
        digit = (np.arange(p, dtype=np.int64) * field.tr_basis[j]) % p
        t = (digit[:, None] + t[None, :]).reshape(-1) % p
    field.trace = t.astype(np.int8)

    # zech logs: 1 + g^i changes only the constant digit
    c0 = exp % p
    plus_one = np.where(c0 < p - 1, exp + 1, exp - (p - 1))
    zech = log[plus_one]
    field.zech = zech  # -1 sentinel appears exactly where 1 + g^i = 0


def build_field(p: int, n: int, *,
                modulus=None,
                table_threshold: int = TABLE_THRESHOLD_DEFAULT,
                max_q: int = MAX_FIELD_SIZE_DEFAULT,
                cache_dir=None) -> FqTable:
    """Construct F_{p^n} deterministically.

    ``modulus`` overrides the default irreducible (used by tests that
    check modulus independence).  ``cache_dir`` enables the optional
    binary table cache; results are identical with it disabled.
    """
    if not is_prime(p) or p == 2:
        raise DomainError(f"p must be an odd prime, got {p}")
    if n < 1:
        raise DomainError(f"extension degree must be >= 1, got {n}")
    q = p**n
    if q > max_q:
        raise ResourceLimitError(
            f"field F_{p}^{n} has {q} elements, over the memory budget {max_q}")

    default_modulus = modulus is None
    if default_modulus and cache_dir is not None:
        cached = _cache_load(Path(cache_dir), p, n)
        if cached is not None:
            return cached

    if default_modulus:
        modulus = _find_modulus(p, n)
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != n + 1 or modulus[-1] != 1:
            raise DomainError("modulus must be monic of degree n")
        if n > 1 and not _is_irreducible(modulus, p):
            raise DomainError(f"modulus {modulus} is reducible over F_{p}")

    tr_basis = _newton_power_sums(modulus, p, n) if n > 1 else (1,)
    field = FqTable(p, n, modulus, generator=0, tr_basis=tr_basis)
    field.generator = _find_generator(field)

    if q <= table_threshold:
        _build_tables(field)

    if default_modulus and cache_dir is not None and field.has_tables:
        _cache_save(Path(cache_dir), field)
    return field


# ----- optional binary cache ----------------------------------------------
# Layout: header of four little-endian u64 (p, n, q, modulus encoding),
# then raw tables exp (u32), log (i32), trace (u8), zech (i32).


def _cache_path(cache_dir: Path, p: int, n: int) -> Path:
    return cache_dir / f"fq_p{p}_n{n}_v{CACHE_VERSION}.tbl"


def _cache_save(cache_dir: Path, field: FqTable) -> None:
    cache_dir.mkdir(parents=True, exist_ok=True)
    modulus_enc = sum(c * field.p**i for i, c in enumerate(field.modulus))
    header = struct.pack("<4Q", field.p, field.n, field.q, modulus_enc)
    path = _cache_path(cache_dir, field.p, field.n)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(field.exp.astype("<u4").tobytes())
        fh.write(field.log.astype("<i4").tobytes())
        fh.write(field.trace.astype("u1").tobytes())
        fh.write(field.zech.astype("<i4").tobytes())
    tmp.replace(path)


def _cache_load(cache_dir: Path, p: int, n: int):
    path = _cache_path(cache_dir, p, n)
    if not path.exists():
        return None
    data = path.read_bytes()
    hp, hn, hq, modulus_enc = struct.unpack_from("<4Q", data, 0)
    if (hp, hn) != (p, n) or hq != p**n:
        return None
    q = p**n
    N = q - 1
    coeffs = []
    mm = modulus_enc
    for _ in range(n + 1):
        coeffs.append(mm % p)
        mm //= p
    modulus = tuple(coeffs)
    off = 32
    exp = np.frombuffer(data, dtype="<u4", count=N, offset=off).astype(np.int64)
    off += 4 * N
    log = np.frombuffer(data, dtype="<i4", count=q, offset=off).astype(np.int64)
    off += 4 * q
    trace = np.frombuffer(data, dtype="u1", count=q, offset=off).astype(np.int8)
    off += q
    zech = np.frombuffer(data, dtype="<i4", count=N, offset=off).astype(np.int64)
    tr_basis = _newton_power_sums(modulus, p, n) if n > 1 else (1,)
    field = FqTable(p, n, modulus, generator=int(exp[1]) if N > 1 else 1,
                    tr_basis=tr_basis, exp=exp, log=log, trace=trace, zech=zech)
    return field
