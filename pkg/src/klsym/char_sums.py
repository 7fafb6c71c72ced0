"""Kloosterman sums, Gauss sums, and symmetric-power Frobenius traces.

The batch kernel computes every Kl_2(F_q, x) at once.  Writing units as
powers of the fixed generator g, the defining sum over lambda with
lambda * mu = x becomes a cyclic self-convolution over the unit group:

    n_x[c] = #{(i, j) : i + j = log(x) mod (q-1),
                        Tr(g^i) + Tr(g^j) = c mod p}

The convolution is evaluated exactly by one arbitrary-precision integer
squaring: each log position i contributes the digit 2^(32 * Tr(g^i))
inside a 2p-slot window, so the digits of the square are precisely the
pair counts.  Per-digit counts are bounded by q - 1 < 2^32, hence no
carries cross slot boundaries and the result is exact.

The kernel shards by lambda log-ranges; shard products merge by integer
addition, so any shard count or ordering yields bit-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _mpz = int

from .cyclotomic import CycInt
from .errors import DomainError, ResourceLimitError
from .finite_field import FqTable, is_prime

PAIR_BUDGET_DEFAULT = 10**10

_SLOT_BITS = 32


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


@dataclass(frozen=True)
class KloostermanHistogram:
    """Per-unit histograms n_x[c] = #{lambda : Tr(lambda + x/lambda) = c}.

    Row m of ``counts`` belongs to the unit x = g^m, where g is the
    field's fixed generator.
    """

    field: FqTable
    counts: np.ndarray  # shape (q-1, p), int64

    def row_for_unit(self, x: int) -> np.ndarray:
        if x % self.field.q == 0:
            raise DomainError("x must be a unit")
        if self.field.log is None:
            raise DomainError("field was built without log tables")
        return self.counts[int(self.field.log[x % self.field.q])]

    def value_by_log(self, m: int) -> CycInt:
        return CycInt.from_exponents(self.field.p, self.counts[m].tolist())

    def value(self, x: int) -> CycInt:
        """Kl_2(F_q, x) reconstructed from the histogram row."""
        return CycInt.from_exponents(self.field.p, self.row_for_unit(x).tolist())

    def dump_csv(self, stream) -> None:
        """Opt-in debug dump: one ``x,c,count`` line per nonzero entry.

        Histograms are transient otherwise; this is the only serialization.
        """
        stream.write("x,c,count\n")
        exp = self.field.exp
        for m in range(self.counts.shape[0]):
            x = int(exp[m]) if exp is not None else m
            row = self.counts[m]
            for c in range(self.field.p):
                if row[c]:
                    stream.write(f"{x},{c},{int(row[c])}\n")


@dataclass(frozen=True)
class FrobTrace:
    """Frobenius trace a = -Kl_2(F_q, x) together with the weight datum q."""

    a: CycInt
    q: int

    def weil_margin(self, precision: int = 64) -> float:
        """max over conjugates of |embed| - 2*sqrt(q); <= 0 within tolerance."""
        bound = 2 * float(self.q) ** 0.5
        worst = float("-inf")
        for conj in self.a.conjugates():
            worst = max(worst, float(abs(conj.embed(precision))) - bound)
        return worst


def kloosterman_sum(F: FqTable, x: int) -> CycInt:
    """Kl_2(F_q, x) = sum over units of psi(Tr(lambda + x/lambda)).

    Direct per-x evaluation, O(q); kept as the independent oracle for the
    batch kernel.
    """
    x %= F.q
    if x == 0:
        raise DomainError("Kloosterman sums are defined for units only")
    p = F.p
    counts = [0] * p
    for lam in F.units():
        c = (F.trace_of(lam) + F.trace_of(F.mul(x, F.inverse(lam)))) % p
        counts[c] += 1
    return CycInt.from_exponents(p, counts)


def _pack_range(traces: np.ndarray, lo: int, hi: int, slots: int):
    length = hi - lo
    arr = np.zeros(length * slots, dtype="<u4")
    arr[np.arange(length) * slots + traces[lo:hi]] = 1
    return _mpz(int.from_bytes(arr.tobytes(), "little"))


def _unpack_product(z, positions: int, slots: int) -> np.ndarray:
    raw = int(z).to_bytes(positions * slots * (_SLOT_BITS // 8), "little")
    return np.frombuffer(raw, dtype="<u4").reshape(positions, slots)


def kloosterman_histogram_all(F: FqTable, *,
                              pair_budget: int = PAIR_BUDGET_DEFAULT,
                              shards: int = 1) -> KloostermanHistogram:
    """All Kloosterman histograms of F in one pass.

    ``shards`` splits the lambda log-range; partial products accumulate by
    addition, so the result never depends on the shard count.
    """
    p, q = F.p, F.q
    N = q - 1
    if q * q > pair_budget:
        raise ResourceLimitError(
            f"histogram for (p={p}, n={F.n}) needs {q * q} pairs, budget {pair_budget}")
    traces = F.unit_traces_by_log()
    slots = 2 * p

    if shards <= 1:
        z = _pack_range(traces, 0, N, slots)
        lin = _unpack_product(z * z, 2 * N, slots)
        pos = lin[:N].astype(np.int64) + lin[N:].astype(np.int64)
    else:
        bounds = [round(s * N / shards) for s in range(shards + 1)]
        acc = np.zeros((2 * N, slots), dtype=np.uint32)
        packed = [_pack_range(traces, bounds[s], bounds[s + 1], slots)
                  for s in range(shards)]
        for a in range(shards):
            la = bounds[a + 1] - bounds[a]
            if la == 0:
                continue
            for b in range(a, shards):
                lb = bounds[b + 1] - bounds[b]
                if lb == 0:
                    continue
                part = _unpack_product(packed[a] * packed[b], la + lb, slots)
                off = bounds[a] + bounds[b]
                weight = 1 if a == b else 2
                acc[off:off + la + lb] += weight * part
        pos = acc[:N].astype(np.int64) + acc[N:].astype(np.int64)

    counts = pos[:, :p].copy()
    counts[:, : p - 1] += pos[:, p : 2 * p - 1]
    if int(pos[:, 2 * p - 1].max(initial=0)) != 0:
        raise ArithmeticError("slot overflow in packed convolution")
    if not (counts.sum(axis=1) == N).all():
        raise ArithmeticError("histogram row sums disagree with unit count")
    return KloostermanHistogram(field=F, counts=counts)


def histogram_pairs_reference(F: FqTable) -> np.ndarray:
    """Literal O(q^2) pair loop over (lambda, mu); small-field oracle."""
    p, q = F.p, F.q
    N = q - 1
    counts = np.zeros((N, p), dtype=np.int64)
    log = F.log
    for lam in F.units():
        t_lam = F.trace_of(lam)
        for mu in F.units():
            x = F.mul(lam, mu)
            counts[int(log[x]), (t_lam + F.trace_of(mu)) % p] += 1
    return counts


def gauss_sum(p: int) -> CycInt:
    """g(chi, psi) = -sum over units x of legendre(x) * psi(x), in Z[zeta_p].

    Its square is the rational integer p * legendre(-1).
    """
    if p == 2 or not is_prime(p):
        raise DomainError(f"p must be an odd prime, got {p}")
    counts = [0] * p
    for x in range(1, p):
        counts[x] = -_legendre(x, p)
    return CycInt.from_exponents(p, counts)


def sym_power_trace(a: CycInt, q: int, k: int) -> CycInt:
    """Trace of Frobenius on the k-th symmetric power of a rank-2 stalk.

    For eigenvalues alpha + beta = a and alpha * beta = q this is the
    complete homogeneous value h_k, via h_m = a*h_(m-1) - q*h_(m-2).
    """
    if k < 0:
        raise DomainError("k must be nonnegative")
    prev = CycInt.one(a.p)
    if k == 0:
        return prev
    cur = a
    for _ in range(k - 1):
        prev, cur = cur, a * cur - q * prev
    return cur


def weil_bound_max_excess(hist: KloostermanHistogram) -> float:
    """max over units and Galois conjugates of |Kl| - 2*sqrt(q).

    Float64 evaluation; rounding stays below 1e-12 for the field sizes
    this is used on, so comparing against a 1e-9 tolerance is decisive.
    """
    p, q = hist.field.p, hist.field.q
    bound = 2.0 * float(q) ** 0.5
    worst = float("-inf")
    counts = hist.counts.astype(np.float64)
    for t in range(1, p):
        z = np.exp(2j * np.pi * ((t * np.arange(p)) % p) / p)
        vals = counts @ z
        worst = max(worst, float(np.abs(vals).max()) - bound)
    return worst
