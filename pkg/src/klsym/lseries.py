"""Assembly of the L-polynomial M_k(p, T) from exact power sums.

For each extension degree j the Lefschetz sum over the projective line is

    Lambda_j = S_j + 1 + t_j,

where S_j sums the symmetric-power traces h_k(-Kl_2(F_{p^j}, x), p^j)
over the units, the 1 is the invariant line at 0, and t_j sums j-th
powers of the inertia-invariant eigenvalues at infinity.  Then

    M_k(p, T) = exp(sum_j Lambda_j T^j / j)

truncated at delta = delta_degree(p, k), carried in exact rationals via
n * m_n = sum_{j<=n} Lambda_j * m_{n-j}.  Integrality of every m_n up to
delta and vanishing of every guard coefficient beyond delta are checked,
not assumed.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .char_sums import PAIR_BUDGET_DEFAULT, kloosterman_histogram_all
from .cyclotomic import CycInt
from .errors import (DomainError, IntegrityError, NonRationalError,
                     ResourceLimitError, VerificationError)
from .finite_field import build_field
from .local_data import delta_degree, infinity_invariant_eigenvalues

GUARD_RULE_LIMIT = 10**10


@dataclass(frozen=True)
class LPolynomial:
    """M_k(p, T) with integer coefficients m_0 .. m_delta."""

    p: int
    k: int
    delta: int
    coeffs: tuple[int, ...]

    def validate(self) -> None:
        if len(self.coeffs) != self.delta + 1:
            raise VerificationError("coefficient count disagrees with degree",
                                    details={"p": self.p, "k": self.k})
        if self.coeffs[0] != 1:
            raise VerificationError("constant coefficient must be 1",
                                    details={"m0": self.coeffs[0]})
        w = self.k + 1
        for i, m in enumerate(self.coeffs):
            bound = math.comb(self.delta, i) ** 2 * self.p ** (w * i)
            if m * m > bound:
                raise VerificationError(
                    "coefficient exceeds the purity bound",
                    details={"p": self.p, "k": self.k, "i": i, "coeff": m})
        lead = self.coeffs[-1]
        if lead * lead != self.p ** (w * self.delta):
            raise VerificationError(
                "leading coefficient squared is not p^((k+1)*delta)",
                details={"p": self.p, "k": self.k, "lead": lead})

    def evaluate(self, t: Fraction) -> Fraction:
        total = Fraction(0)
        for m in reversed(self.coeffs):
            total = total * t + m
        return total

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "delta": self.delta,
                "coeffs": [str(m) for m in self.coeffs]}


@dataclass(frozen=True)
class ReconstructionResult:
    poly: LPolynomial
    lambdas: tuple[int, ...]   # Lambda_1 .. Lambda_(delta+guard)
    s_values: tuple[int, ...]  # S_1 .. S_(delta+guard)
    guard: int


# ----- batched symmetric-power trace sums ----------------------------------


def _accumulate(H: np.ndarray, weights: np.ndarray) -> tuple[int, ...]:
    return tuple(int(v) for v in (H * weights).sum(axis=0))


def _sym_trace_chunk(rows: np.ndarray, mult: np.ndarray, p: int, q: int,
                     kmax: int) -> list[tuple[int, ...]]:
    """Weighted sums of h_m(a_x, q) for m = 0..kmax over histogram rows.

    Rows are recentered after every step (subtracting a multiple of
    1 + zeta + ... + zeta^(p-1), which is 0) to keep coefficients small.
    """
    R = rows.shape[0]
    A = (-rows).astype(object)
    A = A - A[:, -1][:, None]
    weights = mult.astype(object)[:, None]
    out: list[tuple[int, ...]] = [(int(mult.sum()),) + (0,) * (p - 1)]
    if kmax == 0:
        return out
    Hp = np.zeros((R, p), dtype=object)
    Hp[:, 0] = 1
    Hc = A.copy()
    out.append(_accumulate(Hc, weights))
    for _ in range(2, kmax + 1):
        Hn = np.zeros((R, p), dtype=object)
        for a in range(p):
            Hn = Hn + A[:, a][:, None] * np.roll(Hc, a, axis=1)
        Hn = Hn - q * Hp
        Hn = Hn - Hn[:, -1][:, None]
        Hp, Hc = Hc, Hn
        out.append(_accumulate(Hc, weights))
    return out


def _merge_sums(parts: list[list[tuple[int, ...]]]) -> list[tuple[int, ...]]:
    merged = parts[0]
    for part in parts[1:]:
        merged = [tuple(a + b for a, b in zip(u, v)) for u, v in zip(merged, part)]
    return merged


class SumCache:
    """Per-(p, j) histogram rows and power-sum batches, shared across k.

    Deduplicates identical histogram rows before the recurrence (Frobenius
    orbits always collide) and optionally splits the recurrence across
    processes; partial sums merge by integer addition, so results are
    independent of the worker count.
    """

    def __init__(self, *, pair_budget: int = PAIR_BUDGET_DEFAULT,
                 workers: int = 1, cache_dir=None):
        self.pair_budget = pair_budget
        self.workers = max(1, workers)
        self.cache_dir = cache_dir
        self._rows: dict = {}
        self._sums: dict = {}

    def unique_rows(self, p: int, j: int, scale: int = 1):
        key = (p, j, scale % p)
        if key not in self._rows:
            field = build_field(p, j, cache_dir=self.cache_dir)
            hist = kloosterman_histogram_all(field, pair_budget=self.pair_budget)
            counts = hist.counts
            if scale % p != 1:
                if math.gcd(scale, p) != 1:
                    raise DomainError("character scale must be a unit mod p")
                permuted = np.zeros_like(counts)
                permuted[:, (scale * np.arange(p)) % p] = counts
                counts = permuted
            rows, mult = np.unique(counts, axis=0, return_counts=True)
            self._rows[key] = (rows, mult, field.q)
        return self._rows[key]

    def power_sums(self, p: int, j: int, kmax: int, scale: int = 1) -> list[int]:
        """[S_0, S_1, ..., S_kmax] over F_{p^j}, each a rational integer."""
        key = (p, j, scale % p)
        cached = self._sums.get(key)
        if cached is not None and len(cached) > kmax:
            return cached[: kmax + 1]
        rows, mult, q = self.unique_rows(p, j, scale)
        if self.workers > 1 and rows.shape[0] >= 4 * self.workers:
            chunks = np.array_split(np.arange(rows.shape[0]), self.workers)
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                futures = [pool.submit(_sym_trace_chunk, rows[c], mult[c], p, q, kmax)
                           for c in chunks if len(c)]
                vectors = _merge_sums([f.result() for f in futures])
        else:
            vectors = _sym_trace_chunk(rows, mult, p, q, kmax)
        sums = []
        for m, vec in enumerate(vectors):
            try:
                sums.append(CycInt.from_exponents(p, vec).as_rational_integer())
            except NonRationalError as exc:
                raise IntegrityError(
                    f"S_{j} for (p={p}, k={m}) is not a rational integer; "
                    f"offending value {exc.element!r}") from exc
        self._sums[key] = sums
        return sums


def power_sum(p: int, k: int, j: int, *, pair_budget: int = PAIR_BUDGET_DEFAULT,
              cache: SumCache | None = None, character_scale: int = 1) -> int:
    """S_j = sum over units x of h_k(-Kl_2(F_{p^j}, x), p^j), exactly."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    cache = cache or SumCache(pair_budget=pair_budget)
    return cache.power_sums(p, j, k, scale=character_scale)[k]


def infinity_power_term(p: int, k: int, j: int) -> int:
    return sum(lam**j for lam in infinity_invariant_eigenvalues(p, k))


def lambda_coefficient(p: int, k: int, j: int, *,
                       pair_budget: int = PAIR_BUDGET_DEFAULT,
                       cache: SumCache | None = None,
                       character_scale: int = 1) -> int:
    """Lambda_j = S_j + 1 + (invariant eigenvalue powers at infinity)."""
    s = power_sum(p, k, j, pair_budget=pair_budget, cache=cache,
                  character_scale=character_scale)
    return s + 1 + infinity_power_term(p, k, j)


# ----- reconstruction --------------------------------------------------------


def default_guard(p: int, delta: int) -> int:
    """Guard depth rule: 2 extra degrees when p^(2(delta+2)) fits the fixed
    10^10 pair limit, 1 when p^(2(delta+1)) does, else 0 (the functional
    equation then serves as the truncation certificate)."""
    if p ** (2 * (delta + 2)) <= GUARD_RULE_LIMIT:
        return 2
    if p ** (2 * (delta + 1)) <= GUARD_RULE_LIMIT:
        return 1
    return 0


def reconstruct_from_lambdas(p: int, k: int, delta: int,
                             lambdas: list[int], guard: int) -> LPolynomial:
    """Exponentiate the log series given Lambda_1 .. Lambda_(delta+guard).

    Raises with full diagnostics on a non-integral coefficient or a
    nonzero guard coefficient.
    """
    if len(lambdas) < delta + guard:
        raise DomainError("not enough power sums for the requested degree")
    coeffs = [Fraction(1)]
    for n in range(1, delta + guard + 1):
        total = Fraction(0)
        for j in range(1, n + 1):
            total += lambdas[j - 1] * coeffs[n - j]
        m_n = total / n
        if n <= delta and m_n.denominator != 1:
            raise VerificationError(
                "non-integral L-polynomial coefficient",
                details={"p": p, "k": k, "n": n, "value": m_n,
                         "check": "integrality"})
        if n > delta and m_n != 0:
            raise VerificationError(
                "nonzero coefficient beyond the predicted degree",
                details={"p": p, "k": k, "n": n, "value": m_n, "delta": delta,
                         "check": "truncation"})
        coeffs.append(m_n)
    poly = LPolynomial(p=p, k=k, delta=delta,
                       coeffs=tuple(int(c) for c in coeffs[: delta + 1]))
    poly.validate()
    return poly


def reconstruct_lpolynomial(p: int, k: int, guard: int | None = None, *,
                            pair_budget: int = PAIR_BUDGET_DEFAULT,
                            cache: SumCache | None = None,
                            character_scale: int = 1) -> ReconstructionResult:
    """Full pipeline for one (p, k) cell: enumerate, assemble, verify."""
    delta = delta_degree(p, k)
    if guard is None:
        guard = default_guard(p, delta)
    if guard < 0:
        raise DomainError("guard must be nonnegative")
    depth = delta + guard
    if p ** (2 * depth) > (cache.pair_budget if cache else pair_budget):
        raise ResourceLimitError(
            f"cell (p={p}, k={k}) needs p^{2 * depth} pairs, over budget")
    cache = cache or SumCache(pair_budget=pair_budget)
    s_values = []
    lambdas = []
    for j in range(1, depth + 1):
        s = cache.power_sums(p, j, k, scale=character_scale)[k]
        s_values.append(s)
        lambdas.append(s + 1 + infinity_power_term(p, k, j))
    poly = reconstruct_from_lambdas(p, k, delta, lambdas, guard)
    return ReconstructionResult(poly=poly, lambdas=tuple(lambdas),
                                s_values=tuple(s_values), guard=guard)


# ----- functional equation and purity ----------------------------------------


def extract_functional_constant(M: LPolynomial) -> tuple[int, list[Fraction]]:
    """c = m_delta, with the coefficientwise residuals of the functional
    equation m_(delta-i) = c * m_i * p^(-(k+1)i).

    All residuals must vanish and c^2 must equal p^((k+1)*delta); any
    failure raises with the residual list attached.
    """
    p, k, delta = M.p, M.k, M.delta
    c = M.coeffs[-1]
    w = p ** (k + 1)
    residuals = [M.coeffs[delta - i] - Fraction(c * M.coeffs[i], w**i)
                 for i in range(delta + 1)]
    if any(r != 0 for r in residuals):
        raise VerificationError("functional equation residuals are nonzero",
                                details={"p": p, "k": k, "residuals": residuals})
    if c * c != p ** ((k + 1) * delta):
        raise VerificationError("c^2 != p^((k+1)*delta)",
                                details={"p": p, "k": k, "c": c})
    return c, residuals


def purity_check(M: LPolynomial, tol: float = 1e-6) -> dict:
    """Verify all reciprocal roots of M have modulus p^((k+1)/2).

    Roots are isolated at a working precision scaled to the coefficient
    sizes.  Returns a report; raises listing the offending moduli when any
    relative deviation exceeds tol.
    """
    target = float(M.p) ** ((M.k + 1) / 2.0)
    if M.delta == 0:
        return {"target": target, "moduli": [], "max_rel_error": 0.0, "tol": tol}
    digits = max(len(str(abs(m))) for m in M.coeffs)
    moduli = []
    with mpmath.workdps(max(50, 3 * digits)):
        roots = mpmath.polyroots([mpmath.mpf(m) for m in reversed(M.coeffs)],
                                 maxsteps=500, extraprec=300)
        for rho in roots:
            moduli.append(float(1 / abs(mpmath.mpc(rho))))
    max_rel = max(abs(m - target) / target for m in moduli)
    report = {"target": target, "moduli": sorted(moduli),
              "max_rel_error": max_rel, "tol": tol}
    if max_rel > tol:
        raise VerificationError("reciprocal roots violate purity",
                                details=report)
    return report
