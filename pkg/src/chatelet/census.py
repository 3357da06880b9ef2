"""Census of all tuples up to a height P.

For every a in [1, P] and every c coprime to a, the solutions of
ad - bc = s (s = +-1) form one progression (b0 + k a, d0 + k c) whose
k-range inside the box is an exact interval.  Tuples are generated as numpy
arrays one batch of a-values at a time and classified in bulk:

* the real place by sign pattern,
* the place 2 through a cache of the subdivision engine keyed by
  (2-adic valuation, odd part mod 16) of each coefficient plus det; every
  cache entry carries the engine's own record of which residue bits it
  consulted, and a key that turns out too coarse is never cached,
* odd places by the explicit points t = 0, 1, infinity, which always
  suffice on this family; any tuple they do not settle goes to the engine.

Counts are histogrammed by height, so every checkpoint is a prefix sum.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from chatelet.arith import odd_prime_factors, xgcd
from chatelet.local import odd_place_soluble, two_adic_search
from chatelet.surface import SurfaceTuple

CSV_COLUMNS = (
    "P", "raw_total", "raw_loc", "raw_br", "N", "N_loc", "N_Br",
    "N_over_P2", "Nloc_over_P2", "NBr_over_P2", "NBr_over_Nloc",
)
SIGN_CODES = {(1, 1, 1): 0, (-1, 1, -1): 1, (-1, -1, 1): 2, (1, -1, -1): 3}
PLACE_CODES = ("inf", "2", "odd")
KEY_PRECISION = 4


def enumerate_tuples(P: int, visitor) -> None:
    """Call ``visitor(u)`` once for every valid tuple of height <= P."""
    if P < 1:
        raise ValueError("P must be positive")
    for a in range(1, P + 1):
        for c in range(-P, P + 1):
            if c == 0 or math.gcd(a, abs(c)) != 1:
                continue
            _, s, t = xgcd(a, c)
            for det in (1, -1):
                b0, d0 = -det * t, det * s
                lo = max(-((P + b0) // a), _ceil_div(-P - d0, c) if c > 0 else _ceil_div(P - d0, c))
                hi = min((P - b0) // a, (P - d0) // c if c > 0 else (-P - d0) // c)
                for k in range(lo, hi + 1):
                    b, d = b0 + k * a, d0 + k * c
                    if b and d:
                        visitor(SurfaceTuple(a, b, c, d))


def _ceil_div(x, y):
    return -((-x) // y)


def _xgcd_vec(a: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients (s, t) with s a + t c = 1, elementwise; requires gcd(a, c) = 1."""
    r0, r1 = a.copy(), c.copy()
    s0, s1 = np.ones_like(a), np.zeros_like(a)
    t0, t1 = np.zeros_like(a), np.ones_like(a)
    while True:
        live = r1 != 0
        if not live.any():
            break
        q = np.where(live, r0 // np.where(live, r1, 1), 0)
        r0, r1 = np.where(live, r1, r0), np.where(live, r0 - q * r1, r1)
        s0, s1 = np.where(live, s1, s0), np.where(live, s0 - q * s1, s1)
        t0, t1 = np.where(live, t1, t0), np.where(live, t0 - q * t1, t1)
    # r0 = +-1
    return s0 * r0, t0 * r0


def tuples_for(a_values, P: int) -> tuple[np.ndarray, ...]:
    """All valid tuples of height <= P with a in ``a_values``, as four int64 arrays."""
    a_parts, b_parts, c_parts, d_parts = [], [], [], []
    cs = np.concatenate([np.arange(-P, 0), np.arange(1, P + 1)]).astype(np.int64)
    for a in a_values:
        c = cs[np.gcd(cs, a) == 1]
        av = np.full_like(c, a)
        s, t = _xgcd_vec(av, c)
        for det in (1, -1):
            b0, d0 = -det * t, det * s
            lo_b = -((P + b0) // a)
            hi_b = (P - b0) // a
            pos = c > 0
            lo_d = np.where(pos, _ceil_div(-P - d0, c), _ceil_div(P - d0, c))
            hi_d = np.where(pos, (P - d0) // c, (-P - d0) // c)
            lo = np.maximum(lo_b, lo_d)
            n = np.maximum(np.minimum(hi_b, hi_d) - lo + 1, 0)
            total = int(n.sum())
            if total == 0:
                continue
            idx = np.repeat(np.arange(len(c)), n)
            k = lo[idx] + np.arange(total) - np.repeat(np.cumsum(n) - n, n)
            b = b0[idx] + k * a
            d = d0[idx] + k * c[idx]
            keep = (b != 0) & (d != 0)
            a_parts.append(np.full(int(keep.sum()), a, dtype=np.int64))
            b_parts.append(b[keep])
            c_parts.append(c[idx][keep])
            d_parts.append(d[keep])
    if not a_parts:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty, empty
    return tuple(np.concatenate(x) for x in (a_parts, b_parts, c_parts, d_parts))


def _v2(x: np.ndarray) -> np.ndarray:
    low = x & -x
    return np.log2(low.astype(np.float64)).astype(np.int64)


def _kernel_table(n_max: int) -> np.ndarray:
    """kappa(n): product of the primes p = 3 mod 4 with v_p(n) odd, for 0 <= n <= n_max."""
    kappa = np.ones(n_max + 1, dtype=np.int64)
    sieve = np.ones(n_max + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n_max**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    for p in np.flatnonzero(sieve):
        p = int(p)
        if p % 4 != 3:
            continue
        count = np.zeros(n_max + 1, dtype=np.int64)
        pe = p
        while pe <= n_max:
            count[::pe] += 1
            pe *= p
        kappa[(count % 2 == 1)] *= p
    return kappa


def _kernel_product(k1: np.ndarray, k2: np.ndarray) -> np.ndarray:
    g = np.gcd(k1, k2)
    return (k1 // g) * (k2 // g)


_TWO_ADIC_CACHE: dict[int, int] = {}


def _mask(invset) -> int:
    return (1 if invset.contains_plus else 0) | (2 if invset.contains_minus else 0)


@dataclass
class CensusCounters:
    P: int
    by_height: np.ndarray = None  # rows: total, loc, br; column h = tuples of height exactly h
    by_sign: np.ndarray = None  # sign code x (total, loc, br)
    witness: np.ndarray = None  # insoluble tuples by first failing place: inf, 2, odd
    strata: dict = field(default_factory=dict)  # (beta, gamma, delta, det) -> [total, 2-adically soluble]
    engine_fallbacks: int = 0
    odd_fallbacks: int = 0

    def __post_init__(self):
        if self.by_height is None:
            self.by_height = np.zeros((3, self.P + 1), dtype=np.int64)
            self.by_sign = np.zeros((4, 3), dtype=np.int64)
            self.witness = np.zeros(3, dtype=np.int64)

    def merge(self, other: CensusCounters) -> None:
        self.by_height += other.by_height
        self.by_sign += other.by_sign
        self.witness += other.witness
        for k, v in other.strata.items():
            mine = self.strata.setdefault(k, [0, 0])
            mine[0] += v[0]
            mine[1] += v[1]
        self.engine_fallbacks += other.engine_fallbacks
        self.odd_fallbacks += other.odd_fallbacks

    def raw(self, height: int) -> tuple[int, int, int]:
        return tuple(int(x) for x in self.by_height[:, : height + 1].sum(axis=1))


def classify_arrays(a, b, c, d, kappa=None, depth_cap=None, counters=None):
    """Vectorized verdicts: returns (real mask, 2-adic mask, odd ok, loc, br).

    Masks use bit 0 for invariant +1 and bit 1 for -1.
    """
    det = a * d - b * c
    # real place
    sb, sc, sd = np.sign(b), np.sign(c), np.sign(d)
    real = np.where(sb > 0, np.where(sc > 0, 1, 0), np.where(sc > 0, 3, np.where(det > 0, 1, 2)))

    # 2-adic place
    key = (det > 0).astype(np.int64) << 32
    vals = []
    for i, x in enumerate((a, b, c, d)):
        v = _v2(x)
        vals.append(v)
        key |= ((v << 4) | ((x >> v) & 15)) << (8 * i)
    keys, first, inverse = np.unique(key, return_index=True, return_inverse=True)
    masks = np.empty(len(keys), dtype=np.int64)
    coarse = []
    for j, (kk, f) in enumerate(zip(keys.tolist(), first.tolist())):
        m = _TWO_ADIC_CACHE.get(kk)
        if m is None:
            u = SurfaceTuple(int(a[f]), int(b[f]), int(c[f]), int(d[f]))
            invset, needs = two_adic_search(u, depth_cap, track=True)
            if all(needs[i] <= int(vals[i][f]) + KEY_PRECISION for i in range(4)):
                m = _TWO_ADIC_CACHE[kk] = _mask(invset)
            else:
                coarse.append(j)
                m = -1
        masks[j] = m
    two = masks[inverse.ravel()]
    if coarse:
        for i in np.flatnonzero(np.isin(inverse.ravel(), coarse)):
            u = SurfaceTuple(int(a[i]), int(b[i]), int(c[i]), int(d[i]))
            two[i] = _mask(two_adic_search(u, depth_cap)[0])
            if counters is not None:
                counters.engine_fallbacks += 1

    # odd places
    if kappa is None:
        kappa = _kernel_table(int(max(np.abs(a).max(), np.abs(b).max(), np.abs(c).max(), np.abs(d).max())) * 2)
    k_bd = _kernel_product(kappa[np.abs(b)], kappa[np.abs(d)])
    k_ac = _kernel_product(kappa[np.abs(a)], kappa[np.abs(c)])
    ab, cd = a + b, c + d
    k_one = np.where((ab == 0) | (cd == 0), 1, _kernel_product(kappa[np.abs(ab)], kappa[np.abs(cd)]))
    odd_ok = np.gcd(np.gcd(k_bd, k_ac), k_one) == 1
    for i in np.flatnonzero(~odd_ok & (real != 0) & (two != 0)):
        u = SurfaceTuple(int(a[i]), int(b[i]), int(c[i]), int(d[i]))
        odd_ok[i] = all(odd_place_soluble(u, q, depth_cap) for q in odd_prime_factors(u.a * u.b * u.c * u.d))
        if counters is not None:
            counters.odd_fallbacks += 1

    loc = (real != 0) & (two != 0) & odd_ok
    br = loc & ((real == 1) | (real == 2)) & ((two == 1) | (two == 2)) & ((real & two) == 0)
    return real, two, odd_ok, loc, br


def _odd_a_strata(a, b, c, d):
    even = a % 2 == 0
    na, nb, nc, nd = np.where(even, b, a), np.where(even, a, b), np.where(even, d, c), np.where(even, c, d)
    flip = na < 0
    na, nb, nc, nd = (np.where(flip, -x, x) for x in (na, nb, nc, nd))
    det = na * nd - nb * nc
    return _v2(nb), _v2(nc), _v2(nd), det


def run_shard(P: int, a_values, depth_cap=None, batch: int = 400_000) -> CensusCounters:
    counters = CensusCounters(P)
    kappa = _kernel_table(2 * P)
    pending: list[int] = []
    approx = 0

    def flush():
        nonlocal pending, approx
        if not pending:
            return
        a, b, c, d = tuples_for(pending, P)
        pending, approx = [], 0
        if len(a) == 0:
            return
        real, two, _, loc, br = classify_arrays(a, b, c, d, kappa, depth_cap, counters)
        height = np.maximum(np.maximum(np.abs(a), np.abs(b)), np.maximum(np.abs(c), np.abs(d)))
        for row, sel in enumerate((None, loc, br)):
            counters.by_height[row] += np.bincount(height if sel is None else height[sel], minlength=P + 1)
        sign = np.where(b > 0, np.where(c > 0, 0, 3), np.where(c > 0, 1, 2))
        for row, sel in enumerate((None, loc, br)):
            counters.by_sign[:, row] += np.bincount(sign if sel is None else sign[sel], minlength=4)
        place = np.where(real == 0, 0, np.where(two == 0, 1, 2))
        counters.witness += np.bincount(place[~loc], minlength=3)
        beta, gamma, delta, det = _odd_a_strata(a, b, c, d)
        skey = (beta << 24) | (gamma << 16) | (delta << 8) | (det > 0)
        sol = (two != 0).astype(np.int64)
        uk, inv = np.unique(skey, return_inverse=True)
        tot = np.bincount(inv.ravel(), minlength=len(uk))
        good = np.bincount(inv.ravel(), weights=sol, minlength=len(uk))
        for kk, t_, g_ in zip(uk.tolist(), tot.tolist(), good.tolist()):
            entry = counters.strata.setdefault(
                (kk >> 24, (kk >> 16) & 255, (kk >> 8) & 255, 1 if kk & 1 else -1), [0, 0]
            )
            entry[0] += int(t_)
            entry[1] += int(g_)

    for a in a_values:
        pending.append(a)
        # rough size of the tuples generated for this a
        approx += int(8 * P * (1 + math.log(P)) / a) + 4 * P
        if approx >= batch:
            flush()
    flush()
    return counters


def _run_shard_args(args):
    return run_shard(*args)


@dataclass(frozen=True)
class CensusReport:
    P: int
    raw_total: int
    raw_loc: int
    raw_br: int

    @property
    def N(self) -> Fraction:
        return Fraction(self.raw_total, 4)

    @property
    def N_loc(self) -> Fraction:
        return Fraction(self.raw_loc, 4)

    @property
    def N_Br(self) -> Fraction:
        return Fraction(self.raw_br, 4)

    def ratios(self) -> dict[str, Fraction | None]:
        p2 = self.P * self.P
        return {
            "N_over_P2": self.N / p2,
            "Nloc_over_P2": self.N_loc / p2,
            "NBr_over_P2": self.N_Br / p2,
            "NBr_over_Nloc": self.N_Br / self.N_loc if self.raw_loc else None,
        }

    def csv_row(self) -> list[str]:
        r = self.ratios()
        dec = [("" if x is None else f"{float(x):.6g}") for x in r.values()]
        return [str(self.P), str(self.raw_total), str(self.raw_loc), str(self.raw_br),
                str(self.N), str(self.N_loc), str(self.N_Br), *dec]

    def exact(self) -> dict:
        r = self.ratios()
        return {
            "P": self.P,
            "raw_total": self.raw_total,
            "raw_loc": self.raw_loc,
            "raw_br": self.raw_br,
            "N": str(self.N),
            "N_loc": str(self.N_loc),
            "N_Br": str(self.N_Br),
            **{k: (None if v is None else str(v)) for k, v in r.items()},
        }


def run_census(P: int, checkpoints=None, shards: int = 1, workers: int | None = None,
               depth_cap: int | None = None, return_counters: bool = False):
    """Classify every tuple of height <= P once and report at each checkpoint.

    Shard j handles a = j+1, j+1+shards, ...; the result does not depend on
    ``shards`` or ``workers``.
    """
    if P < 1 or shards < 1:
        raise ValueError("P and shards must be positive")
    checkpoints = sorted(checkpoints) if checkpoints else [P]
    if checkpoints[-1] > P or checkpoints[0] < 1:
        raise ValueError("checkpoints must lie in [1, P]")
    jobs = [(P, list(range(j + 1, P + 1, shards)), depth_cap) for j in range(shards)]
    workers = min(shards, os.cpu_count() or 1) if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_run_shard_args, jobs))
    else:
        parts = [run_shard(*job) for job in jobs]
    total = CensusCounters(P)
    for part in parts:
        total.merge(part)
    reports = [CensusReport(h, *total.raw(h)) for h in checkpoints]
    return (reports, total) if return_counters else reports


def census_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


def census_json(reports) -> str:
    return json.dumps([r.exact() for r in reports], indent=2) + "\n"


def predict_constants(table=None) -> tuple[Fraction, Fraction, Fraction]:
    """Leading constants (times 1/pi^2) of N, N_loc and N_Br from the stratum sums."""
    from chatelet.density import compute_table, stratum_sum

    table = compute_table() if table is None else table
    c_tot = stratum_sum("T", table) / 2**8
    c_loc = 3 * stratum_sum("H", table) / 2**10
    c_br = 2 * stratum_sum("Htilde", table) / 2**10
    return c_tot, c_loc, c_br
