"""Exhaustive census of everywhere-locally-soluble coprime triples with
|a_i| <= B, compared against the predicted C_n * B^3 * (log B)^(3 alpha - 3).

Two counting strategies with identical results:

* ``count_els_direct`` walks every triple in [-B, B]^3 with gcd 1 and asks
  the library decider; it is the reference implementation.
* ``count_els_symmetric`` enumerates sorted magnitude triples once and
  weights each orbit under coordinate permutations and global negation
  (for odd n also single-sign flips, absorbed by x -> -x).  Local
  solubility data is cached per (prime, residue/valuation signature), so
  the inner loop touches only table lookups and one small dict per bad
  prime.  Triples with a zero coordinate are everywhere-locally soluble
  by the library's convention and are counted in closed form.

Sweeps shard the outer coordinate range, run shards across worker
processes, and checkpoint completed shards to a versioned JSON file that
is replaced atomically; resuming reproduces the identical count.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass

from .arith import FactorTable, padic_valuation, primes_up_to
from .constants import leading_constant
from .densities import DensityCache
from .local import ExponentContext, _wild_soluble, els

__all__ = [
    "CensusAborted",
    "CensusRow",
    "CheckpointMismatch",
    "census_sweep",
    "count_els_direct",
    "count_els_symmetric",
    "write_census_csv",
]

CHECKPOINT_VERSION = 1


class CheckpointMismatch(ValueError):
    """Checkpoint file does not match this run's version or parameters."""


class CensusAborted(RuntimeError):
    """Raised by the test seam that simulates a mid-run kill."""


@dataclass(frozen=True)
class CensusRow:
    B: int
    observed: int
    predicted: float
    ratio: float
    elapsed_s: float


def _zero_coordinate_count(B: int) -> int:
    """Coprime triples in [-B, B]^3 with at least one zero coordinate.

    All of them are everywhere-locally soluble: 6 axis triples (0,0,+-1)
    and, per zero position, 4 sign choices times the ordered coprime
    pairs in [1, B]^2 (counted by a totient sieve).
    """
    phi = list(range(B + 1))
    for p in range(2, B + 1):
        if phi[p] == p:
            for k in range(p, B + 1, p):
                phi[k] -= phi[k] // p
    pairs = 2 * sum(phi[1:]) - 1
    return 6 + 12 * pairs


class _Kernel:
    """Per-(n, B) cached local-solubility data for the census inner loop."""

    def __init__(self, n: int, B: int):
        self.n = n
        self.B = B
        self.ctx = ExponentContext.for_exponent(n)
        self.table = FactorTable.build(max(B, 2))
        small_set = frozenset(self.ctx.small_primes)
        spf = self.table.smallest_prime_factor

        # tame factor data: (p, v mod n, unit mod p) per prime p | m outside S(n)
        fact: list[tuple[tuple[int, int, int], ...]] = [()] * (B + 1)
        for m in range(2, B + 1):
            x = m
            entries = []
            while x > 1:
                p = spf[x]
                v = 0
                while x % p == 0:
                    x //= p
                    v += 1
                if p not in small_set:
                    entries.append((p, v % n, (m // p**v) % p))
            fact[m] = tuple(entries)
        self.fact = fact

        # wild data: valuations and units mod q = p^(2 v_p(n) + 1) for all m <= B
        wild = []
        for p in self.ctx.small_primes:
            vpn = self.ctx.vp_n(p)
            q = p ** (2 * vpn + 1)
            val = [0] * (B + 1)
            uq = [0] * (B + 1)
            for m in range(1, B + 1):
                v, u = padic_valuation(m, p)
                val[m] = v
                uq[m] = u % q
            ppow = tuple(pow(p, t, q) for t in range(n))
            wild.append((p, q, vpn, ppow, val, uq, {}))
        self.wild = wild

        # n-th power residue and inverse tables for tame primes up to B
        self.dp: dict[int, int] = {}
        self.inv: dict[int, list[int]] = {}
        self.res: dict[int, bytearray] = {}
        for p in primes_up_to(B):
            if p in small_set:
                continue
            d = math.gcd(n, p - 1)
            self.dp[p] = d
            if d > 1:
                self.inv[p] = [0] + [pow(u, p - 2, p) for u in range(1, p)]
                ok = bytearray(p)
                for t in range(1, p):
                    ok[pow(t, n, p)] = 1
                self.res[p] = ok

    def els_signed(self, m1: int, m2: int, m3: int, s1: int, s2: int, s3: int) -> bool:
        """Everywhere-local solubility of (s1*m1, s2*m2, s3*m3), nonzero
        magnitudes, coprime; real solubility is the caller's business."""
        n = self.n
        ms = (m1, m2, m3)
        ss = (s1, s2, s3)
        for p, q, vpn, ppow, val, uq, memo in self.wild:
            v1 = val[m1]
            v2 = val[m2]
            v3 = val[m3]
            c1 = v1 % n
            c2 = v2 % n
            c3 = v3 % n
            if c1 == c2:
                i, j, k = 0, 1, 2
            elif c1 == c3:
                i, j, k = 0, 2, 1
            elif c2 == c3:
                i, j, k = 1, 2, 0
            else:
                return False
            vs = (v1, v2, v3)
            b1 = uq[ms[i]]
            b2 = uq[ms[j]]
            b3 = (uq[ms[k]] * ppow[(vs[k] - vs[i]) % n]) % q
            if ss[i] < 0:
                b1 = q - b1
            if ss[j] < 0:
                b2 = q - b2
            if ss[k] < 0 and b3:
                b3 = q - b3
            key = (b1, b2, b3)
            r = memo.get(key)
            if r is None:
                r = memo[key] = _wild_soluble(n, p, vpn, b1, b2, b3)
            if not r:
                return False
        sig: dict[int, list[int]] = {}
        fact = self.fact
        for idx in (0, 1, 2):
            for p, cls, u in fact[ms[idx]]:
                e = sig.get(p)
                if e is None:
                    sig[p] = e = [0, 0, 0, -1, -1, -1]
                e[idx] = cls
                e[3 + idx] = u
        for p, e in sig.items():
            c1 = e[0]
            c2 = e[1]
            c3 = e[2]
            if c1 == c2:
                if c1 == c3:
                    continue  # one valuation class: soluble at p
                i, j = 0, 1
            elif c1 == c3:
                i, j = 0, 2
            elif c2 == c3:
                i, j = 1, 2
            else:
                return False
            d = self.dp[p]
            if d == 1:
                continue  # every unit is an n-th power mod p
            ui = e[3 + i]
            if ui < 0:
                ui = ms[i] % p
            if ss[i] < 0:
                ui = p - ui
            uj = e[3 + j]
            if uj < 0:
                uj = ms[j] % p
            if ss[j] < 0:
                uj = p - uj
            x = (ui * self.inv[p][uj]) % p  # u_i / u_j
            if not self.res[p][p - x]:  # -u_i/u_j must be an n-th power
                return False
        return True

    def count_sym_range(self, lo: int, hi: int) -> int:
        """Signed, permuted count contributed by sorted magnitude triples
        with largest entry m3 in [lo, hi]."""
        n_odd = self.n % 2 == 1
        total = 0
        gcd = math.gcd
        els_signed = self.els_signed
        for m3 in range(lo, hi + 1):
            for m2 in range(1, m3 + 1):
                g23 = gcd(m2, m3)
                for m1 in range(1, m2 + 1):
                    if g23 != 1 and gcd(m1, g23) != 1:
                        continue
                    if m1 == m2:
                        w = 1 if m2 == m3 else 3
                    elif m2 == m3:
                        w = 3
                    else:
                        w = 6
                    if n_odd:
                        if els_signed(m1, m2, m3, 1, 1, 1):
                            total += 8 * w
                    else:
                        c = 0
                        if els_signed(m1, m2, m3, -1, 1, 1):
                            c += 1
                        if els_signed(m1, m2, m3, 1, -1, 1):
                            c += 1
                        if els_signed(m1, m2, m3, 1, 1, -1):
                            c += 1
                        total += 2 * w * c
        return total


_KERNELS: dict[tuple[int, int], _Kernel] = {}


def _kernel_for(n: int, B: int) -> _Kernel:
    k = _KERNELS.get((n, B))
    if k is None:
        k = _KERNELS[(n, B)] = _Kernel(n, B)
    return k


def _sym_shard(args: tuple[int, int, int, int]) -> int:
    n, B, lo, hi = args
    return _kernel_for(n, B).count_sym_range(lo, hi)


def _direct_shard(args: tuple[int, int, int, int]) -> int:
    n, B, lo, hi = args
    k = _kernel_for(n, B)
    gcd = math.gcd
    total = 0
    for a1 in range(lo, hi + 1):
        for a2 in range(-B, B + 1):
            g12 = gcd(a1, a2)
            for a3 in range(-B, B + 1):
                if gcd(g12, a3) != 1:
                    continue
                if els((a1, a2, a3), k.ctx, k.table):
                    total += 1
    return total


def _check_table(table: FactorTable | None, B: int) -> None:
    if table is not None and table.limit < B:
        raise ValueError(f"factor table limit {table.limit} is below B = {B}")


def _shards(lo: int, hi: int, shard_size: int) -> list[tuple[int, int]]:
    return [(a, min(a + shard_size - 1, hi)) for a in range(lo, hi + 1, shard_size)]


def _run_shards(
    worker,
    specs: list[tuple],
    threads: int | None,
    on_done=None,
) -> int:
    """Sum worker(spec) over all specs; order-free reduction by addition."""
    threads = threads if threads is not None else (os.cpu_count() or 1)
    total = 0
    if threads <= 1 or len(specs) <= 1:
        for spec in specs:
            c = worker(spec)
            total += c
            if on_done is not None:
                on_done(spec, c)
        return total
    with ProcessPoolExecutor(max_workers=threads) as pool:
        pending = {pool.submit(worker, spec): spec for spec in specs}
        try:
            while pending:
                done, _ = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    spec = pending.pop(fut)
                    c = fut.result()
                    total += c
                    if on_done is not None:
                        on_done(spec, c)
        except CensusAborted:
            for fut in pending:
                fut.cancel()
            raise
    return total


def count_els_symmetric(
    ctx: ExponentContext,
    B: int,
    table: FactorTable | None = None,
    *,
    threads: int | None = None,
    shard_size: int | None = None,
) -> int:
    """Everywhere-locally-soluble coprime triples in [-B, B]^3, counted by
    orbit representatives; equals count_els_direct by construction."""
    if B < 1:
        raise ValueError(f"B must be >= 1, got {B}")
    _check_table(table, B)
    _kernel_for(ctx.n, B)  # build in the parent so forked workers share it
    shard_size = shard_size or max(1, B // 64)
    specs = [(ctx.n, B, lo, hi) for lo, hi in _shards(1, B, shard_size)]
    total = _run_shards(_sym_shard, specs, threads)
    return total + _zero_coordinate_count(B)


def count_els_direct(
    ctx: ExponentContext,
    B: int,
    table: FactorTable | None = None,
    *,
    threads: int | None = None,
    shard_size: int | None = None,
) -> int:
    """Reference count: iterate every triple in [-B, B]^3 with gcd 1
    (zero coordinates included) and sum the library's els verdicts."""
    if B < 1:
        raise ValueError(f"B must be >= 1, got {B}")
    _check_table(table, B)
    _kernel_for(ctx.n, B)
    shard_size = shard_size or max(1, (2 * B + 1) // 16)
    specs = [(ctx.n, B, lo, hi) for lo, hi in _shards(-B, B, shard_size)]
    return _run_shards(_direct_shard, specs, threads)


def _atomic_write_json(path: str, payload: dict) -> None:
    dir_ = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=dir_, suffix=".ckpt.tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_checkpoint(path: str, params: dict) -> dict | None:
    if not os.path.exists(path):
        return None
    with open(path, "r", encoding="utf-8") as fh:
        ck = json.load(fh)
    if ck.get("version") != CHECKPOINT_VERSION:
        raise CheckpointMismatch(
            f"checkpoint version {ck.get('version')} != {CHECKPOINT_VERSION}"
        )
    for key, value in params.items():
        if ck.get(key) != value:
            raise CheckpointMismatch(f"checkpoint {key}={ck.get(key)!r} != {value!r}")
    return ck


def census_sweep(
    ctx: ExponentContext,
    B_list: list[int],
    p_max: int = 10_000,
    checkpoint_path: str | None = None,
    *,
    strategy: str = "symmetric",
    threads: int | None = None,
    shard_size: int | None = None,
    cache: DensityCache | None = None,
    abort_after_shards: int | None = None,
) -> list[CensusRow]:
    """One CensusRow per B in ascending B_list.

    Completed shards and rows are checkpointed after every shard; an
    interrupted run resumes from the checkpoint and produces the
    identical counts.  ``abort_after_shards`` is a test seam that raises
    CensusAborted after that many newly completed shards.
    """
    if B_list != sorted(B_list) or not B_list or B_list[0] < 1:
        raise ValueError("B_list must be ascending positive integers")
    if strategy not in ("symmetric", "direct"):
        raise ValueError(f"unknown strategy {strategy!r}")
    report = leading_constant(ctx, p_max, cache=cache)
    expo = 3.0 * float(report.alpha) - 3.0

    params = {
        "n": ctx.n,
        "strategy": strategy,
        "p_max": p_max,
        "B_list": list(B_list),
        "shard_size": shard_size,
    }
    ck = _load_checkpoint(checkpoint_path, params) if checkpoint_path else None
    rows: list[CensusRow] = []
    done_rows: dict[int, CensusRow] = {}
    if ck:
        for b, obs, pred, ratio, el in ck["rows"]:
            done_rows[b] = CensusRow(b, obs, pred, ratio, el)

    state = {"aborted_budget": abort_after_shards}

    def save(current: dict | None) -> None:
        if checkpoint_path is None:
            return
        payload = dict(params)
        payload["version"] = CHECKPOINT_VERSION
        payload["rows"] = [
            [r.B, r.observed, r.predicted, r.ratio, r.elapsed_s] for r in rows
        ]
        payload["current"] = current
        _atomic_write_json(checkpoint_path, payload)

    for B in B_list:
        if B in done_rows:
            rows.append(done_rows[B])
            continue
        t0 = time.monotonic()
        size = shard_size or max(1, (B if strategy == "symmetric" else 2 * B + 1) // 64)
        if strategy == "symmetric":
            spans = _shards(1, B, size)
            worker = _sym_shard
        else:
            spans = _shards(-B, B, size)
            worker = _direct_shard
        shard_counts: dict[str, int] = {}
        prev_elapsed = 0.0
        if ck and ck.get("current") and ck["current"]["B"] == B:
            shard_counts = dict(ck["current"]["done"])
            prev_elapsed = ck["current"].get("elapsed", 0.0)
        _kernel_for(ctx.n, B)
        todo = [
            (ctx.n, B, lo, hi)
            for lo, hi in spans
            if f"{lo}:{hi}" not in shard_counts
        ]

        def on_done(spec, count):
            _, _, lo, hi = spec
            shard_counts[f"{lo}:{hi}"] = count
            save(
                {
                    "B": B,
                    "done": shard_counts,
                    "elapsed": prev_elapsed + time.monotonic() - t0,
                }
            )
            if state["aborted_budget"] is not None:
                state["aborted_budget"] -= 1
                if state["aborted_budget"] <= 0:
                    raise CensusAborted(f"aborted during B={B} (test seam)")

        _run_shards(worker, todo, threads, on_done)
        observed = sum(shard_counts.values())
        if strategy == "symmetric":
            observed += _zero_coordinate_count(B)
        predicted = report.C_n * B**3 * math.log(B) ** expo
        elapsed = prev_elapsed + time.monotonic() - t0
        row = CensusRow(
            B=B,
            observed=observed,
            predicted=predicted,
            ratio=observed / predicted,
            elapsed_s=elapsed,
        )
        rows.append(row)
        ck = None  # the resumed-B is finished; later Bs start fresh
        save(None)
    return rows


def write_census_csv(rows: list[CensusRow], fh) -> None:
    w = csv.writer(fh)
    w.writerow(["B", "observed", "predicted", "ratio", "elapsed_s"])
    for r in rows:
        w.writerow(
            [r.B, r.observed, f"{r.predicted:.12g}", f"{r.ratio:.12g}", f"{r.elapsed_s:.3f}"]
        )
