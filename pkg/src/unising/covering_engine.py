"""Does V = GF(r)^d equal the union of the p hyperplanes ker(n_j)?

The normals are n_j = lambda . H^j for a nonzero functional lambda, so the
hyperplanes are the H-translates of W = ker(lambda).  V is covered iff
every G_{r,p} faithful irreducible representation is unisingular.

Vectors are indexed canonically by ``sum(v_i * r**i)``.  A scan splits the
index into a low part (the first L coordinates) and a high part.  For each
normal j and residue c the set {low : n_j . low == c} is precomputed as a
packed bitset; a block of r^L vectors sharing one high part is then covered
exactly when the OR over j of the bitsets selected by -(n_j . high) is full.
Normals are grouped g at a time with the ORs of every residue combination
precomputed, so a block costs about p/g word-wise ORs over r^L/64 words.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExceeded, InvariantViolation
from .ff_core import digits_array, multiplicative_order, require_prime
from .grp_model import GrpSpec, construct_grp
from .matfq import rank_mod

log = logging.getLogger(__name__)

STRATEGIES = ("exhaustive", "scalar_normalized")
KERNELS = ("auto", "bitset", "filter")

_ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)
# canonical indices are int64
MAX_INDEX_SPACE = 1 << 62


# -- instances and verdicts ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoveringInstance:
    r: int
    d: int
    p: int
    normals: np.ndarray  # (p, d), normals[j] = functional . H^j

    def __post_init__(self) -> None:
        n = np.array(self.normals, dtype=np.int64) % self.r
        if n.shape != (self.p, self.d):
            raise ValueError(f"expected {self.p} normals of length {self.d}, got shape {n.shape}")
        if not n.any(axis=1).all():
            raise ValueError("every normal must be nonzero")
        n.setflags(write=False)
        object.__setattr__(self, "normals", n)

    def fingerprint(self) -> str:
        h = hashlib.sha256(f"{self.r},{self.d},{self.p};".encode())
        h.update(self.normals.astype(np.int64).tobytes())
        return h.hexdigest()[:16]


def build_instance(spec: GrpSpec, functional: Sequence[int] | None = None) -> CoveringInstance:
    lam = spec.functional(functional)
    r, p = spec.r, spec.p
    # doubling: rows [k, 2k) are rows [0, k) times H^k
    normals = lam[None, :] % r
    hk = spec.h_matrix.entries
    while normals.shape[0] < p:
        normals = np.concatenate([normals, normals @ hk % r])
        hk = hk @ hk % r
    inst = CoveringInstance(r, spec.d, p, normals[:p])
    if rank_mod(inst.normals, spec.r) != spec.d:
        raise AssertionError("normals do not span the dual space; H is not irreducible")
    return inst


@dataclass
class CoveringVerdict:
    r: int
    p: int
    d: int
    covered: bool
    witness: tuple[int, ...] | None
    vectors_scanned: int
    method: str
    elapsed_ms: float = 0.0

    @property
    def complete(self) -> bool:
        return not self.method.endswith(":partial")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["witness"] = list(self.witness) if self.witness is not None else None
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CoveringVerdict":
        keys = {"r", "p", "d", "covered", "witness", "vectors_scanned", "method", "elapsed_ms"}
        if set(data) != keys:
            raise ValueError(f"verdict keys {sorted(data)} do not match schema {sorted(keys)}")
        w = data["witness"]
        return cls(
            r=int(data["r"]),
            p=int(data["p"]),
            d=int(data["d"]),
            covered=bool(data["covered"]),
            witness=tuple(int(x) for x in w) if w is not None else None,
            vectors_scanned=int(data["vectors_scanned"]),
            method=str(data["method"]),
            elapsed_ms=float(data["elapsed_ms"]),
        )


def verify_witness(instance: CoveringInstance, v: Sequence[int]) -> bool:
    """True iff v is nonzero and avoids every hyperplane."""
    v = np.asarray(v, dtype=np.int64) % instance.r
    if v.shape != (instance.d,) or not v.any():
        return False
    return bool((instance.normals @ v % instance.r != 0).all())


# -- block plan -----------------------------------------------------------------


_BITSET_CAP = 1 << 20
_FILTER_CAP = 1 << 14
_BITSET_FALLBACK_BYTES = 32 << 20
_AUTO_FILTER_SPACE = 1 << 16


def _default_low_len(r: int, d: int, kernel: str) -> int:
    """Largest L <= d keeping the per-normal table (bitset: r^(L+1) bits) or block (filter: r^L) under a cap."""
    if kernel == "bitset":
        cap, extra = _BITSET_CAP, 1
    else:
        cap, extra = _FILTER_CAP, 0
    L = 1
    while L < d and r ** (L + 1 + extra) <= cap:
        L += 1
    return min(L, d)


@dataclass(frozen=True)
class BlockPlan:
    """Ordered high-part indices to visit, cut into fixed-size chunks."""

    r: int
    d: int
    low_len: int
    strategy: str
    chunk_blocks: int
    ranges: tuple[tuple[int, int], ...] = field(init=False)

    def __post_init__(self) -> None:
        high_len = self.d - self.low_len
        if self.strategy == "exhaustive":
            ranges = [(0, self.r**high_len)]
        else:
            # high parts whose most significant nonzero digit is 1, plus the zero high part
            ranges = [(0, 1)] + [(self.r**k, 2 * self.r**k) for k in range(high_len)]
        object.__setattr__(self, "ranges", tuple(ranges))

    @property
    def total_blocks(self) -> int:
        return sum(b - a for a, b in self.ranges)

    @property
    def n_chunks(self) -> int:
        return -(-self.total_blocks // self.chunk_blocks)

    def chunk_his(self, c: int) -> np.ndarray:
        lo, hi = c * self.chunk_blocks, min(self.total_blocks, (c + 1) * self.chunk_blocks)
        out = []
        pos = 0
        for a, b in self.ranges:
            n = b - a
            s, e = max(lo, pos), min(hi, pos + n)
            if s < e:
                out.append(np.arange(a + s - pos, a + e - pos, dtype=np.int64))
            pos += n
        return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)

    def block_size(self, hi: int) -> int:
        """Number of vectors the strategy visits in block hi."""
        full = self.r**self.low_len
        if self.strategy == "scalar_normalized" and hi == 0:
            return (full - 1) // (self.r - 1)
        return full


def _low_normalized_mask(r: int, L: int) -> np.ndarray:
    """Low indices whose most significant nonzero digit is 1."""
    idx = np.arange(r**L, dtype=np.int64)
    mask = np.zeros(idx.size, dtype=bool)
    for k in range(L):
        mask[r**k : 2 * r**k] = True
    return mask


# -- kernels ----------------------------------------------------------------------


def _pack(bits: np.ndarray, words: int) -> np.ndarray:
    """Pack boolean rows (last axis) into little-endian uint64 words, zero padded."""
    packed = np.packbits(bits, axis=-1, bitorder="little")
    buf = np.zeros(bits.shape[:-1] + (words * 8,), dtype=np.uint8)
    buf[..., : packed.shape[-1]] = packed
    return buf.view("<u8")


class BitsetKernel:
    """Bit-sliced block test: one bit per low index, grouped OR tables."""

    name = "bitset"

    def __init__(self, instance: CoveringInstance, low_len: int, strategy: str,
                 table_budget_bytes: int = 256 << 20) -> None:
        r, d, p = instance.r, instance.d, instance.p
        self.instance, self.low_len, self.strategy = instance, low_len, strategy
        self.n_low = r**low_len
        self.words = -(-self.n_low // 64)
        normals = instance.normals
        low_dots = digits_array(np.arange(self.n_low), r, low_len) @ normals[:, :low_len].T % r  # (n_low, p)
        self.high_normals = normals[:, low_len:]

        # group size g minimizing table rows plus block ORs, ceil(p/g) * (r^g + blocks)
        high_len = d - low_len
        blocks = r**high_len if strategy == "exhaustive" else (r**high_len - 1) // (r - 1) + 1
        group, best_cost = 1, None
        for g in range(1, p + 1):
            n_groups = -(-p // g)
            if g > 1 and n_groups * r**g * self.words * 8 > table_budget_bytes:
                break
            cost = n_groups * (r**g + blocks)
            if best_cost is None or cost < best_cost:
                group, best_cost = g, cost
        self.group = group
        self.groups = [list(range(s, min(p, s + group))) for s in range(0, p, group)]
        self.tables = []
        residues = np.arange(r)[:, None]
        for members in self.groups:
            tab = np.zeros((1, self.words), dtype=np.uint64)
            for j in members:
                single = _pack(low_dots[:, j][None, :] == residues, self.words)
                # row index c * rows + old: the member added last is the most significant digit
                tab = (single[:, None, :] | tab[None, :, :]).reshape(r * tab.shape[0], self.words)
            self.tables.append(tab)
        self.weights = [np.array([r**k for k in range(len(m))], dtype=np.int64) for m in self.groups]

        pad = np.zeros(self.words * 64, dtype=bool)
        pad[self.n_low :] = True
        self.pad_mask = _pack(pad, self.words)
        zero_block = pad.copy()
        if strategy == "scalar_normalized":
            zero_block[: self.n_low] = ~_low_normalized_mask(r, low_len)
        self.zero_block_mask = _pack(zero_block, self.words)

    def combos(self, his: np.ndarray) -> np.ndarray:
        """(len(his), n_groups) table rows for each high part."""
        r = self.instance.r
        high_len = self.instance.d - self.low_len
        if high_len:
            dh = digits_array(his, r, high_len) @ self.high_normals.T % r
        else:
            dh = np.zeros((his.size, self.instance.p), dtype=np.int64)
        target = (-dh) % r
        return np.stack([target[:, m] @ w for m, w in zip(self.groups, self.weights)], axis=1)

    def first_uncovered(self, hi: int, combo: np.ndarray) -> int | None:
        acc = self.pad_mask | self.tables[0][combo[0]]
        if hi == 0:
            acc |= self.zero_block_mask
        for t in range(1, len(self.tables)):
            np.bitwise_or(acc, self.tables[t][combo[t]], out=acc)
        if np.bitwise_and.reduce(acc) == _ALL_ONES:
            return None
        w = int(np.flatnonzero(acc != _ALL_ONES)[0])
        x = int(~acc[w] & _ALL_ONES)
        return w * 64 + ((x & -x).bit_length() - 1)

    def count_uncovered(self, hi: int, combo: np.ndarray) -> int:
        acc = self.pad_mask | self.tables[0][combo[0]]
        if hi == 0:
            acc |= self.zero_block_mask
        for t in range(1, len(self.tables)):
            np.bitwise_or(acc, self.tables[t][combo[t]], out=acc)
        return int(np.bitwise_count(~acc).sum())


class FilterKernel:
    """Per-vector test with vectorized early exit: survivors of one group of normals meet the next."""

    name = "filter"

    def __init__(self, instance: CoveringInstance, low_len: int, strategy: str) -> None:
        r = instance.r
        self.instance, self.low_len, self.strategy = instance, low_len, strategy
        self.n_low = r**low_len
        self.low_digits = digits_array(np.arange(self.n_low), r, low_len)
        self.zero_keep = _low_normalized_mask(r, low_len) if strategy == "scalar_normalized" else None
        self.batch = 1024
        # first group of normals tested together, doubling afterwards; most vectors die early
        self.normal_block = 8

    def combos(self, his: np.ndarray) -> np.ndarray:
        return np.zeros((his.size, 0), dtype=np.int64)

    def _lows(self, hi: int) -> np.ndarray:
        lows = np.arange(self.n_low, dtype=np.int64)
        if hi == 0 and self.zero_keep is not None:
            lows = lows[self.zero_keep]
        return lows

    def _survivors(self, hi: int, lows: np.ndarray) -> np.ndarray:
        inst = self.instance
        r, d = inst.r, inst.d
        vecs = np.empty((lows.size, d), dtype=np.int64)
        vecs[:, : self.low_len] = self.low_digits[lows]
        vecs[:, self.low_len :] = digits_array(hi, r, d - self.low_len)
        start, size = 0, self.normal_block
        while start < inst.p and lows.size:
            block = inst.normals[start : start + size]
            keep = (vecs @ block.T % r != 0).all(axis=1)
            lows, vecs = lows[keep], vecs[keep]
            start, size = start + size, 2 * size
        return lows

    def first_uncovered(self, hi: int, combo: np.ndarray) -> int | None:
        # sub-batches in index order, so a witness early in the block exits early
        lows = self._lows(hi)
        for start in range(0, lows.size, self.batch):
            s = self._survivors(hi, lows[start : start + self.batch])
            if s.size:
                return int(s[0])
        return None

    def count_uncovered(self, hi: int, combo: np.ndarray) -> int:
        return int(self._survivors(hi, self._lows(hi)).size)


def make_kernel(instance: CoveringInstance, strategy: str, kernel: str, low_len: int | None = None):
    """Build a block kernel; ``auto`` picks filter for tiny spaces or huge tables, else bitset."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}; choose from {KERNELS}")
    r, d, p = instance.r, instance.d, instance.p
    if kernel == "auto":
        L = low_len if low_len is not None else _default_low_len(r, d, "bitset")
        small = r**d <= _AUTO_FILTER_SPACE
        kernel = "filter" if small or p * r ** (L + 1) // 8 > _BITSET_FALLBACK_BYTES else "bitset"
    L = low_len if low_len is not None else _default_low_len(r, d, kernel)
    if kernel == "bitset":
        return BitsetKernel(instance, L, strategy)
    return FilterKernel(instance, L, strategy)


# -- checkpoints -----------------------------------------------------------------------


class Checkpoint:
    """Append-only record of completed chunks.

    Format::

        # unising-checkpoint v1 <key=value ...>
        done <chunk> <vectors> <witness index or ->
    """

    def __init__(self, path: str | os.PathLike, header: str) -> None:
        self.path = Path(path)
        self.header = header
        self.done: dict[int, tuple[int, int | None]] = {}
        self._lock = threading.Lock()
        if self.path.exists() and self.path.stat().st_size:
            lines = self.path.read_text().splitlines()
            if not lines or lines[0] != header:
                raise ValueError(f"checkpoint {self.path} belongs to a different scan:\n  {lines[:1]}\n  [{header}]")
            for ln in lines[1:]:
                parts = ln.split()
                if len(parts) != 4 or parts[0] != "done":
                    continue  # torn trailing write
                w = None if parts[3] == "-" else int(parts[3])
                self.done[int(parts[1])] = (int(parts[2]), w)
        else:
            self.path.write_text(header + "\n")

    def record(self, chunk: int, vectors: int, witness_index: int | None) -> None:
        with self._lock:
            self.done[chunk] = (vectors, witness_index)
            with self.path.open("a") as fh:
                fh.write(f"done {chunk} {vectors} {'-' if witness_index is None else witness_index}\n")
                fh.flush()


# -- scan ---------------------------------------------------------------------------------


def default_chunk_blocks(r: int, low_len: int, target_vectors: int = 1 << 26) -> int:
    return max(1, target_vectors // r**low_len)


class _SharedBest:
    """Least (chunk, vector index) witness seen so far, plus an abort flag."""

    def __init__(self) -> None:
        self.lock = threading.Lock()
        self.chunk: int | None = None
        self.index: int | None = None
        self.abort = False

    def offer(self, chunk: int, index: int, stop_all: bool) -> None:
        with self.lock:
            if self.chunk is None or chunk < self.chunk:
                self.chunk, self.index = chunk, index
            if stop_all:
                self.abort = True

    def skip(self, chunk: int, deterministic: bool) -> bool:
        with self.lock:
            if self.abort:
                return True
            return deterministic and self.chunk is not None and chunk > self.chunk


def scan(
    instance: CoveringInstance,
    strategy: str = "scalar_normalized",
    workers: int = 1,
    deterministic: bool = False,
    kernel: str = "auto",
    low_len: int | None = None,
    chunk_blocks: int | None = None,
    chunk_range: tuple[int, int] | None = None,
    checkpoint: str | os.PathLike | None = None,
    max_chunks: int | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> CoveringVerdict:
    """Search for a vector outside every hyperplane.

    ``chunk_range`` restricts the scan to chunks [lo, hi) of the block plan;
    ``max_chunks`` stops after that many newly processed chunks (used to
    exercise resume).  A verdict over less than the whole space carries a
    method tag ending in ``:partial``.  In deterministic mode the witness is
    the least uncovered vector in canonical order, for any worker count, and
    ``vectors_scanned`` counts the canonical prefix up to the witness block.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if instance.r**instance.d > MAX_INDEX_SPACE:
        raise BudgetExceeded(f"{instance.r}^{instance.d} vectors exceed the 64-bit index space")
    t0 = time.perf_counter()
    k = make_kernel(instance, strategy, kernel, low_len)
    r, d = instance.r, instance.d
    plan = BlockPlan(r, d, k.low_len, strategy, chunk_blocks or default_chunk_blocks(r, k.low_len))
    lo, hi = chunk_range if chunk_range is not None else (0, plan.n_chunks)
    lo, hi = max(0, lo), min(plan.n_chunks, hi)
    n_low = r**k.low_len

    ckpt = None
    if checkpoint is not None:
        header = (
            f"# unising-checkpoint v1 r={r} p={instance.p} d={d} normals={instance.fingerprint()} "
            f"strategy={strategy} kernel={k.name} low={k.low_len} chunk={plan.chunk_blocks}"
        )
        ckpt = Checkpoint(checkpoint, header)

    best = _SharedBest()
    counts: dict[int, int] = {}
    if ckpt is not None:
        for c, (vecs, widx) in ckpt.done.items():
            if lo <= c < hi:
                counts[c] = vecs
                if widx is not None:
                    best.offer(c, widx, stop_all=not deterministic)

    pending = [c for c in range(lo, hi) if c not in counts]
    if max_chunks is not None:
        pending = pending[:max_chunks]
    interrupted = len(pending) < sum(1 for c in range(lo, hi) if c not in counts)

    def run_chunk(c: int) -> None:
        if best.skip(c, deterministic):
            return
        his = plan.chunk_his(c)
        combos = k.combos(his)
        vecs = 0
        found = None
        for b, h in enumerate(his):
            if b % 64 == 0 and best.skip(c, deterministic):
                return
            h = int(h)
            vecs += plan.block_size(h)
            low = k.first_uncovered(h, combos[b])
            if low is not None:
                found = h * n_low + low
                break
        if found is not None:
            best.offer(c, found, stop_all=not deterministic)
        counts[c] = vecs
        if ckpt is not None:
            ckpt.record(c, vecs, found)
        if progress is not None:
            progress(len(counts), hi - lo)

    if workers == 1:
        for c in pending:
            if best.abort:
                break
            run_chunk(c)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_chunk, pending))

    witness = None
    if best.index is not None:
        witness = tuple(int(x) for x in digits_array(best.index, r, d))
        if not verify_witness(instance, witness):
            raise InvariantViolation(f"scan produced an invalid witness {witness}")
    if deterministic and best.chunk is not None:
        wblock = best.index // n_low
        scanned = sum(counts.get(c, 0) for c in range(lo, best.chunk))
        for h in plan.chunk_his(best.chunk):
            scanned += plan.block_size(int(h))
            if int(h) == wblock:
                break
    else:
        scanned = sum(counts.values())

    complete = witness is not None or (not interrupted and (lo, hi) == (0, plan.n_chunks))
    method = f"scan:{strategy}" + ("" if complete else ":partial")
    return CoveringVerdict(
        r=r,
        p=instance.p,
        d=d,
        covered=witness is None,
        witness=witness,
        vectors_scanned=int(scanned),
        method=method,
        elapsed_ms=round((time.perf_counter() - t0) * 1000, 3),
    )


def count_uncovered(instance: CoveringInstance, kernel: str = "auto") -> int:
    """Exact number of vectors outside every hyperplane (exhaustive)."""
    k = make_kernel(instance, "exhaustive", kernel)
    plan = BlockPlan(instance.r, instance.d, k.low_len, "exhaustive", default_chunk_blocks(instance.r, k.low_len))
    total = 0
    for c in range(plan.n_chunks):
        his = plan.chunk_his(c)
        combos = k.combos(his)
        total += sum(k.count_uncovered(int(h), combos[b]) for b, h in enumerate(his))
    return total


# -- verdicts with shortcuts ------------------------------------------------------------------


@dataclass
class VerdictOptions:
    force_scan: bool = False
    functional: Sequence[int] | None = None
    strategy: str = "scalar_normalized"
    workers: int = 1
    deterministic: bool = False
    kernel: str = "auto"
    checkpoint: str | None = None
    # optional shortcuts, always cross-checked by a scan when they fire
    improved_bound: bool = False
    all_hyperplanes: bool = False
    # scan for a witness when a shortcut says "not covered" without one
    want_witness: bool = False


def _shortcut(r: int, p: int, d: int, opts: VerdictOptions) -> tuple[str, bool] | None:
    """(tag, covered) for the first applicable shortcut rule."""
    if r == 2:
        return "S1", True
    if d == 1:
        return "S2", False
    if p < r:
        return "S3", False
    if d == p - 1:
        return "S4", False
    if opts.improved_bound and 2 * p < 3 * (r + 1):
        return "S5", False
    if opts.all_hyperplanes and d >= 2 and p * (r - 1) == r**d - 1:
        return "S6", True
    return None


_SCAN_VERIFIED = {"S5", "S6"}


def unisingularity_verdict(r: int, p: int, options: VerdictOptions | None = None) -> CoveringVerdict:
    """Is every faithful irreducible representation of G_{r,p} unisingular?

    ``covered=True`` means yes.  Shortcut rules apply first (S1: r = 2;
    S2: d = 1; S3: p < r; S4: d = p - 1), then a full scan.
    """
    opts = options or VerdictOptions()
    require_prime(r, "r")
    require_prime(p, "p")
    if r == p:
        raise ValueError("r and p must be distinct")
    t0 = time.perf_counter()
    d = multiplicative_order(r, p)
    cut = _shortcut(r, p, d, opts)

    def run_scan() -> CoveringVerdict:
        spec = construct_grp(r, p)
        return scan(
            build_instance(spec, opts.functional),
            strategy=opts.strategy,
            workers=opts.workers,
            deterministic=opts.deterministic,
            kernel=opts.kernel,
            checkpoint=opts.checkpoint,
        )

    if cut is None:
        return run_scan()
    tag, covered = cut
    needs_witness = opts.want_witness and not covered and tag != "S2" and r**d <= MAX_INDEX_SPACE
    if opts.force_scan or tag in _SCAN_VERIFIED or needs_witness:
        v = run_scan()
        if v.covered != covered:
            raise InvariantViolation(
                f"shortcut {tag} says covered={covered} but scan says covered={v.covered} for (r, p) = ({r}, {p})"
            )
        v.method = f"{tag}+{v.method}"
        v.elapsed_ms = round((time.perf_counter() - t0) * 1000, 3)
        return v
    witness = (1,) if tag == "S2" else None
    return CoveringVerdict(r, p, d, covered, witness, 0, tag, round((time.perf_counter() - t0) * 1000, 3))
