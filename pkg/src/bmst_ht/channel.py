"""BPSK over AWGN, channel LLRs, Monte Carlo BER estimation and genie-aided bounds."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bmst import BmstConfig, bmst_encode
from .coset import HtCode, encode, map_decode_llr, siso_decode_llr
from .decoder import WindowConfig, sw_decode
from .messages import LLR_CLAMP, from_llr, hard_decision

CSV_FIELDS = ("ebn0_db", "ber", "frames", "bit_errors")


def modulate(bits) -> np.ndarray:
    """BPSK mapping ``0 -> +1``, ``1 -> -1``."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=float)


def noise_variance(ebn0_db: float, rate: float) -> float:
    """Per-dimension noise variance for unit-energy symbols at the given Eb/N0 and code rate."""
    if not 0 < rate <= 1:
        raise ValueError("rate must lie in (0, 1]")
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return 0.0
    return 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))


def channel_llr_values(y, sigma2: float) -> np.ndarray:
    """LLRs ``2 y / sigma^2``, clamped; ``sigma2 == 0`` gives saturated hard evidence."""
    y = np.asarray(y, dtype=float)
    if sigma2 < 0:
        raise ValueError("sigma2 must be nonnegative")
    if sigma2 == 0:
        return np.where(y < 0, -LLR_CLAMP, np.where(y > 0, LLR_CLAMP, 0.0))
    return np.clip(2.0 * y / sigma2, -LLR_CLAMP, LLR_CLAMP)


def channel_llr(y, sigma2: float) -> np.ndarray:
    """Channel messages as ``(..., 2)`` probability pairs."""
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    return from_llr(channel_llr_values(y, sigma2))


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    rate: float
    seed: int = 0

    @property
    def sigma2(self) -> float:
        return noise_variance(self.ebn0_db, self.rate)


def awgn(symbols, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(symbols, dtype=float)
    if sigma2 == 0:
        return x.copy()
    return x + math.sqrt(sigma2) * rng.standard_normal(x.shape)


@dataclass(frozen=True)
class SimResult:
    ebn0_db: float
    frames: int
    bit_errors: int
    info_bits: int
    stopped_by: str

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.info_bits) if self.frames else float("nan")

    @property
    def std_error(self) -> float:
        """Binomial standard error of the BER estimate."""
        p = self.ber
        return math.sqrt(max(p * (1 - p), 0.0) / (self.frames * self.info_bits))


class HtSystem:
    """A single ``[N, K]`` HT-coset code with SISO (``J`` iterations) or MAP decoding."""

    chunk_frames = 20000

    def __init__(self, code: HtCode, decoder: str = "siso", iterations: int = 3):
        if decoder not in ("siso", "map"):
            raise ValueError("decoder must be 'siso' or 'map'")
        self.code = code
        self.decoder = decoder
        self.iterations = iterations

    @property
    def rate(self) -> float:
        return self.code.rate

    @property
    def info_bits(self) -> int:
        return self.code.K

    def describe(self) -> dict:
        return {"system": "ht", "N": self.code.N, "K": self.code.K,
                "decoder": self.decoder, "J": self.iterations}

    def run(self, rng, frames: int, sigma2: float, all_zero: bool = False) -> int:
        K = self.code.K
        u = np.zeros((frames, K), np.uint8) if all_zero else rng.integers(0, 2, (frames, K), dtype=np.uint8)
        y = awgn(modulate(encode(self.code, u)), sigma2, rng)
        llr = channel_llr_values(y, sigma2)
        if self.decoder == "map":
            post = map_decode_llr(self.code, llr)
        else:
            post, _ = siso_decode_llr(self.code, llr, None, self.iterations)
        return int(np.count_nonzero(hard_decision(post) != u))


class BmstSystem:
    """BMST transmission of ``L`` blocks with sliding-window decoding."""

    chunk_frames = 8

    def __init__(self, config: BmstConfig, window: WindowConfig):
        self.config = config
        self.window = window

    @property
    def rate(self) -> float:
        return self.config.rate

    @property
    def info_bits(self) -> int:
        return self.config.L * self.config.basic.k

    def describe(self) -> dict:
        c, w = self.config, self.window
        return {"system": "bmst", "basic": c.basic.describe(), "n": c.basic.n, "k": c.basic.k,
                "L": c.L, "m": c.memory, "m_K": c.active_memory, "seed_interleavers": c.seed,
                "d": w.delay, "I_max": w.max_iterations, "threshold": w.threshold,
                "J": w.inner_iterations}

    def run(self, rng, frames: int, sigma2: float, all_zero: bool = False) -> int:
        c = self.config
        shape = (frames, c.L, c.basic.k)
        u = np.zeros(shape, np.uint8) if all_zero else rng.integers(0, 2, shape, dtype=np.uint8)
        y = awgn(modulate(bmst_encode(c, u)), sigma2, rng)
        decided = sw_decode(c, self.window, channel_llr_values(y, sigma2))
        return int(np.count_nonzero(decided != u))


def _point_key(ebn0_db: float) -> int:
    if math.isinf(ebn0_db):
        return 0xFFFFFFFF
    return int(round(ebn0_db * 1000)) & 0x7FFFFFFF


def chunk_rng(seed: int, ebn0_db: float, chunk: int) -> np.random.Generator:
    """Generator for one work unit; depends only on (seed, SNR point, chunk index)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_point_key(ebn0_db), chunk)))


def _run_chunk(args):
    system, seed, ebn0_db, chunk, frames, sigma2, all_zero = args
    return system.run(chunk_rng(seed, ebn0_db, chunk), frames, sigma2, all_zero)


def simulate_point(system, ebn0_db: float, max_frames: int, max_errors: int = 100, seed: int = 0,
                   all_zero: bool = False, jobs: int = 1, pool=None) -> SimResult:
    """Monte Carlo BER at one SNR; chunks are consumed in order so results do not depend on ``jobs``."""
    if max_frames < 1 or max_errors < 1:
        raise ValueError("max_frames and max_errors must be positive")
    sigma2 = noise_variance(ebn0_db, system.rate)
    size = system.chunk_frames
    n_chunks = -(-max_frames // size)
    frames = errors = 0
    chunk = 0
    while chunk < n_chunks:
        wave = range(chunk, min(n_chunks, chunk + max(jobs, 1)))
        tasks = [(system, seed, ebn0_db, c, min(size, max_frames - c * size), sigma2, all_zero) for c in wave]
        results = pool.map(_run_chunk, tasks) if pool is not None else map(_run_chunk, tasks)
        for task, errs in zip(tasks, results):
            frames += task[4]
            errors += errs
            chunk += 1
            if errors >= max_errors:
                return SimResult(ebn0_db, frames, errors, system.info_bits, "max_errors")
    return SimResult(ebn0_db, frames, errors, system.info_bits, "max_frames")


def simulate_ber(system, ebn0_list, max_frames: int, max_errors: int = 100, seed: int = 0,
                 all_zero: bool = False, jobs: int = 1) -> list[SimResult]:
    """BER curve over ``ebn0_list``; each SNR point is independently reproducible from ``seed``."""
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return [simulate_point(system, e, max_frames, max_errors, seed, all_zero, jobs, pool)
                    for e in ebn0_list]
    return [simulate_point(system, e, max_frames, max_errors, seed, all_zero) for e in ebn0_list]


SNR_ATOL = 1e-9


@dataclass(frozen=True)
class BerCurve:
    """Points ``(ebn0_db, ber)`` with strictly increasing SNR."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(e), float(b)) for e, b in self.points)
        if any(b2[0] <= b1[0] for b1, b2 in zip(pts, pts[1:])):
            raise ValueError("SNR values must be strictly increasing")
        if any(not 0 <= b <= 1 for _, b in pts):
            raise ValueError("BER values must lie in [0, 1]")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_results(cls, results) -> "BerCurve":
        return cls(tuple((r.ebn0_db, r.ber) for r in results))

    @property
    def ebn0(self) -> np.ndarray:
        return np.array([e for e, _ in self.points])

    @property
    def ber(self) -> np.ndarray:
        return np.array([b for _, b in self.points])

    def at(self, ebn0_db: float) -> float:
        """BER at ``ebn0_db`` by linear interpolation of log10(BER); NaN outside the span.

        Endpoints are matched up to ``SNR_ATOL`` so shifted curves can be read back at
        their original grid.
        """
        x, y = self.ebn0, self.ber
        if not x[0] - SNR_ATOL <= ebn0_db <= x[-1] + SNR_ATOL or np.any(y <= 0):
            return float("nan")
        return float(10.0 ** np.interp(ebn0_db, x, np.log10(y)))

    def snr_at(self, target_ber: float) -> float:
        """SNR where the curve crosses ``target_ber`` (log-linear interpolation), NaN if it never does."""
        x, y = self.ebn0, np.log10(np.clip(self.ber, 1e-300, None))
        t = math.log10(target_ber)
        for i in range(len(x) - 1):
            if (y[i] - t) * (y[i + 1] - t) <= 0 and y[i] != y[i + 1]:
                return float(x[i] + (t - y[i]) * (x[i + 1] - x[i]) / (y[i + 1] - y[i]))
        return float("nan")


def genie_shift_db(active_memory: int) -> float:
    return 10.0 * math.log10(1 + active_memory)


def genie_bound(basic_curve: BerCurve, active_memory: int) -> BerCurve:
    """Shift a basic-code curve left by ``10 log10(1 + m_K)`` dB."""
    if not basic_curve.points:
        raise ValueError("basic curve is empty")
    shift = genie_shift_db(active_memory)
    return BerCurve(tuple((e - shift, b) for e, b in basic_curve.points))


def results_to_csv(results, header: dict | None = None) -> str:
    buf = io.StringIO()
    for key, value in (header or {}).items():
        buf.write(f"# {key}: {value}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in results:
        w.writerow([f"{r.ebn0_db:.4f}", f"{r.ber:.6e}", r.frames, r.bit_errors])
    return buf.getvalue()


def curve_to_csv(curve: BerCurve, header: dict | None = None) -> str:
    buf = io.StringIO()
    for key, value in (header or {}).items():
        buf.write(f"# {key}: {value}\n")
    buf.write("ebn0_db,ber\n")
    for e, b in curve.points:
        buf.write(f"{e:.4f},{b:.6e}\n")
    return buf.getvalue()


def read_curve_csv(text: str) -> BerCurve:
    rows = csv.DictReader(line for line in text.splitlines() if line and not line.startswith("#"))
    return BerCurve(tuple((float(r["ebn0_db"]), float(r["ber"])) for r in rows))
