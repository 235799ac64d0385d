"""Monte-Carlo BLER points, sweeps, SNR-at-target search and result files.

Trials are grouped in fixed blocks of ``BLOCK`` consecutive indices. Block
``b`` of SNR point ``p`` draws its messages and noise from the stream keyed by
``(master_seed, p, b)``, so every trial is fixed by its index no matter which
worker runs it. Blocks are folded in index order and a point stops at the
exact trial where the error count reaches ``stop_errors``.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .analysis import is_ml_error, normal_approx_bler, snr_for_normal_approx
from .channel import ChannelParams, llr, modulate_qpsk, stream, transmit
from .codes.core import Code
from .decoders import make_decoder
from .errors import BracketFailure, ConfigInvalid

BLOCK = 256
SCHEMA_VERSION = 1
CSV_FIELDS = ("esn0_db", "trials", "errors", "bler", "ml_errors", "ml_bound", "mean_ops_per_info_bit",
              "max_ops_per_info_bit", "abandoned_count", "mean_work", "stopped_by")


@dataclass
class ExperimentConfig:
    """One experiment: a code, a decoder and the stopping rules.

    ``decoder`` is a registry spec such as ``{"name": "osd", "order": 2}``.
    ``op_cap`` (0 = off) abandons any decode whose operation total reaches it.
    """

    code: Code
    decoder: dict[str, Any]
    snr_grid: Sequence[float] = ()
    stop_errors: int = 100
    max_trials: int = 10**8
    master_seed: int = 0
    op_cap: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.stop_errors < 1:
            raise ConfigInvalid("stop_errors must be >= 1")
        if self.max_trials < 1:
            raise ConfigInvalid("max_trials must be >= 1")
        if self.op_cap < 0:
            raise ConfigInvalid("op_cap must be >= 0")
        grid = list(self.snr_grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigInvalid("snr_grid must be strictly increasing")

    def echo(self) -> dict[str, Any]:
        return {
            "code": {"family": self.code.family.value, "n": self.code.n, "k": self.code.k,
                     "params": self.code.spec.params},
            "decoder": self.decoder, "snr_grid": list(self.snr_grid), "stop_errors": self.stop_errors,
            "max_trials": self.max_trials, "master_seed": self.master_seed, "op_cap": self.op_cap,
        }


@dataclass
class SimRecord:
    esn0_db: float
    trials: int
    errors: int
    bler: float
    ml_errors: int
    ml_bound: float
    mean_ops_per_info_bit: float
    max_ops_per_info_bit: float
    abandoned_count: int
    mean_work: float
    stopped_by: str = "errors"


@dataclass
class _Block:
    error: np.ndarray
    ml_error: np.ndarray
    abandoned: np.ndarray
    ops: np.ndarray
    work: np.ndarray


def _trial_block(code: Code, decoder_spec: dict, esn0_db: float, key: tuple[int, int, int], count: int,
                 op_cap: int, decoder=None, need: int | None = None) -> _Block:
    """Simulate the first ``count`` trials of one block.

    With ``need`` set, decoding stops after that many errors; the trials
    dropped that way are never used by the fold.
    """
    n, k = code.n, code.k
    rng = stream(*key)
    params = ChannelParams(esn0_db)
    msgs = rng.integers(0, 2, size=(BLOCK, k), dtype=np.uint8)
    words = ((msgs.astype(np.int64) @ code.G.to_array().astype(np.int64)) & 1).astype(np.uint8)
    padded = np.zeros((BLOCK, n + n % 2), dtype=np.uint8)
    padded[:, :n] = words
    llrs = llr(transmit(modulate_qpsk(padded), params, rng), params)[:, :n]
    decode = decoder if decoder is not None else make_decoder(code, decoder_spec)
    out = _Block(np.zeros(count, bool), np.zeros(count, bool), np.zeros(count, bool),
                 np.zeros(count, np.int64), np.zeros(count, np.int64))
    for t in range(count):
        res = decode(llrs[t], op_cap=op_cap)
        wrong = not res.ok or not np.array_equal(res.codeword, words[t])
        out.error[t] = wrong
        out.abandoned[t] = not res.ok
        if wrong:
            out.ml_error[t] = is_ml_error(llrs[t], words[t], res.codeword, res.found and code.is_codeword(res.codeword))
        out.ops[t] = res.counters.total
        out.work[t] = res.work
        if wrong and need is not None:
            need -= 1
            if need == 0:
                return _Block(out.error[: t + 1], out.ml_error[: t + 1], out.abandoned[: t + 1],
                              out.ops[: t + 1], out.work[: t + 1])
    return out


_WORKER_STATE: dict[str, Any] = {}


def _worker_init(code: Code, decoder_spec: dict) -> None:
    _WORKER_STATE["code"] = code
    _WORKER_STATE["spec"] = decoder_spec
    _WORKER_STATE["decoder"] = make_decoder(code, decoder_spec)


def _worker_block(esn0_db, key, count, op_cap):
    return _trial_block(_WORKER_STATE["code"], _WORKER_STATE["spec"], esn0_db, key, count, op_cap,
                        _WORKER_STATE["decoder"])


class _Runner:
    """Evaluates blocks serially or on a process pool, always handing them back in order."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.pool = None
        if config.workers > 1:
            self.pool = ProcessPoolExecutor(config.workers, initializer=_worker_init,
                                            initargs=(config.code, config.decoder))
        else:
            self.decoder = make_decoder(config.code, config.decoder)

    def close(self):
        if self.pool is not None:
            self.pool.shutdown(cancel_futures=True)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def blocks(self, esn0_db: float, point: int, max_trials: int, budget: list[int]):
        """Yield blocks in order; ``budget[0]`` is the number of errors still wanted."""
        cfg = self.config
        nblocks = -(-max_trials // BLOCK)
        sizes = [min(BLOCK, max_trials - b * BLOCK) for b in range(nblocks)]
        if self.pool is None:
            for b in range(nblocks):
                yield _trial_block(cfg.code, cfg.decoder, esn0_db, (cfg.master_seed, point, b), sizes[b],
                                   cfg.op_cap, self.decoder, budget[0])
            return
        ahead = 2 * cfg.workers
        pending = {}
        nxt = 0
        for b in range(nblocks):
            while nxt < nblocks and nxt < b + ahead:
                pending[nxt] = self.pool.submit(_worker_block, esn0_db, (cfg.master_seed, point, nxt),
                                                sizes[nxt], cfg.op_cap)
                nxt += 1
            yield pending.pop(b).result()
        for f in pending.values():
            f.cancel()


def _fold(blocks, esn0_db: float, k: int, stop_errors: int, max_trials: int, budget: list[int]) -> SimRecord:
    trials = errors = ml_errors = abandoned = 0
    ops_sum = work_sum = 0
    ops_max = 0
    for blk in blocks:
        cum = np.cumsum(blk.error)
        hit = np.flatnonzero(errors + cum >= stop_errors)
        take = int(hit[0]) + 1 if hit.size else blk.error.size
        take = min(take, max_trials - trials)
        sl = slice(0, take)
        trials += take
        errors += int(blk.error[sl].sum())
        ml_errors += int(blk.ml_error[sl].sum())
        abandoned += int(blk.abandoned[sl].sum())
        ops_sum += int(blk.ops[sl].sum())
        work_sum += int(blk.work[sl].sum())
        ops_max = max(ops_max, int(blk.ops[sl].max()) if take else 0)
        budget[0] = stop_errors - errors
        if errors >= stop_errors or trials >= max_trials:
            break
    stopped = "errors" if errors >= stop_errors else "max_trials"
    return SimRecord(float(esn0_db), trials, errors, errors / trials if trials else 0.0, ml_errors,
                     ml_errors / trials if trials else 0.0, ops_sum / trials / k if trials else 0.0,
                     ops_max / k, abandoned, work_sum / trials if trials else 0.0, stopped)


def run_bler_point(config: ExperimentConfig, esn0_db: float, point: int = 0, _runner: _Runner | None = None,
                   max_trials: int | None = None) -> SimRecord:
    """Simulate until ``stop_errors`` block errors or ``max_trials`` trials.

    ``point`` selects the random streams; equal ``(master_seed, point)`` pairs
    see identical messages and noise realisations (scaled by the SNR).
    """
    max_trials = config.max_trials if max_trials is None else max_trials
    runner = _runner or _Runner(config)
    try:
        budget = [config.stop_errors]
        return _fold(runner.blocks(esn0_db, point, max_trials, budget), esn0_db, config.code.k,
                     config.stop_errors, max_trials, budget)
    finally:
        if _runner is None:
            runner.close()


def skip_threshold(config: ExperimentConfig) -> float:
    """Predicted BLER below which a grid point cannot be measured: 1% of ``stop_errors/max_trials``."""
    return 0.01 * config.stop_errors / config.max_trials


def sweep(config: ExperimentConfig) -> list[SimRecord]:
    """``run_bler_point`` per grid value, skipping points whose NA BLER is below ``skip_threshold``."""
    code = config.code
    floor = skip_threshold(config)
    out = []
    with _Runner(config) as runner:
        for p, snr in enumerate(config.snr_grid):
            if code.k < code.n and normal_approx_bler(code.n, code.k, snr) < floor:
                continue
            out.append(run_bler_point(config, snr, p, runner))
    return out


def snr_for_target_bler(config: ExperimentConfig, target: float = 1e-4, tol_db: float = 0.05,
                        bracket: tuple[float, float] | None = None, max_extend: int = 4) -> float:
    """Bisection for the Es/N0 at which the measured BLER crosses ``target``.

    Every evaluation reuses the streams of point 0, so the measured BLER is
    monotone in SNR up to decoder effects. ``stop_errors`` is raised to at
    least 100 to keep the relative error near 10%. The bracket starts at the
    normal approximation +-2 dB and is widened by 2 dB up to ``max_extend``
    times.

    Raises:
        BracketFailure: if the target is not crossed inside the widened bracket.
    """
    code = config.code
    if not 0.0 < target:
        raise ConfigInvalid("target must be positive")
    if bracket is None:
        centre = snr_for_normal_approx(code.n, code.k, min(target, 0.5)) if code.k < code.n else 0.0
        bracket = (centre - 2.0, centre + 2.0)
    lo, hi = bracket
    if target >= 1.0:
        return float(lo)
    cfg = ExperimentConfig(config.code, config.decoder, (), max(config.stop_errors, 100), config.max_trials,
                           config.master_seed, config.op_cap, config.workers)
    # the full run's estimate stop_errors/T exceeds target only if T < stop_errors/target, so
    # trials past that point cannot change the decision
    decisive = min(cfg.max_trials, math.ceil(cfg.stop_errors / target))
    with _Runner(cfg) as runner:
        def above(snr):
            return run_bler_point(cfg, snr, 0, runner, decisive).bler > target

        for _ in range(max_extend + 1):
            if above(lo):
                break
            lo -= 2.0
        else:
            raise BracketFailure(f"BLER <= {target} already at {lo + 2.0} dB")
        for _ in range(max_extend + 1):
            if not above(hi):
                break
            hi += 2.0
        else:
            raise BracketFailure(f"BLER > {target} still at {hi - 2.0} dB")
        while hi - lo >= tol_db:
            mid = 0.5 * (lo + hi)
            if above(mid):
                lo = mid
            else:
                hi = mid
    return 0.5 * (lo + hi)


def snr_at(records: Sequence[SimRecord], target: float, key: str = "bler") -> float:
    """Log-linear interpolation of the SNR where ``key`` crosses ``target``; NaN if never."""
    xs = [r.esn0_db for r in records]
    ys = [getattr(r, key) for r in records]
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        if y0 >= target >= y1 and y0 > 0:
            if y1 <= 0:
                return x1
            if y0 == y1:
                return x0
            t = (math.log(y0) - math.log(target)) / (math.log(y0) - math.log(y1))
            return x0 + t * (x1 - x0)
    return math.nan


# ---------------------------------------------------------------- output


def records_to_csv(records: Sequence[SimRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# shortcodes {__version__} schema {SCHEMA_VERSION}\n")
        w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in records:
            w.writerow({f: _fmt(getattr(r, f)) for f in CSV_FIELDS})


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def records_from_csv(path) -> list[SimRecord]:
    with open(path) as fh:
        rows = [ln for ln in fh if not ln.startswith("#")]
    out = []
    types = {f.name: f.type for f in fields(SimRecord)}
    for row in csv.DictReader(rows):
        kw = {}
        for name, value in row.items():
            t = types[name]
            kw[name] = float(value) if t == "float" else int(value) if t == "int" else value
        out.append(SimRecord(**kw))
    return out


def records_to_json(records: Sequence[SimRecord], path, config_echo: dict | None = None, extra: dict | None = None) -> None:
    doc = {"artifact_version": __version__, "schema": SCHEMA_VERSION, "config": config_echo or {},
           "records": [asdict(r) for r in records]}
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def records_from_json(path) -> list[SimRecord]:
    return [SimRecord(**r) for r in json.loads(Path(path).read_text())["records"]]


def write_dat(path, xs, ys, header: str = "") -> None:
    """Two-column plot data."""
    with open(path, "w") as fh:
        if header:
            fh.write(f"# {header}\n")
        for x, y in zip(xs, ys):
            fh.write(f"{x!r} {y!r}\n")


def emit(records: Sequence[SimRecord], out_dir, stem: str, formats: Sequence[str] = ("csv", "json", "dat"),
         config_echo: dict | None = None) -> list[Path]:
    """Write ``stem.csv``, ``stem.json`` and ``stem.dat`` (SNR vs BLER) under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for fmt in formats:
        path = out_dir / f"{stem}.{fmt}"
        if fmt == "csv":
            records_to_csv(records, path)
        elif fmt == "json":
            records_to_json(records, path, config_echo)
        elif fmt == "dat":
            write_dat(path, [r.esn0_db for r in records], [r.bler for r in records], "EsN0_dB BLER")
        else:
            raise ConfigInvalid(f"unknown output format {fmt!r}")
        written.append(path)
    return written


# ---------------------------------------------------------------- studies


@dataclass
class RcPoint:
    family: str
    n: int
    k: int
    snr_at_target: float
    dH: int | None


def near_ml_decoder(code: Code) -> dict[str, Any]:
    """Exact ML through full-order OSD with output-preserving pruning."""
    return {"name": "osd", "order": code.k, "prune": True}


def rc_study(k: int, lengths: Sequence[int], families: Sequence[str], *, target: float = 1e-3,
             stop_errors: int = 100, max_trials: int = 10**7, master_seed: int = 0, workers: int = 1,
             tol_db: float = 0.05, code_seed: int = 0, decoder: dict[str, Any] | None = None) -> list[RcPoint]:
    """SNR needed for ``target`` BLER by each nested RC family at each length."""
    from .codes.rc import build_rc

    out = []
    for fam in families:
        rc = build_rc(fam, k, lengths, seed=code_seed)
        for n in lengths:
            code = rc.code(n)
            cfg = ExperimentConfig(code, decoder or near_ml_decoder(code), (), stop_errors, max_trials,
                                   master_seed, 0, workers)
            snr = snr_for_target_bler(cfg, target, tol_db)
            out.append(RcPoint(rc.label, n, k, snr, code.dH))
    return out


@dataclass
class ComplexityPoint:
    label: str
    decoder: dict[str, Any]
    snr_at_target: float
    mean_ops_per_info_bit: float


def complexity_study(code: Code, curves: dict[str, Sequence[dict[str, Any]]], *, target: float = 1e-4,
                     stop_errors: int = 100, max_trials: int = 10**8, master_seed: int = 0, workers: int = 1,
                     tol_db: float = 0.05) -> list[ComplexityPoint]:
    """SNR needed for ``target`` and the mean ops/info bit there, for each decoder setting.

    ``curves`` maps a curve label (e.g. ``"SCL"``) to the decoder specs that
    trace it (e.g. increasing list sizes).
    """
    out = []
    for label, specs in curves.items():
        for spec in specs:
            cfg = ExperimentConfig(code, dict(spec), (), stop_errors, max_trials, master_seed, 0, workers)
            snr = snr_for_target_bler(cfg, target, tol_db)
            rec = run_bler_point(cfg, snr, 1)
            out.append(ComplexityPoint(label, dict(spec), snr, rec.mean_ops_per_info_bit))
    return out


def emit_complexity(points: Sequence[ComplexityPoint], out_dir, stem: str) -> list[Path]:
    """One ``(ops/info bit, SNR@target)`` polyline file per curve label, plus a JSON summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jpath = out_dir / f"{stem}.json"
    jpath.write_text(json.dumps({"artifact_version": __version__, "points": [asdict(p) for p in points]},
                                indent=2, sort_keys=True) + "\n")
    written = [jpath]
    for label in dict.fromkeys(p.label for p in points):
        sel = [p for p in points if p.label == label]
        path = out_dir / f"{stem}_{label.lower()}.dat"
        write_dat(path, [p.mean_ops_per_info_bit for p in sel], [p.snr_at_target for p in sel],
                  "ops_per_info_bit EsN0_dB_at_target")
        written.append(path)
    return written
