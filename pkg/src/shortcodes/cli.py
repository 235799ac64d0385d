"""Command-line entry point.

Every subcommand writes its results under ``--out-dir`` and prints the paths
it wrote. Failures print one JSON line ``{"error": ..., "message": ...}`` to
stderr and exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Sequence

import yaml

from . import __version__
from .analysis import biawgn_capacity_dispersion, normal_approx_bler
from .codes import Family, build_code, load, read_index_file, save
from .codes.spectrum import EXHAUSTIVE_MAX_K, union_bound, weight_spectrum
from .errors import ConfigInvalid, ShortcodesError
from .harness import (ExperimentConfig, complexity_study, emit, emit_complexity, rc_study, run_bler_point,
                      snr_for_target_bler, sweep, write_dat)


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _kv(items: Sequence[str] | None) -> dict[str, Any]:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigInvalid(f"expected key=value, got {item!r}")
        out[key.replace("-", "_")] = _parse_value(value)
    return out


def _floats(text: str | Sequence[float]) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).replace(",", " ").split()]


def _ints(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    return [int(x) for x in str(text).replace(",", " ").split()]


def _add_code_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("code")
    g.add_argument("--code-file", help="code file written by `construct`")
    g.add_argument("--family", choices=[f.value for f in Family])
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--code-seed", type=int, default=0, help="seed of random constructions")
    g.add_argument("--crc", default="CRC11", help="CRC name (CRC4, CRC6, CRC11) or integer polynomial")
    g.add_argument("--design-snr", type=float, default=None, help="polar design Es/N0 in dB")
    g.add_argument("--conv-poly", default=None, help="PAC precoder taps, e.g. 1,0,1,1,0,1,1")
    g.add_argument("--candidates", type=int, default=100, help="greedy candidates per column")
    g.add_argument("--reliability-file", help="polar reliability sequence, most reliable first")
    g.add_argument("--keep-file", help="column indices kept after puncturing")


def _add_decoder_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("decoder")
    g.add_argument("--decoder", default="osd", help="ml, osd, grand, sc, scl, scs or sq")
    g.add_argument("--decoder-param", action="append", metavar="KEY=VALUE",
                   help="decoder parameter, repeatable (e.g. order=4, L=32, variant=PB)")
    g.add_argument("--stop-errors", type=int, default=100)
    g.add_argument("--max-trials", type=int, default=10**8)
    g.add_argument("--op-cap", type=int, default=0, help="abandon decodes at this many operations (0 = off)")


def _add_code_args_optional(p: argparse.ArgumentParser) -> None:
    p.add_argument("--code-file", help="code file; adds its union bound when k <= 20")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shortcodes", description="Short-block channel-coding workbench.")
    parser.add_argument("--version", action="version", version=f"shortcodes {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="master seed of all random streams")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out-dir", default="out")
    parser.add_argument("--config", help="YAML or JSON file whose keys override command-line flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a code and write it to a code file")
    _add_code_args(p)
    p.add_argument("--name", help="output file stem (default family_n_k)")

    p = sub.add_parser("simulate", help="one BLER point")
    _add_code_args(p)
    _add_decoder_args(p)
    p.add_argument("--snr", type=float, required=False)

    p = sub.add_parser("sweep", help="BLER over an Es/N0 grid")
    _add_code_args(p)
    _add_decoder_args(p)
    p.add_argument("--snr-grid", help="comma-separated Es/N0 values in dB")

    p = sub.add_parser("snr-search", help="Es/N0 needed for a target BLER")
    _add_code_args(p)
    _add_decoder_args(p)
    p.add_argument("--target", type=float, default=1e-4)
    p.add_argument("--tol", type=float, default=0.05, help="bracket width in dB")

    p = sub.add_parser("bounds", help="normal approximation (and union bound when k is small)")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--snr-grid")
    _add_code_args_optional(p)

    p = sub.add_parser("complexity", help="ops per info bit vs SNR at target BLER, one curve per decoder family")
    _add_code_args(p)
    p.add_argument("--curves", help='JSON or YAML mapping (inline or file), e.g. {"SCL": [{"name": "scl", "L": 4}]}')
    p.add_argument("--target", type=float, default=1e-4)
    p.add_argument("--tol", type=float, default=0.05)
    p.add_argument("--stop-errors", type=int, default=100)
    p.add_argument("--max-trials", type=int, default=10**8)

    p = sub.add_parser("rc-study", help="SNR at target BLER for nested rate-compatible families")
    p.add_argument("--k", type=int, default=16)
    p.add_argument("--lengths", default="20,28,36,48,64")
    p.add_argument("--families", default="EBCH,POLAR,CRC_POLAR,RANDOM_GREEDY,RANDOM")
    p.add_argument("--target", type=float, default=1e-3)
    p.add_argument("--tol", type=float, default=0.05)
    p.add_argument("--stop-errors", type=int, default=100)
    p.add_argument("--max-trials", type=int, default=10**7)
    p.add_argument("--code-seed", type=int, default=0)
    return parser


def _load_config(path: str) -> dict[str, Any]:
    text = Path(path).read_text()
    data = json.loads(text) if path.endswith(".json") else yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ConfigInvalid("config file must hold a mapping")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def _code_from_args(a) -> Any:
    if a.code_file:
        return load(a.code_file)
    if a.family is None or a.n is None or a.k is None:
        raise ConfigInvalid("give --code-file or all of --family, --n, --k")
    crc = a.crc
    if isinstance(crc, str) and crc.lower().startswith("0x"):
        crc = int(crc, 16)
    elif isinstance(crc, str) and crc.isdigit():
        crc = int(crc)
    kw: dict[str, Any] = {"seed": a.code_seed, "design_snr_db": a.design_snr, "crc_poly": crc,
                          "candidates_per_step": a.candidates}
    if a.conv_poly is not None:
        kw["conv_poly"] = _ints(a.conv_poly)
    if a.reliability_file:
        kw["reliability"] = read_index_file(a.reliability_file)
    if a.keep_file:
        kw["keep"] = read_index_file(a.keep_file)
    return build_code(a.family, a.n, a.k, **kw)


def _experiment(a, grid=()) -> ExperimentConfig:
    code = _code_from_args(a)
    decoder = {"name": a.decoder, **(a.decoder_param if isinstance(a.decoder_param, dict) else _kv(a.decoder_param))}
    return ExperimentConfig(code, decoder, tuple(grid), a.stop_errors, a.max_trials, a.seed, a.op_cap, a.workers)


def _stem(cfg: ExperimentConfig, what: str) -> str:
    return f"{what}_{cfg.code.family.value.lower()}_{cfg.code.n}_{cfg.code.k}_{cfg.decoder['name']}"


def run(argv: Sequence[str] | None = None) -> list[Path]:
    parser = build_parser()
    a = parser.parse_args(argv)
    if a.config:
        for key, value in _load_config(a.config).items():
            setattr(a, key, value)
    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    if a.command == "construct":
        code = _code_from_args(a)
        path = out / f"{a.name or f'{code.family.value.lower()}_{code.n}_{code.k}'}.code"
        save(code, path)
        return [path]

    if a.command == "simulate":
        if a.snr is None:
            raise ConfigInvalid("--snr is required")
        cfg = _experiment(a, (a.snr,))
        rec = run_bler_point(cfg, a.snr)
        return emit([rec], out, _stem(cfg, "simulate"), config_echo=cfg.echo())

    if a.command == "sweep":
        if a.snr_grid is None:
            raise ConfigInvalid("--snr-grid is required")
        cfg = _experiment(a, _floats(a.snr_grid))
        return emit(sweep(cfg), out, _stem(cfg, "sweep"), config_echo=cfg.echo())

    if a.command == "snr-search":
        cfg = _experiment(a)
        snr = snr_for_target_bler(cfg, a.target, a.tol)
        path = out / f"{_stem(cfg, 'snrsearch')}.json"
        path.write_text(json.dumps({"artifact_version": __version__, "config": cfg.echo(), "target": a.target,
                                    "tol_db": a.tol, "esn0_db": snr}, indent=2, sort_keys=True) + "\n")
        return [path]

    if a.command == "bounds":
        code = load(a.code_file) if a.code_file else None
        n = code.n if code else a.n
        k = code.k if code else a.k
        if n is None or k is None or a.snr_grid is None:
            raise ConfigInvalid("bounds needs --n, --k (or --code-file) and --snr-grid")
        grid = _floats(a.snr_grid)
        rows = []
        spectrum = weight_spectrum(code) if code is not None and code.k <= EXHAUSTIVE_MAX_K else None
        for s in grid:
            C, V = biawgn_capacity_dispersion(s)
            row = {"esn0_db": s, "capacity": C, "dispersion": V, "na_bler": normal_approx_bler(n, k, s)}
            if spectrum is not None:
                row["union_bound"] = union_bound(spectrum, s)
            rows.append(row)
        stem = f"bounds_{n}_{k}"
        jpath = out / f"{stem}.json"
        jpath.write_text(json.dumps({"artifact_version": __version__, "n": n, "k": k, "rows": rows},
                                    indent=2, sort_keys=True) + "\n")
        dpath = out / f"{stem}.dat"
        write_dat(dpath, grid, [r["na_bler"] for r in rows], "EsN0_dB NA_BLER")
        return [jpath, dpath]

    if a.command == "complexity":
        if not a.curves:
            raise ConfigInvalid("--curves is required")
        curves = a.curves
        if isinstance(curves, str):
            text = Path(curves).read_text() if Path(curves).is_file() else curves
            curves = yaml.safe_load(text)
        if not isinstance(curves, dict):
            raise ConfigInvalid("--curves must map labels to lists of decoder specs")
        code = _code_from_args(a)
        points = complexity_study(code, curves, target=a.target, stop_errors=a.stop_errors,
                                  max_trials=a.max_trials, master_seed=a.seed, workers=a.workers, tol_db=a.tol)
        return emit_complexity(points, out, f"complexity_{code.family.value.lower()}_{code.n}_{code.k}")

    if a.command == "rc-study":
        lengths = _ints(a.lengths)
        families = [f.strip() for f in (a.families if isinstance(a.families, list) else a.families.split(","))]
        points = rc_study(a.k, lengths, families, target=a.target, stop_errors=a.stop_errors,
                          max_trials=a.max_trials, master_seed=a.seed, workers=a.workers, tol_db=a.tol,
                          code_seed=a.code_seed)
        jpath = out / f"rc_study_k{a.k}.json"
        jpath.write_text(json.dumps({"artifact_version": __version__, "target": a.target, "seed": a.seed,
                                     "points": [asdict(p) for p in points]}, indent=2, sort_keys=True) + "\n")
        written = [jpath]
        for fam in dict.fromkeys(p.family for p in points):
            sel = [p for p in points if p.family == fam]
            path = out / f"rc_study_k{a.k}_{fam.lower().replace('[', '_').replace(']', '')}.dat"
            write_dat(path, [p.n for p in sel], [p.snr_at_target for p in sel], "n EsN0_dB_at_target")
            written.append(path)
        return written

    raise ConfigInvalid(f"unknown command {a.command!r}")  # pragma: no cover


def main(argv: Sequence[str] | None = None) -> int:
    try:
        for path in run(argv):
            print(path)
    except (ShortcodesError, ValueError, OSError, KeyError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
