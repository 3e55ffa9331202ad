"""Command-line front end: ``bmst-ht {iowef,design,encode,decode,simulate,bound}``.

Options may also come from a flat ``key = value`` file given with ``--config``;
command-line flags take precedence. Exit codes: 0 success, 2 bad arguments,
3 size guard exceeded, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from .bmst import BasicCode, BmstConfig, bmst_encode
from .channel import (BmstSystem, HtSystem, awgn, channel_llr_values, curve_to_csv, genie_bound,
                      genie_shift_db, modulate, noise_variance, read_curve_csv, results_to_csv,
                      simulate_ber, BerCurve)
from .coset import HtCode
from .decoder import WindowConfig, sw_decode
from .design import design_table, max_memory
from .hadamard import CapabilityError
from .weights import NumericError, iowef, union_bound_ber

EXIT_ARGS, EXIT_GUARD, EXIT_NUMERIC = 2, 3, 4

DEFAULTS = {
    "n": 8, "k": None, "components": None, "b": 1, "l": 10, "m": None, "mk": 0, "d": None,
    "imax": 18, "j": 3, "threshold": 1e-5, "seed": 0, "target": 1e-5, "ebn0": "0:1:8",
    "max_frames": 10000, "max_errors": 100, "jobs": 1, "system": "ht", "map": False,
    "all_zero": False, "mk_shift": None,
}


class UsageError(ValueError):
    pass


def read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_").lower()] = value
    return out


def _resolve(args, name, cast=str):
    value = getattr(args, name, None)
    if value is None:
        value = args.config_values.get(name)
        if value is None:
            value = DEFAULTS.get(name)
        elif cast is bool:
            value = str(value).lower() in ("1", "true", "yes", "on")
        elif value is not None:
            value = cast(value)
    return value


def parse_sweep(text: str) -> list[float]:
    """``start:step:stop`` (inclusive) or a comma list of dB values."""
    text = str(text)
    if ":" in text:
        start, step, stop = (float(s) for s in text.split(":"))
        if step <= 0 or stop < start:
            raise UsageError(f"bad sweep {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    return [float(s) for s in text.split(",")]


def _header(command: str, params: dict) -> dict:
    head = {"tool": f"bmst-ht {__version__}", "command": command}
    head.update({k: v for k, v in params.items() if v is not None})
    return head


def _header_lines(head: dict) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in head.items())


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _ht_code(args) -> HtCode:
    k = _resolve(args, "k", int)
    if k is None:
        raise UsageError("--k is required")
    return HtCode(_resolve(args, "n", int), k)


def _basic_code(args) -> BasicCode:
    comps = _resolve(args, "components")
    B = _resolve(args, "b", int)
    if comps:
        return BasicCode.parse(comps, B)
    k = _resolve(args, "k", int)
    if k is None:
        raise UsageError("either --k or --components is required")
    return BasicCode.homogeneous(_resolve(args, "n", int), k, B)


def _bmst_config(args) -> BmstConfig:
    basic = _basic_code(args)
    mk = _resolve(args, "mk", int)
    m = _resolve(args, "m", int)
    m = mk if m is None else m
    if mk > m:
        raise UsageError(f"--mk ({mk}) exceeds --m ({m})")
    return BmstConfig(basic, m, mk, _resolve(args, "seed", int), _resolve(args, "l", int))


def _window(args, mk: int) -> WindowConfig:
    d = _resolve(args, "d", int)
    return WindowConfig(2 * mk if d is None else d, _resolve(args, "imax", int),
                        _resolve(args, "threshold", float), _resolve(args, "j", int))


# ---------------------------------------------------------------- file formats

def bits_to_hex(bits) -> str:
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes().hex()


def hex_to_bits(text: str, length: int) -> np.ndarray:
    try:
        raw = bytes.fromhex(text.strip())
    except ValueError as exc:
        raise UsageError(f"bad hex line {text.strip()!r}") from exc
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))
    if len(bits) != 8 * math.ceil(length / 8) or bits[length:].any():
        raise UsageError(f"hex line {text.strip()!r} does not hold {length} bits")
    return bits[:length]


def read_hex_blocks(path: str, length: int) -> tuple[dict, np.ndarray]:
    head, blocks = {}, []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                _parse_header_line(line, head)
            elif line.strip():
                blocks.append(hex_to_bits(line, length))
    return head, np.array(blocks, dtype=np.uint8).reshape(-1, length)


def _parse_header_line(line: str, head: dict):
    body = line[1:].strip()
    if ":" in body:
        key, value = body.split(":", 1)
        head[key.strip()] = value.strip()


def read_llr_blocks(path: str) -> tuple[dict, list[np.ndarray]]:
    head, blocks, cur = {}, [], []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                _parse_header_line(line, head)
            elif line.strip():
                cur.append(float(line))
            elif cur:
                blocks.append(np.array(cur))
                cur = []
    if cur:
        blocks.append(np.array(cur))
    return head, blocks


def _bmst_params(cfg: BmstConfig) -> dict:
    out = {}
    comps = cfg.basic.components
    if len(comps) == 1:
        code, B = comps[0]
        out.update(N=code.N, K=code.K, B=B)
    else:
        out["components"] = ",".join(f"{c.N}:{c.K}" for c, _ in comps)
        out["B"] = 1
    out.update(L=cfg.L, m=cfg.memory, m_K=cfg.active_memory, seed=cfg.seed)
    return out


# ---------------------------------------------------------------- commands

def cmd_iowef(args) -> int:
    code = _ht_code(args)
    w = iowef(code)
    text = _header_lines(_header("iowef", {"N": code.N, "K": code.K}))
    text += w.polynomial() + "\n"
    text += "".join(f"{a} {b} {c}\n" for a, b, c in w.sorted_terms())
    _write(args.output, text)
    return 0


def cmd_design(args) -> int:
    N = _resolve(args, "n", int)
    target = _resolve(args, "target", float)
    rows = design_table(N, target)
    head = _header("design", {"N": N, "target_ber": target, "max_memory": max_memory(rows),
                              "rounding": "memory = nearest integer, halves away from zero"})
    lines = ["K,rate,gamma_star_db,gamma_db,gap_db,memory"]
    lines += [f"{r.K},{r.rate:.6f},{r.gamma_star_db:.4f},{r.gamma_db:.4f},{r.gap_db:.4f},{r.memory}"
              for r in rows]
    _write(args.output, _header_lines(head) + "\n".join(lines) + "\n")
    return 0


def cmd_encode(args) -> int:
    cfg = _bmst_config(args)
    _, data = read_hex_blocks(args.input, cfg.basic.k)
    if len(data) != cfg.L:
        raise UsageError(f"data file holds {len(data)} blocks, expected L={cfg.L}")
    coded = bmst_encode(cfg, data)
    params = _bmst_params(cfg)
    head = _header("encode", params)
    _write(args.output, _header_lines(head) + "".join(bits_to_hex(c) + "\n" for c in coded))
    if args.llr_output:
        ebn0 = math.inf if args.ebn0 is None else float(args.ebn0)
        sigma2 = noise_variance(ebn0, cfg.rate)
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(1,)))
        llr = channel_llr_values(awgn(modulate(coded), sigma2, rng), sigma2)
        head = _header("encode", {**params, "ebn0_db": ebn0})
        body = "\n".join("".join(f"{x:.6g}\n" for x in block) for block in llr)
        _write(args.llr_output, _header_lines(head) + body)
    return 0


def cmd_decode(args) -> int:
    head, blocks = read_llr_blocks(args.input)
    # header values act as the lowest-priority configuration source
    for key, name in (("N", "n"), ("K", "k"), ("B", "b"), ("L", "l"), ("m", "m"),
                      ("m_K", "mk"), ("seed", "seed"), ("components", "components")):
        if key in head and name not in args.config_values:
            args.config_values[name] = head[key]
    cfg = _bmst_config(args)
    if len(blocks) != cfg.n_blocks or any(len(b) != cfg.basic.n for b in blocks):
        raise UsageError(f"channel file must hold {cfg.n_blocks} blocks of {cfg.basic.n} LLRs")
    win = _window(args, cfg.active_memory)
    decided = sw_decode(cfg, win, np.array(blocks))
    out = _header("decode", {**_bmst_params(cfg), "d": win.delay, "I_max": win.max_iterations,
                             "threshold": win.threshold, "J": win.inner_iterations})
    _write(args.output, _header_lines(out) + "".join(bits_to_hex(u) + "\n" for u in decided))
    return 0


def _system(args):
    kind = _resolve(args, "system")
    if kind == "ht":
        decoder = "map" if _resolve(args, "map", bool) else "siso"
        return HtSystem(_ht_code(args), decoder, _resolve(args, "j", int))
    if kind == "bmst":
        cfg = _bmst_config(args)
        return BmstSystem(cfg, _window(args, cfg.active_memory))
    raise UsageError(f"unknown system {kind!r}")


def cmd_simulate(args) -> int:
    system = _system(args)
    sweep = parse_sweep(_resolve(args, "ebn0"))
    seed = _resolve(args, "seed", int)
    opts = dict(max_frames=_resolve(args, "max_frames", int), max_errors=_resolve(args, "max_errors", int),
                seed=seed, all_zero=_resolve(args, "all_zero", bool), jobs=_resolve(args, "jobs", int))
    results = simulate_ber(system, sweep, **opts)
    params = {**system.describe(), "rate": f"{system.rate:.6f}", **opts}
    params.pop("jobs")
    _write(args.output, results_to_csv(results, _header("simulate", params)))
    if args.genie_output:
        if not isinstance(system, BmstSystem):
            raise UsageError("--genie-output needs --system bmst")
        cfg, win = system.config, system.window
        if len(cfg.basic.components) != 1:
            raise UsageError("--genie-output needs a homogeneous basic code")
        code = cfg.basic.components[0][0]
        shift = genie_shift_db(cfg.active_memory)
        basic = simulate_ber(HtSystem(code, "siso", win.inner_iterations), [e + shift for e in sweep], **opts)
        bound = genie_bound(BerCurve.from_results(basic), cfg.active_memory)
        head = _header("simulate genie bound", {"basic": str(code), "J": win.inner_iterations,
                                                "m_K": cfg.active_memory, "shift_db": f"{shift:.4f}",
                                                "seed": seed})
        _write(args.genie_output, curve_to_csv(bound, head))
    return 0


def cmd_bound(args) -> int:
    if args.curve:
        mk = _resolve(args, "mk", int)
        with open(args.curve) as fh:
            curve = read_curve_csv(fh.read())
        shifted = genie_bound(curve, mk)
        head = _header("bound genie", {"source": args.curve, "m_K": mk,
                                       "shift_db": f"{genie_shift_db(mk):.4f}"})
        _write(args.output, curve_to_csv(shifted, head))
        return 0
    code = _ht_code(args)
    sweep = parse_sweep(_resolve(args, "ebn0"))
    w = iowef(code)
    pts = tuple((e, min(1.0, union_bound_ber(w, e))) for e in sweep)
    head = _header("bound union", {"N": code.N, "K": code.K})
    _write(args.output, curve_to_csv(BerCurve(pts), head))
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bmst-ht", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat 'key = value' file; flags override it")
    common.add_argument("-o", "--output", help="output path (default: stdout)")

    code = argparse.ArgumentParser(add_help=False)
    code.add_argument("--n", type=int, help="HT-coset code length N (power of two)")
    code.add_argument("--k", type=int, help="code dimension K")

    bmst = argparse.ArgumentParser(add_help=False)
    bmst.add_argument("--components", help="heterogeneous basic code, e.g. 4:1,4:1,4:2")
    bmst.add_argument("--b", type=int, help="Cartesian-product multiplicity B")
    bmst.add_argument("--l", type=int, help="number of data blocks L")
    bmst.add_argument("--m", type=int, help="maximum memory (number of interleavers)")
    bmst.add_argument("--mk", type=int, help="active memory m_K")
    bmst.add_argument("--seed", type=int, help="seed for interleavers and noise")

    window = argparse.ArgumentParser(add_help=False)
    window.add_argument("--d", type=int, help="decoding delay (default 2 m_K)")
    window.add_argument("--imax", type=int, help="maximum window iterations")
    window.add_argument("--j", type=int, help="SISO iterations of the basic code")
    window.add_argument("--threshold", type=float, help="entropy stopping threshold")

    p = sub.add_parser("iowef", parents=[common, code], help="input-output weight enumerator")
    p.set_defaults(func=cmd_iowef)

    p = sub.add_parser("design", parents=[common], help="encoding-memory design table (CSV)")
    p.add_argument("--n", type=int)
    p.add_argument("--target", type=float, help="target BER (default 1e-5)")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("encode", parents=[common, code, bmst], help="BMST-encode hex data blocks")
    p.add_argument("-i", "--input", required=True, help="data file, one hex block per line")
    p.add_argument("--llr-output", help="also write channel LLRs (BPSK/AWGN) for `decode`")
    p.add_argument("--ebn0", help="Eb/N0 (dB) for --llr-output; default noiseless")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[common, code, bmst, window], help="sliding-window decode")
    p.add_argument("-i", "--input", required=True, help="channel file: one LLR per line, blank line between blocks")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", parents=[common, code, bmst, window], help="Monte Carlo BER curve")
    p.add_argument("--system", choices=("ht", "bmst"))
    p.add_argument("--map", action="store_const", const=True, help="MAP decoding for --system ht")
    p.add_argument("--ebn0", help="sweep start:step:stop or comma list (dB)")
    p.add_argument("--max-frames", type=int)
    p.add_argument("--max-errors", type=int)
    p.add_argument("--all-zero", action="store_const", const=True, help="transmit all-zero data")
    p.add_argument("--jobs", type=int, help="parallel worker processes")
    p.add_argument("--genie-output", help="also write the genie-aided bound CSV (bmst only)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bound", parents=[common, code], help="union bound or genie-shifted curve (CSV)")
    p.add_argument("--ebn0", help="sweep start:step:stop or comma list (dB)")
    p.add_argument("--curve", help="basic-code BER CSV to shift by 10 log10(1 + m_K) dB")
    p.add_argument("--mk", type=int, help="active memory for --curve")
    p.set_defaults(func=cmd_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.config_values = read_config(args.config) if args.config else {}
        return args.func(args)
    except CapabilityError as exc:
        print(f"bmst-ht: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except NumericError as exc:
        print(f"bmst-ht: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"bmst-ht: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
