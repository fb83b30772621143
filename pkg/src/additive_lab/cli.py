"""Command-line front end.

Every command produces a list of results ``{op, inputs, outputs}``. JSON
output wraps them as ``{meta: {version, config_hash}, results: [...]}``;
CSV output writes one row per result with inputs and outputs flattened.
Exit codes: 0 success, 2 bad input or failed precondition, 3 numeric domain.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .additive import AdditiveFunction, builtin, load_function_file
from .errors import AdditiveLabError, NumericDomainError
from .scan import ScanConfig

SIG_DIGITS = 12

DEFAULTS = {
    "g": "bigomega",
    "x": "1e5",
    "h": "10,100,1000",
    "epsilon": 0.2,
    "delta": 0.25,
    "eta": 0.05,
    "theta": 0.1,
    "t": 1.0,
    "T": 5.0,
    "shift": 0,
    "seq": "ones",
    "set": "census",
    "format": "json",
    "out": None,
    "threads": 1,
    "segment_size": 2**20,
    "seed": 0,
}

COMMANDS = ("sieve", "stats", "gaps", "interval", "pretentious", "dualtk", "sparse", "erdos", "report")


class UsageError(AdditiveLabError, ValueError):
    pass


# ------------------------------------------------------------------ parsing


def parse_function(spec: str) -> AdditiveFunction:
    """``omega | bigomega | clog:<float> | erdos:<prime> | file:<path>``."""
    name, _, arg = str(spec).partition(":")
    name = name.strip().lower()
    if name in ("omega", "bigomega", "big_omega") and not arg:
        return builtin(name)
    if name == "clog":
        try:
            c = complex(arg.replace(" ", "")) if "j" in arg else float(arg)
        except ValueError:
            raise UsageError(f"--g clog needs a number, got {arg!r}") from None
        return builtin("c_log", c)
    if name == "erdos":
        try:
            p0 = int(arg)
        except ValueError:
            raise UsageError(f"--g erdos needs a prime, got {arg!r}") from None
        return builtin("erdos", p0)
    if name == "file":
        if not Path(arg).is_file():
            raise UsageError(f"--g file: no such file {arg!r}")
        return load_function_file(arg)
    raise UsageError(f"unknown function {spec!r}; expected omega, bigomega, clog:<c>, erdos:<p>, file:<path>")


def parse_int(text) -> int:
    """Integers, also in float notation such as ``1e6``."""
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise UsageError(f"not a number: {text!r}") from None
    if not math.isfinite(v) or v != int(v):
        raise UsageError(f"not an integer: {text!r}")
    return int(v)


def parse_int_list(text) -> list[int]:
    return [parse_int(t) for t in str(text).split(",") if t.strip()]


def read_config_file(path) -> dict:
    """Flat ``key=value`` lines; ``#`` comments; keys mirror the long flags."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in DEFAULTS and key != "plot":
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="additive-lab", description="Numerical experiments with additive functions.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="key=value file; flags override it")
    ap.add_argument("--g", help="function: omega | bigomega | clog:<c> | erdos:<p> | file:<path>")
    ap.add_argument("--x", help="scale X or comma list (1e6 notation accepted)")
    ap.add_argument("--h", help="comma list of interval lengths")
    ap.add_argument("--epsilon", type=float)
    ap.add_argument("--delta", type=float)
    ap.add_argument("--eta", type=float)
    ap.add_argument("--theta", type=float)
    ap.add_argument("--t", type=float, help="frequency t in e(t g / B)")
    ap.add_argument("--T", type=float, help="twist range for the distance minimisation")
    ap.add_argument("--shift", type=int, help="shift j for the shifted sparse moment")
    ap.add_argument("--seq", help="dualtk sequence: ones | progression:<p> | random")
    ap.add_argument("--set", help="sparse set: census | progression:<a>:<d> | file:<path>")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--out")
    ap.add_argument("--threads", type=int)
    ap.add_argument("--segment-size", dest="segment_size")
    ap.add_argument("--plot", action="store_true", default=None, help="also write an SVG plot")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--quick", action="store_true", help="report: skip the checks at X = 10^7")
    return ap


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    cfg["plot"] = False
    if args.config:
        cfg.update(read_config_file(args.config))
    for key in list(DEFAULTS) + ["plot"]:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    for key in ("epsilon", "delta", "eta", "theta", "t", "T"):
        cfg[key] = float(cfg[key])
    for key in ("threads", "seed", "shift"):
        cfg[key] = parse_int(cfg[key])
    cfg["segment_size"] = parse_int(cfg["segment_size"])
    cfg["plot"] = str(cfg["plot"]).lower() in ("1", "true", "yes")
    if cfg["format"] not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    return cfg


def config_hash(cfg: dict, command: str) -> str:
    keep = {k: v for k, v in cfg.items() if k not in ("out", "format", "plot")}
    keep["command"] = command
    blob = json.dumps(keep, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


# ------------------------------------------------------------ serialization


def clean(v):
    """JSON-ready values: 12 significant digits, exact integers, complex as [re, im]."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return float(f"{v:.{SIG_DIGITS}g}")
    if isinstance(v, (complex, np.complexfloating)):
        return [clean(v.real), clean(v.imag)]
    if isinstance(v, dict):
        return {str(k): clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [clean(x) for x in v]
    return v


def _flatten(d: dict, prefix="") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = ";".join(str(x) for x in v)
        else:
            out[key] = v
    return out


def to_csv(results: list[dict]) -> str:
    rows = []
    for r in clean(results):
        row = {"op": r["op"]}
        row.update(_flatten(r["inputs"]))
        row.update(_flatten(r["outputs"]))
        rows.append(row)
    cols: list[str] = []
    for row in rows:
        cols += [c for c in row if c not in cols]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({c: _csv_cell(row.get(c, "")) for c in cols})
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    return v


def to_json(results: list[dict], cfg: dict, command: str) -> str:
    doc = {"meta": {"version": __version__, "config_hash": config_hash(cfg, command)}, "results": clean(results)}
    return json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def svg_polyline(series: dict[str, list[tuple[float, float]]], xlabel: str, ylabel: str, logx=True, logy=True) -> str:
    """A small static SVG line chart."""
    W, H, pad = 480, 320, 50
    pts = [(x, y) for s in series.values() for x, y in s if x > 0 and y > 0 or not (logx or logy)]
    tx = (lambda v: math.log10(v)) if logx else (lambda v: v)
    ty = (lambda v: math.log10(v)) if logy else (lambda v: v)
    xs = [tx(x) for x, _ in pts] or [0.0, 1.0]
    ys = [ty(y) for _, y in pts] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs) if max(xs) > min(xs) else min(xs) + 1
    y0, y1 = min(ys), max(ys) if max(ys) > min(ys) else min(ys) + 1
    sx = lambda v: pad + (tx(v) - x0) / (x1 - x0) * (W - 2 * pad)  # noqa: E731
    sy = lambda v: H - pad - (ty(v) - y0) / (y1 - y0) * (H - 2 * pad)  # noqa: E731
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<line x1="{pad}" y1="{H - pad}" x2="{W - pad}" y2="{H - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{H - pad}" stroke="black"/>',
        f'<text x="{W / 2}" y="{H - 12}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="14" y="{H / 2}" transform="rotate(-90 14 {H / 2})" text-anchor="middle" font-size="12">{ylabel}</text>',
    ]
    for i, (name, s) in enumerate(series.items()):
        s = [(x, y) for x, y in s if (x > 0 or not logx) and (y > 0 or not logy)]
        if not s:
            continue
        c = colors[i % len(colors)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in s)
        parts.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{coords}"/>')
        parts.append(f'<text x="{W - pad}" y="{pad + 14 * i}" text-anchor="end" font-size="11" fill="{c}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ----------------------------------------------------------------- commands


def _scan(cfg) -> ScanConfig:
    return ScanConfig(segment_size=cfg["segment_size"], threads=cfg["threads"])


def _result(op, inputs, outputs) -> dict:
    return {"op": op, "inputs": inputs, "outputs": outputs}


def cmd_sieve(cfg):
    from .sieve import prime_power_arrays, primes_up_to

    out = []
    for X in parse_int_list(cfg["x"]):
        _, k, _ = prime_power_arrays(X)
        out.append(_result("sieve", {"X": X}, {"prime_count": int(primes_up_to(X).shape[0]), "prime_power_count": int(k.shape[0])}))
    return out, None


def cmd_stats(cfg):
    from .stats import global_stats

    g = parse_function(cfg["g"])
    out = []
    for X in parse_int_list(cfg["x"]):
        st = global_stats(g, X, config=_scan(cfg))
        outputs = {
            "A": st.A,
            "B2": st.B2,
            "lambda0": st.lambda0,
            "tail_F": {str(e): v for e, v in st.tail_F.items()},
            "pp_tail": st.pp_tail,
            "moments": {str(a): v for a, v in st.moments.items()},
        }
        out.append(_result("stats", {"g": g.name, "X": X}, outputs))
    return out, None


def cmd_gaps(cfg):
    from .gaps import decrease_census, gap_moments, telescoping_check

    g = parse_function(cfg["g"])
    out = []
    for X in parse_int_list(cfg["x"]):
        m = gap_moments(g, X, (1, 2), _scan(cfg))
        outputs = {"gap_l1": m[1], "gap_l2": m[2]}
        if not g.is_complex:
            c = decrease_census(g, X, config=_scan(cfg))
            lhs, rhs, diff = telescoping_check(g, X, _scan(cfg))
            outputs.update(decrease_count=c.size, decrease_density=c.density, telescoping_lhs=lhs, telescoping_rhs=rhs, telescoping_diff=diff)
        out.append(_result("gaps", {"g": g.name, "X": X}, outputs))
    return out, None


def cmd_interval(cfg):
    from .short_interval import interval_discrepancies

    g = parse_function(cfg["g"])
    out, series = [], {}
    for X in parse_int_list(cfg["x"]):
        reps = interval_discrepancies(g, X, parse_int_list(cfg["h"]), _scan(cfg))
        for r in reps:
            out.append(
                _result(
                    "interval",
                    {"g": g.name, "X": X, "h": r.h},
                    {
                        "l1": r.l1,
                        "l2": r.l2,
                        "bound_l1": r.bound_l1,
                        "l1_over_B": r.normalized_l1,
                        "l2_over_B2": r.normalized_l2,
                        "trivial_chain": r.trivial_bound_chain,
                    },
                )
            )
        series[f"X={X}"] = [(r.h, r.l1) for r in reps]
    return out, ("l1 discrepancy against h", "h", "l1", series)


def cmd_pretentious(cfg):
    from .pretentious import (
        condition_ii_check,
        distance_minimize,
        divisor_bound_check,
        euler_products,
        exp_additive,
        f_z,
        pretentious_distance_sq,
    )

    g = parse_function(cfg["g"])
    out = []
    for X in parse_int_list(cfg["x"]):
        G = exp_additive(g, cfg["t"], X)
        res = distance_minimize(G, X, cfg["T"])
        outputs = {
            "D2_at_0": pretentious_distance_sq(G, 0.0, X),
            "M": res.value,
            "lambda_star": res.lambda_star,
            "grid_resolution": res.grid_resolution,
            "t0_scaled": res.t0_scaled,
        }
        d = cfg["delta"]
        if not g.is_complex and 0 < d < 1:
            F = f_z(g, X, d, 1 + d * d)
            H, P = euler_products(F, X)
            outputs.update(
                Fz_H=H,
                Fz_P=P,
                Fz_condition_ii_margin=condition_ii_check(F, X, 0.99)["min_margin"],
                Fz_divisor_bound_B3=divisor_bound_check(F, X, 3.0)["passed"],
            )
        out.append(_result("pretentious", {"g": g.name, "X": X, "t": cfg["t"], "T": cfg["T"], "delta": d}, outputs))
    return out, None


def _sequence(spec: str, X: int, seed: int) -> np.ndarray:
    name, _, arg = spec.partition(":")
    if name == "ones":
        return np.ones(X)
    if name == "progression":
        p = parse_int(arg or 101)
        return (np.arange(1, X + 1) % p == 1 % p).astype(np.float64)
    if name == "random":
        return np.random.default_rng(seed).choice([-1.0, 1.0], size=X)
    raise UsageError(f"unknown sequence {spec!r}; expected ones, progression:<p>, random")


def cmd_dualtk(cfg):
    from .sparse import dual_tk_ratio, dual_tk_two_prime_ratio

    out = []
    for X in parse_int_list(cfg["x"]):
        a = _sequence(cfg["seq"], X, cfg["seed"])
        r1 = dual_tk_ratio(a, X)
        outputs = {"ratio": r1.ratio, "zero_sequence": r1.zero}
        if X >= 10**4:
            outputs["two_prime_ratio"] = dual_tk_two_prime_ratio(a, X).ratio
        out.append(_result("dualtk", {"seq": cfg["seq"], "X": X, "seed": cfg["seed"]}, outputs))
    return out, None


def _sparse_set(spec: str, g, X: int, cfg):
    from .gaps import decrease_census
    from .sparse import SparseSet

    name, _, arg = spec.partition(":")
    if name == "census":
        return SparseSet.from_census(decrease_census(g, X, config=_scan(cfg)))
    if name == "progression":
        a, _, d = arg.partition(":")
        return SparseSet.progression(parse_int(a), parse_int(d), X)
    if name == "file":
        return SparseSet.from_file(arg, X)
    raise UsageError(f"unknown sparse set {spec!r}; expected census, progression:<a>:<d>, file:<path>")


def cmd_sparse(cfg):
    from .sparse import shifted_sparse_moment, sparse_variance_decomposition

    g = parse_function(cfg["g"])
    out = []
    for X in parse_int_list(cfg["x"]):
        S = _sparse_set(cfg["set"], g, X, cfg)
        rep = sparse_variance_decomposition(g, S, X, cfg["epsilon"], _scan(cfg))
        outputs = {
            "size": rep.size,
            "lhs": rep.lhs,
            "main_bound": rep.main_bound,
            "heavy_sum": rep.heavy_sum,
            "heavy_count": int(rep.heavy_primes.shape[0]),
            "heavy_reciprocal": rep.heavy_reciprocal,
            "heavy_reciprocal_bound": rep.heavy_reciprocal_bound,
            "constant": rep.constant,
            "shifted_moment": shifted_sparse_moment(g, S, X, cfg["shift"], _scan(cfg)),
        }
        out.append(_result("sparse", {"g": g.name, "X": X, "set": cfg["set"], "epsilon": cfg["epsilon"], "shift": cfg["shift"]}, outputs))
    return out, None


def cmd_erdos(cfg):
    from .rigidity import best_lambda_l2, weak_erdos_pipeline

    g = parse_function(cfg["g"])
    out, lam_series = [], []
    for X in parse_int_list(cfg["x"]):
        v = weak_erdos_pipeline(g, X, config=_scan(cfg))
        out.append(
            _result(
                "erdos",
                {"g": g.name, "X": X},
                {
                    "verdict": v.verdict,
                    "decrease_count": v.decrease_count,
                    "decrease_density": v.decrease_density,
                    "density_scaled": v.density_scaled,
                    "tail_F": {str(e): x for e, x in v.tail_F.items()},
                    "gap_l1": v.gap_l1,
                    "gap_bound": v.gap_bound,
                    "c_estimate": v.c_estimate,
                },
            )
        )
        lam_series.append((X, best_lambda_l2(g, X).lambda_star))
    return out, ("lambda against scale", "X", "lambda", {g.name: lam_series})


def cmd_report(cfg, quick=False):
    from .suite import run_check

    skip = {3, 8, 9} if quick else set()
    out = []
    for n in range(1, 17):
        if n in skip:
            continue
        r = run_check(n)
        out.append(_result("report", {"check": r.number, "name": r.name}, {"passed": r.passed, **r.measured}))
    return out, None


HANDLERS = {
    "sieve": cmd_sieve,
    "stats": cmd_stats,
    "gaps": cmd_gaps,
    "interval": cmd_interval,
    "pretentious": cmd_pretentious,
    "dualtk": cmd_dualtk,
    "sparse": cmd_sparse,
    "erdos": cmd_erdos,
}


def run(command: str, cfg: dict, quick: bool = False, stdout=None) -> int:
    """Run one command; returns the exit code."""
    stdout = stdout or sys.stdout
    try:
        if command == "report":
            results, plot = cmd_report(cfg, quick)
        else:
            results, plot = HANDLERS[command](cfg)
        text = to_json(results, cfg, command) if cfg["format"] == "json" else to_csv(results)
        if cfg["out"]:
            Path(cfg["out"]).write_text(text)
        else:
            stdout.write(text)
        for r in results:
            if r["op"] == "erdos":
                print(f"verdict: {r['outputs']['verdict']}", file=stdout if cfg["out"] else sys.stderr)
            if r["op"] == "report":
                status = "PASS" if r["outputs"]["passed"] else "FAIL"
                print(f"[{status}] {r['inputs']['check']:2d} {r['inputs']['name']}", file=sys.stderr)
        if cfg["plot"] and plot is not None:
            title, xl, yl, series = plot
            target = Path(cfg["out"]).with_suffix(".svg") if cfg["out"] else Path(f"additive-lab-{command}.svg")
            target.write_text(svg_polyline(series, xl, yl, logy=(command == "interval")))
    except NumericDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (AdditiveLabError, ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = resolve(args)
    except (AdditiveLabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(args.command, cfg, quick=args.quick)


if __name__ == "__main__":
    sys.exit(main())
