"""Command-line front end.

Subcommands write CSV (data) or JSON (reports) to ``--out`` or stdout. Floats
are written with ``repr`` so every value round-trips; identical flags give
byte-identical output.

Exit codes: 0 success, 2 invalid input, 3 failed verification.
"""

import argparse
import json
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from decimal import ROUND_HALF_DOWN, Decimal, InvalidOperation

from . import entropy, oracle, spectrum
from .model import ModelParams

EXIT_INVALID = 2
EXIT_VERIFY_FAILED = 3


class UsageError(Exception):
    pass


def parse_grid(text):
    """``v``, ``a,b,c`` or inclusive ``min:max:step`` (max kept within half a step)."""
    try:
        if ":" in text:
            lo, hi, step = (Decimal(t) for t in text.split(":"))
            if step <= 0:
                raise UsageError(f"grid step must be > 0 in {text!r}")
            if hi < lo:
                raise UsageError(f"grid max < min in {text!r}")
            # last point may overshoot max by strictly less than half a step
            count = int(((hi - lo) / step).to_integral_value(ROUND_HALF_DOWN)) + 1
            return [float(lo + i * step) for i in range(count)]
        vals = [float(Decimal(t)) for t in text.split(",") if t.strip()]
    except (InvalidOperation, ValueError) as exc:
        raise UsageError(f"cannot parse grid {text!r}") from exc
    if not vals:
        raise UsageError("empty grid")
    return vals


def parse_sizes(text):
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":"))
            out = []
            n = lo
            while n <= hi:
                out.append(n)
                n *= 2
            return out
        return [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse sizes {text!r}") from exc


@dataclass
class RunConfig:
    command: str
    n_sites: list = field(default_factory=list)
    g: list = field(default_factory=list)
    renyi: list = field(default_factory=lambda: [2.0])
    method: str = "conv"
    samples: int = 1_000_000
    seed: int = 0
    l_max: float = None
    delta: float = spectrum.DEFAULT_DELTA
    out: str = "-"
    format: str = "csv"
    x_bins: int = None
    derivative: bool = False
    h: float = 0.01

    def __post_init__(self):
        if not self.g:
            raise UsageError("g grid is empty")
        if self.method == "sample" and self.samples < 1:
            raise UsageError("--samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")


@contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _emit_rows(cfg, header, rows):
    rows = sorted(rows, key=lambda r: tuple(r[: len(header) - 1]))
    with _open_out(cfg.out) as fh:
        if cfg.format == "json":
            json.dump([dict(zip(header, r)) for r in rows], fh, indent=1, sort_keys=True)
            fh.write("\n")
        else:
            fh.write(",".join(header) + "\n")
            for r in rows:
                fh.write(",".join(_fmt(v) for v in r) + "\n")


def _single_size(cfg):
    if len(cfg.n_sites) != 1:
        raise UsageError("this command takes a single --n-sites value")
    return cfg.n_sites[0]


def cmd_entropy(cfg):
    rows = []
    for N in cfg.n_sites:
        for g in cfg.g:
            p = ModelParams(N, g)
            for n in cfg.renyi:
                rec = entropy.magic_m2(p) if n == 2 else entropy.stabilizer_renyi(p, n)
                rows.append([N, g, n, rec.M_n, rec.per_site])
    _emit_rows(cfg, ["N", "g", "n", "M_n", "M_n_per_site"], rows)
    return 0


def _histogram(cfg, params):
    if cfg.method == "exact":
        return spectrum.histogram_exact(params, cfg.l_max, cfg.delta)
    if cfg.method == "sample":
        return spectrum.histogram_sampled(params, cfg.samples, cfg.seed, cfg.l_max, cfg.delta)
    return spectrum.histogram_convolution(params, cfg.l_max, cfg.delta)


def cmd_hist(cfg):
    N = _single_size(cfg)
    if len(cfg.g) != 1:
        raise UsageError("hist takes a single --g value")
    hist = _histogram(cfg, ModelParams(N, cfg.g[0]))
    with _open_out(cfg.out) as fh:
        if cfg.x_bins:
            edges, w = spectrum.x_histogram(hist, cfg.x_bins)
            if cfg.format == "json":
                json.dump({"domain": "x", "edges": edges.tolist(), "weights": w.tolist()},
                          fh, sort_keys=True)
                fh.write("\n")
                return 0
            fh.write("# domain=x\n# normalization=nonzero-regular\n")
            fh.write("bin_left,bin_right,weight\n")
            for i, v in enumerate(w):
                fh.write(f"{float(edges[i])!r},{float(edges[i + 1])!r},{float(v)!r}\n")
        elif cfg.format == "json":
            json.dump({
                "N": hist.N, "delta": hist.delta, "weights": hist.weights.tolist(),
                "overflow": hist.overflow, "zero_weight": hist.zero_weight,
                "unit_weight": hist.unit_weight, "normalization": hist.normalization,
            }, fh, sort_keys=True)
            fh.write("\n")
        else:
            spectrum.write_histogram_csv(hist, fh)
    return 0


def cmd_gap(cfg):
    rows = [[N, g, spectrum.magic_gap(ModelParams(N, g))] for N in cfg.n_sites for g in cfg.g]
    _emit_rows(cfg, ["N", "g", "magic_gap"], rows)
    return 0


def cmd_oracle(cfg):
    N = _single_size(cfg)
    reports = [oracle.verify(ModelParams(N, g)) for g in cfg.g]
    with _open_out(cfg.out) as fh:
        json.dump(reports[0] if len(reports) == 1 else reports, fh, indent=1, sort_keys=True)
        fh.write("\n")
    failed = [(r["params"]["g"], r["failed_checks"]) for r in reports if not r["passed"]]
    for g, names in failed:
        print(f"oracle: verification failed at g={g}: {', '.join(names)}", file=sys.stderr)
    return EXIT_VERIFY_FAILED if failed else 0


def cmd_thermo(cfg):
    if cfg.derivative:
        N = _single_size(cfg) if cfg.n_sites else None
        rows = []
        for g in cfg.g:
            d = entropy.derivative_scan(N, g, cfg.h)
            rows.append([d.g, d.h, d.left, d.right, d.left_extrap, d.right_extrap])
        _emit_rows(cfg, ["g", "h", "left", "right", "left_extrap", "right_extrap"], rows)
        return 0
    rows = []
    for g in cfg.g:
        for n in cfg.renyi:
            t = entropy.thermo_density(g, n)
            if not t.converged:
                print(f"thermo: quadrature not converged at g={g!r}, n={n!r} "
                      f"(error {t.error:.3e})", file=sys.stderr)
            rows.append([g, n, t.value, t.error])
    _emit_rows(cfg, ["g", "n", "per_site", "quadrature_error"], rows)
    return 0


COMMANDS = {
    "entropy": cmd_entropy,
    "hist": cmd_hist,
    "gap": cmd_gap,
    "oracle": cmd_oracle,
    "thermo": cmd_thermo,
}


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--n-sites", help="system size(s): N, N1,N2,... ")
    shared.add_argument("--g", default="1", help="transverse field: v, a,b,c or min:max:step")
    shared.add_argument("--renyi", default="2", help="comma-separated Renyi indices")
    shared.add_argument("--method", choices=["exact", "conv", "sample"], default="conv")
    shared.add_argument("--samples", type=int, default=1_000_000)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--l-max", type=float, default=None)
    shared.add_argument("--delta", type=float, default=spectrum.DEFAULT_DELTA)
    shared.add_argument("--out", default="-")
    shared.add_argument("--format", choices=["csv", "json"], default="csv")

    parser = argparse.ArgumentParser(
        prog="tfim-magic",
        description="Momentum-space magic of the transverse-field Ising chain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("entropy", parents=[shared], help="stabilizer Renyi entropies over a g grid")
    p = sub.add_parser("hist", parents=[shared], help="Pauli spectrum histogram")
    p.add_argument("--x-bins", type=int, default=None,
                   help="emit a uniform x-domain histogram with this many bins")
    p = sub.add_parser("gap", parents=[shared], help="magic gap")
    p.add_argument("--n-doubling", default=None, help="MIN:MAX, N doubled from MIN up to MAX")
    sub.add_parser("oracle", parents=[shared], help="brute-force verification report (JSON)")
    p = sub.add_parser("thermo", parents=[shared], help="thermodynamic-limit densities")
    p.add_argument("--derivative", action="store_true",
                   help="one-sided derivatives of M_2/N (finite N if --n-sites is given)")
    p.add_argument("--h", type=float, default=0.01, help="largest finite-difference step")
    return parser


def config_from_args(args):
    sizes = []
    if getattr(args, "n_doubling", None):
        sizes = parse_sizes(args.n_doubling)
    elif args.n_sites:
        sizes = parse_sizes(args.n_sites)
    elif args.command != "thermo":
        raise UsageError("--n-sites is required")
    try:
        renyi = [float(Decimal(t)) for t in args.renyi.split(",")]
    except InvalidOperation as exc:
        raise UsageError(f"cannot parse --renyi {args.renyi!r}") from exc
    return RunConfig(
        command=args.command, n_sites=sizes, g=parse_grid(args.g), renyi=renyi,
        method=args.method, samples=args.samples, seed=args.seed, l_max=args.l_max,
        delta=args.delta, out=args.out, format=args.format,
        x_bins=getattr(args, "x_bins", None), derivative=getattr(args, "derivative", False),
        h=getattr(args, "h", 0.01),
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, ValueError) as exc:
        print(f"tfim-magic {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
