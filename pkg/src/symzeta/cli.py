"""Command-line front end: evaluation, zero tables, scans, phase grids and reports."""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass

import numpy as np

from . import combined, potential, special, zeros
from .combined import FuncId, ModifiedSpec
from .errors import DomainError, PoleError, SymzetaError
from .special import DEFAULT_CONFIG, EvalConfig

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3

TABLE_FUNCS = "C01,TMinus,TPlus,ZetaShift"
GAP_FUNCS = "TMinus,TPlus,ZetaShift"

SPECIAL_FUNCS = {
    "zeta": special.zeta,
    "gamma": special.gamma,
    "loggamma": lambda s, config: special.log_gamma(s),
    "l4": special.dirichlet_L4,
    "xi1": combined.xi1,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# --------------------------------------------------------------------------- helpers


def format_real(x: float) -> str:
    """Shortest repr of x rounded to 15 significant digits ('-1.0', '0.5')."""
    return repr(float(f"{x:.15g}") + 0.0)


def format_complex(z: complex) -> str:
    return f"{format_real(z.real)},{format_real(z.imag)}"


def quadrant(z) -> np.ndarray:
    """Quadrant code 1-4 of each value; 0 for exact zeros and non-finite values."""
    z = np.asarray(z, dtype=complex)
    re, im = z.real, z.imag
    out = np.zeros(z.shape, dtype=int)
    out[(re > 0) & (im >= 0)] = 1
    out[(re <= 0) & (im > 0)] = 2
    out[(re < 0) & (im <= 0)] = 3
    out[(re >= 0) & (im < 0)] = 4
    out[~np.isfinite(z)] = 0
    return out


@dataclass
class PhaseGrid:
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float
    n_sigma: int
    n_t: int
    cells: np.ndarray
    log_modulus: np.ndarray

    @property
    def sigma(self) -> np.ndarray:
        return np.linspace(self.sigma_min, self.sigma_max, self.n_sigma)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n_t)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["sigma", "t", "quadrant", "log_modulus"])
        for i, sigma in enumerate(self.sigma):
            for j, t in enumerate(self.t):
                writer.writerow([format_real(sigma), format_real(t), int(self.cells[i, j]),
                                 format_real(self.log_modulus[i, j])])
        return buffer.getvalue()


def phase_grid(values_fn, sigma_min, sigma_max, n_sigma, t_min, t_max, n_t) -> PhaseGrid:
    if n_sigma < 1 or n_t < 1:
        raise DomainError("grid dimensions must be positive")
    if sigma_max < sigma_min or t_max < t_min:
        raise DomainError("empty window")
    sigma = np.linspace(sigma_min, sigma_max, n_sigma)
    t = np.linspace(t_min, t_max, n_t)
    s = sigma[:, None] + 1j * t[None, :]
    values = np.asarray(values_fn(s.ravel()), dtype=complex).reshape(s.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        logmod = np.log(np.abs(values))
    return PhaseGrid(sigma_min, sigma_max, t_min, t_max, n_sigma, n_t, quadrant(values), logmod)


def _func_values(name: str, config: EvalConfig):
    key = name.strip().lower()
    if key in SPECIAL_FUNCS:
        fn = SPECIAL_FUNCS[key]
        return lambda s: fn(s, config)
    func = FuncId.parse(name)
    return lambda s: combined.evaluate_raw(func, s, config)


def read_config(path: str | None) -> EvalConfig:
    if path is None:
        return DEFAULT_CONFIG
    mapping = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            mapping[key.strip()] = value.strip()
    return EvalConfig.from_mapping(mapping)


def _zero_list(args, t_needed: float, config: EvalConfig):
    if args.zeros:
        return potential.load_zeta_zeros(args.zeros)
    return potential.compute_zeta_zeros(t_needed, config=config)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _func_list(text: str) -> list[FuncId]:
    return [FuncId.parse(part) for part in text.split(",") if part.strip()]


# --------------------------------------------------------------------------- verbs


def run_eval(args, config):
    value = complex(np.asarray(_func_values(args.func, config)(complex(args.re, args.im))).reshape(-1)[0])
    if not np.isfinite(value):
        raise PoleError(f"{args.func} has a pole at {complex(args.re, args.im)}")
    _emit(format_complex(value) + "\n", args.out)


def run_table(args, config):
    intervals = zeros.decade_intervals(args.t_max, args.width)
    if not intervals:
        raise DomainError("t_max must be at least one interval width")
    table = zeros.count_table(_func_list(args.funcs), intervals, args.step, config)
    _emit(table.to_csv(), args.out)


def run_scan(args, config):
    found = zeros.scan(FuncId.parse(args.func), args.t_min, args.t_max, args.step, config)
    _emit(found.to_csv(), args.out)


def run_phase_grid(args, config):
    grid = phase_grid(_func_values(args.func, config), args.sigma_min, args.sigma_max, args.n_sigma,
                      args.t_min, args.t_max, args.n_t)
    _emit(grid.to_csv(), args.out)


def run_potential(args, config):
    zero_list = _zero_list(args, 1000.0, config)
    em = potential.EMConfig(args.L, args.q)
    t = np.linspace(args.t_min, args.t_max, args.n)
    report = potential.expansion_report(args.sigma, t, zero_list, em, config)
    _emit(report.to_csv(), args.out)
    if args.sign_samples:
        sign = potential.half_plane_sign_check(args.sign_samples, seed=args.seed, strict=False, config=config)
        print(f"sign check: seed={sign.seed} samples={sign.samples} violations={len(sign.violations)}",
              file=sys.stderr)


def run_gaps(args, config):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    scans = {f: zeros.scan(f, 0.0, args.t_max, args.step, config) for f in _func_list(args.funcs)}
    if args.precede:
        writer.writerow(["first", "second", "n", "count"])
        for pair in args.precede:
            a, b = (FuncId.parse(x) for x in pair.split(":"))
            for f in (a, b):
                if f not in scans:
                    scans[f] = zeros.scan(f, 0.0, args.t_max, args.step, config)
            n = min(len(scans[a]), len(scans[b]))
            writer.writerow([a.value, b.value, n, zeros.ordering_statistics(scans[a], scans[b], n)])
    else:
        writer.writerow(["func", "count", "mean_gap", "std_gap", "normalized_std"])
        for f, found in scans.items():
            g = zeros.gap_stats(found)
            writer.writerow([f.value, g.count, format_real(g.mean_gap), format_real(g.std_gap),
                             format_real(g.normalized_std)])
    _emit(buffer.getvalue(), args.out)


def run_counterexample(args, config):
    spec = ModifiedSpec(args.variant, args.index, args.delta)
    zero_list = potential.load_zeta_zeros(args.zeros) if args.zeros else None
    if zero_list is None:
        # enough poles to reach index_N plus the window
        height = next((h for h in (50.0, 100.0, 200.0, 400.0, 1000.0)
                       if zeros.count_asymptotic(h) > spec.index_N + 10), 1000.0)
        zero_list = potential.compute_zeta_zeros(height, config=config)
    report = zeros.counterexample(spec, zero_list, args.half_width, args.step, config)
    _emit(report.to_csv(), args.out)
    if args.grid:
        a, b = report.window

        def values(s):
            return combined.modified_u_raw(spec, zero_list, s, config)

        grid = phase_grid(values, 0.0, 1.0, args.n_sigma, a, b, args.n_t)
        with open(args.grid, "w", encoding="utf-8", newline="") as handle:
            handle.write(grid.to_csv())
    gained = report.gained()
    print("gained: " + " ".join(f"{k.value}={v}" for k, v in gained.items()), file=sys.stderr)


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symzeta", description="Symmetrised zeta combinations: evaluation and zero statistics.")
    common = _Parser(add_help=False)
    common.add_argument("--config", help="EvalConfig overrides as key=value lines (default: built-in)")
    common.add_argument("--zeros", help="zeta ordinate table, one gamma per line (default: computed)")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=potential.DEFAULT_SEED,
                        help=f"random seed (default: {potential.DEFAULT_SEED})")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common], help="evaluate a function at re + i im")
    p.add_argument("func", help="TPlus, TMinus, U, V, F1, C01, ZetaShift, Xi1Shift, zeta, gamma, loggamma, L4, xi1")
    p.add_argument("re", type=float)
    p.add_argument("im", type=float)
    p.set_defaults(run=run_eval)

    p = sub.add_parser("table", parents=[common], help="critical-line zero counts per interval")
    p.add_argument("--t-max", type=float, default=300.0, help="default: 300")
    p.add_argument("--width", type=float, default=10.0, help="interval width (default: 10)")
    p.add_argument("--funcs", default=TABLE_FUNCS, help=f"default: {TABLE_FUNCS}")
    p.add_argument("--step", type=float, default=0.05, help="scan step (default: 0.05)")
    p.set_defaults(run=run_table)

    p = sub.add_parser("scan", parents=[common], help="list critical-line zeros of one function")
    p.add_argument("func")
    p.add_argument("--t-min", type=float, default=0.0, help="default: 0")
    p.add_argument("--t-max", type=float, default=100.0, help="default: 100")
    p.add_argument("--step", type=float, default=0.05, help="default: 0.05")
    p.set_defaults(run=run_scan)

    p = sub.add_parser("phase-grid", parents=[common], help="quadrant of f(s) on a rectangular grid")
    p.add_argument("func")
    p.add_argument("--sigma-min", type=float, default=-1.0, help="default: -1")
    p.add_argument("--sigma-max", type=float, default=2.0, help="default: 2")
    p.add_argument("--n-sigma", type=int, default=31, help="default: 31")
    p.add_argument("--t-min", type=float, default=0.0, help="default: 0")
    p.add_argument("--t-max", type=float, default=20.0, help="default: 20")
    p.add_argument("--n-t", type=int, default=201, help="default: 201")
    p.set_defaults(run=run_phase_grid)

    p = sub.add_parser("potential", parents=[common], help="pole expansion of log|U| against direct values")
    p.add_argument("--sigma", type=float, default=0.4, help="default: 0.4")
    p.add_argument("--t-min", type=float, default=0.0, help="default: 0")
    p.add_argument("--t-max", type=float, default=100.0, help="default: 100")
    p.add_argument("--n", type=int, default=200, help="grid points (default: 200)")
    p.add_argument("--L", type=int, default=1000, help="poles summed directly (default: 1000)")
    p.add_argument("--q", type=int, default=0, help="Euler-Maclaurin order (default: 0)")
    p.add_argument("--sign-samples", type=int, default=0,
                   help="also run the half-plane sign check with this many samples (default: 0)")
    p.set_defaults(run=run_potential)

    p = sub.add_parser("gaps", parents=[common], help="zero gap statistics or ordering counts")
    p.add_argument("--t-max", type=float, default=1000.0, help="default: 1000")
    p.add_argument("--funcs", default=GAP_FUNCS, help=f"default: {GAP_FUNCS}")
    p.add_argument("--step", type=float, default=0.05, help="default: 0.05")
    p.add_argument("--precede", action="append", metavar="A:B",
                   help="count indices where the A zero lies below the B zero (repeatable)")
    p.set_defaults(run=run_gaps)

    p = sub.add_parser("counterexample", parents=[common], help="events of a modified U around t_N")
    p.add_argument("variant", choices=[v.value for v in combined.ModifiedVariant])
    p.add_argument("--index", type=int, default=98, help="pole index N (default: 98)")
    p.add_argument("--delta", type=float, default=0.05, help="split offset (default: 0.05)")
    p.add_argument("--half-width", type=float, default=2.0, help="window half width (default: 2)")
    p.add_argument("--step", type=float, default=0.002, help="default: 0.002")
    p.add_argument("--grid", help="also write a phase grid of the modified U to this path")
    p.add_argument("--n-sigma", type=int, default=41, help="grid columns (default: 41)")
    p.add_argument("--n-t", type=int, default=201, help="grid rows (default: 201)")
    p.set_defaults(run=run_counterexample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        config = read_config(args.config)
        args.run(args, config)
    except (PoleError, DomainError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SymzetaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
