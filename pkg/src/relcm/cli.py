"""Command-line interface: ``relcm eval | verify | scan``.

Exit codes: 0 success, 1 a verification check failed, 2 configuration error,
3 numerical failure.  Output is deterministic: identical arguments produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import suites
from .attractive import AttractiveEvaluator
from .errors import ConfigError, RelcmError
from .hypgamma import HypGammaEvaluator, ScaleParams
from .repulsive import RepulsiveEvaluator
from .special_n import SpecialNEvaluator
from .transforms import (
    QuadSettings,
    default_momentum_basis,
    default_position_basis,
    gram_defect,
    make_kernel_psiN,
    predict_defect,
    unitarity_class,
)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

EVAL_FUNCTIONS = ("gamma", "rren", "psi", "psin", "amplitudes")
EVAL_COLUMNS = ("function", "x_re", "x_im", "y_re", "y_im", "quantity", "value_re", "value_im")
VERIFY_COLUMNS = ("suite", "check", "kind", "measured", "tolerance", "passed")
SCAN_COLUMNS = (
    "axis", "axis_value", "N", "rho_kappa", "rho", "kappa", "a_plus", "a_minus", "regime",
    "forward_defect", "forward_rank", "forward_rank_predicted",
    "adjoint_defect", "adjoint_rank", "adjoint_rank_predicted", "energy",
)


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 already; keep the message short
        self.print_usage(sys.stderr)
        raise SystemExit(f"relcm: error: {message}") from None


@dataclass(frozen=True)
class RunConfig:
    command: str
    a_plus: float | None
    a_minus: float | None
    rho: float | None
    kappa: float | None
    b: float | None
    N: int | None
    tolerance: float
    seed: int
    output_path: str | None
    format: str

    def params(self, default: ScaleParams | None = None) -> ScaleParams:
        if self.a_plus is not None or self.a_minus is not None:
            return ScaleParams(self.a_plus, self.a_minus)
        if self.rho is not None or self.kappa is not None:
            return ScaleParams.from_rho_kappa(self.rho, self.kappa)
        if default is None:
            raise ConfigError("supply --a-plus/--a-minus or --rho/--kappa")
        return default


def build_id() -> str:
    """sha1 over the package sources, in sorted file order."""
    h = hashlib.sha1()
    root = Path(__file__).resolve().parent
    for path in sorted(root.glob("*.py")):
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:12]


# ---------------------------------------------------------------------------
# argument parsing helpers
# ---------------------------------------------------------------------------
_PI_TOKEN = re.compile(r"^\s*([-+]?[0-9.eE+-]*)\s*\*?\s*pi\s*$")


def parse_real(text: str) -> float:
    """A float, optionally written as a multiple of pi ('1.5pi', 'pi')."""
    m = _PI_TOKEN.match(text)
    if m:
        coef = m.group(1)
        return (float(coef) if coef not in ("", "+", "-") else float(coef + "1")) * math.pi
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse {text!r} as a real number") from None


def parse_complex_list(text: str) -> list[complex]:
    """Comma-separated complex numbers, or 'lo:hi:n' for a real linspace."""
    text = text.strip()
    if text.count(":") == 2:
        lo, hi, n = text.split(":")
        n = int(n)
        if n < 1:
            raise ConfigError(f"empty grid {text!r}")
        return [complex(v) for v in np.linspace(parse_real(lo), parse_real(hi), n)]
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace("i", "j") if "j" not in tok else tok.strip()
        try:
            out.append(complex(tok))
        except ValueError:
            raise ConfigError(f"cannot parse {tok!r} as a complex number") from None
    if not out:
        raise ConfigError("empty value list")
    return out


def parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range must be LO:HI:STEPS, got {text!r}")
    lo, hi = parse_real(parts[0]), parse_real(parts[1])
    try:
        steps = int(parts[2])
    except ValueError:
        raise ConfigError(f"steps must be an integer, got {parts[2]!r}") from None
    if steps < 1 or not hi > lo:
        raise ConfigError(f"empty range {text!r}")
    return lo, hi, steps


def format_complex(z: complex) -> str:
    z = complex(z)
    re_, im_ = z.real + 0.0, z.imag + 0.0
    return f"{re_:.15g}{im_:+.15g}i"


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------
def _envelope(cfg: RunConfig, extra: dict) -> dict:
    return {
        "build_id": build_id(),
        "config": {k: v for k, v in asdict(cfg).items() if k not in ("output_path",)},
        "tolerance": cfg.tolerance,
        "quadrature": asdict(QuadSettings()),
        **extra,
    }


def _csv_text(columns: Sequence[str], rows: Sequence[dict], header_comment: str) -> str:
    buf = io.StringIO()
    buf.write(f"# {header_comment}\n")
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else _csv_cell(row.get(k))) for k in columns})
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def _emit(cfg: RunConfig, payload: dict, columns: Sequence[str], rows: Sequence[dict], summary: Sequence[str]) -> None:
    """Write the machine-readable payload to --out (or stdout when --format is
    given without --out) and the human summary to stdout otherwise."""
    if cfg.format == "csv":
        comment = f"build_id={payload['build_id']} tolerance={cfg.tolerance!r} seed={cfg.seed} " \
                  f"quadrature={json.dumps(payload['quadrature'], sort_keys=True)}"
        text = _csv_text(columns, rows, comment)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
        for line in summary:
            print(line)
    elif cfg.format != "auto":
        sys.stdout.write(text)
    else:
        for line in summary:
            print(line)


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------
def _coupling(cfg: RunConfig, args, p: ScaleParams) -> float:
    mode = args.b_mode
    if cfg.b is not None and mode is not None:
        raise ConfigError("give either --b or --b-mode, not both")
    if cfg.b is not None:
        return cfg.b
    if mode == "a-minus":
        return p.a_minus
    if mode == "a-plus":
        return p.a_plus
    if mode == "special":
        if cfg.N is None:
            raise ConfigError("--b-mode special needs --n")
        return (cfg.N + 1) * p.a_plus
    raise ConfigError("this function needs --b or --b-mode")


def cmd_eval(cfg: RunConfig, args) -> int:
    fn = args.function
    p = cfg.params(ScaleParams(1.0, 1.0) if fn == "gamma" else None)
    rows: list[dict] = []

    def add(x, y, quantity, value):
        value = complex(value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise RelcmError(f"non-finite {quantity} at x={x}, y={y}")
        xr, yr = _pair(x), _pair(y) if y is not None else [None, None]
        rows.append({"function": fn, "x_re": xr[0], "x_im": xr[1], "y_re": yr[0], "y_im": yr[1],
                     "quantity": quantity, "value_re": _pair(value)[0], "value_im": _pair(value)[1]})

    if fn == "gamma":
        zs = parse_complex_list(args.z or "0")
        G = HypGammaEvaluator(p)
        for z in zs:
            add(z, None, "G", G(z))
    elif fn in ("rren", "psi", "psin"):
        xs = parse_complex_list(args.x or "-2:2:5")
        ys = parse_complex_list(args.y or "0.5:2.5:5")
        if fn == "psin":
            if cfg.N is None:
                raise ConfigError("psin needs --n")
            ev = SpecialNEvaluator(p, cfg.N)
            f = ev.psi
        else:
            b = _coupling(cfg, args, p)
            rep = RepulsiveEvaluator(HypGammaEvaluator(p), b, cfg.tolerance)
            f = rep.r_ren if fn == "rren" else AttractiveEvaluator(rep).psi
        for x in xs:
            for y in ys:
                add(x, y, fn, f(x, y))
                if fn == "psi":
                    add(x, y, "plane_wave", np.exp(1j * math.pi * x * y / (p.a_plus * p.a_minus)))
    else:  # amplitudes
        ys = parse_complex_list(args.y or "0.5:2.5:5")
        if cfg.N is not None and cfg.b is None and args.b_mode is None:
            u, t, r = SpecialNEvaluator(p, cfg.N).amplitudes(np.asarray(ys))
        else:
            b = _coupling(cfg, args, p)
            t, r, u = AttractiveEvaluator(RepulsiveEvaluator(HypGammaEvaluator(p), b, cfg.tolerance)).amplitudes(
                np.asarray(ys))
        for i, y in enumerate(ys):
            for name, arr in (("u", u), ("t", t), ("r", r)):
                add(0.0, y, name, np.asarray(arr)[i])

    payload = _envelope(cfg, {"function": fn, "params": {"a_plus": p.a_plus, "a_minus": p.a_minus}, "rows": [
        {"x": [r["x_re"], r["x_im"]], "y": None if r["y_re"] is None else [r["y_re"], r["y_im"]],
         "quantity": r["quantity"], "value": [r["value_re"], r["value_im"]]} for r in rows]})
    summary = []
    for r in rows:
        head = f"{r['quantity']}"
        xs_ = format_complex(complex(r["x_re"], r["x_im"]))
        if r["y_re"] is None:
            summary.append(f"{head}({xs_}) = {format_complex(complex(r['value_re'], r['value_im']))}")
        else:
            ys_ = format_complex(complex(r["y_re"], r["y_im"]))
            summary.append(f"{head}(x={xs_}, y={ys_}) = {format_complex(complex(r['value_re'], r['value_im']))}")
    _emit(cfg, payload, EVAL_COLUMNS, rows, summary)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------
def _run_suite(cfg: RunConfig, args) -> suites.SuiteReport:
    name = args.suite
    user_params = None
    if any(v is not None for v in (cfg.a_plus, cfg.a_minus, cfg.rho, cfg.kappa)):
        user_params = cfg.params()
    rk = args.rho_kappa
    if rk is None and user_params is not None:
        rk = user_params.rho_kappa
    N = cfg.N
    tol = cfg.tolerance
    if name == "gamma-laws":
        return suites.gamma_laws(user_params, cfg.seed, tol=tol)
    if name == "ade":
        parts = tuple(args.part.split(",")) if args.part else ("conical", "coefficients", "eigenfunction")
        return suites.ade(user_params, cfg.seed, parts)
    if name == "yang-baxter":
        return suites.yang_baxter(user_params, cfg.seed, tol=tol)
    if name == "isometry":
        pts = [(N if N is not None else 0, rk)] if rk is not None else None
        if pts:
            if rk <= ((N or 0) + 0.5) * math.pi:
                raise ConfigError("isometry needs rho*kappa > (N + 1/2) pi")
            return suites.isometry(pts, cfg.seed, tol=tol)
        return suites.isometry(seed=cfg.seed, tol=tol)
    if name == "unitarity":
        if rk is not None:
            if rk < ((N or 0) + 1) * math.pi:
                raise ConfigError("unitarity needs rho*kappa >= (N + 1) pi")
            return suites.unitarity([(N or 0, rk)], cfg.seed, tol=tol, examples=args.examples)
        return suites.unitarity(seed=cfg.seed, tol=tol, examples=args.examples)
    if name == "bound-state":
        N = N or 0
        rk = 2.36 if rk is None else rk
        if not (N + 0.5) * math.pi < rk < (N + 1) * math.pi:
            raise ConfigError("bound-state needs rho*kappa in ((N + 1/2) pi, (N + 1) pi)")
        return suites.bound_state_suite(N, rk, cfg.seed)
    if name == "breakdown":
        if N not in (None, 0):
            raise ConfigError("breakdown is implemented for N = 0")
        if rk is not None:
            if not rk < 0.5 * math.pi:
                raise ConfigError("breakdown needs rho*kappa < pi/2")
            return suites.breakdown([rk], cfg.seed, endpoint=False)
        return suites.breakdown(seed=cfg.seed)
    if name == "scattering":
        N = N or 0
        rk = (N + 1.5) * math.pi if rk is None else rk
        return suites.scattering_suite(rk, seed=cfg.seed, N=N)
    raise ConfigError(f"unknown suite {name!r}")


def cmd_verify(cfg: RunConfig, args) -> int:
    report = _run_suite(cfg, args)
    payload = _envelope(cfg, {"report": report.to_json()})
    rows = [{"suite": report.suite, "check": c.name, "kind": c.kind, "measured": float(c.measured),
             "tolerance": float(c.tolerance), "passed": c.passed} for c in report.checks]
    worst = max((c.measured for c in report.checks if c.kind == "max"), default=float("nan"))
    summary = [c.line() for c in report.checks]
    summary.append(f"{'PASS' if report.passed else 'FAIL'} {report.suite}: "
                   f"{sum(c.passed for c in report.checks)}/{len(report.checks)} checks, max residual {worst:.3e}")
    _emit(cfg, payload, VERIFY_COLUMNS, rows, summary)
    return EXIT_OK if report.passed else EXIT_FAILED


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------
def _regime(N: int, rk: float) -> str:
    pi = math.pi
    if rk >= (N + 1) * pi:
        return "unitary"
    if rk > (N + 0.5) * pi:
        return "bound-state"
    if N > 0 and rk > N * pi:
        return "isometry-violated"
    if N == 0 and rk < 0.5 * pi:
        return "breakdown"
    return "unclassified"


def _predicted_rank(kernel_id: str, p: ScaleParams, side: str) -> int | None:
    try:
        return predict_defect(kernel_id, p, side).numerical_rank
    except RelcmError:
        return None


def _on_pole_edge(N: int, rk: float) -> bool:
    """rho*kappa = (j + 1/2) pi, j <= N: a pole of the weight sits on the strip
    edge for every (rho, kappa) split and no kernel can be built there."""
    return any(abs(rk / math.pi - (j + 0.5)) < 1e-12 for j in range(N + 1))


def scan_row(task: tuple) -> dict:
    """One scan row; module level so it can run in a worker process."""
    axis, value, N, a_plus, predict_only, seed, basis_size = task
    rk = math.pi * value / a_plus if axis == "a-minus" else value
    edge = _on_pole_edge(N, rk)
    if edge:
        p = ScaleParams.from_rho_kappa(math.sqrt(rk), math.sqrt(rk))
    else:
        p = suites.balanced_params(rk, N=N)
    if axis == "a-minus":
        # keep (a_plus, a_minus) as given; only the (rho, kappa) split is chosen
        p = ScaleParams(a_plus, value, rho=p.rho_value)
    row = {"axis": axis, "axis_value": float(value), "N": N, "rho_kappa": float(p.rho_kappa),
           "rho": float(p.rho_value), "kappa": float(p.kappa), "a_plus": p.a_plus, "a_minus": p.a_minus,
           "regime": "boundary" if edge else _regime(N, p.rho_kappa),
           "forward_rank_predicted": None, "adjoint_rank_predicted": None}
    ev = SpecialNEvaluator(p, N)
    row["energy"] = ev.energy() if ev.in_bound_window() else None
    if edge:
        return row
    kern = make_kernel_psiN(p, N)
    row["forward_rank_predicted"] = _predicted_rank(kern.kernel_id, p, "forward")
    row["adjoint_rank_predicted"] = _predicted_rank(kern.kernel_id, p, "adjoint")
    if kern.kernel_id == f"psiN-{N}" and unitarity_class(kern) == "unitary":
        row["forward_rank_predicted"] = row["adjoint_rank_predicted"] = 0
    if not predict_only:
        fwd = default_momentum_basis(seed, per_component=basis_size)
        adj = default_position_basis(seed, count=basis_size)
        f = gram_defect(kern, fwd, "forward")
        a = gram_defect(kern, adj, "adjoint")
        row.update(forward_defect=float(np.abs(f.gram_defect).max()), forward_rank=f.numerical_rank,
                   adjoint_defect=float(np.abs(a.gram_defect).max()), adjoint_rank=a.numerical_rank)
    return row


def _threads() -> int:
    raw = os.environ.get("RELCM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"RELCM_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("RELCM_THREADS must be >= 1")
    return n


def cmd_scan(cfg: RunConfig, args) -> int:
    lo, hi, steps = parse_range(args.range)
    N = cfg.N or 0
    # cell midpoints: an open interval is sampled without touching its endpoints
    values = [lo + (i + 0.5) * (hi - lo) / steps for i in range(steps)]
    a_plus = cfg.a_plus if cfg.a_plus is not None else 1.0
    tasks = [(args.axis, v, N, a_plus, args.predict_only, cfg.seed, args.basis_size) for v in values]
    workers = min(_threads(), len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(scan_row, tasks))
    else:
        rows = [scan_row(t) for t in tasks]
    payload = _envelope(cfg, {"axis": args.axis, "range": [lo, hi, steps], "basis_size": args.basis_size,
                              "rows": rows})
    summary = []
    for r in rows:
        parts = [f"{r['axis']}={r['axis_value']:.6g}", f"rho*kappa/pi={r['rho_kappa'] / math.pi:.4f}",
                 r["regime"]]
        if "forward_rank" in r:
            parts.append(f"forward {r['forward_rank']} (pred {r['forward_rank_predicted']}) "
                         f"max {r['forward_defect']:.2e}")
            parts.append(f"adjoint {r['adjoint_rank']} (pred {r['adjoint_rank_predicted']}) "
                         f"max {r['adjoint_defect']:.2e}")
        else:
            parts.append(f"pred ranks {r['forward_rank_predicted']}/{r['adjoint_rank_predicted']}")
        if r["energy"] is not None:
            parts.append(f"E_N={r['energy']:.12g}")
        summary.append("  ".join(parts))
    _emit(cfg, payload, SCAN_COLUMNS, rows, summary)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------
def _common(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("parameters")
    g.add_argument("--a-plus", type=parse_real)
    g.add_argument("--a-minus", type=parse_real)
    g.add_argument("--rho", type=parse_real)
    g.add_argument("--kappa", type=parse_real)
    g.add_argument("--rho-kappa", type=parse_real, help="product rho*kappa; the split is chosen automatically")
    g.add_argument("--b", type=parse_real, help="coupling b")
    g.add_argument("--n", type=int, help="special coupling index N (b = (N+1) a+)")
    o = parser.add_argument_group("run")
    o.add_argument("--tol", type=float, default=None, help="tolerance (suite defaults when omitted)")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out", help="write the report here")
    o.add_argument("--format", choices=("json", "csv"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="relcm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    pe = sub.add_parser("eval", help="evaluate a function over a grid")
    pe.add_argument("function", choices=EVAL_FUNCTIONS)
    pe.add_argument("--z", help="points for gamma: comma list or LO:HI:N")
    pe.add_argument("--x", help="x grid: comma list or LO:HI:N")
    pe.add_argument("--y", help="y grid: comma list or LO:HI:N")
    pe.add_argument("--b-mode", choices=("a-minus", "a-plus", "special"),
                    help="set b = a-, b = a+, or b = (N+1) a+")
    _common(pe)

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("suite", choices=suites.SUITES)
    pv.add_argument("--part", help="ade only: comma list of conical,coefficients,eigenfunction")
    pv.add_argument("--examples", action="store_true", help="unitarity only: include the example transforms")
    _common(pv)

    ps = sub.add_parser("scan", help="scan a parameter axis")
    ps.add_argument("--axis", choices=("rho-kappa", "a-minus"), default="rho-kappa")
    ps.add_argument("--range", required=True, help="LO:HI:STEPS (values may be written like 1.5pi)")
    ps.add_argument("--predict-only", action="store_true", help="skip the Gram matrices")
    ps.add_argument("--basis-size", type=int, default=4, help="bumps per component / position bumps")
    _common(ps)
    return parser


def _config(args) -> RunConfig:
    has_a = args.a_plus is not None or args.a_minus is not None
    has_rk = args.rho is not None or args.kappa is not None
    if has_a and has_rk:
        raise ConfigError("give (a_plus, a_minus) or (rho, kappa), not both")
    if has_a and (args.a_plus is None or args.a_minus is None) and args.command != "scan":
        raise ConfigError("--a-plus and --a-minus go together")
    if has_rk and (args.rho is None or args.kappa is None):
        raise ConfigError("--rho and --kappa go together")
    if args.rho_kappa is not None and (has_a or has_rk) and args.command != "eval":
        raise ConfigError("--rho-kappa cannot be combined with explicit parameters")
    if args.tol is not None and not args.tol > 0:
        raise ConfigError("--tol must be positive")
    if args.n is not None and args.n < 0:
        raise ConfigError("--n must be >= 0")
    tol = args.tol
    if tol is None:
        tol = {"gamma-laws": 1e-10, "yang-baxter": 1e-12}.get(getattr(args, "suite", ""), 1e-6)
        if args.command == "eval":
            tol = 1e-15
    fmt = args.format or ("json" if args.out else "auto")
    return RunConfig(args.command, args.a_plus, args.a_minus, args.rho, args.kappa, args.b, args.n,
                     float(tol), args.seed, args.out, fmt)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code not in (0, None):
            if isinstance(exc.code, str):
                print(exc.code, file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK
    try:
        cfg = _config(args)
        if args.command == "eval" and args.rho_kappa is not None:
            raise ConfigError("eval takes explicit parameters, not --rho-kappa")
        if cfg.a_plus is not None and cfg.a_minus is not None:
            ScaleParams(cfg.a_plus, cfg.a_minus)
        handler = {"eval": cmd_eval, "verify": cmd_verify, "scan": cmd_scan}[args.command]
        return handler(cfg, args)
    except ConfigError as exc:
        print(f"relcm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, TypeError) as exc:
        print(f"relcm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RelcmError, FloatingPointError, ArithmeticError) as exc:
        print(f"relcm: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
