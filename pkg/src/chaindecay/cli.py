"""Command-line front end.

Subcommands ``ldos``, ``survival``, ``decompose``, ``zeno`` and ``scan``
write CSV or JSON to a file or standard output. Parameters come from flags
and, optionally, from a ``key = value`` file given with ``--config``; flags
win over the file. Exit status is 0 on success, 1 for invalid parameters
and 2 when an analysis leaves its regime or a quadrature fails.

Floats are written with ``repr`` so they round-trip exactly and the output
of two identical runs is byte-identical.
"""
import argparse
from dataclasses import dataclass, fields
import io
import json
import math
import sys

import numpy as np

from .decomposition import decompose
from .errors import DomainError, PreconditionError, QuadratureError, RegimeError
from .evolution import METHODS, SPECTRAL, evolve
from .lattice import ChainModel, bound_states, ldos
from .resonance import (BATH, SITE, find_resonance, reference_rate, resonance_regime,
                        t_R_estimate, t_S_estimate)
from .zeno import zeno_report

SUBCOMMANDS = ("ldos", "survival", "decompose", "zeno", "scan")
FORMATS = ("csv", "json")
SPACINGS = ("linear", "log")
UNITS = "# units: hbar = 1, hopping V = 1, energies in V, times in hbar/V, band [0, 4]"

SUMMARY_KEYS = ("gamma0", "Gamma0", "eps_r", "Z", "tau_star", "tau_star_star",
                "t_R_formula", "t_R_numeric", "t_S_site", "t_S_bath", "t_S_numeric")

HEADERS = {
    "ldos": ("eps", "ldos"),
    "survival": ("t", "re_c", "im_c", "P"),
    "decompose": ("t", "abs_pole", "abs_return", "phase_diff", "P"),
    "zeno": ("tau", "gamma_eff", "classification"),
}

# grid defaults per subcommand: (min, max, count, spacing)
GRID_DEFAULTS = {
    "ldos": (0.0, 4.0, 801, "linear"),
    "survival": (0.0, 100.0, 1001, "linear"),
    "decompose": (0.0, 100.0, 1001, "linear"),
    "zeno": (0.05, 500.0, 400, "log"),
}

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REGIME = 2


class UsageError(Exception):
    """Invalid command-line or config-file parameters."""


@dataclass
class RunConfig:
    subcommand: str
    delta: float
    eps0: float
    tmin: float = None
    tmax: float = None
    count: int = None
    spacing: str = None
    method: str = SPECTRAL
    n_sites: int = None
    output: str = None
    format: str = "csv"
    summary: str = None
    target: str = "zeno"
    param: str = "delta"
    values: tuple = ()

    def grid_kind(self):
        return self.target if self.subcommand == "scan" else self.subcommand

    def resolved(self):
        """Copy with grid defaults filled in for the subcommand."""
        lo, hi, n, sp = GRID_DEFAULTS[self.grid_kind()]
        out = RunConfig(**{f.name: getattr(self, f.name) for f in fields(self)})
        out.tmin = lo if self.tmin is None else self.tmin
        out.tmax = hi if self.tmax is None else self.tmax
        out.count = n if self.count is None else self.count
        out.spacing = sp if self.spacing is None else self.spacing
        return out


def validate(cfg):
    """Raise :class:`UsageError` naming the first violated precondition."""
    if cfg.subcommand not in SUBCOMMANDS:
        raise UsageError(f"subcommand must be one of {', '.join(SUBCOMMANDS)}")
    if cfg.subcommand == "scan":
        if cfg.target not in HEADERS:
            raise UsageError(f"scan target must be one of {', '.join(HEADERS)}")
        if cfg.param not in ("delta", "eps0"):
            raise UsageError("scan param must be delta or eps0")
        if len(cfg.values) == 0:
            raise UsageError("scan needs at least one value in --values")
    for name in ("delta", "eps0", "tmin", "tmax"):
        if not math.isfinite(getattr(cfg, name)):
            raise UsageError(f"{name} must be finite")
    if cfg.delta <= 0:
        raise UsageError(f"delta must be > 0, got {cfg.delta!r}")
    if cfg.count < 2:
        raise UsageError(f"grid count must be >= 2, got {cfg.count}")
    if not cfg.tmin < cfg.tmax:
        raise UsageError(f"grid min must be < max, got {cfg.tmin!r} >= {cfg.tmax!r}")
    if cfg.spacing not in SPACINGS:
        raise UsageError("spacing must be linear or log")
    if cfg.spacing == "log" and cfg.tmin <= 0:
        raise UsageError("log spacing needs a positive grid min")
    if cfg.format not in FORMATS:
        raise UsageError("format must be csv or json")
    if cfg.method not in METHODS:
        raise UsageError(f"method must be one of {', '.join(METHODS)}")
    if cfg.n_sites is not None and cfg.n_sites < 2:
        raise UsageError("n_sites must be >= 2")
    kind = cfg.grid_kind()
    if kind == "ldos" and (cfg.tmin < 0 or cfg.tmax > 4):
        raise UsageError("ldos energy grid must lie inside the band [0, 4]")
    if kind in ("survival", "decompose") and cfg.tmin < 0:
        raise UsageError("time grid must be non-negative")
    if kind == "zeno" and cfg.tmin <= 0:
        raise UsageError("measurement periods must be positive")


def make_grid(cfg):
    if cfg.spacing == "log":
        return np.geomspace(cfg.tmin, cfg.tmax, cfg.count)
    return np.linspace(cfg.tmin, cfg.tmax, cfg.count)


def _num(x):
    """JSON-safe number: floats round-trip, infinities and NaN become strings."""
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


def _cell(x):
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


# --- computations: each returns (rows, extra) ------------------------------

def compute_ldos(model, cfg):
    energies = make_grid(cfg)
    rows = list(zip(energies, ldos(model, energies)))
    return rows, {"bound_states": [[_num(e), _num(w)] for e, w in bound_states(model)]}


def compute_survival(model, cfg):
    kwargs = {"n_sites": cfg.n_sites} if cfg.method == "diagonalization" else {}
    trace = evolve(model, make_grid(cfg), cfg.method, **kwargs)
    p = trace.probability
    rows = [(t, c.real, c.imag, q) for t, c, q in zip(trace.times, trace.amplitude, p)]
    return rows, {"method": cfg.method}


def compute_decompose(model, cfg):
    if not resonance_regime(model):
        raise RegimeError("decompose needs a resonance pole: 0 < delta < 1 and "
                          "(eps0 - 2)**2 / 4 < 1 - delta**2")
    d = decompose(model, make_grid(cfg))
    rows = list(zip(d.times, np.abs(d.pole_term), np.abs(d.return_term), d.phase_diff,
                    d.probability))
    return rows, {}


def _guard(notes, key, fn):
    try:
        return fn()
    except (PreconditionError, RegimeError, DomainError) as exc:
        notes[key] = str(exc)
        return None


def zeno_summary(model, report):
    """Fixed-key summary of rates and characteristic times."""
    notes = dict(report.notes)
    pole = _guard(notes, "pole", lambda: find_resonance(model)) if resonance_regime(model) else None
    if pole is None and "pole" not in notes:
        notes["pole"] = "no resonance pole behind the band for these parameters"
    summary = {
        "gamma0": reference_rate(model),
        "Gamma0": pole.gamma0_amp if pole else None,
        "eps_r": pole.eps_r if pole else None,
        "Z": pole.Z if pole else None,
        "tau_star": report.tau_star,
        "tau_star_star": report.tau_star_star,
        "t_R_formula": _guard(notes, "t_R_formula", lambda: t_R_estimate(model)),
        "t_R_numeric": report.t_R,
        "t_S_site": _guard(notes, "t_S_site", lambda: t_S_estimate(model, SITE)),
        "t_S_bath": _guard(notes, "t_S_bath", lambda: t_S_estimate(model, BATH)),
        "t_S_numeric": report.t_S,
    }
    out = {k: _num(summary[k]) for k in SUMMARY_KEYS}
    out["notes"] = {k: notes[k] for k in sorted(notes)}
    return out


def compute_zeno(model, cfg):
    report = zeno_report(model, make_grid(cfg))
    rows = list(zip(report.tau_grid, report.gamma_eff, report.classification))
    return rows, {"summary": zeno_summary(model, report)}


COMPUTE = {
    "ldos": compute_ldos,
    "survival": compute_survival,
    "decompose": compute_decompose,
    "zeno": compute_zeno,
}


# --- emission ---------------------------------------------------------------

def _csv_text(kind, rows, extra):
    buf = io.StringIO()
    buf.write(UNITS + "\n")
    for e, w in extra.get("bound_states", []):
        buf.write(f"# bound_state energy={_cell(e)} weight={_cell(w)}\n")
    if "summary" in extra:
        buf.write("# summary " + _json_text(extra["summary"], indent=None))
    buf.write(",".join(HEADERS[kind]) + "\n")
    for row in rows:
        buf.write(",".join(_cell(x) for x in row) + "\n")
    return buf.getvalue()


def _json_rows(kind, rows):
    return {"columns": list(HEADERS[kind]),
            "rows": [[x if isinstance(x, str) else _num(x) for x in row] for row in rows]}


def _json_text(obj, indent=None):
    return json.dumps(obj, indent=indent, allow_nan=False) + "\n"


def _document(kind, model, rows, extra):
    doc = {"units": UNITS[2:], "delta": model.delta, "eps0": model.eps0}
    doc.update(_json_rows(kind, rows))
    doc.update(extra)
    return doc


def _write(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def run(config):
    """Execute one configuration; returns the exit status.

    Diagnostics go to standard error as a single line.
    """
    try:
        cfg = config.resolved()
        validate(cfg)
        if cfg.subcommand == "scan":
            text = _json_text(run_scan(cfg))
        else:
            model = ChainModel(cfg.eps0, cfg.delta)
            rows, extra = COMPUTE[cfg.subcommand](model, cfg)
            if cfg.format == "csv":
                text = _csv_text(cfg.subcommand, rows, extra)
            else:
                text = _json_text(_document(cfg.subcommand, model, rows, extra))
            if cfg.summary and "summary" in extra:
                _write(_json_text(extra["summary"]), cfg.summary)
        _write(text, cfg.output)
        return EXIT_OK
    except (UsageError, PreconditionError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RegimeError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run_scan(cfg):
    """Run ``cfg.target`` for each value of ``cfg.param``; failures are kept per point."""
    points = []
    for index, value in enumerate(cfg.values):
        params = {"delta": cfg.delta, "eps0": cfg.eps0, cfg.param: float(value)}
        point = {"index": index, "delta": params["delta"], "eps0": params["eps0"]}
        try:
            if not math.isfinite(params[cfg.param]) or params["delta"] <= 0:
                raise PreconditionError(f"{cfg.param}={value!r} is not a valid parameter")
            model = ChainModel(params["eps0"], params["delta"])
            rows, extra = COMPUTE[cfg.target](model, cfg)
            point["status"] = "ok"
            point.update(_json_rows(cfg.target, rows))
            point.update(extra)
        except (PreconditionError, DomainError, RegimeError, QuadratureError) as exc:
            point["status"] = "error"
            point["error_type"] = type(exc).__name__
            point["error"] = str(exc)
        points.append(point)
    return {"units": UNITS[2:], "target": cfg.target, "param": cfg.param, "points": points}


# --- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _values(text):
    try:
        return tuple(float(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse value list {text!r}")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="file of 'key = value' lines; flags take precedence")
    common.add_argument("--delta", type=float, help="first-site hopping (> 0)")
    common.add_argument("--eps0", type=float, help="first-site energy")
    common.add_argument("--tmin", type=float, help="grid minimum (energy for ldos, period for zeno)")
    common.add_argument("--tmax", type=float, help="grid maximum")
    common.add_argument("--count", type=int, help="number of grid points (>= 2)")
    common.add_argument("--spacing", choices=SPACINGS, help="grid spacing")
    common.add_argument("--output", "-o", help="output path; standard output if omitted")
    common.add_argument("--format", choices=FORMATS, help="csv or json")

    parser = _Parser(prog="chaindecay",
                     description="Decay of a site coupled to a semi-infinite tight-binding chain.")
    sub = parser.add_subparsers(dest="subcommand")
    sub.add_parser("ldos", parents=[common], help="site-1 LDOS and bound states")
    p = sub.add_parser("survival", parents=[common], help="survival amplitude c(t)")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--n-sites", type=int, help="chain length for diagonalization")
    sub.add_parser("decompose", parents=[common], help="pole and return terms")
    p = sub.add_parser("zeno", parents=[common], help="effective rate under measurements")
    p.add_argument("--summary", help="also write the JSON summary to this path")
    p = sub.add_parser("scan", parents=[common], help="repeat a subcommand over parameter values")
    p.add_argument("--target", choices=tuple(HEADERS))
    p.add_argument("--param", choices=("delta", "eps0"))
    p.add_argument("--values", type=_values, help="comma or space separated values")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--n-sites", type=int)
    return parser


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment. Keys may use ``-`` or ``_``."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc.strerror}")
    for number, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{number}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


_FIELD_TYPES = {"delta": float, "eps0": float, "tmin": float, "tmax": float, "count": int,
                "n_sites": int, "values": _values}


def parse_config(argv):
    """Merge the config file (if any) and the flags into a :class:`RunConfig`."""
    pre = _Parser(add_help=False)
    pre.add_argument("--config")
    early, rest = pre.parse_known_args(argv)
    file_cfg = read_config_file(early.config) if early.config else {}
    file_sub = file_cfg.pop("subcommand", None)
    if not any(tok in SUBCOMMANDS for tok in rest) and file_sub is not None:
        argv = [file_sub, *argv]
    parser = build_parser()
    args = parser.parse_args(argv)
    subcommand = args.subcommand
    if subcommand is None:
        raise UsageError(f"a subcommand is required: {', '.join(SUBCOMMANDS)}")
    known = {f.name for f in fields(RunConfig)} - {"subcommand"}
    values = {}
    for key, text in file_cfg.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r}")
        conv = _FIELD_TYPES.get(key, str)
        try:
            values[key] = conv(text)
        except (ValueError, argparse.ArgumentTypeError):
            raise UsageError(f"config key {key!r}: cannot parse {text!r}")
    for key in known:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if subcommand == "scan" and values.get("values"):
        # the scanned parameter is set per point
        values.setdefault(values.get("param", "delta"), values["values"][0])
    for key in ("delta", "eps0"):
        if key not in values:
            raise UsageError(f"--{key} is required (flag or config file)")
    return RunConfig(subcommand=subcommand, **values)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_config(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
