"""Command-line front end: CSV point clouds in, contour CSV and SVG out.

Every command reads a CSV file with a header naming columns ``x`` and
``y`` (and ``t`` for ``regress``). Contours are written as rows
``p,vertex_index,x,y``, counter-clockwise, one block per level; an empty
region is a single ``p,EMPTY`` row. Failures print one line
``ERR <code>: <detail>`` on stderr and exit with 2 (configuration),
3 (input data) or 4 (numerical degeneracy).
"""
import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import (ConfigError, DataError, EmptyFile, MissingColumn,
                     NonFiniteValue, NonNumericCell, QtomoError)
from .quantile import QuantileVersion

COMMANDS = ("envelope", "biplot", "normal", "coverage", "extreme",
            "regress", "depth", "median")


DEFAULT_LEVELS = (0.1,)


# ------------------------------------------------------------------ input


def _locate_bad_cell(rows, names, cols):
    for r, row in enumerate(rows, start=1):
        for name, c in zip(names, cols):
            try:
                v = float(row[c])
            except ValueError:
                raise NonNumericCell(r, name, row[c]) from None
            if not math.isfinite(v):
                raise NonFiniteValue(f"row {r}, col {name}: {row[c]!r}")
    raise DataError("could not parse the input")  # pragma: no cover


def parse_csv(text, need_t=False):
    """Parse CSV text into points ``(n, 2)`` and a covariate (or None).

    Data rows are numbered from 1, the header being row 0. Blank lines
    are skipped.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise EmptyFile("input has no header")
    header = [h.strip().strip('"').strip() for h in next(csv.reader([lines[0]]))]
    want = ["x", "y"] + (["t"] if need_t else [])
    for name in want:
        if name not in header:
            raise MissingColumn(f"column {name!r} not in header {header}")
    body = lines[1:]
    if not body:
        raise EmptyFile("input has a header but no data rows")
    k = len(header)
    cols = [header.index(name) for name in want]
    with warnings.catch_warnings():
        # a cell numpy cannot read stops the scan; that is detected by size
        warnings.simplefilter("ignore", DeprecationWarning)
        flat = np.fromstring(",".join(body), dtype=float, sep=",")
    if flat.size != k * len(body):
        rows = [ln.split(",") for ln in body]
        for r, row in enumerate(rows, start=1):
            if len(row) != k:
                raise DataError(f"row {r} has {len(row)} fields, expected {k}")
        try:
            data = np.array([[row[c] for c in cols] for row in rows], dtype=float)
        except ValueError:
            _locate_bad_cell(rows, want, cols)
    else:
        data = flat.reshape(len(body), k)[:, cols]
    if not np.isfinite(data).all():
        _locate_bad_cell([ln.split(",") for ln in body], want, cols)
    points = np.ascontiguousarray(data[:, :2])
    return points, (np.ascontiguousarray(data[:, 2]) if need_t else None)


def ingest_csv(path, need_t=False):
    """Read ``x,y[,t]`` columns from a UTF-8 CSV file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"input file not found: {path}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    return parse_csv(text, need_t)


# ----------------------------------------------------------------- config


@dataclass
class RunConfig:
    command: str
    input_path: str
    p_levels: list = field(default_factory=lambda: list(DEFAULT_LEVELS))
    directions: object = 360
    version: QuantileVersion = QuantileVersion.INF_TYPE1
    origin: object = "median"
    coverage: float = 0.5
    covariate_value: float = None
    point: tuple = None
    masses: list = None
    threshold: float = 0.1
    thresholds: dict = field(default_factory=dict)
    n_vertices: int = 256
    csv_path: str = None
    svg_path: str = None
    scatter: bool = True

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not self.input_path:
            raise ConfigError("input path is empty")
        levels = [float(p) for p in self.p_levels]
        if not levels:
            raise ConfigError("no levels given")
        for p in levels:
            if not 0.0 < p <= 0.5:
                raise ConfigError(f"level must lie in (0, 0.5], got {p!r}")
        self.p_levels = levels
        d = self.directions
        if d != "critical":
            try:
                ok = int(d) == float(d)
            except (TypeError, ValueError):
                ok = False
            if not ok or int(d) < 3:
                raise ConfigError(f"directions must be an integer >= 3 or 'critical', got {d!r}")
            self.directions = int(d)
        try:
            self.version = QuantileVersion(self.version)
        except ValueError:
            raise ConfigError(f"unknown quantile version {self.version!r}") from None
        if self.command == "regress" and self.covariate_value is None:
            raise ConfigError("regress needs --t0")
        if self.command == "depth" and self.point is None:
            raise ConfigError("depth needs --point")
        if self.masses is not None:
            for m in self.masses:
                if not 0.0 < m < 1.0:
                    raise ConfigError(f"enclosed mass must lie in (0, 1), got {m!r}")
        if not 0.0 < float(self.coverage) <= 1.0:
            raise ConfigError(f"coverage must lie in (0, 1], got {self.coverage!r}")
        if not 0.0 < float(self.threshold) < 1.0:
            raise ConfigError(f"threshold must lie in (0, 1), got {self.threshold!r}")
        for path in (self.csv_path, self.svg_path):
            if path is not None and not str(path):
                raise ConfigError("output path is empty")
        return self


# ----------------------------------------------------------------- output


def _fmt(v):
    return repr(float(v))


def contour_rows(level, region):
    if region.is_empty:
        return [f"{_fmt(level)},EMPTY"]
    return [f"{_fmt(level)},{i},{_fmt(x)},{_fmt(y)}"
            for i, (x, y) in enumerate(region.vertices)]


def contour_csv(blocks):
    """CSV text for ``[(level, region_or_vertices), ...]``."""
    out = ["p,vertex_index,x,y"]
    for level, region in blocks:
        out.extend(contour_rows(level, region))
    return "\n".join(out) + "\n"


def read_contour_csv(text):
    """Parse contour CSV back into ``{level: vertex array or None}``."""
    blocks = {}
    lines = text.splitlines()
    if not lines or lines[0] != "p,vertex_index,x,y":
        raise DataError("not a contour CSV")
    for ln in lines[1:]:
        parts = ln.split(",")
        p = float(parts[0])
        if parts[1] == "EMPTY":
            blocks[p] = None
        else:
            blocks.setdefault(p, []).append((float(parts[2]), float(parts[3])))
    return {p: (None if v is None else np.array(v)) for p, v in blocks.items()}


def svg_text(points, paths, scatter=True):
    """SVG 1.1 drawing: optional scatter plus one path per contour.

    The view box is the data bounding box with a 5% margin on each side;
    the y axis points up.
    """
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    lo = lo - 0.05 * span
    hi = hi + 0.05 * span
    w, h = hi - lo
    r = 0.004 * max(w, h)
    buf = io.StringIO()
    buf.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    buf.write('<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
              f'viewBox="{_fmt(lo[0])} {_fmt(-hi[1])} {_fmt(w)} {_fmt(h)}">\n')
    buf.write('<g transform="scale(1,-1)">\n')
    if scatter:
        buf.write('<g fill="#888" stroke="none">\n')
        for x, y in points:
            buf.write(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}"/>\n')
        buf.write("</g>\n")
    sw = 0.003 * max(w, h)
    for level, v in paths:
        if v is None or len(v) == 0:
            continue
        d = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in v) + " Z"
        buf.write(f'<path d="{d}" fill="none" stroke="#c03" '
                  f'stroke-width="{_fmt(sw)}"><title>p={_fmt(level)}</title></path>\n')
    buf.write("</g>\n</svg>\n")
    return buf.getvalue()


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None


# ------------------------------------------------------------------- run


def _directions(cfg, points):
    from .envelope import critical_directions, uniform_directions

    if cfg.directions == "critical":
        return critical_directions(points)
    return uniform_directions(cfg.directions)


def _emit(cfg, points, blocks, out):
    """Write contour CSV (stdout when no path) and the optional SVG."""
    text = contour_csv(blocks)
    if cfg.csv_path:
        _write(cfg.csv_path, text)
    else:
        out.write(text)
    if cfg.svg_path:
        paths = [(p, None if getattr(r, "is_empty", False) else getattr(r, "vertices", r))
                 for p, r in blocks]
        _write(cfg.svg_path, svg_text(points, paths, cfg.scatter))


def _summary(cfg, out, line):
    # summaries go to stdout only when stdout is not carrying the CSV
    if cfg.csv_path:
        out.write(line + "\n")


def _run_envelope(cfg, points, covariate, out):
    from .envelope import build_envelopes
    from .estimators import EmpiricalEstimator

    A = _directions(cfg, points)
    envs = build_envelopes(points, cfg.p_levels, A, EmpiricalEstimator(cfg.version))
    _emit(cfg, points, [(e.p, e.region) for e in envs], out)


def _run_extreme(cfg, points, covariate, out):
    from .envelope import build_envelopes
    from .estimators import ExtremeEstimator

    A = _directions(cfg, points)
    est = ExtremeEstimator(cfg.threshold, cfg.thresholds)
    envs = build_envelopes(points, cfg.p_levels, A, est)
    _emit(cfg, points, [(e.p, e.region) for e in envs], out)


def _run_regress(cfg, points, covariate, out):
    from .estimators import conditional_envelope

    A = _directions(cfg, points)
    blocks = [(p, conditional_envelope(points, covariate, cfg.covariate_value, p, A).region)
              for p in cfg.p_levels]
    _emit(cfg, points, blocks, out)


def _run_biplot(cfg, points, covariate, out):
    from .envelope import biplot_curve
    from .estimators import EmpiricalEstimator

    A = _directions(cfg, points)
    est = EmpiricalEstimator(cfg.version)
    blocks = [(p, biplot_curve(points, p, cfg.origin, A, est)) for p in cfg.p_levels]
    text = ["p,vertex_index,x,y"]
    for p, curve in blocks:
        text.extend(f"{_fmt(p)},{i},{_fmt(x)},{_fmt(y)}" for i, (x, y) in enumerate(curve))
    if cfg.csv_path:
        _write(cfg.csv_path, "\n".join(text) + "\n")
    else:
        out.write("\n".join(text) + "\n")
    if cfg.svg_path:
        _write(cfg.svg_path, svg_text(points, blocks, cfg.scatter))


def _run_normal(cfg, points, covariate, out):
    from .normalfit import EnclosedMass, TangentMass, fit_normal, normal_contour

    fit = fit_normal(points)
    if cfg.masses is not None:
        modes = [(m, EnclosedMass(m)) for m in cfg.masses]
    else:
        modes = [(p, TangentMass(p)) for p in cfg.p_levels]
    blocks = [(lvl, normal_contour(fit, mode, cfg.n_vertices)) for lvl, mode in modes]
    _emit(cfg, points, blocks, out)


def _run_coverage(cfg, points, covariate, out):
    from .envelope import coverage_search, enclosed_count
    from .estimators import EmpiricalEstimator

    A = _directions(cfg, points)
    p, env = coverage_search(points, cfg.coverage, A, EmpiricalEstimator(cfg.version))
    _emit(cfg, points, [(p, env.region)], out)
    k = enclosed_count(env.region, points)
    _summary(cfg, out, f"coverage,{_fmt(p)},enclosed,{k},n,{points.shape[0]}")


def _run_depth(cfg, points, covariate, out):
    from .depth import halfspace_depth

    d = halfspace_depth(points, cfg.point)
    out.write(f"depth,{_fmt(d.value)},count,{d.count},n,{d.n}\n")


def _run_median(cfg, points, covariate, out):
    from .depth import tukey_median

    p, region = tukey_median(points)
    c = region.centroid()
    if cfg.csv_path:
        _write(cfg.csv_path, contour_csv([(p, region)]))
    if cfg.svg_path:
        _write(cfg.svg_path, svg_text(points, [(p, region.vertices)], cfg.scatter))
    out.write(f"median,{_fmt(c[0])},{_fmt(c[1])},depth,{_fmt(p)}\n")


_RUNNERS = {
    "envelope": _run_envelope,
    "biplot": _run_biplot,
    "normal": _run_normal,
    "coverage": _run_coverage,
    "extreme": _run_extreme,
    "regress": _run_regress,
    "depth": _run_depth,
    "median": _run_median,
}


def run(config, out=None):
    """Execute a validated configuration; returns the exit status."""
    out = sys.stdout if out is None else out
    cfg = config.validate()
    _kernels.set_threads_from_env()
    points, covariate = ingest_csv(cfg.input_path, need_t=cfg.command == "regress")
    _RUNNERS[cfg.command](cfg, points, covariate, out)
    return 0


# ---------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _floats(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _origin(text):
    if text in ("median", "tukey"):
        return text
    v = _floats(text)
    if len(v) != 2:
        raise ConfigError(f"origin must be 'median', 'tukey' or x,y; got {text!r}")
    return tuple(v)


def build_parser():
    parser = _Parser(prog="qtomo", description="Directional quantile envelopes of 2-D point clouds.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "envelope": "empirical envelopes at one or more levels",
        "biplot": "quantile biplot curves around an origin",
        "normal": "contours of a fitted bivariate normal",
        "coverage": "deepest envelope holding a prescribed fraction of points",
        "extreme": "envelopes from a tail model for very small levels",
        "regress": "conditional envelopes by linear quantile regression on column t",
        "depth": "halfspace depth of one point",
        "median": "deepest envelope and its vertex centroid",
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("input", help="CSV file with header x,y (and t for regress)")
        sp.add_argument("--config", help="JSON file with defaults for any option")
        sp.add_argument("--p", help="comma-separated levels in (0, 0.5]")
        sp.add_argument("--directions",
                        help="number of equally spaced directions, or 'critical' "
                             "for all pair normals (quadratic in n)")
        sp.add_argument("--version", choices=[v.value for v in QuantileVersion])
        sp.add_argument("--csv", dest="csv_path", help="contour CSV output (default stdout)")
        sp.add_argument("--svg", dest="svg_path", help="SVG output")
        sp.add_argument("--no-scatter", dest="scatter", action="store_false", default=None,
                        help="omit the data points from the SVG")
        if name == "biplot":
            sp.add_argument("--origin", help="'median', 'tukey' or x,y")
        if name == "normal":
            sp.add_argument("--mass", help="enclosed masses in (0, 1) instead of tangent levels")
            sp.add_argument("--vertices", dest="n_vertices", type=int, help="polygon vertices (>= 16)")
        if name == "coverage":
            sp.add_argument("--coverage", type=float, help="target enclosed fraction")
        if name == "extreme":
            sp.add_argument("--threshold", type=float, help="tail fraction fitted per direction")
        if name == "regress":
            sp.add_argument("--t0", dest="covariate_value", type=float, help="covariate value")
        if name == "depth":
            sp.add_argument("--point", help="x,y")
    return parser


_CONFIG_KEYS = {
    "p": "p_levels", "p_levels": "p_levels", "directions": "directions",
    "version": "version", "origin": "origin", "coverage": "coverage",
    "t0": "covariate_value", "covariate_value": "covariate_value",
    "point": "point", "mass": "masses", "masses": "masses",
    "threshold": "threshold", "thresholds": "thresholds",
    "vertices": "n_vertices", "n_vertices": "n_vertices",
    "csv": "csv_path", "svg": "svg_path", "scatter": "scatter",
}


def _load_config(path):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    out = {}
    for key, value in data.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        out[_CONFIG_KEYS[key]] = value
    if "p_levels" in out and not isinstance(out["p_levels"], list):
        out["p_levels"] = _floats(out["p_levels"])
    if "masses" in out and not isinstance(out["masses"], list):
        out["masses"] = _floats(out["masses"])
    if "origin" in out and not isinstance(out["origin"], str):
        out["origin"] = tuple(float(v) for v in out["origin"])
    if "point" in out:
        out["point"] = tuple(float(v) for v in out["point"])
    if "thresholds" in out:
        try:
            out["thresholds"] = {int(k): float(v) for k, v in dict(out["thresholds"]).items()}
        except (TypeError, ValueError):
            raise ConfigError("thresholds must map direction indices to fractions") from None
    return out


def config_from_args(args):
    """Merge ``--config`` defaults with explicit flags into a RunConfig."""
    values = _load_config(args.config) if args.config else {}
    ns = vars(args)
    if ns.get("p") is not None:
        values["p_levels"] = _floats(ns["p"])
    if ns.get("mass") is not None:
        values["masses"] = _floats(ns["mass"])
    if ns.get("origin") is not None:
        values["origin"] = _origin(ns["origin"])
    if ns.get("point") is not None:
        pt = _floats(ns["point"])
        if len(pt) != 2:
            raise ConfigError(f"point must be x,y; got {ns['point']!r}")
        values["point"] = tuple(pt)
    if ns.get("directions") is not None:
        values["directions"] = ns["directions"]
    for key in ("version", "coverage", "covariate_value", "threshold",
                "n_vertices", "csv_path", "svg_path", "scatter"):
        if ns.get(key) is not None:
            values[key] = ns[key]
    known = {f.name for f in fields(RunConfig)}
    values = {k: v for k, v in values.items() if k in known}
    try:
        return RunConfig(command=args.command, input_path=args.input, **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return run(config_from_args(args))
    except QtomoError as exc:
        detail = " ".join(str(exc).split()) or type(exc).__name__
        print(f"ERR {exc.code}: {detail}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
