"""Command-line front end: ``shelldecay run`` and ``shelldecay audit``.

Settings are resolved in the order defaults < preset < config file < flags.
The config file is flat ``key = value`` text whose keys mirror the long flags
(``lambda``, ``radius``, ``r_over_a``, ``t_min``, ...); ``#`` starts a comment.

Exit codes: 0 success, 1 configuration or computation error, 2 when the
``both`` method exceeds the equivalence threshold.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, DecayError, ToleranceNotMet
from .hermitian import QuadratureSpec, psi_continuum
from .model import PotentialSpec, jost_entire, s_matrix
from .nonhermitian import psi_longtime, psi_resonant_batch
from .poles import find_poles, mirror, winding_count
from .resonant import (
    build_modes,
    check_normalization,
    check_orthogonality,
    gamma_from_flux,
    mirror_mode,
    projected_sum,
    smoothed_closure_defect,
)

log = logging.getLogger("shelldecay")

COLUMNS = (
    "t",
    "t_over_tau",
    "psi_re",
    "psi_im",
    "density",
    "ln_density",
    "method",
    "trunc_or_tol",
    "err_estimate",
    "error",
)
METHODS = ("hermitian", "resonant", "both", "asymptotic")
GRIDS = ("lin", "log")
FORMATS = ("csv", "json")

EXIT_OK, EXIT_ERROR, EXIT_DEVIATION = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run; serialises to ``key = value`` text.

    ``radius`` is the shell radius ``a``; the observation point is
    ``r = r_over_a * radius``.  With ``lifetime_units`` the grid bounds are in
    units of ``tau = 1/Gamma_1``.
    """

    lam: float = 12.0
    radius: float = 1.0
    r_over_a: float = 1.0
    t_min: float = 0.05
    t_max: float = 30.0
    points: int = 200
    grid: str = "log"
    lifetime_units: bool = True
    method: str = "resonant"
    poles: int = 40
    tol: float = 1e-9
    output: str | None = None
    format: str = "csv"
    threshold: float = 1e-3

    def __post_init__(self):
        self.validate()

    @property
    def r(self) -> float:
        return self.r_over_a * self.radius

    @property
    def spec(self) -> PotentialSpec:
        return PotentialSpec(self.lam, self.radius)

    def validate(self) -> None:
        def bad(field, msg):
            raise ConfigError(f"field {field!r}: {msg}")

        for name in ("lam", "radius", "tol", "threshold"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                bad(_KEY_OF[name], f"must be finite and > 0, got {v!r}")
        if not (math.isfinite(self.r_over_a) and self.r_over_a >= 0):
            bad("r_over_a", f"must be finite and >= 0, got {self.r_over_a!r}")
        if self.points < 1:
            bad("points", "empty time grid")
        if self.poles < 1:
            bad("poles", "need at least one pole pair")
        if self.grid not in GRIDS:
            bad("grid", f"must be one of {GRIDS}")
        if self.method not in METHODS:
            bad("method", f"must be one of {METHODS}")
        if self.format not in FORMATS:
            bad("format", f"must be one of {FORMATS}")
        if not (math.isfinite(self.t_min) and math.isfinite(self.t_max)):
            bad("t_min", "grid bounds must be finite")
        if self.t_min <= 0:
            bad("t_min", "grid times must be > 0")
        if self.points > 1 and not self.t_max > self.t_min:
            bad("t_max", "t_max must exceed t_min for a grid of more than one point")

    def time_grid(self, tau: float) -> np.ndarray:
        if self.points == 1:
            x = np.array([self.t_min])
        elif self.grid == "log":
            x = np.geomspace(self.t_min, self.t_max, self.points)
        else:
            x = np.linspace(self.t_min, self.t_max, self.points)
        return x * tau if self.lifetime_units else x

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(rel_tol=self.tol)

    def dumps(self) -> str:
        lines = [f"{_KEY_OF[f.name]} = {_format_value(getattr(self, f.name))}" for f in fields(self)]
        return "\n".join(lines) + "\n"


# config-file keys (flag spellings with underscores) -> dataclass fields
_FIELD_OF = {"lambda": "lam"} | {f.name: f.name for f in fields(RunConfig) if f.name != "lam"}
_KEY_OF = {v: k for k, v in _FIELD_OF.items()}
_TYPES = {f.name: f.type for f in fields(RunConfig)}

PRESETS = {
    "fig2": dict(lam=12.0, radius=1.0, r_over_a=1.0, t_min=0.05, t_max=30.0, points=200, grid="log",
                 lifetime_units=True, method="both", poles=40, tol=1e-9),
    "fig3": dict(lam=12.0, radius=1.0, r_over_a=25.0, t_min=0.05, t_max=300.0, points=200, grid="log",
                 lifetime_units=True, method="asymptotic", poles=40, tol=1e-9),
}


def _format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_value(name: str, text: str):
    kind = _TYPES[name]
    text = text.strip()
    if kind == "bool":
        low = text.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"expected a boolean, got {text!r}")
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    if kind == "str | None":
        return text or None
    return text


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines into field overrides (``preset`` kept as is).

    Raises
    ------
    ConfigError
        With the file name and line number of the offending entry.
    """
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "preset":
            if value not in PRESETS:
                raise ConfigError(f"{source}:{lineno}: field 'preset': unknown preset {value!r}")
            out["preset"] = value
            continue
        if key not in _FIELD_OF:
            raise ConfigError(f"{source}:{lineno}: unknown field {key!r}")
        name = _FIELD_OF[key]
        try:
            out[name] = _parse_value(name, value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: field {key!r}: {exc}") from None
    return out


def loads(text: str) -> RunConfig:
    """Inverse of :meth:`RunConfig.dumps` (presets expanded, defaults filled)."""
    return resolve(file_values=parse_config(text))


def resolve(preset: str | None = None, file_values: dict | None = None, flags: dict | None = None) -> RunConfig:
    """Merge the layers defaults < preset < file < flags into a RunConfig."""
    file_values = dict(file_values or {})
    flags = dict(flags or {})
    name = flags.pop("preset", None) or preset or file_values.get("preset")
    file_values.pop("preset", None)
    values: dict = {}
    if name is not None:
        if name not in PRESETS:
            raise ConfigError(f"field 'preset': unknown preset {name!r}")
        values.update(PRESETS[name])
    values.update(file_values)
    values.update(flags)
    return RunConfig(**values)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Row:
    t: float
    t_over_tau: float
    psi: complex
    method: str
    trunc_or_tol: float | int
    err_estimate: float
    error: str | None = None

    @property
    def density(self) -> float:
        return abs(self.psi) ** 2


def _hermitian_rows(cfg: RunConfig, ts, tau):
    spec, q = cfg.spec, cfg.quadrature()
    rows = []
    for t in ts:
        try:
            s = psi_continuum(spec, cfg.r, float(t), q)
            rows.append(Row(float(t), float(t) / tau, s.psi, "hermitian", cfg.tol, s.error_estimate))
        except ToleranceNotMet as exc:
            rows.append(Row(float(t), float(t) / tau, complex(exc.value), "hermitian", cfg.tol, exc.error, str(exc)))
        except DecayError as exc:
            rows.append(Row(float(t), float(t) / tau, complex("nan"), "hermitian", cfg.tol, math.inf, str(exc)))
    return rows


def _resonant_rows(cfg: RunConfig, modes, ts, tau):
    psi, err, status = psi_resonant_batch(modes, cfg.r, ts, cfg.poles)
    rows = []
    for t, p, e, s in zip(ts, psi, err, status):
        if s:
            rows.append(Row(float(t), float(t) / tau, complex("nan"), "resonant", cfg.poles, math.inf,
                            f"Moshinsky kernel overflows for pair n={int(s)}"))
        else:
            rows.append(Row(float(t), float(t) / tau, complex(p), "resonant", cfg.poles, float(e)))
    return rows


def _asymptotic_rows(cfg: RunConfig, modes, ts, tau):
    rows, parts = [], []
    for t in ts:
        lt = psi_longtime(modes, cfg.r, float(t), cfg.poles)
        rows.append(Row(float(t), float(t) / tau, lt.psi, "asymptotic", cfg.poles, 0.0))
        parts.append((abs(lt.exponential), abs(lt.power_law)))
    return rows, parts


def _max_deviation(a_rows, b_rows) -> float:
    dev = 0.0
    for x, y in zip(a_rows, b_rows):
        if x.error or y.error:
            continue
        dev = max(dev, abs(x.density - y.density) / y.density)
    return dev


def _late_slope(rows, parts):
    """Crossover time and log-log slope of the density beyond it.

    The crossover is the first grid time where the power-law term exceeds
    the exponential part a hundredfold.
    """
    idx = [i for i, (e, p) in enumerate(parts) if p > 100.0 * e]
    if not idx:
        return None, None
    first = idx[0]
    late = [r for r in rows[first:] if not r.error and r.density > 0]
    if len(late) < 3:
        return rows[first].t_over_tau, None
    x = np.log([r.t for r in late])
    y = np.log([r.density for r in late])
    return rows[first].t_over_tau, float(np.polyfit(x, y, 1)[0])


def execute(cfg: RunConfig):
    """Evaluate ``cfg``; returns ``(rows, summary)``.

    Raises
    ------
    DecayError
        When the poles cannot be certified (no rows can be produced).
    """
    spec = cfg.spec
    started = time.perf_counter()
    poles = find_poles(spec, cfg.poles)
    modes = build_modes(spec, poles)
    gamma1 = poles[0].gamma
    tau = 1.0 / gamma1
    ts = cfg.time_grid(tau)
    log.info("Gamma_1 = %.6g, tau = %.6g, %d grid points", gamma1, tau, ts.size)

    summary: dict = {
        "lambda": cfg.lam,
        "a": cfg.radius,
        "r": cfg.r,
        "method": cfg.method,
        "poles": cfg.poles,
        "gamma1": gamma1,
        "tau": tau,
    }
    by_method: dict[str, list[Row]] = {}
    if cfg.method in ("hermitian", "both"):
        by_method["hermitian"] = _hermitian_rows(cfg, ts, tau)
    if cfg.method in ("resonant", "both", "asymptotic"):
        by_method["resonant"] = _resonant_rows(cfg, modes, ts, tau)
    if cfg.method == "asymptotic":
        by_method["asymptotic"], parts = _asymptotic_rows(cfg, modes, ts, tau)
        crossover, slope = _late_slope(by_method["resonant"], parts)
        summary["crossover_t_over_tau"] = crossover
        summary["late_loglog_slope"] = slope
    if cfg.method == "both":
        dev = _max_deviation(by_method["hermitian"], by_method["resonant"])
        summary["max_rel_density_deviation"] = dev
        summary["threshold"] = cfg.threshold
        summary["equivalent"] = dev < cfg.threshold

    # grid order, methods in a fixed order at each time
    order = [m for m in ("hermitian", "resonant", "asymptotic") if m in by_method]
    rows = [by_method[m][i] for i in range(ts.size) for m in order]
    summary["failed_samples"] = sum(1 for r in rows if r.error)
    log.info("finished in %.2f s", time.perf_counter() - started)
    return rows, summary


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".16e")


def _ln(density: float) -> float:
    if density > 0:
        return math.log(density)
    return -math.inf if density == 0 else math.nan


def _row_fields(row: Row) -> list[str]:
    tot = str(row.trunc_or_tol) if isinstance(row.trunc_or_tol, int) else _fmt(row.trunc_or_tol)
    return [
        _fmt(row.t),
        _fmt(row.t_over_tau),
        _fmt(row.psi.real),
        _fmt(row.psi.imag),
        _fmt(row.density),
        _fmt(_ln(row.density)),
        row.method,
        tot,
        _fmt(row.err_estimate),
        (row.error or "").replace(",", ";").replace("\n", " "),
    ]


def _summary_text(value) -> str:
    if isinstance(value, float):
        return _fmt(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return "" if value is None else str(value)


def render_csv(rows, summary) -> str:
    buf = io.StringIO()
    buf.write(",".join(COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(_row_fields(row)) + "\n")
    for key, value in summary.items():
        buf.write(f"# {key} = {_summary_text(value)}\n")
    return buf.getvalue()


def _json_float(x: float):
    return x if math.isfinite(x) else None


def render_json(rows, summary) -> str:
    out_rows = []
    for row in rows:
        out_rows.append(
            {
                "t": row.t,
                "t_over_tau": row.t_over_tau,
                "psi_re": _json_float(row.psi.real),
                "psi_im": _json_float(row.psi.imag),
                "density": _json_float(row.density),
                "ln_density": _json_float(_ln(row.density)),
                "method": row.method,
                "trunc_or_tol": row.trunc_or_tol,
                "err_estimate": _json_float(row.err_estimate),
                "error": row.error,
            }
        )
    clean = {k: (_json_float(v) if isinstance(v, float) else v) for k, v in summary.items()}
    return json.dumps({"rows": out_rows, "summary": clean}, indent=1) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------

def _entry(name, residual, threshold, detail=""):
    return {
        "identity": name,
        "residual": float(residual),
        "threshold": float(threshold),
        "pass": bool(residual <= threshold),
        "detail": detail,
    }


def _ratio(big, small):
    return abs(big) / abs(small) if small != 0 else math.inf


def audit(cfg: RunConfig) -> dict:
    """Run the identity suite for ``cfg.lam``, ``cfg.radius`` and ``N = cfg.poles``.

    Sum rules are checked in projected form (both radial arguments integrated
    against box states); their residual is the ratio of the magnitude at
    ``2N`` to that at ``N``, so a pass means the sum shrinks on doubling.
    """
    spec, N = cfg.spec, cfg.poles
    poles = find_poles(spec, 2 * N)
    modes = build_modes(spec, poles)
    head, head_modes = poles[:N], modes[:N]
    out = []

    k = np.linspace(1e-3, 100.0, 2000) / spec.a
    out.append(_entry("s_matrix_unitarity", np.abs(np.abs(s_matrix(spec, k)) - 1.0).max(), 1e-13,
                      "max ||S(k)| - 1| on 2000 points of (0, 100/a]"))
    # each pole against max(1e-12, its double-precision floor); strict count kept in the detail
    contract = max(p.residual / max(1e-12, p.residual_floor) for p in head)
    strict = sum(p.residual >= 1e-12 for p in head)
    out.append(_entry("pole_residual", contract, 1.0,
                      f"max |J(kappa_n)|/max(1e-12, floor_n), n <= N; raw max "
                      f"{max(p.residual for p in head):.2e}, {strict} of {N} above 1e-12"))
    mirror_res = max(abs(jost_entire(spec, mirror(spec, p))) for p in head)
    out.append(_entry("mirror_residual", mirror_res, 1e-11, "max |J(-conj(kappa_n))|"))
    x_max = 0.5 * (poles[N - 1].alpha + poles[N].alpha)
    depth = max(2.0 * max(p.beta for p in head), 1.0 / spec.a)
    count = winding_count(spec, x_max, depth, 1.0 / spec.a)
    out.append(_entry("argument_principle", abs(count - N), 0, f"{count} zeros counted, {N} located"))

    out.append(_entry("normalization", max(check_normalization(m) for m in head_modes), 1e-10,
                      "max |int u^2 + i u(a)^2/(2 kappa) - 1|"))
    family = list(head_modes) + [mirror_mode(m) for m in head_modes]
    ortho = max(
        check_orthogonality(p, q) for i, p in enumerate(family) for q in family[i + 1:]
    )
    out.append(_entry("orthogonality", ortho, 1e-10, "max over pairs of n, m in +-1..+-N"))
    flux = max(abs(gamma_from_flux(m) - m.pole.gamma) / m.pole.gamma for m in head_modes)
    out.append(_entry("flux_width", flux, 1e-8, "max |Gamma_flux/(4 alpha beta) - 1|"))

    half = 0.5 * spec.a
    out.append(_entry("closure_smoothed_ratio",
                      _ratio(smoothed_closure_defect(modes, half, 2 * N), smoothed_closure_defect(modes, half, N)),
                      1.0, "closure against the initial state at r = a/2, defect(2N)/defect(N)"))
    norm_n = abs(projected_sum(modes, "closure", N) - 1.0)
    norm_2n = abs(projected_sum(modes, "closure", 2 * N) - 1.0)
    out.append(_entry("closure_projected_ratio", _ratio(norm_2n, norm_n), 1.0,
                      f"|sum C_n^2 - 1|: {norm_n:.3e} -> {norm_2n:.3e}"))
    for name, variant in (("sum_rule_inverse_kappa_ratio", "inverse-kappa"), ("sum_rule_kappa_ratio", "kappa")):
        small, big = abs(projected_sum(modes, variant, N)), abs(projected_sum(modes, variant, 2 * N))
        out.append(_entry(name, _ratio(big, small), 1.0, f"projected sum: {small:.3e} -> {big:.3e}"))

    return {
        "lambda": cfg.lam,
        "a": cfg.radius,
        "poles": N,
        "identities": out,
        "pass": all(e["pass"] for e in out),
    }


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key = value config file")
    common.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--lambda", dest="lam", type=float, help="shell intensity lambda (> 0)")
    common.add_argument("--radius", type=float, help="shell radius a")
    common.add_argument("--r-over-a", dest="r_over_a", type=float, help="observation point r/a")
    common.add_argument("--t-min", dest="t_min", type=float)
    common.add_argument("--t-max", dest="t_max", type=float)
    common.add_argument("--points", type=int)
    common.add_argument("--grid", choices=GRIDS)
    common.add_argument("--lifetime-units", dest="lifetime_units", action=argparse.BooleanOptionalAction,
                        default=None, help="grid bounds in units of tau = 1/Gamma_1")
    common.add_argument("--method", choices=METHODS)
    common.add_argument("--poles", type=int, help="number of pole pairs N")
    common.add_argument("--tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--output", help="output path (default: stdout)")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--threshold", type=float, help="max relative density deviation for 'both'")
    common.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="shelldecay", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="evaluate the wave function over a time grid")
    sub.add_parser("audit", parents=[common], help="run the identity suite and emit a JSON report")
    return parser


_NON_CONFIG = {"command", "config", "dump_config", "verbose"}


def _config_from_args(args) -> RunConfig:
    file_values = {}
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        file_values = parse_config(text, str(args.config))
    flags = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG and v is not None}
    return resolve(file_values=file_values, flags=flags)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = _config_from_args(args)
    except (ConfigError, TypeError) as exc:
        print(f"shelldecay: config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.dump_config:
        sys.stdout.write(cfg.dumps())
        return EXIT_OK

    try:
        if args.command == "audit":
            report = audit(cfg)
            _emit(json.dumps(report, indent=1) + "\n", cfg.output)
            return EXIT_OK if report["pass"] else EXIT_ERROR
        rows, summary = execute(cfg)
    except DecayError as exc:
        print(f"shelldecay: computation error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    text = render_csv(rows, summary) if cfg.format == "csv" else render_json(rows, summary)
    _emit(text, cfg.output)
    if summary["failed_samples"]:
        print(f"shelldecay: {summary['failed_samples']} samples failed", file=sys.stderr)
        return EXIT_ERROR
    if cfg.method == "both" and not summary["equivalent"]:
        return EXIT_DEVIATION
    return EXIT_OK


__all__ = ["RunConfig", "PRESETS", "COLUMNS", "parse_config", "loads", "resolve", "execute", "audit", "main",
           "render_csv", "render_json"]

if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
