"""Command-line experiment driver.

Usage::

    qmr <workflow> --config <path> [--out <path>] [--threads N]

The configuration is a flat ``key = value`` file with ``#`` comments.  Each
workflow writes one CSV table whose first line is ``#schema=<columns>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .analysis import (
    ScaledValue,
    ShellSpec,
    localization_ratios,
    resonance_ratios,
    shell_norm_sq,
    stress_energies,
)
from .design import design_bounds, regime_check
from .errors import ConfigurationError, DomainError, NumericalError, QMRError
from .media import BackgroundMedium, ContrastProfile, derive_parameters
from .solver import IncidentSpec, solve_mode_exact, transmission_residual

__all__ = ["ExperimentConfig", "WORKFLOWS", "emit_config", "main", "parse_config", "run"]

WORKFLOWS = ("localization", "resonance", "stress", "design", "validate")
POLICIES = ("unit_mn", "unit_all_m")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class ExperimentConfig:
    lam: float = 1.0
    mu: float = 1.0
    rho: float = 1.0
    delta: float | None = None
    eps_rho: float | None = None
    omega: tuple = ()
    n: tuple = ()
    f_policy: str = "unit_mn"
    gamma1: float | None = None
    gamma2: float | None = None
    R: float = 2.0
    eps_loc: float | None = None
    workflow: str | None = None
    out: str | None = None

    @property
    def background(self) -> BackgroundMedium:
        return BackgroundMedium(self.lam, self.mu, self.rho)

    @property
    def contrast(self) -> ContrastProfile:
        if self.delta is None or self.eps_rho is None:
            raise ConfigurationError("delta and eps_rho are both required")
        return ContrastProfile(self.delta, self.eps_rho)

    @property
    def shells(self) -> ShellSpec:
        if self.gamma1 is None or self.gamma2 is None:
            raise ConfigurationError("gamma1 and gamma2 are both required")
        try:
            return ShellSpec(self.gamma1, self.gamma2, self.R)
        except DomainError as exc:
            raise ConfigurationError(str(exc)) from exc

    def incident(self, n: int) -> IncidentSpec:
        if self.f_policy == "unit_mn":
            return IncidentSpec.sectoral(n)
        return IncidentSpec.uniform(n)


# config key -> (field name, parser, emitter)
def _float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("not finite")
    return value


def _float_list(text: str) -> tuple:
    return tuple(_float(t) for t in text.split(",") if t.strip())


def _int_list(text: str) -> tuple:
    out = []
    for t in text.split(","):
        if t.strip():
            out.append(int(t.strip()))
    return tuple(out)


def _choice(options):
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


def _emit_list(values) -> str:
    return ", ".join(repr(v) for v in values)


_KEYS: dict[str, tuple[str, Callable, Callable]] = {
    "lambda": ("lam", _float, repr),
    "mu": ("mu", _float, repr),
    "rho": ("rho", _float, repr),
    "delta": ("delta", _float, repr),
    "eps_rho": ("eps_rho", _float, repr),
    "omega": ("omega", _float_list, _emit_list),
    "n": ("n", _int_list, _emit_list),
    "f_policy": ("f_policy", _choice(POLICIES), str),
    "gamma1": ("gamma1", _float, repr),
    "gamma2": ("gamma2", _float, repr),
    "R": ("R", _float, repr),
    "eps_loc": ("eps_loc", _float, repr),
    "workflow": ("workflow", _choice(WORKFLOWS), str),
    "out": ("out", str, str),
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` format; errors name the offending key."""
    values: dict[str, object] = {}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        if key == "eps":
            raise ConfigurationError(
                "key 'eps' is ambiguous: use 'eps_rho' for the density contrast "
                "or 'eps_loc' for the localization level"
            )
        if key not in _KEYS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        name, parse, _ = _KEYS[key]
        try:
            values[name] = parse(value)
        except ValueError as exc:
            raise ConfigurationError(f"key {key!r}: invalid value {value!r} ({exc})") from exc
    cfg = ExperimentConfig(**values)
    _check_constraints(cfg)
    return cfg


def _check_constraints(cfg: ExperimentConfig) -> None:
    def fail(key, msg):
        raise ConfigurationError(f"key {key!r}: {msg}")

    cfg.background  # its own messages name lambda, mu or rho
    if cfg.delta is not None or cfg.eps_rho is not None:
        try:
            cfg.contrast
        except ConfigurationError as exc:
            fail("delta" if cfg.eps_rho is not None else "eps_rho", str(exc))
    if any(w <= 0 for w in cfg.omega):
        fail("omega", "frequencies must be positive")
    if any(k < 1 for k in cfg.n):
        fail("n", "mode indices must be >= 1")
    if cfg.eps_loc is not None and not (0 < cfg.eps_loc < 1):
        fail("eps_loc", "must lie in (0, 1)")
    if cfg.gamma1 is not None and not (0 < cfg.gamma1 < 1):
        fail("gamma1", "must lie in (0, 1)")
    # gamma2 < R is enforced by ShellSpec: the design workflow has no outer radius
    if cfg.gamma2 is not None and not cfg.gamma2 > 1:
        fail("gamma2", "must exceed 1")
    if not cfg.R > 1:
        fail("R", "must exceed 1")


def emit_config(cfg: ExperimentConfig) -> str:
    """Canonical text form; ``parse_config(emit_config(c)) == c``."""
    lines = []
    defaults = ExperimentConfig()
    for key, (name, _, emit) in _KEYS.items():
        value = getattr(cfg, name)
        if value is None or (value == () and getattr(defaults, name) == ()):
            continue
        lines.append(f"{key} = {emit(value)}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ workflows


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def _scaled(prefix: str, sv: ScaledValue) -> dict:
    sv = sv.normalized()
    return {f"{prefix}_mantissa": sv.mantissa, f"{prefix}_log10scale": sv.log10_scale}


def _solve(cfg: ExperimentConfig, omega: float, n: int):
    params = derive_parameters(cfg.background, cfg.contrast, omega)
    spec = cfg.incident(n)
    return params, spec, solve_mode_exact(spec, params)


def _row_localization(cfg, omega, n):
    if cfg.eps_loc is None:
        raise ConfigurationError("localization needs eps_loc")
    p, spec, co = _solve(cfg, omega, n)
    sh = cfg.shells
    rep = localization_ratios(spec, p, co, sh, cfg.eps_loc)
    trace, traction = transmission_residual(spec, p, co)
    ball = shell_norm_sq("total_interior", spec, p, co, 0.0, 1.0)
    annulus = shell_norm_sq("scattered", spec, p, co, 1.0, sh.R)
    flags = regime_check(n, cfg.delta, cfg.eps_loc, sh.gamma1, sh.gamma2)
    return {
        "interior_ratio": rep.interior_ratio,
        "exterior_ratio": rep.exterior_ratio,
        "tolerance": rep.tolerance,
        "pass_interior": rep.pass_interior,
        "pass_exterior": rep.pass_exterior,
        "thm31": flags.thm31,
        **_scaled("ball_norm_sq", ball),
        **_scaled("annulus_norm_sq", annulus),
        "trace_residual": trace,
        "traction_residual": traction,
    }


def _flags_or_none(cfg, n):
    if cfg.eps_loc is None:
        return None
    sh = cfg.shells
    return regime_check(n, cfg.delta, cfg.eps_loc, sh.gamma1, sh.gamma2)


def _row_resonance(cfg, omega, n):
    p, spec, co = _solve(cfg, omega, n)
    rep = resonance_ratios(spec, p, co, cfg.shells)
    flags = _flags_or_none(cfg, n)
    return {
        "interior_sq_ratio": rep.interior_sq_ratio,
        "exterior_sq_ratio": rep.exterior_sq_ratio,
        "bound_interior": rep.bound_interior,
        "bound_exterior": rep.bound_exterior,
        "pass_interior": rep.pass_interior,
        "pass_exterior": rep.pass_exterior,
        "thm41": None if flags is None else flags.thm41,
        **_scaled("incident_norm_sq", shell_norm_sq("incident", spec, p, None, 0.0, 1.0)),
    }


def _row_stress(cfg, omega, n):
    p, spec, co = _solve(cfg, omega, n)
    rep = stress_energies(spec, p, co, cfg.shells)
    flags = _flags_or_none(cfg, n)
    return {
        "e_interior": rep.e_interior,
        "e_exterior": rep.e_exterior,
        "bound_interior": rep.bound_interior,
        "bound_exterior": rep.bound_exterior,
        "pass_interior": rep.pass_interior,
        "pass_exterior": rep.pass_exterior,
        "thm42": None if flags is None else flags.thm42,
        "consistency_gap": rep.consistency_gap,
    }


_GRID_ROWS = {"localization": _row_localization, "resonance": _row_resonance, "stress": _row_stress}


def _grid_table(cfg: ExperimentConfig, workflow: str, threads: int):
    if not cfg.omega:
        raise ConfigurationError(f"workflow {workflow!r} needs a nonempty omega list")
    if not cfg.n:
        raise ConfigurationError(f"workflow {workflow!r} needs a nonempty n list")
    cfg.contrast
    cfg.shells
    grid = [(w, n) for w in cfg.omega for n in cfg.n]  # ω-major, n-minor
    fn = _GRID_ROWS[workflow]

    def one(point):
        w, n = point
        head = {
            "omega": w,
            "n": n,
            "delta": cfg.delta,
            "eps_rho": cfg.eps_rho,
            "f_policy": cfg.f_policy,
        }
        return {**head, **fn(cfg, w, n)}

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, grid))
    else:
        rows = [one(pt) for pt in grid]
    return rows, EXIT_OK


def _design_table(cfg: ExperimentConfig, threads: int):
    if cfg.eps_loc is None or cfg.gamma1 is None or cfg.gamma2 is None:
        raise ConfigurationError("design needs eps_loc, gamma1 and gamma2")
    try:
        b = design_bounds(cfg.eps_loc, cfg.gamma1, cfg.gamma2)
    except DomainError as exc:
        raise ConfigurationError(str(exc)) from exc
    row = {
        "eps_loc": b.eps_loc,
        "gamma1": b.gamma1,
        "gamma2": b.gamma2,
        "n1": b.n1,
        "n2": b.n2,
        "beta": b.beta,
        "n1_clamped": b.n1_clamped,
        "n2_clamped": b.n2_clamped,
    }
    return [row], EXIT_OK


def _validate_table(cfg: ExperimentConfig, threads: int):
    from .validation import CHECKS

    numbers = sorted(CHECKS)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda i: CHECKS[i](), numbers))
    else:
        results = [CHECKS[i]() for i in numbers]
    for r in results:
        print(r.line(), file=sys.stderr)
    rows = [{"criterion": r.number, "name": r.name, "passed": r.passed, "detail": r.detail} for r in results]
    return rows, EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def _write_csv(rows: list[dict], stream) -> None:
    columns = list(rows[0]) if rows else []
    stream.write("#schema=" + ",".join(columns) + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])


def run(cfg: ExperimentConfig, workflow: str | None = None, out: str | None = None, threads: int = 1) -> int:
    """Execute one workflow and write its CSV; returns the process exit code."""
    workflow = workflow or cfg.workflow
    try:
        if workflow not in WORKFLOWS:
            raise ConfigurationError(f"unknown workflow {workflow!r}; expected one of {', '.join(WORKFLOWS)}")
        if threads < 1:
            raise ConfigurationError("--threads must be >= 1")
        if workflow == "design":
            rows, status = _design_table(cfg, threads)
        elif workflow == "validate":
            rows, status = _validate_table(cfg, threads)
        else:
            rows, status = _grid_table(cfg, workflow, threads)
    except (ConfigurationError, DomainError) as exc:
        # DomainError covers the unsupported-mode case of the m = n analyses
        print(f"qmr: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"qmr: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except QMRError as exc:
        print(f"qmr: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    buf = io.StringIO()
    _write_csv(rows, buf)
    target = out or cfg.out
    if target is None:
        sys.stdout.write(buf.getvalue())
        return status
    try:
        Path(target).write_text(buf.getvalue(), encoding="utf-8")
    except OSError as exc:
        print(f"qmr: cannot write {target}: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qmr", description="Quasi-Minnaert resonance experiments")
    ap.add_argument("workflow", help="one of: " + ", ".join(WORKFLOWS))
    ap.add_argument("--config", help="flat key = value configuration file")
    ap.add_argument("--out", help="CSV output path (default: stdout or the config's 'out')")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for grid sweeps")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.config is None:
        if args.workflow != "validate":
            print("qmr: configuration error: --config is required", file=sys.stderr)
            return EXIT_CONFIG
        text = ""
    else:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            print(f"qmr: cannot read {args.config}: {exc}", file=sys.stderr)
            return EXIT_IO
    try:
        cfg = parse_config(text)
    except ConfigurationError as exc:
        print(f"qmr: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.workflow is not None and cfg.workflow != args.workflow:
        print(
            f"qmr: configuration error: command line asks for {args.workflow!r} "
            f"but the config sets workflow = {cfg.workflow}",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    return run(cfg, args.workflow, args.out, args.threads)


if __name__ == "__main__":
    sys.exit(main())
