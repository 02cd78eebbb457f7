"""``heliflow`` command-line entry point.

Exit statuses: 0 all checks pass, 1 a verification failed, 2 the requested
parameters have no admissible domain, 3 bad configuration, 4 internal error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, fields, replace
from itertools import combinations
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import formats
from .bour import build_bour_chart, family_patch, recover_datum
from .errors import DomainError
from .translators import (
    DEFAULT_GRID_N,
    DEFAULT_U_CAP,
    FamilyParams,
    build_helicoidal,
    cylinder_translator,
    deformation_path,
)
from .verify import (
    GridSpec,
    check_angle,
    check_isometry,
    check_metric,
    check_screw_invariance,
    check_translator,
    seed_from_surface,
    verify_suite,
)

log = logging.getLogger("heliflow")

COMMANDS = ("generate", "deform", "verify", "export", "profile")
FORMATS = ("mesh", "table", "report")
DEFAULT_FORMAT = {"generate": "mesh", "deform": "mesh", "export": "mesh", "verify": "report", "profile": "table"}

EXIT_OK, EXIT_FAILED, EXIT_DOMAIN, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class JobConfig:
    command: str
    c: Optional[float] = None
    h: float = 0.0
    mu: Optional[float] = None
    lam: float = 1.0
    radius: Optional[float] = None
    U_cap: float = DEFAULT_U_CAP
    grid: tuple[int, int] = (40, 40)
    out: Optional[str] = None
    format: Optional[str] = None
    steps: int = 5
    at: Optional[tuple[float, ...]] = None
    window: Optional[tuple[float, float, float, float]] = None
    grid_n: int = DEFAULT_GRID_N
    margin: Optional[float] = None

    def validate(self) -> "JobConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        fmt = self.format or DEFAULT_FORMAT[self.command]
        if fmt not in FORMATS:
            raise ConfigError(f"unknown format {fmt!r}")
        for name in ("c", "h", "mu", "lam", "radius", "U_cap"):
            val = getattr(self, name)
            if val is not None and not math.isfinite(val):
                raise ConfigError(f"--{name} must be finite")
        if self.command in ("verify", "deform", "profile") and self.c is None:
            raise ConfigError(f"{self.command} needs --c")
        if self.command in ("generate", "export") and self.c is None and self.radius is None:
            raise ConfigError(f"{self.command} needs --c (family member) or --radius (cylinder)")
        if self.command == "deform" and self.mu is None:
            raise ConfigError("deform needs --mu (pitch of the starting member)")
        if self.radius is not None and self.radius <= 0:
            raise ConfigError("--radius must be positive")
        if self.lam == 0:
            raise ConfigError("--lambda must be non-zero")
        if self.steps < 2:
            raise ConfigError("--steps must be at least 2")
        if min(self.grid) < 4:
            raise ConfigError("--grid needs at least 4 samples per direction")
        return replace(self, format=fmt)

    def grid_spec(self, default_margin: float) -> GridSpec:
        margin = default_margin if self.margin is None else self.margin
        return GridSpec(self.grid[0], self.grid[1], margin, self.window)


def _parse_grid(text) -> tuple[int, int]:
    try:
        n, m = str(text).lower().split("x")
        return int(n), int(m)
    except ValueError:
        raise ConfigError(f"grid must look like NxM, got {text!r}") from None


def _parse_floats(text, count=None) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        vals = tuple(float(x) for x in text)
    else:
        try:
            vals = tuple(float(x) for x in str(text).split(","))
        except ValueError:
            raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise ConfigError(f"expected {count} numbers, got {len(vals)}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heliflow", description="Generate and verify surfaces with K = n3^4.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--c", type=float, help="first-integral constant c")
    p.add_argument("--h", type=float, help="pitch h (target pitch for deform)")
    p.add_argument("--mu", type=float, help="pitch of the starting member for deform")
    p.add_argument("--lambda", dest="lam", type=float, help="Bour deformation scale (deform)")
    p.add_argument("--radius", type=float, help="cylinder radius")
    p.add_argument("--u-cap", dest="U_cap", type=float, help="upper end of the U-interval")
    p.add_argument("--grid", help="sample grid NxM")
    p.add_argument("--out", help="output path (deform: file stem)")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--config", help="YAML file with the same keys; flags override it")
    p.add_argument("--steps", type=int, help="members along a deformation path")
    p.add_argument("--at", help="comma-separated U values for profile rows")
    p.add_argument("--window", help="parameter window u0,u1,v0,v1 for meshes and grids")
    p.add_argument("--grid-n", dest="grid_n", type=int, help="quadrature table nodes")
    p.add_argument("--margin", type=float, help="fractional grid inset")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


_KEY_ALIASES = {"lambda": "lam", "u_cap": "U_cap", "u-cap": "U_cap", "grid-n": "grid_n"}


def config_from_args(argv=None) -> JobConfig:
    return config_from_namespace(build_parser().parse_args(argv))


def config_from_namespace(args: argparse.Namespace) -> JobConfig:
    values: dict = {}
    if args.config:
        try:
            loaded = yaml.safe_load(Path(args.config).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a mapping")
        values.update({_KEY_ALIASES.get(k, k): v for k, v in loaded.items()})
    for f in fields(JobConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            values[f.name] = val
    known = {f.name for f in fields(JobConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "command" not in values:
        raise ConfigError("no command given")
    if "grid" in values:
        values["grid"] = _parse_grid(values["grid"]) if not isinstance(values["grid"], (list, tuple)) else tuple(values["grid"])
    if values.get("at") is not None:
        values["at"] = _parse_floats(values["at"])
    if values.get("window") is not None:
        values["window"] = _parse_floats(values["window"], 4)
    try:
        for key in ("c", "h", "mu", "lam", "radius", "U_cap"):
            if values.get(key) is not None:
                values[key] = float(values[key])
        for key in ("steps", "grid_n"):
            if values.get(key) is not None:
                values[key] = int(values[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return JobConfig(**values).validate()


def _surface(cfg: JobConfig):
    if cfg.c is None:
        return cylinder_translator(cfg.radius)
    return build_helicoidal(FamilyParams(cfg.c, cfg.h), cfg.U_cap, cfg.grid_n)


def _member_checks(surf, cfg: JobConfig, grid: GridSpec):
    reports = [check_translator(surf, grid, 1e-4), check_screw_invariance(surf, surf.h)]
    if surf.kind == "helicoidal":
        reports[1:1] = [check_metric(surf, surf.c, grid), check_angle(surf, surf.c, grid)]
    else:
        reports += [check_metric(surf, 0.0, grid), check_angle(surf, 0.0, grid)]
    return reports


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _status(reports) -> int:
    return EXIT_OK if all(r.passed or r.status == "skip" for r in reports) else EXIT_FAILED


def _profile_text(cfg: JobConfig) -> str:
    surf = build_helicoidal(FamilyParams(cfg.c, cfg.h), cfg.U_cap, cfg.grid_n)
    if cfg.at is not None:
        U = np.array(cfg.at)
    else:
        U = cfg.grid_spec(0.0).axes(surf.patch.domain)[0]
    return formats.write_profile(formats.profile_rows(surf, U))


def _cmd_generate(cfg: JobConfig) -> int:
    surf = _surface(cfg)
    out = cfg.out or "surface.obj"
    mesh_path, side = formats.export_mesh(surf, cfg.grid_spec(0.0), out)
    reports = _member_checks(surf, cfg, GridSpec(cfg.grid[0], cfg.grid[1], 0.05))
    text = formats.write_reports(reports, Path(str(mesh_path) + ".report.txt"))
    sys.stdout.write(text)
    log.info("wrote %s, %s", mesh_path, side)
    return _status(reports)


def _cmd_deform(cfg: JobConfig) -> int:
    stem = cfg.out or "deform"
    grid = GridSpec(cfg.grid[0], cfg.grid[1], 0.05)
    if cfg.lam == 1.0:
        members = deformation_path(cfg.mu, cfg.c, cfg.h, cfg.steps, cfg.U_cap, cfg.grid_n)
        for k, surf in enumerate(members):
            formats.export_mesh(surf, cfg.grid_spec(0.0), f"{stem}_{k:02d}.obj")
        reports = [check_translator(s, grid) for s in members]
        reports += [check_isometry(a, b, grid) for a, b in combinations(members, 2)]
    else:
        seed = build_helicoidal(FamilyParams(cfg.c, cfg.mu), cfg.U_cap, cfg.grid_n)
        chart = build_bour_chart(seed_from_surface(seed))
        member = family_patch(recover_datum(chart, cfg.lam, cfg.h))
        formats.export_mesh(member, cfg.grid_spec(0.01), f"{stem}_00.obj")
        reports = [check_isometry(member, chart.patch(), grid), check_translator(member, grid)]
    text = formats.write_reports(reports, f"{stem}.report.txt")
    sys.stdout.write(text)
    return _status(reports)


def _cmd_verify(cfg: JobConfig) -> int:
    reports = verify_suite(cfg.c, cfg.h, cfg.grid_spec(0.05), cfg.U_cap, cfg.grid_n)
    _emit(formats.write_reports(reports), cfg.out)
    return _status(reports)


def _cmd_export(cfg: JobConfig) -> int:
    fmt = cfg.format or DEFAULT_FORMAT["export"]
    if fmt == "mesh":
        formats.export_mesh(_surface(cfg), cfg.grid_spec(0.0), cfg.out or "surface.obj")
        return EXIT_OK
    if fmt == "table":
        if cfg.c is None:
            raise ConfigError("profile tables need --c")
        _emit(_profile_text(cfg), cfg.out)
        return EXIT_OK
    return _cmd_verify(cfg)


def _cmd_profile(cfg: JobConfig) -> int:
    _emit(_profile_text(cfg), cfg.out)
    return EXIT_OK


_HANDLERS = {
    "generate": _cmd_generate,
    "deform": _cmd_deform,
    "verify": _cmd_verify,
    "export": _cmd_export,
    "profile": _cmd_profile,
}


def run(cfg: JobConfig) -> int:
    try:
        return _HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except DomainError as exc:
        log.error("domain error: %s", exc)
        return EXIT_DOMAIN
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_CONFIG


def main(argv=None) -> int:
    logging.basicConfig(format="heliflow: %(message)s", level=logging.WARNING)
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_namespace(args)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.verbose:
        log.setLevel(logging.INFO)
    try:
        return run(cfg)
    except Exception:  # pragma: no cover - defensive
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
