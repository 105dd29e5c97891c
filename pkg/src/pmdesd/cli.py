"""Command-line front end.

DGD flags are in units of 1/B and the detuning in units of B unless
``--si`` is given, in which case DGDs are seconds and bandwidth/detuning
are angular frequencies in rad/s. Outputs are always in normalized units.

Every sweep command writing to ``--output PATH`` also writes ``PATH.json``
holding the fully resolved configuration; ``--config PATH.json`` re-runs it.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Any, Callable


from . import sweep
from .channel import PmdRealization
from .linalg import JonesVector
from .metrics import esd_threshold, full_report
from .source import FilterSpec, PspBases, SourceConfig, SourceDecomposition, gaussian_correlation, psp_decompose
from .tolerances import TOL
from .validation import DEFAULT_SEED, run_all

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_DISAGREE, EXIT_IO = 0, 1, 2, 3, 4

SURFACE_COLUMNS = ("tau_a", "eta1_sq", "concurrence", "s_param", "region")
MAP_COLUMNS = ("tau_a", "tau_b", "esd_probability", "min_s")


class ConfigError(ValueError):
    pass


def _bool(v) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def _jones(v) -> str:
    """Canonical 'c0,c1' text for a Jones vector; validated on parse."""
    parse_jones(v)
    return str(v).replace(" ", "")


def parse_jones(v) -> JonesVector:
    parts = str(v).replace(" ", "").split(",")
    if len(parts) != 2:
        raise ConfigError(f"Jones vector needs two comma-separated components, got {v!r}")
    try:
        c = [complex(p) for p in parts]
        return JonesVector(c[0], c[1])
    except ValueError as exc:
        raise ConfigError(f"bad Jones vector {v!r}: {exc}") from None


def _floats(v) -> list:
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    return [float(x) for x in str(v).split(",") if x.strip()]


def _opt(conv):
    return lambda v: None if v is None or str(v).lower() in ("", "none", "null") else conv(v)


def _fmt(v) -> str:
    if v not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {v!r}")
    return v


def _mode(v) -> str:
    m = str(v).replace("_", "-")
    if m not in ("equal-dgd", "fixed-tau-b"):
        raise ConfigError(f"mode must be equal-dgd or fixed-tau-b, got {v!r}")
    return m


@dataclass(frozen=True)
class Key:
    conv: Callable[[Any], Any]
    default: Any
    help: str


COMMON = {
    "bandwidth": Key(float, 1.0, "filter RMS bandwidth B (rad/s with --si)"),
    "detuning": Key(float, 0.0, "filter detuning omega_A (units of B, or rad/s with --si)"),
    "si": Key(_bool, False, "DGDs in seconds, frequencies in rad/s"),
    "output": Key(_opt(str), None, "output path (stdout if omitted)"),
    "format": Key(_fmt, "csv", "csv or json"),
}

KEYS = {
    "report": {
        **COMMON,
        "format": Key(_fmt, "json", "report output is json"),
        "eta1_sq": Key(_opt(float), None, "|eta1|^2 (direct mode)"),
        "alpha": Key(float, 0.0, "relative phase alpha of the launch state"),
        "u_a": Key(_opt(_jones), None, "launch polarization of photon A, 'c0,c1'"),
        "u_b": Key(_opt(_jones), None, "launch polarization of photon B, 'c0,c1'"),
        "s_a": Key(_jones, "1,0", "PSP of fiber A, 'c0,c1'"),
        "s_b": Key(_jones, "1,0", "PSP of fiber B, 'c0,c1'"),
        "tau_a": Key(float, 0.0, "DGD of fiber A"),
        "tau_b": Key(float, 0.0, "DGD of fiber B"),
        "tolerance": Key(_opt(float), None, "analytic/oracle agreement tolerance"),
    },
    "surface": {
        **COMMON,
        "mode": Key(_mode, "equal-dgd", "equal-dgd or fixed-tau-b"),
        "tau_min": Key(float, 0.0, "smallest tau_A"),
        "tau_max": Key(float, 4.0, "largest tau_A"),
        "tau_count": Key(int, 200, "tau_A samples"),
        "tau_b_fixed": Key(float, 1.7, "tau_B in fixed-tau-b mode"),
        "eta_count": Key(int, 101, "|eta1|^2 samples on [0, 1], endpoints included"),
    },
    "esd-map": {
        **COMMON,
        "tau_min": Key(float, 0.0, "smallest DGD on both axes"),
        "tau_max": Key(float, 4.0, "largest DGD on both axes"),
        "tau_count": Key(int, 200, "DGD samples per axis"),
        "eta_count": Key(int, 512, "|eta1|^2 midpoint samples per cell"),
        "workers": Key(_opt(int), None, "threads for the sweep (does not change results)"),
    },
    "threshold": {
        **COMMON,
        "delta_tau": Key(_floats, [0.0], "comma-separated DGD differences"),
    },
    "validate": {
        "seed": Key(int, DEFAULT_SEED, "ensemble seed"),
        "samples": Key(int, 10_000, "ensemble size"),
        "tolerance": Key(_opt(float), None, "override every family's tolerance"),
    },
}

# keys that only steer execution and are left out of the reproducibility record
NOT_RECORDED = {"workers"}


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pmdesd", description="Entanglement of photon pairs under PMD.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, keys in KEYS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key=value file or JSON sidecar")
        for key, spec in keys.items():
            if spec.conv is _bool:
                sp.add_argument(_flag(key), dest=key, action="store_const", const=True, default=None, help=spec.help)
            else:
                sp.add_argument(_flag(key), dest=key, default=None, help=spec.help)
    return p


def read_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON config {path}: {exc}") from None
        data.pop("command", None)
        return data
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def resolve(command: str, args: argparse.Namespace) -> dict:
    """Defaults, then config file, then command-line flags."""
    keys = KEYS[command]
    raw = {}
    if getattr(args, "config", None):
        raw.update(read_config_file(args.config))
    unknown = set(raw) - set(keys)
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            raw[k] = v
    cfg = {}
    for k, spec in keys.items():
        try:
            cfg[k] = spec.conv(raw[k]) if k in raw else spec.default
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {k}: {raw[k]!r} ({exc})") from None
    return cfg


def record(command: str, cfg: dict) -> dict:
    return {"command": command, **{k: v for k, v in cfg.items() if k not in NOT_RECORDED}}


# --------------------------------------------------------------------------
# unit handling


def _filter(cfg) -> FilterSpec:
    b = cfg["bandwidth"]
    if not b > 0:
        raise ConfigError("bandwidth must be positive")
    det = cfg.get("detuning", 0.0)
    return FilterSpec(1.0, det / b if cfg.get("si") else det)


def _tau(cfg, value: float) -> float:
    t = value * cfg["bandwidth"] if cfg.get("si") else value
    if t < 0:
        raise ConfigError(f"DGD must be non-negative, got {value!r}")
    return t


# --------------------------------------------------------------------------
# output


def g17(v) -> str:
    return "%.17g" % v


def format_rows(columns, rows, fmt: str, meta: dict | None = None) -> str:
    if fmt == "csv":
        lines = [",".join(columns)]
        for r in rows:
            lines.append(",".join(v if isinstance(v, str) else g17(v) for v in r))
        return "\n".join(lines) + "\n"
    recs = [{c: (v if isinstance(v, str) else float(v)) for c, v in zip(columns, r)} for r in rows]
    return json.dumps({"columns": list(columns), "rows": recs, **(meta or {})}, indent=1) + "\n"


def emit(text: str, cfg: dict, command: str, sidecar: bool = True) -> None:
    path = cfg.get("output")
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    if sidecar:
        with open(path + ".json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(record(command, cfg), fh, indent=1, sort_keys=True)
            fh.write("\n")


# --------------------------------------------------------------------------
# commands


def cmd_report(cfg) -> int:
    if cfg["format"] != "json":
        raise ConfigError("report output is JSON only")
    vectors = cfg["u_a"] is not None or cfg["u_b"] is not None
    if vectors == (cfg["eta1_sq"] is not None):
        raise ConfigError("give exactly one of --eta1-sq or both --u-a/--u-b")
    if vectors:
        if cfg["u_a"] is None or cfg["u_b"] is None:
            raise ConfigError("source-vector mode needs both --u-a and --u-b")
        src = SourceConfig(parse_jones(cfg["u_a"]), parse_jones(cfg["u_b"]), cfg["alpha"])
        dec = psp_decompose(src, PspBases(parse_jones(cfg["s_a"]), parse_jones(cfg["s_b"])))
    else:
        try:
            dec = SourceDecomposition.from_eta1_sq(cfg["eta1_sq"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    pmd = PmdRealization(_tau(cfg, cfg["tau_a"]), _tau(cfg, cfg["tau_b"]))
    rf = gaussian_correlation(_filter(cfg))
    rep = full_report(dec, cfg["alpha"], pmd, rf, oracle=True)
    out = rep.to_dict()
    out["disagreement"] = rep.disagreement()
    out["config"] = record("report", cfg)
    emit(json.dumps(out, indent=1) + "\n", cfg, "report", sidecar=False)
    tol = cfg["tolerance"] if cfg["tolerance"] is not None else TOL.cross_path
    if rep.disagreement() > tol:
        print(f"analytic and oracle paths disagree by {rep.disagreement():.3e} > {tol:.1e}", file=sys.stderr)
        return EXIT_DISAGREE
    return EXIT_OK


def _grid(cfg, **kw) -> sweep.GridSpec:
    lo, hi = _tau(cfg, cfg["tau_min"]), _tau(cfg, cfg["tau_max"])
    try:
        return sweep.GridSpec(
            tau_a_min=lo,
            tau_a_max=hi,
            tau_a_count=cfg["tau_count"],
            tau_b_min=lo,
            tau_b_max=hi,
            tau_b_count=cfg["tau_count"],
            eta_count=cfg["eta_count"],
            filter=_filter(cfg),
            **kw,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _require_real(cfg):
    if _filter(cfg).detuning != 0.0:
        raise ConfigError("sweeps use the closed form, which needs zero detuning")


def cmd_surface(cfg) -> int:
    _require_real(cfg)
    grid = _grid(cfg, tau_b_fixed=_tau(cfg, cfg["tau_b_fixed"]))
    table = sweep.concurrence_surface(grid, mode=cfg["mode"].replace("-", "_"))
    emit(format_rows(SURFACE_COLUMNS, table.rows(), cfg["format"]), cfg, "surface")
    return EXIT_OK


def cmd_esd_map(cfg) -> int:
    _require_real(cfg)
    grid = _grid(cfg)
    try:
        m = sweep.esd_probability_map(grid, workers=cfg["workers"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    meta = {}
    if cfg["format"] == "json":
        try:
            fit = sweep.boundary_stretch_factor(sweep.s2_boundary(m), sweep.esd_free_boundary(m))
            meta = {"stretch_factor": fit.factor, "stretch_residual": fit.residual}
        except ValueError:
            meta = {"stretch_factor": None, "stretch_residual": None}
    emit(format_rows(MAP_COLUMNS, m.rows(), cfg["format"], meta), cfg, "esd-map")
    return EXIT_OK


def cmd_threshold(cfg) -> int:
    rf = gaussian_correlation(_filter(cfg))
    dts = [_tau(cfg, abs(d)) for d in cfg["delta_tau"]]
    if not dts:
        raise ConfigError("no --delta-tau values")
    rows = [(d, esd_threshold(d, rf)) for d in dts]
    emit(format_rows(("delta_tau", "eta1_sq_threshold"), rows, cfg["format"]), cfg, "threshold")
    return EXIT_OK


def cmd_validate(cfg) -> int:
    if cfg["samples"] < 10:
        raise ConfigError("validate needs at least 10 samples")
    print(f"seed={cfg['seed']} samples={cfg['samples']}")
    checks = run_all(cfg["seed"], cfg["samples"], cfg["tolerance"], FilterSpec(), log=print)
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} families passed")
    return EXIT_OK if not failed else EXIT_VALIDATION


COMMANDS = {
    "report": cmd_report,
    "surface": cmd_surface,
    "esd-map": cmd_esd_map,
    "threshold": cmd_threshold,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args.command, args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # invalid physical inputs surfaced by the library
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
