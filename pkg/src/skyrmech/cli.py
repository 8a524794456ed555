"""``skyrmech`` command line: run scenarios, sweep one config key, run the acceptance suite."""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import logging
import os
import subprocess
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from skyrmech import __version__, scenarios
from skyrmech.errors import ConfigError, ScenarioFailure, SkyrmechError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger("skyrmech")

WORKERS_ENV = "SKYRMECH_WORKERS"


def default_config() -> dict:
    text = resources.files("skyrmech").joinpath("default_config.toml").read_text()
    return tomllib.loads(text)


def _coerce(value, default, key: str):
    if isinstance(default, bool):
        if isinstance(value, bool):
            return value
    elif isinstance(default, int):
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
    elif isinstance(default, float):
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    elif isinstance(default, str):
        if isinstance(value, str):
            return value
    elif isinstance(default, list):
        if isinstance(value, list):
            return [_coerce(v, default[0], key) for v in value] if default else value
    raise ConfigError(f"{key}: expected {type(default).__name__}, got {value!r}")


def merge(base: dict, overlay: dict, where: str = "") -> dict:
    """Overlay ``overlay`` on ``base``; unknown sections and keys are rejected."""
    out = copy.deepcopy(base)
    for section, values in overlay.items():
        if section not in out:
            raise ConfigError(f"unknown config section [{section}]{where}")
        if not isinstance(values, dict):
            raise ConfigError(f"[{section}] must be a table{where}")
        for key, value in values.items():
            if key not in out[section]:
                raise ConfigError(f"unknown config key {section}.{key}{where}")
            out[section][key] = _coerce(value, out[section][key], f"{section}.{key}")
    return out


def parse_value(text: str):
    """TOML-style scalar or list literal; bare words are strings."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def parse_assignment(item: str) -> tuple[str, str, object]:
    if "=" not in item:
        raise ConfigError(f"--set expects section.key=value, got {item!r}")
    path, text = item.split("=", 1)
    if path.count(".") != 1:
        raise ConfigError(f"key path must be section.key, got {path!r}")
    section, key = path.split(".")
    return section.strip(), key.strip(), parse_value(text.strip())


@dataclass
class ScenarioConfig:
    scenario: str
    params: dict
    out_dir: Path = Path("out")
    overrides: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.scenario not in scenarios.SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {sorted(scenarios.SCENARIOS)}")

    @classmethod
    def build(cls, scenario: str, config_file: str | None = None, sets=(), out_dir=".") -> "ScenarioConfig":
        params = default_config()
        if config_file:
            with open(config_file, "rb") as fh:
                params = merge(params, tomllib.load(fh), f" in {config_file}")
        overlay: dict = {}
        for item in sets:
            section, key, value = parse_assignment(item)
            overlay.setdefault(section, {})[key] = value
        params = merge(params, overlay, " (--set)")
        return cls(scenario, params, Path(out_dir), list(sets))

    def canonical(self) -> str:
        return json.dumps({"scenario": self.scenario, "params": self.params}, sort_keys=True, separators=(",", ":"))

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    @classmethod
    def from_manifest(cls, manifest: dict, out_dir=".") -> "ScenarioConfig":
        cfg = manifest["config"]
        params = merge(default_config(), cfg["params"], " (manifest)")
        return cls(cfg["scenario"], params, Path(out_dir))


@dataclass
class RunManifest:
    tool: str
    version: str
    scenario: str
    config_sha256: str
    config: dict
    files: dict
    wall_time_s: float
    tolerances: dict
    truncations: dict
    axis: dict | None = None

    def write(self, out_dir: Path) -> Path:
        path = out_dir / "manifest.json"
        path.write_text(json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n")
        return path


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(table: scenarios.Table, out_dir: Path) -> Path:
    path = out_dir / f"{table.name}.csv"
    lines = [",".join(table.columns), ",".join(table.units)]
    lines += [",".join(_fmt(v) for v in row) for row in table.rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def _sha(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _bookkeeping(params: dict) -> tuple[dict, dict]:
    tol = dict(params["solver"])
    tol.update(trace_drift=1e-6, positivity_floor=-1e-8, single_excitation_norm=1e-10)
    trunc = {
        "fig3_n_max": params["fig3"]["n_max"],
        "fig3_n_max_sc": params["fig3"]["n_max_sc"],
        "fig4_n_max": params["fig4"]["n_max"],
        "qubit_s_max": params["qubit"]["s_max"],
    }
    return tol, trunc


def _finish(config: ScenarioConfig, tables, extra_json: dict | None, t0: float, axis=None) -> RunManifest:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    for table in tables:
        p = write_csv(table, out)
        files[p.name] = _sha(p)
    if extra_json is not None:
        p = out / f"{config.scenario}.json"
        p.write_text(json.dumps(extra_json, indent=2, sort_keys=True) + "\n")
        files[p.name] = _sha(p)
    tol, trunc = _bookkeeping(config.params)
    manifest = RunManifest(
        tool="skyrmech",
        version=__version__,
        scenario=config.scenario,
        config_sha256=config.sha256(),
        config=json.loads(config.canonical()),
        files=files,
        wall_time_s=time.perf_counter() - t0,
        tolerances=tol,
        truncations=trunc,
        axis=axis,
    )
    manifest.write(out)
    return manifest


def run_scenario(config: ScenarioConfig) -> RunManifest:
    t0 = time.perf_counter()
    try:
        result = scenarios.SCENARIOS[config.scenario](config.params)
    except SkyrmechError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ScenarioFailure(f"{config.scenario}: {type(exc).__name__}: {exc}") from exc
    except (ValueError, ArithmeticError) as exc:
        raise ScenarioFailure(f"{config.scenario}: {type(exc).__name__}: {exc}") from exc
    tables, extra = result if isinstance(result, tuple) else (result, None)
    return _finish(config, tables, extra, t0)


def parse_values(spec: str) -> list[float]:
    """``a:b:n`` (inclusive linspace) or a comma list."""
    try:
        if ":" in spec:
            a, b, n = spec.split(":")
            n = int(n)
            if n < 1:
                raise ValueError
            return [float(v) for v in np.linspace(float(a), float(b), n)]
        return [float(v) for v in spec.split(",")]
    except ValueError:
        raise ConfigError(f"--values expects a:b:n or a comma list, got {spec!r}") from None


def _point(args):
    name, params = args
    return scenarios.POINTS[name][0](params)


def sweep(config: ScenarioConfig, axis: str, values: list[float]) -> RunManifest:
    if config.scenario not in scenarios.POINTS:
        raise ConfigError(f"scenario {config.scenario!r} has no sweep; choose from {sorted(scenarios.POINTS)}")
    if axis.count(".") != 1:
        raise ConfigError(f"axis must be section.key, got {axis!r}")
    section, key = axis.split(".")
    current = config.params.get(section, {}).get(key)
    if current is None:
        raise ConfigError(f"unknown axis {axis!r}")
    if isinstance(current, bool) or not isinstance(current, (int, float)):
        raise ConfigError(f"axis {axis!r} is not numeric")
    t0 = time.perf_counter()
    jobs = []
    for v in values:
        params = merge(config.params, {section: {key: v}})
        jobs.append((config.scenario, params))
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    try:
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                points = list(pool.map(_point, jobs))
        else:
            points = [_point(j) for j in jobs]
    except (SkyrmechError, ValueError, ArithmeticError) as exc:
        raise ScenarioFailure(f"sweep {config.scenario}: {type(exc).__name__}: {exc}") from exc
    columns = [axis] + [c for c in points[0] if c != key]
    rows = [tuple([v] + [p[c] for c in columns[1:]]) for v, p in zip(values, points)]
    table = scenarios.Table(scenarios.POINTS[config.scenario][1], columns, ["-"] * len(columns), rows)
    return _finish(config, [table], None, t0, axis={"key": axis, "values": values})


def check(extra: list[str]) -> int:
    root = Path(__file__).resolve().parents[2]
    target = root / "tests" / "test_acceptance.py"
    if not target.exists():
        print(f"acceptance suite not found at {target}", file=sys.stderr)
        return 2
    return subprocess.call([sys.executable, "-m", "pytest", "-s", "-q", str(target), *extra], cwd=root)


SHORTCUTS = {"delta": float, "case": str}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skyrmech", description=__doc__)
    p.add_argument("--version", action="version", version=f"skyrmech {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a named scenario")
    run.add_argument("scenario", choices=sorted(scenarios.SCENARIOS))
    sw = sub.add_parser("sweep", help="sweep one numeric config key")
    sw.add_argument("scenario", choices=sorted(scenarios.POINTS))
    sw.add_argument("--axis", required=True, help="section.key")
    sw.add_argument("--values", required=True, help="a:b:n or comma list")
    for sp_ in (run, sw):
        sp_.add_argument("--config", help="TOML file overlaid on the defaults")
        sp_.add_argument("--set", dest="sets", action="append", default=[], metavar="SECTION.KEY=VALUE")
        sp_.add_argument("--out", default="out", help="output directory")
        sp_.add_argument("--delta", type=float, help="shortcut for <scenario>.delta")
        sp_.add_argument("--case", help="shortcut for <scenario>.case")

    ck = sub.add_parser("check", help="run the acceptance suite")
    ck.add_argument("pytest_args", nargs=argparse.REMAINDER)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "check":
        return check(args.pytest_args)
    sets = list(args.sets)
    for name in SHORTCUTS:
        value = getattr(args, name)
        if value is not None:
            sets.append(f"{args.scenario}.{name}={json.dumps(value)}")
    try:
        config = ScenarioConfig.build(args.scenario, args.config, sets, args.out)
        if args.command == "run":
            manifest = run_scenario(config)
        else:
            manifest = sweep(config, args.axis, parse_values(args.values))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ScenarioFailure as exc:
        print(f"scenario failed: {exc}", file=sys.stderr)
        return 1
    for name in sorted(manifest.files):
        print(config.out_dir / name)
    log.info("wall time %.3f s", manifest.wall_time_s)
    return 0


if __name__ == "__main__":
    sys.exit(main())
