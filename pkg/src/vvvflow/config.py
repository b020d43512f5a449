"""Run configuration: a flat key = value grammar with strict validation.

Grammar: UTF-8 text, one `key = value` per line, `#` starts a comment,
blank lines ignored. `[section]` headers group keys into model, grid, time
and output (a sweep plan adds [sweep]). Keys are globally unique; a key may
appear either at top level or inside its canonical section, anywhere else
it is an unknown key. Unknown keys, unknown sections, duplicates and type
or constraint violations are hard errors carrying line numbers; convergence
studies are too sensitive to silently ignored settings for lenient parsing.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields as dc_fields

from .errors import ConfigError
from .models import (
    SchemeConfig,
    init_taylor_green,
    perturbed_divergence_w0,
    random_smooth_velocity,
)
from .operators import Forcing, ModelParams, cosine_modulation
from .spectral import GridSpec, SpectralVectorField, curl, make_grid, set_fft_workers


@dataclass(frozen=True)
class RunConfig:
    model: str
    n: int
    dt: float
    t_end: float
    nu: float = 1.0
    alpha: float = 0.1
    forcing: str = "none"
    forcing_omega: float = 0.0
    u0: str = "taylor-green"
    u0_seed: int | None = None
    u0_modes: int = 2
    u0_amplitude: float = 1.0
    w0: str = "curl-of-u0"
    w0_seed: int | None = None
    w0_modes: int = 1
    w0_amplitude: float = 1.0
    scheme: str = "cnab2"
    output_dir: str = "out"
    diag_every: int = 1
    snapshot_every: int = 0
    threads: int = 1
    write_pressure: bool = False


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got '{text}'")


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"expected an integer, got '{text}'") from None


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"expected a number, got '{text}'") from None


# key -> (section, parser, required)
_KEYS = {
    "model": ("model", str, True),
    "nu": ("model", _parse_float, False),
    "alpha": ("model", _parse_float, False),
    "forcing": ("model", str, False),
    "forcing_omega": ("model", _parse_float, False),
    "n": ("grid", _parse_int, True),
    "u0": ("grid", str, False),
    "u0_seed": ("grid", _parse_int, False),
    "u0_modes": ("grid", _parse_int, False),
    "u0_amplitude": ("grid", _parse_float, False),
    "w0": ("grid", str, False),
    "w0_seed": ("grid", _parse_int, False),
    "w0_modes": ("grid", _parse_int, False),
    "w0_amplitude": ("grid", _parse_float, False),
    "dt": ("time", _parse_float, True),
    "t_end": ("time", _parse_float, True),
    "scheme": ("time", str, False),
    "output_dir": ("output", str, False),
    "diag_every": ("output", _parse_int, False),
    "snapshot_every": ("output", _parse_int, False),
    "threads": ("output", _parse_int, False),
    "write_pressure": ("output", _parse_bool, False),
}

_SECTIONS = ("model", "grid", "time", "output")


def _scan(text: str, extra_keys=None, extra_sections=()):
    """Tokenize key = value lines; returns {key: (value, line)}."""
    keys = dict(_KEYS)
    if extra_keys:
        keys.update(extra_keys)
    sections = _SECTIONS + tuple(extra_sections)
    seen: dict[str, tuple[str, int]] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in sections:
                raise ConfigError(f"line {lineno}: unknown section '[{section}]'")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got '{line}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in keys:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        canonical = keys[key][0]
        if section is not None and section != canonical:
            raise ConfigError(
                f"line {lineno}: key '{key}' belongs in section "
                f"'[{canonical}]', found in '[{section}]'")
        if key in seen:
            raise ConfigError(
                f"line {lineno}: duplicate key '{key}' "
                f"(first set at line {seen[key][1]})")
        seen[key] = (value, lineno)
    return seen, keys


def _typed(seen, keys):
    values = {}
    for key, (raw, lineno) in seen.items():
        _, parser, _ = keys[key]
        try:
            values[key] = parser(raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: key '{key}': {exc}") from None
    for key, (_, _, required) in keys.items():
        if required and key not in values:
            raise ConfigError(f"missing required key '{key}'")
    return values


def _line_of(seen, key) -> str:
    return f"line {seen[key][1]}: " if key in seen else ""


def _validate(cfg: RunConfig, seen) -> None:
    def fail(key, message):
        raise ConfigError(f"{_line_of(seen, key)}{message}")

    if cfg.model not in ("vvv", "nse"):
        fail("model", f"model must be 'vvv' or 'nse', got '{cfg.model}'")
    if cfg.n % 2 != 0 or cfg.n < 8:
        fail("n", f"n must be even and >= 8, got {cfg.n}")
    if not cfg.nu > 0.0:
        fail("nu", f"nu must be > 0, got {cfg.nu}")
    if cfg.alpha < 0.0:
        fail("alpha", f"alpha must be >= 0, got {cfg.alpha}")
    if not cfg.dt > 0.0:
        fail("dt", f"dt must be > 0, got {cfg.dt}")
    if cfg.t_end < 0.0:
        fail("t_end", f"t_end must be >= 0, got {cfg.t_end}")
    if cfg.scheme != "cnab2":
        fail("scheme", f"unknown scheme '{cfg.scheme}'")
    if cfg.diag_every < 1:
        fail("diag_every", "diag_every must be >= 1")
    if cfg.snapshot_every < 0:
        fail("snapshot_every", "snapshot_every must be >= 0")
    if cfg.threads < 0:
        fail("threads", "threads must be >= 0 (0 = auto)")
    if cfg.u0_modes < 1:
        fail("u0_modes", "u0_modes must be >= 1")
    if cfg.w0_modes < 1:
        fail("w0_modes", "w0_modes must be >= 1")
    if not cfg.u0_amplitude > 0.0:
        fail("u0_amplitude", "u0_amplitude must be > 0")
    if not cfg.w0_amplitude > 0.0:
        fail("w0_amplitude", "w0_amplitude must be > 0")

    _validate_selector(cfg.u0, "u0", ("taylor-green", "random-smooth"), seen)
    if cfg.u0 == "random-smooth" and cfg.u0_seed is None:
        fail("u0", "u0 = random-smooth requires u0_seed (reproducibility)")
    _validate_selector(cfg.w0, "w0", ("curl-of-u0", "perturbed-divergence"), seen)
    if cfg.w0 == "perturbed-divergence" and cfg.w0_seed is None:
        fail("w0", "w0 = perturbed-divergence requires w0_seed (reproducibility)")
    _validate_selector(cfg.forcing, "forcing", ("none",), seen)


def _validate_selector(value: str, key: str, literals, seen) -> None:
    if value in literals:
        return
    if value.startswith("snapshot:"):
        path = value[len("snapshot:"):]
        if not os.path.exists(path):
            raise ConfigError(
                f"{_line_of(seen, key)}{key} snapshot path '{path}' does not exist")
        return
    raise ConfigError(
        f"{_line_of(seen, key)}invalid {key} selector '{value}' "
        f"(expected one of {literals} or snapshot:<path>)")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a run configuration; see the module docstring."""
    seen, keys = _scan(text)
    values = _typed(seen, keys)
    cfg = RunConfig(**values)
    _validate(cfg, seen)
    return cfg


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


# ---------------------------------------------------------------------------
# Turning a RunConfig into solver inputs


@dataclass(frozen=True)
class RunSetup:
    grid: GridSpec
    u0: SpectralVectorField
    w0: SpectralVectorField | None
    params: ModelParams
    scheme: SchemeConfig


def realize(cfg: RunConfig) -> RunSetup:
    """Build grid, initial data, parameters and scheme from a parsed config."""
    from .snapshots import read_snapshot

    set_fft_workers(cfg.threads if cfg.threads > 0 else 0)
    grid = make_grid(cfg.n)

    if cfg.u0 == "taylor-green":
        u0 = init_taylor_green(grid, amplitude=cfg.u0_amplitude)
    elif cfg.u0 == "random-smooth":
        u0 = random_smooth_velocity(grid, seed=cfg.u0_seed, modes=cfg.u0_modes,
                                    amplitude=cfg.u0_amplitude)
    else:
        u0 = read_snapshot(cfg.u0[len("snapshot:"):], grid).u

    w0: SpectralVectorField | None
    if cfg.model == "nse":
        w0 = None
    elif cfg.w0 == "curl-of-u0":
        w0 = curl(u0)
    elif cfg.w0 == "perturbed-divergence":
        w0 = perturbed_divergence_w0(grid, u0, seed=cfg.w0_seed,
                                     amplitude=cfg.w0_amplitude,
                                     shell=cfg.w0_modes)
    else:
        data = read_snapshot(cfg.w0[len("snapshot:"):], grid)
        w0 = data.w if data.w is not None else data.u

    forcing = None
    if cfg.forcing != "none":
        field = read_snapshot(cfg.forcing[len("snapshot:"):], grid).u
        modulation = cosine_modulation(cfg.forcing_omega) if cfg.forcing_omega else None
        forcing = Forcing(field, modulation=modulation)

    params = ModelParams(nu=cfg.nu, alpha=cfg.alpha, forcing=forcing)
    scheme = SchemeConfig(dt=cfg.dt, t_end=cfg.t_end, scheme=cfg.scheme,
                          diag_every=cfg.diag_every,
                          snapshot_every=cfg.snapshot_every)
    return RunSetup(grid=grid, u0=u0, w0=w0, params=params, scheme=scheme)


# ---------------------------------------------------------------------------
# Sweep plans


_SWEEP_KEYS = {
    "kind": ("sweep", str, True),
    "values": ("sweep", str, True),
    "reference": ("sweep", str, False),
    "compare_every": ("sweep", _parse_int, False),
    "order_min": ("sweep", _parse_float, False),
    "order_max": ("sweep", _parse_float, False),
}

SWEEP_KINDS = ("curl-mismatch", "nse-deviation", "dt-energy")


@dataclass(frozen=True)
class SweepSettings:
    kind: str
    values: tuple[float, ...]
    reference: str | None
    compare_every: int
    order_min: float | None
    order_max: float | None
    run: RunConfig


def parse_sweep_plan(text: str) -> SweepSettings:
    """Parse a sweep plan: the run grammar plus a [sweep] section."""
    seen, keys = _scan(text, extra_keys=_SWEEP_KEYS, extra_sections=("sweep",))
    values = _typed(seen, keys)
    sweep_values = {k: values.pop(k) for k in _SWEEP_KEYS if k in values}
    run_cfg = RunConfig(**values)
    _validate(run_cfg, seen)

    kind = sweep_values.get("kind")
    if kind not in SWEEP_KINDS:
        raise ConfigError(
            f"{_line_of(seen, 'kind')}sweep kind must be one of {SWEEP_KINDS}, "
            f"got '{kind}'")
    try:
        parsed_values = tuple(float(v) for v in sweep_values["values"].split(","))
    except ValueError:
        raise ConfigError(f"{_line_of(seen, 'values')}values must be a "
                          "comma-separated list of numbers") from None
    return SweepSettings(
        kind=kind,
        values=parsed_values,
        reference=sweep_values.get("reference"),
        compare_every=sweep_values.get("compare_every", 10),
        order_min=sweep_values.get("order_min"),
        order_max=sweep_values.get("order_max"),
        run=run_cfg,
    )
