"""Scenario files: flat ``key = value`` lines, ``#`` comments, dotted keys for blocks.

Example::

    qubits = 4
    state = ghz               # basis | uniform | ghz | custom | encoded
    channel = collective      # collective | independent
    bath.model = ohmic        # ohmic | discrete
    bath.epsilon = 0.1
    bath.omega_c = 1.0
    bath.temperature = 2.0
    time.stop = 10
    time.count = 101
    output = ghz4.csv

See ``KEYS`` for the full list.  Every default is written back into the
resolved scenario (``Scenario.echo``) so CSV headers record all inputs.
"""

from __future__ import annotations

import math
import os
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import bath as _bath
from .errors import ConfigError, DephasingError
from .oracle import TruncatedBath, recommended_fock_cutoff
from .register import PureState, format_config, parse_config_string

KEYS = {
    "qubits": "register size L (logical size for encoded states)",
    "state": "basis | uniform | ghz | custom | encoded",
    "state.config": "configuration for basis states, e.g. +-+",
    "state.file": "amplitude file for custom states (rows: configuration, real, imag)",
    "state.inner": "inner family for encoded states: basis | uniform | ghz | custom",
    "channel": "collective | independent",
    "bath.model": "ohmic | discrete",
    "bath.epsilon": "ohmic coupling amplitude",
    "bath.omega_c": "ohmic cutoff frequency",
    "bath.cutoff": "hard | exponential",
    "bath.modes": "discrete modes as kappa:omega, comma separated",
    "bath.temperature": "bath temperature",
    "time.start": "first time point",
    "time.stop": "last time point",
    "time.count": "number of time points",
    "time.spacing": "linear | log",
    "output": "CSV output path",
    "oracle.modes": "oracle modes as kappa:omega (default: bath.modes)",
    "oracle.num_modes": "modes for discretizing an ohmic bath for the oracle",
    "oracle.fock_cutoff": "Fock truncation N_max per mode",
    "oracle.samples": "Monte Carlo samples for T > 0",
    "oracle.seed": "Monte Carlo seed",
    "oracle.threshold": "absolute deviation threshold (default 1e-6 vacuum, 3 standard errors thermal)",
}

FAMILIES = ("basis", "uniform", "ghz", "custom", "encoded")


@dataclass(frozen=True)
class OracleBlock:
    bath: TruncatedBath
    samples: int
    seed: int
    threshold: Optional[float]


@dataclass(frozen=True)
class Scenario:
    qubits: int
    state: str
    state_config: Optional[str]
    state_file: Optional[Path]
    state_inner: Optional[str]
    channel: str
    bath: _bath.BathSpec
    times: np.ndarray
    output: Optional[Path]
    oracle: Optional[OracleBlock]
    echo: Tuple[Tuple[str, str], ...]

    @property
    def physical_qubits(self) -> int:
        return 2 * self.qubits if self.state == "encoded" else self.qubits


def parse_lines(text: str) -> Dict[str, Tuple[str, int]]:
    """``{key: (value, line_number)}``; rejects duplicates, unknown keys, bad syntax."""
    entries: Dict[str, Tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first on line {entries[key][1]})")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        entries[key] = (value, lineno)
    return entries


class _Reader:
    def __init__(self, entries):
        self.entries = entries
        self.echo: List[Tuple[str, str]] = []

    def _where(self, key):
        return f"line {self.entries[key][1]}" if key in self.entries else "default"

    def raw(self, key, default=None, required=False) -> Optional[str]:
        if key in self.entries:
            return self.entries[key][0]
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default

    def get(self, key, conv, default=None, required=False):
        text = self.raw(key, default, required)
        if text is None:
            return None
        try:
            value = conv(text) if isinstance(text, str) else text
        except (ValueError, DephasingError) as exc:
            raise ConfigError(f"{self._where(key)}: bad value for {key!r}: {exc}") from exc
        self.echo.append((key, _fmt(value)))
        return value

    def choice(self, key, options, default=None, required=False):
        value = self.get(key, str, default, required)
        if value is not None and value not in options:
            raise ConfigError(f"{self._where(key)}: {key!r} must be one of {', '.join(options)}, got {value!r}")
        return value


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, tuple):
        return ", ".join(f"{format(k, '.17g')}:{format(w, '.17g')}" for k, w in value)
    return str(value)


def parse_modes(text: str) -> Tuple[Tuple[float, float], ...]:
    modes = []
    for item in text.split(","):
        item = item.strip()
        if ":" not in item:
            raise ValueError(f"mode {item!r} is not kappa:omega")
        k, w = item.split(":", 1)
        modes.append((float(k), float(w)))
    _bath.DiscreteSpectrum(tuple(modes))
    return tuple(modes)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise ValueError("must be a positive integer")
    return value


def _finite(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


def time_grid(start: float, stop: float, count: int, spacing: str) -> np.ndarray:
    if count < 1:
        raise ConfigError("time grid is empty (time.count must be >= 1)")
    if start < 0:
        raise ConfigError("time.start must be >= 0")
    if count == 1:
        return np.array([start], dtype=float)
    if stop <= start:
        raise ConfigError("time.stop must exceed time.start")
    if spacing == "log":
        if start <= 0:
            raise ConfigError("log spacing needs time.start > 0")
        grid = np.geomspace(start, stop, count)
    else:
        grid = np.linspace(start, stop, count)
    if np.any(np.diff(grid) <= 0):
        raise ConfigError("time grid is not strictly increasing")
    return grid


def load_scenario(path: Path | str, seed_override: Optional[int] = None) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_scenario(text, base_dir=path.parent, seed_override=seed_override)


def parse_scenario(text: str, base_dir: Path | str = ".",
                   seed_override: Optional[int] = None) -> Scenario:
    base_dir = Path(base_dir)
    r = _Reader(parse_lines(text))
    qubits = r.get("qubits", _positive_int, required=True)
    state = r.choice("state", FAMILIES, required=True)
    inner = None
    family = state
    if state == "encoded":
        inner = r.choice("state.inner", FAMILIES[:-1], required=True)
        family = inner
    config = r.get("state.config", str, required=family == "basis")
    if config is not None:
        try:
            labels = parse_config_string(config)
        except DephasingError as exc:
            raise ConfigError(f"state.config: {exc}") from exc
        if len(labels) != qubits:
            raise ConfigError(f"state.config has {len(labels)} labels but qubits = {qubits}")
    state_file = r.get("state.file", str, required=family == "custom")
    if state_file is not None:
        state_file = (base_dir / state_file) if not Path(state_file).is_absolute() else Path(state_file)
    channel = r.choice("channel", ("collective", "independent"), default="collective")

    model = r.choice("bath.model", ("ohmic", "discrete"), required=True)
    temperature = r.get("bath.temperature", _finite, default=0.0)
    try:
        if model == "ohmic":
            spectral = _bath.OhmicSpectrum(
                r.get("bath.epsilon", _finite, required=True),
                r.get("bath.omega_c", _finite, required=True),
                r.choice("bath.cutoff", ("hard", "exponential"), default="hard"))
        else:
            spectral = _bath.DiscreteSpectrum(r.get("bath.modes", parse_modes, required=True))
        bath = _bath.BathSpec(spectral, temperature)
    except DephasingError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bath: {exc}") from exc

    times = time_grid(r.get("time.start", _finite, default=0.0),
                      r.get("time.stop", _finite, default=0.0),
                      r.get("time.count", int, required=True),
                      r.choice("time.spacing", ("linear", "log"), default="linear"))
    output = r.get("output", str)
    if output is not None:
        output = Path(output) if Path(output).is_absolute() else base_dir / output

    oracle = None
    if any(k.startswith("oracle.") for k in r.entries):
        oracle = _oracle_block(r, bath, qubits if state != "encoded" else 2 * qubits, seed_override)
    return Scenario(qubits, state, config, state_file, inner, channel, bath, times,
                    output, oracle, tuple(r.echo))


def _oracle_block(r: _Reader, bath: _bath.BathSpec, physical: int,
                  seed_override: Optional[int]) -> OracleBlock:
    modes = r.get("oracle.modes", parse_modes)
    if modes is None:
        if isinstance(bath.spectral, _bath.DiscreteSpectrum):
            modes = bath.spectral.modes
            r.echo.append(("oracle.modes", _fmt(modes)))
        else:
            n = r.get("oracle.num_modes", _positive_int, required=True)
            modes = _bath.discretize(bath, n).spectral.modes
    cutoff = r.get("oracle.fock_cutoff", _positive_int,
                   default=recommended_fock_cutoff(physical, modes))
    samples = r.get("oracle.samples", _positive_int, default=10000)
    seed = r.get("oracle.seed", int, default=0)
    if seed_override is not None:
        seed = seed_override
        r.echo = [(k, v) for k, v in r.echo if k != "oracle.seed"] + [("oracle.seed", str(seed))]
    threshold = r.get("oracle.threshold", _finite)
    try:
        tb = TruncatedBath(modes, cutoff)
    except DephasingError as exc:
        raise ConfigError(f"oracle: {exc}") from exc
    return OracleBlock(tb, samples, seed, threshold)


def read_amplitude_file(path: Path | str, normalize: bool = True) -> PureState:
    """Rows ``configuration, real, imag``; ``#`` comments and blank lines ignored."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    amps: Dict[Tuple[int, ...], complex] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise ConfigError(f"{path}:{lineno}: expected 'configuration, real, imag'")
        try:
            config = parse_config_string(parts[0])
            value = complex(float(parts[1]), float(parts[2]))
        except (ValueError, DephasingError) as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
        if config in amps:
            raise ConfigError(f"{path}:{lineno}: duplicate configuration {parts[0]}")
        amps[config] = value
    if not amps:
        raise ConfigError(f"{path}: no amplitudes")
    if len({len(k) for k in amps}) != 1:
        raise ConfigError(f"{path}: configurations have different lengths")
    norm = math.sqrt(sum(abs(v) ** 2 for v in amps.values()))
    if norm == 0:
        raise ConfigError(f"{path}: all amplitudes are zero")
    if abs(norm - 1.0) > 1e-6:
        if not normalize:
            raise ConfigError(f"{path}: state norm is {norm!r}")
        warnings.warn(f"{path}: input norm {norm:.9g} differs from 1; renormalizing", stacklevel=2)
    try:
        return PureState.from_mapping({k: v / norm for k, v in amps.items()})
    except DephasingError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def write_amplitude_file(path: Path | str, psi: PureState, header: str = "") -> None:
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    lines.append("# configuration, real, imag")
    for config, amp in psi.support().items():
        lines.append(f"{format_config(config)}, {format(amp.real, '.17g')}, {format(amp.imag, '.17g')}")
    atomic_write(Path(path), "\n".join(lines) + "\n")


def atomic_write(path: Path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
