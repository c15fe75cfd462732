"""Run configuration: the line-oriented key/value format and its dataclasses.

The grammar is documented in docs/solver-design.md. In short: `key = value` lines, `#` comments, and repeated
`layer` ... `end` blocks. Floats are written back with repr so that parse -> serialize -> parse is the identity.
"""

from __future__ import annotations
import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, cast, get_args

import numpy as np
from numpy.typing import NDArray

from .benchmarks import Benchmark
from .errors import ConfigError, InvalidEnvironmentError
from .kspace import Normalization
from .reference import PEAK_THRESHOLD
from .waveguide_model import (
    BottomCondition,
    ConstantProfile,
    Environment,
    Layer,
    MunkProfile,
    Profile,
    PseudolinearProfile,
    SourceSpec,
    TabulatedProfile,
)


__all__ = [
    "Product",
    "WavenumberSpec",
    "OutputSpec",
    "RunConfig",
    "parse_config",
    "serialize_config",
    "load_config",
    "preset_config",
    "config_digest",
    "DEFAULT_SPECTRAL_ORDER",
]

logger = logging.getLogger(__name__)

Product = Literal["spectrum", "tl_grid", "tl_line"]

DEFAULT_SPECTRAL_ORDER: int = 10

_GLOBAL_KEYS = frozenset(
    {
        "frequency",
        "source_depth",
        "geometry",
        "bottom",
        "halfspace",
        "spectral_order",
        "k_min",
        "k_max",
        "samples",
        "ranges",
        "depths",
        "depth_values",
        "probe_depths",
        "products",
        "normalization",
        "tl_binary",
        "peak_threshold",
    }
)
_LAYER_KEYS = frozenset({"top", "bottom", "c", "rho", "alpha", "order"})
_BOTTOM_KINDS = ("pressure_release", "rigid", "halfspace")


@dataclass(frozen=True, slots=True)
class WavenumberSpec:
    """Wavenumber sampling request.

    Attributes:
        k_min (float): Lower end of the interval [1/m].
        k_max (float | None): Upper end [1/m], or None for 2 k0 with k0 = omega / min c.
        samples (int): Sample count M.
    """
    k_min: float = 0.0
    k_max: float | None = None
    samples: int = 2048


@dataclass(frozen=True, slots=True)
class OutputSpec:
    """Receiver grid and requested products.

    Attributes:
        ranges (tuple[float, float, int]): (r_min, r_max, nr) of the uniform range grid [m].
        depths (tuple[float, float, int] | None): (z_min, z_max, nz) of a uniform depth grid [m].
        depth_values (tuple[float, ...] | None): Explicit depths, used instead of `depths`.
        probe_depths (tuple[float, ...]): Depths of the spectrum and TL-line products [m].
        products (tuple[Product, ...]): Requested output products.
        tl_binary (bool): Also write the TL grid as flat binary.
        peak_threshold (float): Spectrum peak threshold as a fraction of the largest peak, in (0, 1].
    """
    ranges: tuple[float, float, int]
    depths: tuple[float, float, int] | None = None
    depth_values: tuple[float, ...] | None = None
    probe_depths: tuple[float, ...] = ()
    products: tuple[Product, ...] = ("spectrum", "tl_grid", "tl_line")
    tl_binary: bool = False
    peak_threshold: float = PEAK_THRESHOLD

    def range_grid(self) -> NDArray[np.float64]:
        r_min, r_max, nr = self.ranges
        return np.linspace(r_min, r_max, nr)

    def depth_grid(self) -> NDArray[np.float64]:
        if self.depth_values is not None:
            return np.asarray(self.depth_values, dtype=np.float64)
        assert self.depths is not None
        z_min, z_max, nz = self.depths
        return np.linspace(z_min, z_max, nz)


@dataclass(frozen=True, slots=True)
class RunConfig:
    """A complete run request.

    Attributes:
        environment (Environment): Waveguide and source.
        wavenumbers (WavenumberSpec): Wavenumber sampling.
        output (OutputSpec): Receivers and products.
        normalization (Normalization): Reference pressure variant.
        spectral_order (int): Default per-layer truncation order.
    """
    environment: Environment
    wavenumbers: WavenumberSpec
    output: OutputSpec
    normalization: Normalization = "standard"
    spectral_order: int = DEFAULT_SPECTRAL_ORDER


@dataclass
class _LayerBlock:
    start_line: int
    values: dict[str, tuple[str, int]] = field(default_factory=dict)


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _float(key: str, text: str, line: int | None) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {text!r}", line) from None
    if not np.isfinite(value):
        raise ConfigError(key, f"expected a finite number, got {text!r}", line)
    return value


def _int(key: str, text: str, line: int | None) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {text!r}", line) from None


def _floats(key: str, text: str, line: int | None) -> tuple[float, ...]:
    return tuple(_float(key, part, line) for part in text.split())


def _triple(key: str, text: str, line: int | None) -> tuple[float, float, int]:
    parts = text.split()
    if len(parts) != 3:
        raise ConfigError(key, f"expected 'min max count', got {text!r}", line)
    low, high, count = _float(key, parts[0], line), _float(key, parts[1], line), _int(key, parts[2], line)
    if count < 1:
        raise ConfigError(key, f"count must be >= 1, got {count}", line)
    if high < low or (count > 1 and high == low):
        raise ConfigError(key, f"needs min < max, got {low} {high}", line)
    return low, high, count


def _parse_profile(key: str, text: str, line: int | None) -> Profile:
    parts = text.split()
    if not parts:
        raise ConfigError(key, "empty profile", line)
    kind, args = parts[0], parts[1:]
    if kind == "constant" and len(args) == 1:
        return ConstantProfile(_float(key, args[0], line))
    if kind == "table" and args:
        depths: list[float] = []
        values: list[float] = []
        for pair in args:
            z, sep, v = pair.partition(":")
            if not sep:
                raise ConfigError(key, f"table entries must be depth:value, got {pair!r}", line)
            depths.append(_float(key, z, line))
            values.append(_float(key, v, line))
        try:
            return TabulatedProfile(tuple(depths), tuple(values))
        except InvalidEnvironmentError as exc:
            raise ConfigError(key, str(exc), line) from exc
    if kind == "munk" and len(args) in (0, 4):
        return MunkProfile(*(_float(key, a, line) for a in args))
    if kind == "pseudolinear" and len(args) == 2:
        return PseudolinearProfile(_float(key, args[0], line), _float(key, args[1], line))
    raise ConfigError(
        key, f"profile must be 'constant V', 'table z:v ...', 'munk [C Z S EPS]' or 'pseudolinear A B', got {text!r}", line
    )


def _serialize_profile(profile: Profile) -> str:
    if isinstance(profile, ConstantProfile):
        return f"constant {profile.value!r}"
    if isinstance(profile, TabulatedProfile):
        pairs = " ".join(f"{z!r}:{v!r}" for z, v in zip(profile.depths, profile.values, strict=True))
        return f"table {pairs}"
    if isinstance(profile, MunkProfile):
        return f"munk {profile.c_axis!r} {profile.z_axis!r} {profile.scale!r} {profile.epsilon!r}"
    return f"pseudolinear {profile.a!r} {profile.b!r}"


def _build_layer(block: _LayerBlock, default_order: int) -> Layer:
    def get(key: str, default: str | None = None) -> tuple[str, int | None]:
        if key in block.values:
            text, line = block.values[key]
            return text, line
        if default is None:
            raise ConfigError(f"layer.{key}", "required in every layer block", block.start_line)
        return default, block.start_line

    top, top_line = get("top")
    bot, bot_line = get("bottom")
    c_text, c_line = get("c")
    rho_text, rho_line = get("rho", "constant 1.0")
    alpha_text, alpha_line = get("alpha", "constant 0.0")
    order_text, order_line = get("order", str(default_order))
    try:
        return Layer(
            z_top=_float("layer.top", top, top_line),
            z_bot=_float("layer.bottom", bot, bot_line),
            c=_parse_profile("layer.c", c_text, c_line),
            rho=_parse_profile("layer.rho", rho_text, rho_line),
            alpha=_parse_profile("layer.alpha", alpha_text, alpha_line),
            order=_int("layer.order", order_text, order_line),
        )
    except InvalidEnvironmentError as exc:
        raise ConfigError("layer", str(exc), block.start_line) from exc


def _split_pairs(text: str) -> tuple[dict[str, tuple[str, int]], list[_LayerBlock]]:
    globals_: dict[str, tuple[str, int]] = {}
    blocks: list[_LayerBlock] = []
    current: _LayerBlock | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if line == "layer":
            if current is not None:
                raise ConfigError("layer", "nested layer block (missing 'end')", number)
            current = _LayerBlock(number)
            continue
        if line == "end":
            if current is None:
                raise ConfigError("end", "'end' without an open layer block", number)
            blocks.append(current)
            current = None
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(line, "expected 'key = value'", number)
        target, allowed = (current.values, _LAYER_KEYS) if current is not None else (globals_, _GLOBAL_KEYS)
        if key not in allowed:
            scope = "layer block" if current is not None else "configuration"
            raise ConfigError(key, f"unknown key in {scope}", number)
        if key in target:
            raise ConfigError(key, "given more than once", number)
        target[key] = (value, number)
    if current is not None:
        raise ConfigError("layer", "block not closed with 'end'", current.start_line)
    return globals_, blocks


def _choice(key: str, text: str, line: int | None, choices: tuple[str, ...]) -> str:
    if text not in choices:
        raise ConfigError(key, f"must be one of {', '.join(choices)}, got {text!r}", line)
    return text


def _check_depths(key: str, depths: tuple[float, ...], h: float, line: int | None) -> None:
    for z in depths:
        if z < 0.0 or z > h:
            raise ConfigError(key, f"depth {z} outside [0, {h}]", line)


def parse_config(text: str) -> RunConfig:
    """Parse a run configuration.

    Raises:
        ConfigError: On syntax errors, unknown or duplicate keys, and violated constraints; the message names the
            offending key and its line.
    """
    values, blocks = _split_pairs(text)

    def raw(key: str) -> tuple[str, int] | None:
        return values.get(key)

    def required(key: str) -> tuple[str, int]:
        item = values.get(key)
        if item is None:
            raise ConfigError(key, "required")
        return item

    order_item = raw("spectral_order")
    order = _int("spectral_order", *order_item) if order_item else DEFAULT_SPECTRAL_ORDER
    if not blocks:
        raise ConfigError("layer", "at least one layer block is required")
    layers = tuple(_build_layer(block, order) for block in blocks)
    h = layers[-1].z_bot

    frequency = _float("frequency", *required("frequency"))
    if frequency <= 0.0:
        raise ConfigError("frequency", f"must be positive, got {frequency}", required("frequency")[1])
    z_s_text, z_s_line = required("source_depth")
    z_s = _float("source_depth", z_s_text, z_s_line)
    if not (0.0 < z_s < h):
        raise ConfigError("source_depth", f"must satisfy 0 < z_s < H={h}, got {z_s}", z_s_line)
    geometry_item = raw("geometry") or ("point", None)
    geometry = _choice("geometry", geometry_item[0], geometry_item[1], ("point", "line"))

    bottom_item = raw("bottom") or ("pressure_release", None)
    bottom_kind = _choice("bottom", bottom_item[0], bottom_item[1], _BOTTOM_KINDS)
    half_item = raw("halfspace")
    if bottom_kind == "halfspace":
        if half_item is None:
            raise ConfigError("halfspace", "required when bottom = halfspace", bottom_item[1])
        params = _floats("halfspace", *half_item)
        if len(params) != 3:
            raise ConfigError("halfspace", f"expected 'c rho alpha', got {half_item[0]!r}", half_item[1])
        try:
            bottom = BottomCondition("halfspace", *params)
        except InvalidEnvironmentError as exc:
            raise ConfigError("halfspace", str(exc), half_item[1]) from exc
    else:
        if half_item is not None:
            raise ConfigError("halfspace", "only valid with bottom = halfspace", half_item[1])
        bottom = BottomCondition(cast(Literal["pressure_release", "rigid"], bottom_kind))

    try:
        env = Environment(layers, bottom, SourceSpec(cast(Literal["point", "line"], geometry), z_s, frequency))
    except InvalidEnvironmentError as exc:
        raise ConfigError("layer", str(exc)) from exc

    k_min_item = raw("k_min")
    k_min = _float("k_min", *k_min_item) if k_min_item else 0.0
    k_max_item = raw("k_max")
    k_max = None if k_max_item is None or k_max_item[0] == "auto" else _float("k_max", *k_max_item)
    samples_item = raw("samples")
    samples = _int("samples", *samples_item) if samples_item else 2048
    if k_min < 0.0:
        raise ConfigError("k_min", f"must be >= 0, got {k_min}", k_min_item[1] if k_min_item else None)
    if k_max is not None and k_max <= k_min:
        raise ConfigError("k_max", f"must exceed k_min={k_min}, got {k_max}", k_max_item[1] if k_max_item else None)
    if samples < 2:
        raise ConfigError("samples", f"must be >= 2, got {samples}", samples_item[1] if samples_item else None)

    ranges_text, ranges_line = required("ranges")
    ranges = _triple("ranges", ranges_text, ranges_line)
    if ranges[0] < 1.0:
        raise ConfigError("ranges", f"r_min must be >= 1 m, got {ranges[0]}", ranges_line)
    depths_item, values_item = raw("depths"), raw("depth_values")
    if (depths_item is None) == (values_item is None):
        raise ConfigError("depths", "give exactly one of 'depths' or 'depth_values'")
    depths = _triple("depths", *depths_item) if depths_item else None
    depth_values = _floats("depth_values", *values_item) if values_item else None
    if depths is not None:
        _check_depths("depths", depths[:2], h, depths_item[1] if depths_item else None)
    if depth_values is not None:
        if not depth_values:
            raise ConfigError("depth_values", "needs at least one depth", values_item[1] if values_item else None)
        _check_depths("depth_values", depth_values, h, values_item[1] if values_item else None)

    products_item = raw("products")
    products: tuple[Product, ...] = ("spectrum", "tl_grid", "tl_line")
    if products_item is not None:
        names = products_item[0].split()
        for name in names:
            _choice("products", name, products_item[1], get_args(Product))
        if not names:
            raise ConfigError("products", "at least one product is required", products_item[1])
        products = tuple(cast(Product, name) for name in dict.fromkeys(names))
    probe_item = raw("probe_depths")
    probes = _floats("probe_depths", *probe_item) if probe_item else ()
    _check_depths("probe_depths", probes, h, probe_item[1] if probe_item else None)
    if not probes and ("spectrum" in products or "tl_line" in products):
        raise ConfigError("probe_depths", "required for the spectrum and tl_line products")

    norm_item = raw("normalization") or ("standard", None)
    normalization = _choice("normalization", norm_item[0], norm_item[1], get_args(Normalization))
    if normalization != "standard" and geometry != "line":
        raise ConfigError("normalization", f"{normalization!r} applies to line sources only", norm_item[1])
    binary_item = raw("tl_binary") or ("false", None)
    tl_binary = _choice("tl_binary", binary_item[0], binary_item[1], ("true", "false")) == "true"
    threshold_item = raw("peak_threshold")
    peak_threshold = _float("peak_threshold", *threshold_item) if threshold_item else PEAK_THRESHOLD
    if not (0.0 < peak_threshold <= 1.0):
        line = threshold_item[1] if threshold_item else None
        raise ConfigError("peak_threshold", f"must lie in (0, 1], got {peak_threshold}", line)

    output = OutputSpec(
        ranges=ranges,
        depths=depths,
        depth_values=depth_values,
        probe_depths=probes,
        products=products,
        tl_binary=tl_binary,
        peak_threshold=peak_threshold,
    )
    logger.debug("parsed configuration: %d layers, H=%.6g m, M=%d", len(layers), h, samples)
    return RunConfig(
        environment=env,
        wavenumbers=WavenumberSpec(k_min=k_min, k_max=k_max, samples=samples),
        output=output,
        normalization=cast(Normalization, normalization),
        spectral_order=order,
    )


def serialize_config(config: RunConfig) -> str:
    """Render a RunConfig in the text format accepted by parse_config."""
    env = config.environment
    out = config.output
    wk = config.wavenumbers
    lines = [
        f"frequency = {env.source.frequency!r}",
        f"source_depth = {env.source.depth!r}",
        f"geometry = {env.source.geometry}",
        f"bottom = {env.bottom.kind}",
    ]
    if env.bottom.kind == "halfspace":
        lines.append(f"halfspace = {env.bottom.c_inf!r} {env.bottom.rho_inf!r} {env.bottom.alpha_inf!r}")
    lines += [
        f"spectral_order = {config.spectral_order}",
        f"k_min = {wk.k_min!r}",
        f"k_max = {'auto' if wk.k_max is None else repr(wk.k_max)}",
        f"samples = {wk.samples}",
        f"ranges = {out.ranges[0]!r} {out.ranges[1]!r} {out.ranges[2]}",
    ]
    if out.depth_values is not None:
        lines.append("depth_values = " + " ".join(repr(z) for z in out.depth_values))
    elif out.depths is not None:
        lines.append(f"depths = {out.depths[0]!r} {out.depths[1]!r} {out.depths[2]}")
    if out.probe_depths:
        lines.append("probe_depths = " + " ".join(repr(z) for z in out.probe_depths))
    lines += [
        "products = " + " ".join(out.products),
        f"normalization = {config.normalization}",
        f"tl_binary = {'true' if out.tl_binary else 'false'}",
        f"peak_threshold = {out.peak_threshold!r}",
    ]
    for layer in env.layers:
        lines += [
            "",
            "layer",
            f"  top = {layer.z_top!r}",
            f"  bottom = {layer.z_bot!r}",
            f"  c = {_serialize_profile(layer.c)}",
            f"  rho = {_serialize_profile(layer.rho)}",
            f"  alpha = {_serialize_profile(layer.alpha)}",
            f"  order = {layer.order}",
            "end",
        ]
    return "\n".join(lines) + "\n"


def load_config(path: Path | str) -> RunConfig:
    """Read and parse a configuration file.

    Raises:
        ConfigError: If the file cannot be read or does not parse.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text)


def preset_config(benchmark: Benchmark, nr: int = 3000, nz: int = 401) -> RunConfig:
    """Standard run of a benchmark: [0, 2 k0], r in [1, r_max], z in [0, H], all products at the probe depth."""
    env = benchmark.environment
    orders = {layer.order for layer in env.layers}
    output = OutputSpec(
        ranges=(1.0, benchmark.max_range, nr),
        depths=(0.0, env.depth, nz),
        probe_depths=(benchmark.probe_depth,),
        peak_threshold=benchmark.peak_threshold,
    )
    return RunConfig(
        environment=env,
        wavenumbers=WavenumberSpec(samples=benchmark.samples),
        output=output,
        spectral_order=max(orders),
    )


def config_digest(config: RunConfig) -> str:
    """SHA-256 of the serialized configuration."""
    return hashlib.sha256(serialize_config(config).encode("utf-8")).hexdigest()
