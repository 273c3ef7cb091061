"""Scenario configuration: a strict sectioned key=value text format.

Sections are bracketed, one key per line, lists comma-separated, repeated
`term` keys accumulate inside the coefficient sections.  Unknown sections
or keys are hard errors so that typos cannot silently change a scenario.
See the README for the full schema and the defaults table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .coefficients import CoefficientTerm, CoefficientTriple, Horizon, validate_triple
from .elliptic import Field, Grid
from .errors import MissingBlock, ParseError, ValidationError
from .hypotheses import Params
from .pde import StepController

_SECTION_RE = re.compile(r"^\[([a-z0-9_]+)\]$")

_SECTION_KEYS = {
    "grid": {"dim", "lengths", "counts"},
    "params": {"chi", "n", "seed", "declared_bounds"},
    "horizon": {"t_lo", "t_hi", "sample_step"},
    "a0": {"term"},
    "a1": {"term"},
    "a2": {"term"},
    "controller": {"dt_init", "dt_min", "dt_max", "safety", "growth_cap",
                   "negativity_tol", "blowup_factor", "blowup_threshold", "upwind"},
    "simulate": {"t0", "t_end", "stride", "u0", "dump_fields"},
    "envelope": {"t0", "t_end", "u_bar0", "u_under0", "u0"},
    "entire": {"n_max", "window", "tol", "dt", "start_value"},
    "periodic": {"period", "tol", "max_iter"},
    "steady": {"tol", "max_time"},
    "sweep": {"axis1", "axis2", "t_end", "u0", "stride"},
    "check": {"min_window"},
    "output": {"out_dir"},
}

_TERM_KINDS = {"constant", "cosine_t", "cosine_x", "cosine_tx", "almost_periodic"}


def _parse_float(key: str, s: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise ValidationError(key, f"expected a number, got '{s}'") from None


def _parse_int(key: str, s: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise ValidationError(key, f"expected an integer, got '{s}'") from None


def _parse_bool(key: str, s: str) -> bool:
    low = s.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValidationError(key, f"expected a boolean, got '{s}'")


def _parse_floats(key: str, s: str) -> tuple[float, ...]:
    return tuple(_parse_float(key, part) for part in s.split(","))


def _parse_ints(key: str, s: str) -> tuple[int, ...]:
    return tuple(_parse_int(key, part) for part in s.split(","))


def _parse_kv_spec(key: str, s: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for token in s.split():
        if "=" not in token:
            raise ValidationError(key, f"expected k=v pairs, got '{token}'")
        k, v = token.split("=", 1)
        if k in out:
            raise ValidationError(key, f"duplicate '{k}' in spec")
        out[k] = v
    return out


def _take(spec: dict[str, str], key: str, context: str) -> str:
    if key not in spec:
        raise ValidationError(context, f"missing '{key}'")
    return spec.pop(key)


def _finish(spec: dict[str, str], context: str) -> None:
    if spec:
        raise ValidationError(context, f"unknown keys: {', '.join(sorted(spec))}")


def parse_term(value: str, dim: int) -> CoefficientTerm:
    spec = _parse_kv_spec("term", value)
    kind = _take(spec, "kind", "term")
    if kind not in _TERM_KINDS:
        raise ValidationError("term", f"unknown kind '{kind}'")

    modes: tuple[int, ...] = ()
    if "mode" in spec:
        modes = _parse_ints("mode", spec.pop("mode"))
        if len(modes) != dim:
            raise ValidationError("mode", f"need {dim} mode indices, got {len(modes)}")
    if kind in ("cosine_x", "cosine_tx") and not any(modes):
        raise ValidationError("mode", f"kind '{kind}' requires a nonzero mode")

    if kind == "constant":
        amp = _parse_float("amplitude", _take(spec, "amplitude", "term"))
        _finish(spec, "term")
        return CoefficientTerm.constant(amp, modes)
    if kind == "cosine_x":
        amp = _parse_float("amplitude", _take(spec, "amplitude", "term"))
        _finish(spec, "term")
        return CoefficientTerm.constant(amp, modes)
    if kind in ("cosine_t", "cosine_tx"):
        amp = _parse_float("amplitude", _take(spec, "amplitude", "term"))
        omega = _parse_float("omega", _take(spec, "omega", "term"))
        phase = _parse_float("phase", spec.pop("phase", "0"))
        _finish(spec, "term")
        return CoefficientTerm.cosine(amp, omega, phase, modes)
    # almost_periodic: per-component lists
    amps = _parse_floats("amplitude", _take(spec, "amplitude", "term"))
    omegas = _parse_floats("omega", _take(spec, "omega", "term"))
    phases = _parse_floats("phase", spec.pop("phase", ",".join("0" for _ in amps)))
    _finish(spec, "term")
    if not (len(amps) == len(omegas) == len(phases)):
        raise ValidationError("term", "almost_periodic lists must have equal lengths")
    return CoefficientTerm.almost_periodic(tuple(zip(amps, omegas, phases)), modes)


@dataclass(frozen=True)
class InitialFieldSpec:
    """Recipe for the initial cell density u0 >= 0."""

    kind: str
    params: tuple[tuple[str, str], ...]

    @staticmethod
    def parse(value: str) -> "InitialFieldSpec":
        spec = _parse_kv_spec("u0", value)
        kind = _take(spec, "kind", "u0")
        if kind not in ("constant", "cosine_perturbation", "random_positive", "file"):
            raise ValidationError("u0", f"unknown kind '{kind}'")
        return InitialFieldSpec(kind, tuple(sorted(spec.items())))

    def build(self, grid: Grid, seed: int) -> Field:
        spec = dict(self.params)
        if self.kind == "constant":
            c = _parse_float("value", _take(spec, "value", "u0"))
            _finish(spec, "u0")
            out = Field.constant(grid, c)
        elif self.kind == "cosine_perturbation":
            base = _parse_float("base", _take(spec, "base", "u0"))
            amp = _parse_float("amplitude", _take(spec, "amplitude", "u0"))
            modes = _parse_ints("mode", _take(spec, "mode", "u0"))
            if len(modes) != grid.dim:
                raise ValidationError("u0", f"need {grid.dim} mode indices")
            _finish(spec, "u0")
            term = CoefficientTerm.constant(1.0, modes)
            prof = np.broadcast_to(np.asarray(term.spatial(grid.meshes(), grid.lengths)),
                                   grid.shape)
            out = Field(grid, base + amp * prof)
        elif self.kind == "random_positive":
            lo = _parse_float("lo", _take(spec, "lo", "u0"))
            hi = _parse_float("hi", _take(spec, "hi", "u0"))
            local_seed = _parse_int("seed", spec.pop("seed", str(seed)))
            _finish(spec, "u0")
            if not 0 <= lo <= hi:
                raise ValidationError("u0", f"need 0 <= lo <= hi, got [{lo}, {hi}]")
            rng = np.random.default_rng(local_seed)
            out = Field(grid, rng.uniform(lo, hi, size=grid.shape))
        else:  # file
            from .fieldio import read_field
            path = _take(spec, "path", "u0")
            _finish(spec, "u0")
            out = read_field(path)
            if out.grid != grid:
                raise ValidationError("u0", f"field in {path} does not match the scenario grid")
        if out.min() < 0:
            raise ValidationError("u0", f"initial field must be nonnegative, min={out.min():g}")
        return out


@dataclass
class SimulateBlock:
    t0: float = 0.0
    t_end: float = 20.0
    stride: int = 10
    u0: InitialFieldSpec = field(default_factory=lambda: InitialFieldSpec.parse("kind=constant value=1.0"))
    dump_fields: bool = False


@dataclass
class EnvelopeBlock:
    t0: float = 0.0
    t_end: float = 20.0
    u_bar0: Optional[float] = None
    u_under0: Optional[float] = None
    u0: Optional[InitialFieldSpec] = None


@dataclass
class EntireBlock:
    n_max: int = 64
    window: float = 1.0
    tol: float = 1e-8
    dt: Optional[float] = None
    start_value: Optional[float] = None


@dataclass
class PeriodicBlock:
    period: float = 1.0
    tol: float = 1e-8
    max_iter: int = 500


@dataclass
class SteadyBlock:
    tol: float = 1e-9
    max_time: float = 2000.0


@dataclass
class SweepBlock:
    axis1: tuple[str, np.ndarray] = None  # type: ignore[assignment]
    axis2: Optional[tuple[str, np.ndarray]] = None
    t_end: float = 20.0
    stride: int = 20
    u0: InitialFieldSpec = field(default_factory=lambda: InitialFieldSpec.parse("kind=constant value=1.0"))


@dataclass
class CheckBlock:
    min_window: Optional[float] = None


@dataclass
class ScenarioConfig:
    grid: Grid
    chi: float
    n: int
    seed: int
    triple: CoefficientTriple
    horizon: Horizon
    ctrl: StepController
    out_dir: str = "out"
    simulate: Optional[SimulateBlock] = None
    envelope: Optional[EnvelopeBlock] = None
    entire: Optional[EntireBlock] = None
    periodic: Optional[PeriodicBlock] = None
    steady: Optional[SteadyBlock] = None
    sweep: Optional[SweepBlock] = None
    check: Optional[CheckBlock] = None

    def params(self) -> Params:
        return Params(chi=self.chi, n=self.n, triple=self.triple,
                      grid=self.grid, horizon=self.horizon)

    def block_for(self, command: str):
        blk = getattr(self, command, None)
        if blk is None:
            raise MissingBlock(command)
        return blk


_SWEEP_AXES = {"chi", "a1_base", "a2_base", "n"}


def _parse_axis(key: str, s: str) -> tuple[str, np.ndarray]:
    parts = s.split(":")
    if len(parts) != 4:
        raise ValidationError(key, "expected name:start:stop:count")
    name, start, stop, count = parts
    if name not in _SWEEP_AXES:
        raise ValidationError(key, f"axis must be one of {sorted(_SWEEP_AXES)}, got '{name}'")
    n = _parse_int(key, count)
    if n < 1:
        raise ValidationError(key, "count must be at least 1")
    return name, np.linspace(_parse_float(key, start), _parse_float(key, stop), n)


def _read_sections(path) -> dict[str, list[tuple[str, str, int]]]:
    sections: dict[str, list[tuple[str, str, int]]] = {}
    current: Optional[str] = None
    text = Path(path).read_text()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            name = m.group(1)
            if name not in _SECTION_KEYS:
                raise ValidationError(name, "unknown section")
            if name in sections:
                raise ParseError(line_no, f"duplicate section [{name}]")
            sections[name] = []
            current = name
            continue
        if "=" not in line:
            raise ParseError(line_no, f"expected 'key = value', got '{raw.strip()}'")
        if current is None:
            raise ParseError(line_no, "key outside of any section")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SECTION_KEYS[current]:
            raise ValidationError(key, f"unknown key in section [{current}]")
        if key != "term" and any(k == key for k, _, _ in sections[current]):
            raise ParseError(line_no, f"duplicate key '{key}' in [{current}]")
        sections[current].append((key, value, line_no))
    return sections


def _as_dict(pairs: list[tuple[str, str, int]]) -> dict[str, str]:
    return {k: v for k, v, _ in pairs}


def load_config(path) -> ScenarioConfig:
    """Parse and fully validate a scenario file, applying documented defaults."""
    sections = _read_sections(path)

    if "grid" not in sections:
        raise MissingBlock("grid")
    g = _as_dict(sections["grid"])
    for required in ("dim", "lengths", "counts"):
        if required not in g:
            raise ValidationError(required, "required in [grid]")
    dim = _parse_int("dim", g["dim"])
    lengths = _parse_floats("lengths", g["lengths"])
    counts = _parse_ints("counts", g["counts"])
    grid = Grid(dim=dim, lengths=lengths, counts=counts)

    pr = _as_dict(sections.get("params", []))
    chi = _parse_float("chi", pr.get("chi", "0"))
    n = _parse_int("n", pr.get("n", str(dim)))
    seed = _parse_int("seed", pr.get("seed", "0"))
    declared = _parse_floats("declared_bounds", pr["declared_bounds"]) if "declared_bounds" in pr else None

    hz = _as_dict(sections.get("horizon", []))
    horizon = Horizon(t_lo=_parse_float("t_lo", hz.get("t_lo", "0")),
                      t_hi=_parse_float("t_hi", hz.get("t_hi", "100")),
                      sample_step=_parse_float("sample_step", hz.get("sample_step", "0.01")))

    def coeff_terms(name: str) -> tuple[CoefficientTerm, ...]:
        if name not in sections:
            return ()
        return tuple(parse_term(v, dim) for k, v, _ in sections[name] if k == "term")

    a0 = coeff_terms("a0")
    if not a0:
        raise ValidationError("a0", "at least one term is required")
    triple = CoefficientTriple(a0=a0, a1=coeff_terms("a1"), a2=coeff_terms("a2"),
                               lengths=lengths, declared_bounds=declared)
    validate_triple(triple, grid, horizon)

    ct = _as_dict(sections.get("controller", []))
    blowup_threshold = (_parse_float("blowup_threshold", ct["blowup_threshold"])
                        if "blowup_threshold" in ct else None)
    ctrl = StepController(
        dt_init=_parse_float("dt_init", ct.get("dt_init", "1e-3")),
        dt_min=_parse_float("dt_min", ct.get("dt_min", "1e-8")),
        dt_max=_parse_float("dt_max", ct.get("dt_max", "2e-2")),
        safety=_parse_float("safety", ct.get("safety", "1.0")),
        growth_cap=_parse_float("growth_cap", ct.get("growth_cap", "2.0")),
        negativity_tol=_parse_float("negativity_tol", ct.get("negativity_tol", "1e-10")),
        blowup_factor=_parse_float("blowup_factor", ct.get("blowup_factor", "1e6")),
        blowup_threshold=blowup_threshold,
        upwind=_parse_bool("upwind", ct.get("upwind", "false")),
    )

    out = _as_dict(sections.get("output", []))
    cfg = ScenarioConfig(grid=grid, chi=chi, n=n, seed=seed, triple=triple,
                         horizon=horizon, ctrl=ctrl,
                         out_dir=out.get("out_dir", "out"))

    if "simulate" in sections:
        d = _as_dict(sections["simulate"])
        cfg.simulate = SimulateBlock(
            t0=_parse_float("t0", d.get("t0", "0")),
            t_end=_parse_float("t_end", d.get("t_end", "20")),
            stride=_parse_int("stride", d.get("stride", "10")),
            u0=InitialFieldSpec.parse(d.get("u0", "kind=constant value=1.0")),
            dump_fields=_parse_bool("dump_fields", d.get("dump_fields", "false")))
    if "envelope" in sections:
        d = _as_dict(sections["envelope"])
        cfg.envelope = EnvelopeBlock(
            t0=_parse_float("t0", d.get("t0", "0")),
            t_end=_parse_float("t_end", d.get("t_end", "20")),
            u_bar0=_parse_float("u_bar0", d["u_bar0"]) if "u_bar0" in d else None,
            u_under0=_parse_float("u_under0", d["u_under0"]) if "u_under0" in d else None,
            u0=InitialFieldSpec.parse(d["u0"]) if "u0" in d else None)
        if cfg.envelope.u0 is None and (cfg.envelope.u_bar0 is None or cfg.envelope.u_under0 is None):
            raise ValidationError("envelope", "need either u0 or both u_bar0 and u_under0")
    if "entire" in sections:
        d = _as_dict(sections["entire"])
        cfg.entire = EntireBlock(
            n_max=_parse_int("n_max", d.get("n_max", "64")),
            window=_parse_float("window", d.get("window", "1.0")),
            tol=_parse_float("tol", d.get("tol", "1e-8")),
            dt=_parse_float("dt", d["dt"]) if "dt" in d else None,
            start_value=_parse_float("start_value", d["start_value"]) if "start_value" in d else None)
    if "periodic" in sections:
        d = _as_dict(sections["periodic"])
        if "period" not in d:
            raise ValidationError("period", "required in [periodic]")
        cfg.periodic = PeriodicBlock(
            period=_parse_float("period", d["period"]),
            tol=_parse_float("tol", d.get("tol", "1e-8")),
            max_iter=_parse_int("max_iter", d.get("max_iter", "500")))
    if "steady" in sections:
        d = _as_dict(sections["steady"])
        cfg.steady = SteadyBlock(
            tol=_parse_float("tol", d.get("tol", "1e-9")),
            max_time=_parse_float("max_time", d.get("max_time", "2000")))
    if "sweep" in sections:
        d = _as_dict(sections["sweep"])
        if "axis1" not in d:
            raise ValidationError("axis1", "required in [sweep]")
        cfg.sweep = SweepBlock(
            axis1=_parse_axis("axis1", d["axis1"]),
            axis2=_parse_axis("axis2", d["axis2"]) if "axis2" in d else None,
            t_end=_parse_float("t_end", d.get("t_end", "20")),
            stride=_parse_int("stride", d.get("stride", "20")),
            u0=InitialFieldSpec.parse(d.get("u0", "kind=constant value=1.0")))
    if "check" in sections:
        d = _as_dict(sections["check"])
        cfg.check = CheckBlock(
            min_window=_parse_float("min_window", d["min_window"]) if "min_window" in d else None)
    return cfg
