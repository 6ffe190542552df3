"""JSON scene files: grid, named fields, test functions and Weyl labels."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .errors import InvalidGridError, SceneError
from .fields import ZERO, FieldEvaluator, GaussianPacket, UnconstrainedPacket, longitudinal
from .gauge import GaugeFunction, apply_gauge
from .quadrature import DEFAULT_K_MAX, DEFAULT_K_MIN, DEFAULT_RESOLUTION, MomentumGrid, build_grid
from .spacetime import GaussianTerm, TestFunction4D
from .vacuum import DEFAULT_ETA, VACUUM, WeylLabel

VACUUM_NAME = "vacuum"


@dataclass
class Scene:
    raw: dict
    digest: str
    seed: Optional[int]
    eta: float
    grid_config: dict
    fields: Dict[str, FieldEvaluator] = field(default_factory=dict)
    testfunctions: Dict[str, TestFunction4D] = field(default_factory=dict)
    labels: Dict[str, WeylLabel] = field(default_factory=dict)

    def build_grid(self) -> MomentumGrid:
        g = self.grid_config
        return build_grid(g["k_min"], g["k_max"], g["resolution"])

    def get_field(self, name: str) -> FieldEvaluator:
        try:
            return self.fields[name]
        except KeyError:
            raise SceneError(f"unknown field {name!r}") from None

    def get_label(self, name: str) -> WeylLabel:
        if name == VACUUM_NAME:
            return VACUUM
        try:
            return self.labels[name]
        except KeyError:
            raise SceneError(f"unknown label {name!r}") from None


def canonical_bytes(raw: dict) -> bytes:
    return json.dumps(raw, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode()


def scene_hash(raw: dict) -> str:
    return hashlib.sha256(canonical_bytes(raw)).hexdigest()


def _complex(value, what: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return complex(value[0], value[1])
    raise SceneError(f"{what}: expected a number or [re, im], got {value!r}")


def _vector(value, n: int, what: str) -> np.ndarray:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise SceneError(f"{what}: expected a list of {n} numbers")
    try:
        out = np.array([float(v) for v in value])
    except (TypeError, ValueError):
        raise SceneError(f"{what}: expected numbers") from None
    if not np.all(np.isfinite(out)):
        raise SceneError(f"{what}: values must be finite")
    return out


def _positive(value, what: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise SceneError(f"{what}: expected a number") from None
    if not v > 0 or not np.isfinite(v):
        raise SceneError(f"{what}: must be positive")
    return v


def _require(spec: dict, key: str, what: str):
    if key not in spec:
        raise SceneError(f"{what}: missing key {key!r}")
    return spec[key]


class _FieldParser:
    def __init__(self, specs: dict):
        self.specs = specs
        self.done: Dict[str, FieldEvaluator] = {}
        self.active = set()

    def named(self, name: str) -> FieldEvaluator:
        if name in self.done:
            return self.done[name]
        if name not in self.specs:
            raise SceneError(f"unknown field {name!r}")
        if name in self.active:
            raise SceneError(f"field {name!r} refers to itself")
        self.active.add(name)
        self.done[name] = self.parse(self.specs[name], f"field {name!r}")
        self.active.discard(name)
        return self.done[name]

    def parse(self, spec, what: str) -> FieldEvaluator:
        if isinstance(spec, str):
            return self.named(spec)
        if not isinstance(spec, dict):
            raise SceneError(f"{what}: expected an object or a field name")
        kind = _require(spec, "type", what)
        if kind in ("packet", "unconstrained_packet"):
            eps = np.array([_complex(e, f"{what}.eps") for e in _require(spec, "eps", what)])
            if eps.shape != (3,):
                raise SceneError(f"{what}.eps: expected three entries")
            center = _vector(_require(spec, "center", what), 3, f"{what}.center")
            sigma = _positive(_require(spec, "sigma", what), f"{what}.sigma")
            amp = _complex(spec.get("amp", 1.0), f"{what}.amp")
            if kind == "packet":
                return GaussianPacket(eps, center, sigma, amp)
            return UnconstrainedPacket(eps, center, sigma, amp,
                                       _complex(spec.get("time_eps", 0.0), f"{what}.time_eps"))
        if kind == "sum":
            terms = _require(spec, "terms", what)
            if not isinstance(terms, list):
                raise SceneError(f"{what}.terms: expected a list")
            out = ZERO
            for j, term in enumerate(terms):
                if not isinstance(term, list) or len(term) != 2:
                    raise SceneError(f"{what}.terms[{j}]: expected [coeff, field]")
                out = out + _complex(term[0], f"{what}.terms[{j}]") * self.parse(term[1], f"{what}.terms[{j}]")
            return out
        if kind == "longitudinal":
            c = _gauge_function(spec, what)
            return longitudinal(c.evaluate)
        if kind == "gauge_shift":
            base = self.parse(_require(spec, "base", what), f"{what}.base")
            return apply_gauge(base, _gauge_function(_require(spec, "gauge", what), f"{what}.gauge"))
        if kind == "zero":
            return ZERO
        raise SceneError(f"{what}: unknown field type {kind!r}")


def _gauge_function(spec: dict, what: str) -> GaugeFunction:
    if not isinstance(spec, dict):
        raise SceneError(f"{what}: expected an object")
    amp = _complex(spec.get("amp", 1.0), f"{what}.amp")
    center = _vector(spec.get("center", [0.0, 0.0, 0.0]), 3, f"{what}.center")
    sigma = spec.get("sigma")
    sigma = None if sigma is None else _positive(sigma, f"{what}.sigma")
    return GaugeFunction(amp, center, sigma)


def _parse_testfunction(spec, what: str) -> TestFunction4D:
    if not isinstance(spec, dict) or spec.get("type") != "gaussian4d":
        raise SceneError(f"{what}: expected an object with type 'gaussian4d'")
    terms = _require(spec, "terms", what)
    if not isinstance(terms, list):
        raise SceneError(f"{what}.terms: expected a list")
    comps = [[], [], [], []]
    for j, t in enumerate(terms):
        w = f"{what}.terms[{j}]"
        if not isinstance(t, dict):
            raise SceneError(f"{w}: expected an object")
        mu = _require(t, "component", w)
        if mu not in (0, 1, 2, 3):
            raise SceneError(f"{w}.component: must be 0..3")
        phase = t.get("phase", "cos")
        if phase not in ("cos", "sin"):
            raise SceneError(f"{w}.phase: must be 'cos' or 'sin'")
        comps[mu].append(GaussianTerm(
            amp=float(_complex(t.get("amp", 1.0), f"{w}.amp").real),
            center=tuple(_vector(_require(t, "center", w), 4, f"{w}.center")),
            tau=_positive(_require(t, "tau", w), f"{w}.tau"),
            momentum=tuple(_vector(t.get("momentum", [0, 0, 0, 0]), 4, f"{w}.momentum")),
            phase=phase))
    return TestFunction4D(tuple(tuple(c) for c in comps))


def parse_scene(raw) -> Scene:
    if not isinstance(raw, dict):
        raise SceneError("scene must be a JSON object")
    grid = raw.get("grid", {})
    if not isinstance(grid, dict):
        raise SceneError("grid: expected an object")
    try:
        grid_config = {
            "k_min": float(grid.get("k_min", DEFAULT_K_MIN)),
            "k_max": float(grid.get("k_max", DEFAULT_K_MAX)),
            "resolution": [int(n) for n in grid.get("resolution", DEFAULT_RESOLUTION)],
        }
    except (TypeError, ValueError):
        raise SceneError("grid: k_min, k_max and resolution must be numbers") from None
    try:
        build_grid(grid_config["k_min"], grid_config["k_max"], grid_config["resolution"])
    except InvalidGridError as exc:
        raise SceneError(f"grid: {exc}") from None
    seed = raw.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or seed < 0):
        raise SceneError("seed: expected a non-negative integer")
    eta = _positive(raw.get("eta", DEFAULT_ETA), "eta")

    field_specs = raw.get("fields", {})
    if not isinstance(field_specs, dict):
        raise SceneError("fields: expected an object")
    parser = _FieldParser(field_specs)
    fields = {name: parser.named(name) for name in field_specs}

    tf_specs = raw.get("testfunctions", {})
    if not isinstance(tf_specs, dict):
        raise SceneError("testfunctions: expected an object")
    testfunctions = {name: _parse_testfunction(spec, f"testfunction {name!r}")
                     for name, spec in tf_specs.items()}

    label_specs = raw.get("labels", {})
    if not isinstance(label_specs, dict):
        raise SceneError("labels: expected an object")
    labels = {}
    for name, spec in label_specs.items():
        if name == VACUUM_NAME:
            raise SceneError(f"label name {VACUUM_NAME!r} is reserved")
        if not isinstance(spec, dict):
            raise SceneError(f"label {name!r}: expected an object")
        a = spec.get("a")
        psi = spec.get("psi")
        labels[name] = WeylLabel(ZERO if a is None else parser.parse(a, f"label {name!r}.a"),
                                 ZERO if psi is None else parser.parse(psi, f"label {name!r}.psi"))

    return Scene(raw=raw, digest=scene_hash(raw), seed=seed, eta=eta, grid_config=grid_config,
                 fields=fields, testfunctions=testfunctions, labels=labels)


def load_scene(path) -> Scene:
    try:
        with open(path, "rb") as fh:
            raw = json.loads(fh.read().decode("utf-8"))
    except OSError as exc:
        raise SceneError(f"cannot read scene: {exc}") from None
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SceneError(f"scene is not valid JSON: {exc}") from None
    return parse_scene(raw)


def empty_scene() -> Scene:
    return parse_scene({})
