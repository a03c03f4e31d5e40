"""Flat INI-style run configuration.

Sections and keys::

    [surface]  kind, curvature
    [metric]   a, c, d
    [curve]    fixture, family, window, samples, x0, x1
    [fiber]    rule, seed, sign, V0, V1
    [ode]      step, t_end, renormalize
    [tol]      constancy, match

``curve.fixture`` selects a named fixture; the ``metric`` section then
overrides its constants.  Without a fixture the base path is given by the
expressions ``curve.x0`` and ``curve.x1`` in the parameter ``t``.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .curves import BasePath, CurveSpec, Family, FiberRule, make_fixture
from .errors import ConfigError, UnknownFixture
from .gnat import MetricParams
from .surfaces import SurfaceKind, SurfaceModel

KNOWN = {
    "surface": {"kind", "curvature"},
    "metric": {"a", "c", "d"},
    "curve": {"fixture", "family", "window", "samples", "x0", "x1"},
    "fiber": {"rule", "seed", "sign", "v0", "v1"},
    "ode": {"step", "t_end", "renormalize"},
    "tol": {"constancy", "match"},
    "sweep": {"a", "c", "d", "curvature", "base"},
}

_FUNCS = {name: getattr(np, name) for name in
          ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt", "arctan", "arcsin",
           "arccos", "arcsinh", "arccosh", "arctanh")}
_FUNCS.update(pi=math.pi, e=math.e)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass
class Tolerances:
    constancy: float = 1e-6
    match: float = 1e-4

    def scaled(self, k: float) -> "Tolerances":
        return Tolerances(self.constancy * k, self.match * k)


@dataclass
class OdeSettings:
    step: float = 1e-3
    t_end: float = 1.0
    renormalize: bool = True


@dataclass
class RunConfig:
    path: str | None = None
    text: str = ""
    values: dict = field(default_factory=dict)
    spec: CurveSpec | None = None
    params: MetricParams | None = None
    surface: SurfaceModel | None = None
    ode: OdeSettings = field(default_factory=OdeSettings)
    tol: Tolerances = field(default_factory=Tolerances)

    def get(self, section: str, key: str, default=None):
        return self.values.get(section, {}).get(key, default)


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    current = None
    for i, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.match(r"^\[([^\]]+)\]$", s)
        if m:
            current = m.group(1).strip().lower()
            if key is None and current == section:
                return i
            continue
        if current == section and key is not None and re.match(rf"^{re.escape(key)}\s*[=:]", s, re.I):
            return i
    return None


def _error(cfg_text: str, path, section, key, msg) -> ConfigError:
    line = _line_of(cfg_text, section, key)
    where = f"{path or '<config>'}:{line}" if line else f"{path or '<config>'}"
    return ConfigError(f"{where}: [{section}] {key}: {msg}")


def _float(text, path, section, key, raw) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise _error(text, path, section, key, f"expected a number, got {raw!r}") from None
    if not math.isfinite(v):
        raise _error(text, path, section, key, "must be finite")
    return v


def _floats(text, path, section, key, raw, n=None) -> list[float]:
    parts = [p for p in re.split(r"[,\s]+", raw.strip().strip("[]()")) if p]
    vals = [_float(text, path, section, key, p) for p in parts]
    if n is not None and len(vals) != n:
        raise _error(text, path, section, key, f"expected {n} numbers, got {len(vals)}")
    return vals


def compile_expression(expr: str):
    """Vectorized function of t from an arithmetic expression over numpy functions."""
    for name in _IDENT.findall(expr):
        if name != "t" and name not in _FUNCS:
            raise ValueError(f"unknown name {name!r} in expression {expr!r}")
    code = compile(expr, "<expr>", "eval")

    def f(t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(eval(code, {"__builtins__": {}}, dict(_FUNCS, t=t)), t.shape).astype(float)
    return f


def parse_config(text: str, path: str | None = None) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=path or "<config>")
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    values: dict = {}
    for section in parser.sections():
        sec = section.lower()
        if sec not in KNOWN:
            raise _error(text, path, sec, None, "unknown section")
        for key, raw in parser.items(section):
            if key not in KNOWN[sec]:
                raise _error(text, path, sec, key, "unknown key")
            values.setdefault(sec, {})[key] = raw.strip().strip('"')
    cfg = RunConfig(path=path, text=text, values=values)
    _resolve(cfg)
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return parse_config(text, path)


def _resolve(cfg: RunConfig) -> None:
    t, p, v = cfg.text, cfg.path, cfg.values

    tol = v.get("tol", {})
    kw = {}
    for key in ("constancy", "match"):
        if key in tol:
            val = _float(t, p, "tol", key, tol[key])
            if val <= 0:
                raise _error(t, p, "tol", key, "tolerance must be positive")
            kw[key] = val
    cfg.tol = Tolerances(**kw)

    ode = v.get("ode", {})
    o = OdeSettings()
    if "step" in ode:
        o.step = _float(t, p, "ode", "step", ode["step"])
        if o.step <= 0:
            raise _error(t, p, "ode", "step", "step must be positive")
    if "t_end" in ode:
        o.t_end = _float(t, p, "ode", "t_end", ode["t_end"])
    if "renormalize" in ode:
        flag = ode["renormalize"].lower()
        if flag not in ("true", "false", "1", "0", "yes", "no"):
            raise _error(t, p, "ode", "renormalize", "expected true or false")
        o.renormalize = flag in ("true", "1", "yes")
    cfg.ode = o

    met = v.get("metric", {})
    params = None
    if met:
        try:
            params = MetricParams(*(_float(t, p, "metric", k, met[k]) if k in met else None
                                    for k in ("a", "c", "d")))
        except TypeError:
            missing = [k for k in ("a", "c", "d") if k not in met]
            raise _error(t, p, "metric", missing[0], "missing key") from None
        if not params.nondegenerate:
            raise _error(t, p, "metric", "a", f"degenerate metric (alpha={params.alpha}, phi={params.phi})")

    surf = v.get("surface", {})
    surface = None
    if surf:
        kind_raw = surf.get("kind")
        if kind_raw is None:
            raise _error(t, p, "surface", "kind", "missing key")
        try:
            kind = SurfaceKind(kind_raw)
        except ValueError:
            names = ", ".join(k.value for k in SurfaceKind)
            raise _error(t, p, "surface", "kind", f"unknown surface {kind_raw!r} (known: {names})") from None
        if "curvature" in surf:
            try:
                surface = SurfaceModel.from_curvature(kind, _float(t, p, "surface", "curvature", surf["curvature"]))
            except ValueError as exc:
                raise _error(t, p, "surface", "curvature", str(exc)) from None
        else:
            surface = SurfaceModel(kind)

    curve = v.get("curve", {})
    fiber = v.get("fiber", {})
    spec = None
    if "fixture" in curve:
        try:
            spec = make_fixture(curve["fixture"])
        except UnknownFixture as exc:
            raise _error(t, p, "curve", "fixture", str(exc)) from None
        if surface is not None and surface != spec.surface:
            raise _error(t, p, "surface", "kind", f"fixture {spec.name} lives on {spec.surface}")
        if params is not None:
            spec = replace(spec, params=params)
    elif curve:
        spec = _custom_spec(cfg, surface, params)
    if spec is not None:
        if "window" in curve:
            w = _floats(t, p, "curve", "window", curve["window"], 2)
            if not w[1] > w[0]:
                raise _error(t, p, "curve", "window", f"empty window {w}")
            spec = replace(spec, window=(w[0], w[1]))
        if "samples" in curve:
            n = curve["samples"]
            if not n.isdigit() or int(n) < 64:
                raise _error(t, p, "curve", "samples", "need an integer >= 64")
            spec = replace(spec, samples=int(n))
        if fiber and "fixture" in curve:
            spec = _apply_fiber(cfg, spec)
        if "family" in curve:
            try:
                spec = replace(spec, family=Family(curve["family"]))
            except ValueError:
                raise _error(t, p, "curve", "family", f"unknown family {curve['family']!r}") from None
    cfg.spec = spec
    cfg.params = params if params is not None else (spec.params if spec else None)
    cfg.surface = surface if surface is not None else (spec.surface if spec else None)


def _apply_fiber(cfg: RunConfig, spec: CurveSpec) -> CurveSpec:
    t, p = cfg.text, cfg.path
    fiber = cfg.values.get("fiber", {})
    rule = fiber.get("rule", spec.fiber.kind)
    sign = _float(t, p, "fiber", "sign", fiber["sign"]) if "sign" in fiber else spec.fiber.sign
    if sign not in (1.0, -1.0):
        raise _error(t, p, "fiber", "sign", "must be 1 or -1")
    if rule == "oblique":
        return replace(spec, fiber=FiberRule("oblique", sign))
    if rule == "parallel":
        if "seed" in fiber:
            seed = tuple(_floats(t, p, "fiber", "seed", fiber["seed"], 2))
            return replace(spec, fiber=FiberRule("parallel", seed=seed))
        if spec.fiber.kind == "parallel":
            return spec
        raise _error(t, p, "fiber", "seed", "parallel rule needs a seed vector")
    if rule == "explicit":
        if "v0" in fiber and "v1" in fiber:
            return replace(spec, fiber=FiberRule("explicit", fn=_vector_expr(cfg, "fiber", "v0", "v1")))
        if spec.fiber.fn is not None:
            return replace(spec, fiber=FiberRule("explicit", fn=spec.fiber.fn))
        raise _error(t, p, "fiber", "v0", "explicit rule needs V0 and V1 expressions")
    raise _error(t, p, "fiber", "rule", f"unknown rule {rule!r} (oblique, parallel, explicit)")


def _vector_expr(cfg: RunConfig, section: str, k0: str, k1: str):
    t, p = cfg.text, cfg.path
    fns = []
    for key in (k0, k1):
        raw = cfg.values.get(section, {}).get(key)
        if raw is None:
            raise _error(t, p, section, key, "missing key")
        try:
            fns.append(compile_expression(raw))
        except (ValueError, SyntaxError) as exc:
            raise _error(t, p, section, key, str(exc)) from None
    return lambda tt: np.stack([fns[0](tt), fns[1](tt)], axis=-1)


def _custom_spec(cfg: RunConfig, surface, params) -> CurveSpec:
    t, p = cfg.text, cfg.path
    if surface is None:
        raise _error(t, p, "surface", "kind", "a custom curve needs a [surface] section")
    if params is None:
        raise _error(t, p, "metric", "a", "a custom curve needs a [metric] section")
    if "window" not in cfg.values["curve"]:
        raise _error(t, p, "curve", "window", "missing key")
    pos = _vector_expr(cfg, "curve", "x0", "x1")
    base = BasePath(pos)
    spec = CurveSpec("custom", Family.CUSTOM, surface, params, base, FiberRule("oblique", 1.0),
                     (0.0, 1.0), 256)
    if "fiber" in cfg.values:
        spec = _apply_fiber(cfg, spec)
    return spec
