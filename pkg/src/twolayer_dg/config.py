"""Run configuration files: ``[section]`` headers and ``key = value`` lines.

``#`` starts a comment.  Every value remembers its line number so validation
errors can point at the offending line.  Sections: ``[run]`` (scenario,
degree, flux, seed), ``[mesh]``, ``[physics]``, ``[time]``, ``[output]``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .scenarios import SCENARIOS

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config"]


class ConfigError(ValueError):
    pass


SECTIONS = {
    "run": {"scenario", "degree", "flux", "seed"},
    "mesh": {"generator", "nx", "ny", "domain", "warp_amplitude", "curve_degree", "file",
             "slip_wall_tags", "dam_centerline"},
    "physics": {"g", "rho1", "rho2", "ratio"},
    "time": {"t_end", "dt", "cfl", "diagnostics_interval"},
    "output": {"directory", "dump_interval"},
}


def parse_config(text, source="<config>"):
    """Return ``{section: {key: (value, lineno)}}``."""
    data = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"{source}:{lineno}: malformed section header {raw.strip()!r}")
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ConfigError(f"{source}:{lineno}: unknown section [{section}]")
            data.setdefault(section, {})
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        if section is None:
            raise ConfigError(f"{source}:{lineno}: key outside of any section")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SECTIONS[section]:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r} in [{section}]")
        if key in data[section]:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r} in [{section}]")
        data[section][key] = (value, lineno)
    return data


@dataclass
class RunConfig:
    scenario: str
    degree: int = None
    flux: str = None
    seed: int = 0
    mesh: dict = field(default_factory=dict)
    physics: dict = field(default_factory=dict)
    time: dict = field(default_factory=dict)
    output_dir: str = "."
    dump_interval: int = 0

    def scenario_kwargs(self):
        kw = {}
        if self.degree is not None:
            kw["N"] = self.degree
        if self.flux is not None:
            kw["flux"] = self.flux
        if self.mesh:
            kw["mesh"] = dict(self.mesh)
        kw.update(self.physics)
        for key in ("t_end", "dt", "cfl", "diagnostics_interval"):
            if key in self.time:
                kw[key] = self.time[key]
        return kw


def _convert(source, section, key, value, lineno, kind, check=None, what=""):
    try:
        out = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{source}:{lineno}: [{section}] {key} = {value!r} is not a valid "
                          f"{getattr(kind, '__name__', 'value')}") from None
    if check is not None and not check(out):
        raise ConfigError(f"{source}:{lineno}: [{section}] {key} = {value!r} {what}")
    return out


def _floats(value):
    return tuple(float(v) for v in value.replace(",", " ").split())


def build_run_config(data, source="<config>", base_dir="."):
    def get(section, key):
        return data.get(section, {}).get(key)

    def conv(section, key, kind, check=None, what=""):
        item = get(section, key)
        if item is None:
            return None
        return _convert(source, section, key, item[0], item[1], kind, check, what)

    if get("run", "scenario") is None:
        raise ConfigError(f"{source}: missing required key 'scenario' in [run]")
    scenario = conv("run", "scenario", str, lambda s: s in SCENARIOS, f"is not one of {sorted(SCENARIOS)}")
    cfg = RunConfig(scenario=scenario)
    cfg.degree = conv("run", "degree", int, lambda n: n >= 1, "must be >= 1")
    cfg.flux = conv("run", "flux", str.lower, lambda f: f in ("ec", "es"), "must be ec or es")
    cfg.seed = conv("run", "seed", int) or 0

    mesh = {}
    for key, kind, check, what in (
        ("generator", str, lambda s: s in ("cartesian", "sine_warped"), "must be cartesian or sine_warped"),
        ("nx", int, lambda n: n >= 1, "must be >= 1"),
        ("ny", int, lambda n: n >= 1, "must be >= 1"),
        ("domain", _floats, lambda d: len(d) == 4 and d[0] < d[1] and d[2] < d[3],
         "must be 'x0 x1 y0 y1' with x0 < x1 and y0 < y1"),
        ("warp_amplitude", float, lambda a: 0 <= a < 0.25, "must lie in [0, 0.25)"),
        ("curve_degree", int, lambda n: n >= 1, "must be >= 1"),
        ("slip_wall_tags", lambda s: tuple(s.split()), None, ""),
        ("dam_centerline", str, lambda s: s in ("straight", "parabolic"), "must be straight or parabolic"),
    ):
        val = conv("mesh", key, kind, check, what)
        if val is not None:
            mesh[key] = val
    if get("mesh", "file") is not None:
        value, lineno = get("mesh", "file")
        path = value if os.path.isabs(value) else os.path.join(base_dir, value)
        if not os.path.isfile(path):
            raise ConfigError(f"{source}:{lineno}: mesh file {value!r} does not exist")
        mesh["file"] = path
    cfg.mesh = mesh

    phys = {}
    g = conv("physics", "g", float, lambda v: v > 0, "must be positive")
    if g is not None:
        phys["g"] = g
    rho1 = conv("physics", "rho1", float, lambda v: v > 0, "must be positive")
    rho2 = conv("physics", "rho2", float, lambda v: v > 0, "must be positive")
    ratio = conv("physics", "ratio", float, lambda v: 0 < v < 1, "must lie in (0, 1)")
    if ratio is not None and rho1 is not None:
        raise ConfigError(f"{source}:{get('physics', 'ratio')[1]}: give either ratio or rho1, not both")
    if rho1 is not None:
        r2 = rho2 if rho2 is not None else 1.0
        if not rho1 < r2:
            raise ConfigError(f"{source}:{get('physics', 'rho1')[1]}: rho1 must be smaller than rho2")
        phys["ratio"] = rho1 / r2
    elif ratio is not None:
        phys["ratio"] = ratio
    if rho2 is not None:
        phys["rho2"] = rho2
    cfg.physics = phys

    tm = {}
    for key, kind, check, what in (
        ("t_end", float, lambda v: v > 0, "must be positive"),
        ("dt", float, lambda v: v > 0, "must be positive"),
        ("cfl", float, lambda v: 0 < v <= 2, "must lie in (0, 2]"),
        ("diagnostics_interval", int, lambda v: v >= 1, "must be >= 1"),
    ):
        val = conv("time", key, kind, check, what)
        if val is not None:
            tm[key] = val
    if "dt" in tm and "cfl" in tm:
        raise ConfigError(f"{source}:{get('time', 'cfl')[1]}: give either dt or cfl, not both")
    if scenario == "convergence" and "cfl" in tm:
        raise ConfigError(f"{source}:{get('time', 'cfl')[1]}: the convergence scenario uses a fixed dt")
    if scenario != "convergence" and "dt" in tm:
        raise ConfigError(f"{source}:{get('time', 'dt')[1]}: scenario {scenario!r} uses CFL time stepping")
    cfg.time = tm

    out = get("output", "directory")
    if out is not None:
        cfg.output_dir = out[0]  # relative to the working directory, unlike mesh files
    cfg.dump_interval = conv("output", "dump_interval", int, lambda v: v >= 0, "must be >= 0") or 0
    return cfg


def load_config(path):
    with open(path) as fh:
        text = fh.read()
    data = parse_config(text, source=str(path))
    return build_run_config(data, source=str(path), base_dir=os.path.dirname(os.path.abspath(path)))
