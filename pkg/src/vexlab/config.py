"""Flat key-value run configuration with one section per concern.

Config files are INI-style text; no environment variables are consulted.
A resolved configuration is embedded verbatim in every report.

Sections and keys::

    [domain]    dim=1, a=<lo>, b=<hi>, h=<cell>          (1D)
                dim=2, lo1=, lo2=, hi1=, hi2=, h=        (2D)
    [schedule]  r0=<base radius>, levels=<count>         (geometric radii)
                radii=<comma list>                       (explicit radii)
                left=<left endpoint>                     (half-line domains)
    [functions] p=<expr>, q=<expr>, f=<expr>
    [norm]      rtol=
    [check]     condition=finite|touching|embedding|lerner|defect, lambda=
    [omega]     lambda=
    [falsify]   budget=, threshold=, c1=, c2=
    [constants] seed=, calibration=, holdout=, safety=
    [fourier]   seed=, family=, lambda=
    [reproduce] id=
    [output]    csv=<path>
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

from .conditions import TruncationSchedule, geometric_radii
from .grid import GridDomain, GridError, make_box, make_interval

__all__ = ["ConfigError", "RunConfig", "load_config"]


class ConfigError(ValueError):
    """Bad run configuration; reported with section/key context."""


@dataclass(frozen=True)
class RunConfig:
    raw: dict  # section -> {key: value}, fully resolved strings

    def has(self, section: str, key: str | None = None) -> bool:
        if key is None:
            return section in self.raw
        return section in self.raw and key in self.raw[section]

    def get(self, section: str, key: str, default=None) -> str:
        try:
            return self.raw[section][key]
        except KeyError:
            if default is not None:
                return default
            raise ConfigError(f"missing [{section}] {key}") from None

    def get_float(self, section: str, key: str, default=None) -> float:
        val = self.get(section, key, None if default is None else str(default))
        try:
            out = float(val)
        except ValueError:
            raise ConfigError(f"[{section}] {key}={val!r} is not a number") from None
        if not math.isfinite(out):
            raise ConfigError(f"[{section}] {key}={val!r} is not finite")
        return out

    def get_int(self, section: str, key: str, default=None) -> int:
        val = self.get(section, key, None if default is None else str(default))
        try:
            return int(val)
        except ValueError:
            raise ConfigError(f"[{section}] {key}={val!r} is not an integer") from None

    def domain(self) -> GridDomain:
        dim = self.get_int("domain", "dim", 1)
        h = self.get_float("domain", "h")
        if dim == 1:
            return make_interval(self.get_float("domain", "a"),
                                 self.get_float("domain", "b"), h)
        if dim == 2:
            lo = (self.get_float("domain", "lo1"), self.get_float("domain", "lo2"))
            hi = (self.get_float("domain", "hi1"), self.get_float("domain", "hi2"))
            return make_box(lo, hi, h)
        raise ConfigError(f"[domain] dim must be 1 or 2, got {dim}")

    def schedule(self) -> TruncationSchedule:
        if not self.has("schedule"):
            raise ConfigError("missing [schedule] section")
        h = self.get_float("domain", "h")
        if self.has("schedule", "radii"):
            radii = tuple(float(tok) for tok in
                          self.get("schedule", "radii").split(","))
        else:
            radii = geometric_radii(self.get_float("schedule", "r0"),
                                    self.get_int("schedule", "levels", 13))
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ConfigError("[schedule] radii must be strictly increasing")
        rmax = radii[-1]
        left = self.get_float("schedule", "left", -rmax)
        try:
            dom = make_interval(left, rmax, h)
        except GridError as exc:
            raise ConfigError(f"bad schedule domain: {exc}") from exc
        return TruncationSchedule(dom, radii)

    def to_dict(self) -> dict:
        return {section: dict(kv) for section, kv in sorted(self.raw.items())}


def load_config(path: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path!r}: {exc}") from exc
    raw = {section: dict(parser.items(section)) for section in parser.sections()}
    return RunConfig(raw)
