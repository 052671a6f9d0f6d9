"""Experiment configuration: an INI-style text file with sections.

Every key is optional; unknown sections or keys and out-of-range values are
rejected with the offending line number.

Example::

    [run]
    seed = 7

    [grid]
    n = 4096

    [scan]
    kmax = 8
"""

import configparser
import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from ..symbols import SYMBOL_NAMES

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    """Invalid configuration, with the 1-based line number when known."""

    def __init__(self, message, line=None, source="<config>"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def _int_list(text):
    return tuple(int(x) for x in text.replace(",", " ").split())


def _name_list(text):
    return tuple(x for x in text.replace(",", " ").split())


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# (section, key) -> (field name, parser)
_KEYS = {
    ("run", "seed"): ("seed", int),
    ("grid", "n"): ("grid_n", int),
    ("grid", "offset"): ("grid_offset", _bool),
    ("scan", "kmax"): ("kmax", int),
    ("scan", "n_angles"): ("n_angles", int),
    ("arcs", "j"): ("arcs_J", int),
    ("arcs", "m"): ("arcs_M", int),
    ("weights", "alphas"): ("alphas", lambda t: tuple(float(x) for x in t.replace(",", " ").split())),
    ("symbols", "names"): ("symbols", _name_list),
    ("hankel", "ladder"): ("ladder", _int_list),
    ("quadrature", "n_radial"): ("n_radial", int),
    ("quadrature", "n_angular"): ("n_angular", int),
    ("carleson", "n_measures"): ("n_measures", int),
    ("carleson", "n_atoms"): ("n_atoms", int),
    ("carleson", "corpus_size"): ("corpus_size", int),
    ("carleson", "corpus_degree"): ("corpus_degree", int),
    ("carleson", "alarm_ratio"): ("alarm_ratio", float),
    ("carleson", "embedding_pairs"): ("embedding_pairs", int),
    ("carleson", "measure_file"): ("measure_file", str.strip),
    ("tolerances", "identity"): ("tol_identity", float),
    ("tolerances", "stability"): ("tol_stability", float),
    ("tolerances", "slack"): ("slack", float),
    ("tolerances", "fluctuation"): ("fluctuation", float),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs of a run.  ``seed`` fixes every random draw."""

    seed: int = 0
    grid_n: int = 4096
    grid_offset: bool = True
    kmax: int = 8
    n_angles: int = 128
    arcs_J: int = 10
    arcs_M: int = 64
    alphas: tuple = (-0.9, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 0.9)
    symbols: tuple = SYMBOL_NAMES
    ladder: tuple = (16, 32, 64, 128)
    n_radial: int = 256
    n_angular: int = 512
    n_measures: int = 20
    n_atoms: int = 12
    corpus_size: int = 200
    corpus_degree: int = 64
    alarm_ratio: float = 1e4
    embedding_pairs: int = 20
    measure_file: str = ""
    tol_identity: float = 1e-9
    tol_stability: float = 0.02
    slack: float = 0.1
    fluctuation: float = 0.2

    def validate(self, lines=None, source="<config>"):
        """Raise :class:`ConfigError` for any value outside its documented bound."""
        lines = lines or {}

        def need(ok, fld, msg):
            if not ok:
                raise ConfigError(f"{fld}: {msg}", lines.get(fld), source)

        n = self.grid_n
        need(256 <= n <= 2**18 and n & (n - 1) == 0, "grid_n", "must be a power of two in [256, 2^18]")
        need(1 <= self.kmax <= 12, "kmax", "must lie in 1..12 (the doubled scan goes to 24)")
        need(8 <= self.n_angles <= 4096, "n_angles", "must lie in 8..4096")
        need(0 <= self.arcs_J and 2 * n * 2.0**-self.arcs_J >= 4, "arcs_J",
             "finest arc must span at least 4 grid nodes")
        need(1 <= self.arcs_M <= 1024, "arcs_M", "must lie in 1..1024")
        need(all(-1 < a < 1 for a in self.alphas), "alphas", "power exponents must lie in (-1, 1)")
        need(len(self.symbols) > 0 and set(self.symbols) <= set(SYMBOL_NAMES), "symbols",
             f"names must be among {', '.join(SYMBOL_NAMES)}")
        need(len(self.ladder) > 0 and all(1 <= k <= 512 for k in self.ladder)
             and list(self.ladder) == sorted(set(self.ladder)), "ladder",
             "must be increasing integers in 1..512")
        need(max(self.ladder) < n // 4, "ladder", "largest n must stay below N/4")
        need(8 <= self.n_radial <= 2048, "n_radial", "must lie in 8..2048")
        need(self.n_angular >= 8 and self.n_angular % self.n_angles == 0, "n_angular",
             "must be a multiple of the scan angle count")
        need(1 <= self.n_measures <= 1000, "n_measures", "must lie in 1..1000")
        need(1 <= self.n_atoms <= 512, "n_atoms", "must lie in 1..512")
        need(1 <= self.corpus_size <= 10000, "corpus_size", "must lie in 1..10000")
        need(0 <= self.corpus_degree <= 1024, "corpus_degree", "must lie in 0..1024")
        need(self.alarm_ratio > 1, "alarm_ratio", "must exceed 1")
        need(1 <= self.embedding_pairs <= 1000, "embedding_pairs", "must lie in 1..1000")
        need(0 <= self.seed < 2**64, "seed", "must be an unsigned 64-bit integer")
        for fld in ("tol_identity", "tol_stability", "slack", "fluctuation"):
            need(getattr(self, fld) > 0, fld, "must be positive")
        return self

    def with_overrides(self, seed=None, grid_n=None, kmax=None):
        changes = {k: v for k, v in (("seed", seed), ("grid_n", grid_n), ("kmax", kmax))
                   if v is not None}
        return dataclasses.replace(self, **changes).validate(source="<command line>")

    def as_dict(self):
        return {k: list(v) if isinstance(v, tuple) else v
                for k, v in dataclasses.asdict(self).items()}

    def digest(self):
        """SHA-256 of the canonical JSON form."""
        text = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _key_lines(text):
    """``(section, key) -> line`` for every assignment in the raw text."""
    out, section = {}, None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            out[(section, None)] = lineno
            continue
        for sep in ("=", ":"):
            if sep in line:
                out[(section, line.split(sep, 1)[0].strip().lower())] = lineno
                break
    return out


def parse_config(text, source="<config>"):
    """Parse configuration text into a validated :class:`ExperimentConfig`."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("cannot parse line", lineno, source) from None
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], getattr(exc, "lineno", None), source) from None
    lines = _key_lines(text)
    known_sections = {s for s, _ in _KEYS}
    values, field_lines = {}, {}
    for section in parser.sections():
        sec = section.lower()
        if sec not in known_sections:
            raise ConfigError(f"unknown section [{section}]", lines.get((sec, None)), source)
        for key, raw in parser.items(section):
            line = lines.get((sec, key))
            if (sec, key) not in _KEYS:
                raise ConfigError(f"unknown key {key!r} in [{section}]", line, source)
            fld, conv = _KEYS[(sec, key)]
            try:
                values[fld] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}", line, source) from None
            field_lines[fld] = line
    return ExperimentConfig(**values).validate(field_lines, source)


def load_config(path):
    """Read a config file; a relative ``measure_file`` is resolved against its directory."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read: {exc.strerror}", None, str(path)) from None
    cfg = parse_config(text, str(path))
    if cfg.measure_file and not Path(cfg.measure_file).is_absolute():
        cfg = dataclasses.replace(cfg, measure_file=str(path.parent / cfg.measure_file))
    return cfg
