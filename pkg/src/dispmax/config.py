"""Experiment configuration parsing and reproducible CSV table emission."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace

from .errors import ConfigError

__version__ = "0.1.0"


@dataclass(frozen=True)
class ExperimentConfig:
    a: float = 2.0
    theta: str = "point:0"
    q: float = 2.0
    sigma: float | None = None  # defaults to q/4 (smallest admissible Sobolev order)
    k_min: int = 2
    k_max: int = 6
    seed: int = 0
    out: str = "."
    trials: int = 6
    x_count: int = 65
    half_width: float = 32.0
    n_grid: int = 512
    s: float = 1.0
    samples_per_region: int = 200
    lambda_min_exp: int = 4
    lambda_max_exp: int = 10
    scale_min_exp: int = 6  # smallest convergence scale 2^-scale_min_exp
    scale_max_exp: int = 1
    delta_min: float = 1e-4
    delta_max: float = 0.1
    n_scales: int = 12

    def resolved_sigma(self) -> float:
        return self.q / 4.0 if self.sigma is None else self.sigma

    def validate(self) -> "ExperimentConfig":
        if not 1.0 <= self.q <= 4.0:
            raise ConfigError(f"q={self.q} outside [1, 4]")
        sig = self.resolved_sigma()
        if sig < self.q / 4.0 - 1e-12:
            raise ConfigError(f"sigma below q/4 (sigma={sig}, q={self.q})")
        if sig > 1.0 + 1e-12:
            raise ConfigError(f"sigma above 1 (sigma={sig})")
        if not self.a > 1.0:
            raise ConfigError(f"a={self.a} must exceed 1")
        return self

    def canonical(self) -> str:
        parts = []
        for f in sorted(fields(self), key=lambda f: f.name):
            if f.name == "out":  # where results land does not change them
                continue
            parts.append(f"{f.name}={getattr(self, f.name)!r}")
        return "\n".join(parts)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _parse_value(key: str, raw: str):
    typ = _FIELD_TYPES[key]
    if key == "sigma":
        return float(raw)
    if typ == "int":
        return int(raw)
    if typ == "float":
        return float(raw)
    return raw


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """key=value lines, '#' comments; unknown keys are rejected by line number."""
    cfg = base or ExperimentConfig()
    updates = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key=value, got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            updates[key] = _parse_value(key, raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    return replace(cfg, **updates).validate()


@dataclass
class ResultTable:
    columns: dict  # name -> list of values
    provenance: dict

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError("column lengths differ")

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def __eq__(self, other):
        return (
            isinstance(other, ResultTable)
            and self.columns == other.columns
            and self.provenance == other.provenance
        )


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def table_to_csv(table: ResultTable) -> str:
    lines = [f"# {k}={_fmt(v)}" for k, v in sorted(table.provenance.items())]
    names = list(table.columns)
    lines.append(",".join(names))
    for i in range(table.n_rows):
        lines.append(",".join(_fmt(table.columns[n][i]) for n in names))
    return "\n".join(lines) + "\n"


def write_csv(table: ResultTable, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(table_to_csv(table))


def _sniff(raw: str):
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def read_csv(path) -> ResultTable:
    with open(path) as fh:
        lines = fh.read().splitlines()
    provenance = {}
    body = []
    for line in lines:
        if line.startswith("# "):
            key, _, val = line[2:].partition("=")
            provenance[key] = _sniff(val)
        elif line:
            body.append(line)
    names = body[0].split(",")
    columns = {n: [] for n in names}
    for line in body[1:]:
        for n, raw in zip(names, line.split(",")):
            columns[n].append(_sniff(raw))
    return ResultTable(columns=columns, provenance=provenance)


def provenance_block(cfg: ExperimentConfig, **extra) -> dict:
    block = {"config_hash": cfg.digest(), "seed": cfg.seed, "tool_version": __version__}
    block.update(extra)
    return block


def emit_plot_script(table: ResultTable, script_path, csv_name: str) -> None:
    """Write a gnuplot script plotting the table's numeric columns; never executed here."""
    names = list(table.columns)
    xcol = names[0]
    lines = [
        "# generated plot script; run with: gnuplot <this file>",
        "set datafile separator ','",
        "set datafile commentschars '#'",
        f"set xlabel '{xcol}'",
        "set key outside",
        "plot \\",
    ]
    plots = []
    for i, name in enumerate(names[1:], start=2):
        plots.append(f"  '{csv_name}' using 1:{i} with linespoints title '{name}'")
    lines.append(", \\\n".join(plots))
    with open(script_path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
