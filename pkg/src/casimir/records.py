"""Run specifications, run records and their serialized forms.

A RunSpec is the fully resolved input of one CLI invocation (flags over
config-file values over built-in defaults); a RunRecord is the machine-
readable result.  Records serialize to JSON (nested, human-readable) and
round-trip losslessly; tabular output goes to a summary CSV with the fixed
column set

    gamma, epsilon, M, K, k, N_numeric, N_analytic, rel_err, provenance

where N_numeric carries the row's provenance tag and N_analytic, when
present, is always the resonant closed form.  Floats are written with
repr(), which is shortest-round-trip and therefore byte-deterministic.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from .cavity import CavityParams
from .errors import UserInputError
from .evolution import IntegratorConfig

KINDS = ("simulate", "perturb", "compare", "sweep", "validate")
FORMATS = ("csv", "records", "both")

CSV_COLUMNS = ("gamma", "epsilon", "M", "K", "k",
               "N_numeric", "N_analytic", "rel_err", "provenance")


@dataclass(frozen=True)
class RunSpec:
    """Resolved configuration of one command invocation."""

    kind: str
    gamma: float = 2.0
    epsilon: float = 1e-3
    epsilon2: float | None = None
    periods: int = 16
    duration: float | None = None
    L0: float = 1.0
    modes: int | None = None
    scheme: str = "fixed"
    step_per_period: int = 200
    rtol: float = 1e-10
    atol: float = 1e-12
    workers: int = 1
    out: str | None = None
    fmt: str = "csv"
    seed: int = 0
    dump: str | None = None
    sweep_gamma: tuple = ()
    sweep_epsilon: tuple = ()
    sweep_periods: tuple = ()
    sweep_modes: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UserInputError(f"unknown command kind {self.kind!r}")
        if self.fmt not in FORMATS:
            raise UserInputError(
                f"format must be one of {FORMATS}, got {self.fmt!r}")
        if self.workers < 1:
            raise UserInputError("workers must be >= 1")
        for name in ("sweep_gamma", "sweep_epsilon", "sweep_periods",
                     "sweep_modes"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def params(self) -> CavityParams:
        """Physical parameters; duration wins over the period count."""
        if self.duration is not None:
            return CavityParams(epsilon=self.epsilon, gamma=self.gamma,
                                T=self.duration, L0=self.L0, K=self.modes)
        return CavityParams.from_periods(self.epsilon, self.gamma,
                                         self.periods, L0=self.L0,
                                         K=self.modes)

    def config(self) -> IntegratorConfig:
        return IntegratorConfig(scheme=self.scheme,
                                step_per_period=self.step_per_period,
                                rtol=self.rtol, atol=self.atol)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for name in ("sweep_gamma", "sweep_epsilon", "sweep_periods",
                     "sweep_modes"):
            d[name] = list(d[name])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunSpec":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise UserInputError(
                f"unknown spec fields: {', '.join(sorted(unknown))}")
        return cls(**d)


@dataclass(frozen=True)
class RunRecord:
    """Machine-readable result of one command invocation.

    Every numeric quantity lives under a provenance tag; `spec` echoes the
    fully resolved RunSpec plus the derived quantities actually used.
    """

    kind: str
    spec: dict
    tool: dict
    warnings: list = field(default_factory=list)
    spectra: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    timing_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "spec": self.spec,
            "tool": self.tool,
            "warnings": list(self.warnings),
            "spectra": [dict(s) for s in self.spectra],
            "extras": self.extras,
            "timing_seconds": self.timing_seconds,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(kind=d["kind"], spec=d["spec"], tool=d["tool"],
                   warnings=list(d["warnings"]),
                   spectra=[dict(s) for s in d["spectra"]],
                   extras=d["extras"],
                   timing_seconds=d["timing_seconds"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls.from_dict(json.loads(text))


def _cell(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def summary_rows_sorted(rows: list[dict]) -> list[dict]:
    """Canonical row order, independent of execution order."""
    return sorted(rows, key=lambda r: (r["gamma"], r["epsilon"], r["M"],
                                       r["K"], r["k"], r["provenance"]))


def format_summary_csv(rows: list[dict]) -> str:
    """Render summary rows as CSV text (deterministic bytes)."""
    lines = [",".join(CSV_COLUMNS)]
    for row in summary_rows_sorted(rows):
        lines.append(",".join(_cell(row.get(c)) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"
