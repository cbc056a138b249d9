"""Error-rate sweeps over spreading factor, channel preset and Eb/N0.

A sweep evaluates every requested method at every (sf, preset, Eb/N0) cell
and collects the results as an :class:`ErrorCurve`, which can be written to a
fixed-layout CSV file and rendered as a BER waterfall plot.
"""

from __future__ import annotations

import configparser
import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional

from .analytic import (
    PrecisionError,
    QuadratureError,
    ber_from_ser,
    ser_exact_rician,
    ser_numeric_integration,
)
from .bounds import (
    BoundDomainError,
    ser_lower,
    ser_lower_exp,
    ser_lower_rayleigh,
    ser_upper,
    ser_upper_exp,
    ser_upper_rayleigh,
)
from .channel import ChannelParams
from .link import LinkBudget
from .modem import LoRaParams
from .montecarlo import McConfig, simulate_ser

__all__ = [
    "CSV_HEADER",
    "METHODS",
    "ChannelPreset",
    "ConfigError",
    "ErrorCurve",
    "ErrorRow",
    "FIGURES",
    "GridSpec",
    "SweepConfig",
    "emit_plot",
    "load_config",
    "read_csv",
    "run_sweep",
    "write_csv",
]

METHODS = (
    "mc",
    "exact",
    "integral",
    "upper",
    "lower",
    "upper_exp",
    "lower_exp",
    "upper_rayleigh",
    "lower_rayleigh",
)
RAYLEIGH_METHODS = frozenset({"upper_rayleigh", "lower_rayleigh"})
CSV_HEADER = ("method", "sf", "k_factor", "ebn0_db", "ser", "ber", "stderr", "trials", "status")

STATUS_OK = "ok"
SKIP_PRECISION = "skipped:precision"
SKIP_QUADRATURE = "skipped:quadrature"
SKIP_DOMAIN = "skipped:domain"


class ConfigError(ValueError):
    """Invalid sweep configuration; ``field`` names the offending setting."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    step: float

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        try:
            if len(parts) == 1:
                v = float(parts[0])
                return cls(v, v, 1.0)
            if len(parts) == 3:
                return cls(*(float(p) for p in parts))
        except ValueError:
            pass
        raise ConfigError("ebn0_db", f"expected start:stop:step, got {text!r}")

    def values(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [self.start + i * self.step for i in range(n)]

    def __str__(self) -> str:
        return f"{self.start:g}:{self.stop:g}:{self.step:g}"


@dataclass(frozen=True)
class ChannelPreset:
    """Either a Rician K-factor or an explicit (mu_h, sigma_h2) pair.

    The channel is always normalised to E{|H|^2} = 1.
    """

    name: str
    k_factor: Optional[float] = None
    mu_h: Optional[complex] = None
    sigma_h2: Optional[float] = None

    def channel(self) -> ChannelParams:
        if self.k_factor is not None:
            return ChannelParams.from_k_factor(self.k_factor)
        return ChannelParams(self.mu_h, self.sigma_h2).normalized()

    @property
    def reported_k(self) -> float:
        if self.k_factor is not None:
            return float(self.k_factor)
        return self.channel().k_factor


@dataclass
class SweepConfig:
    sf_list: list[int] = field(default_factory=lambda: [7])
    presets: list[ChannelPreset] = field(default_factory=lambda: [ChannelPreset("k1", k_factor=1.0)])
    ebn0_db: GridSpec = field(default_factory=lambda: GridSpec(0.0, 40.0, 1.0))
    methods: list[str] = field(default_factory=lambda: ["integral", "upper", "lower"])
    mc: McConfig = field(default_factory=McConfig)
    output_path: str = "sweep.csv"
    plot_path: Optional[str] = None

    def validate(self) -> None:
        if not self.sf_list:
            raise ConfigError("sf_list", "at least one spreading factor is required")
        for sf in self.sf_list:
            if not isinstance(sf, int) or not 2 <= sf <= 16:
                raise ConfigError("sf_list", f"spreading factor must be an integer in [2, 16], got {sf!r}")
        if not self.presets:
            raise ConfigError("presets", "at least one channel preset is required")
        for p in self.presets:
            _validate_preset(p)
        g = self.ebn0_db
        if not g.step > 0:
            raise ConfigError("ebn0_db", f"step must be > 0, got {g.step:g}")
        if g.start > g.stop:
            raise ConfigError("ebn0_db", f"start {g.start:g} exceeds stop {g.stop:g}")
        if not self.methods:
            raise ConfigError("methods", "at least one method is required")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError("methods", f"unknown method {m!r}; choose from {', '.join(METHODS)}")
        if RAYLEIGH_METHODS.intersection(self.methods):
            for p in self.presets:
                if abs(p.channel().mu_h) != 0:
                    raise ConfigError(
                        "methods",
                        f"Rayleigh-only methods need mu_h = 0 presets; preset {p.name!r} has a specular part",
                    )
        if not self.output_path:
            raise ConfigError("output_path", "an output path is required")


def _validate_preset(p: ChannelPreset) -> None:
    where = f"preset {p.name!r}"
    if p.k_factor is not None:
        if p.mu_h is not None or p.sigma_h2 is not None:
            raise ConfigError("k_factor", f"{where}: give either k_factor or (mu_h, sigma_h2), not both")
        if not p.k_factor >= 0:
            raise ConfigError("k_factor", f"{where}: must be >= 0, got {p.k_factor!r}")
        return
    if p.mu_h is None or p.sigma_h2 is None:
        raise ConfigError("presets", f"{where}: needs k_factor or both mu_h and sigma_h2")
    if not p.sigma_h2 >= 0:
        raise ConfigError("sigma_h2", f"{where}: must be >= 0, got {p.sigma_h2!r}")
    if p.sigma_h2 + abs(p.mu_h) ** 2 <= 0:
        raise ConfigError("sigma_h2", f"{where}: channel has zero mean power")


@dataclass(frozen=True)
class ErrorRow:
    method: str
    sf: int
    k_factor: float
    ebn0_db: float
    ser: Optional[float]
    ber: Optional[float]
    stderr: Optional[float] = None
    trials: Optional[int] = None
    status: str = STATUS_OK

    def sort_key(self):
        return (self.method, self.sf, self.k_factor, self.ebn0_db)


@dataclass
class ErrorCurve:
    rows: list[ErrorRow] = field(default_factory=list)

    def sorted(self) -> "ErrorCurve":
        return ErrorCurve(sorted(self.rows, key=ErrorRow.sort_key))

    def select(self, method: str, sf: Optional[int] = None, k_factor: Optional[float] = None) -> list[ErrorRow]:
        return [
            r for r in self.rows
            if r.method == method
            and (sf is None or r.sf == sf)
            and (k_factor is None or r.k_factor == k_factor)
        ]

    def __len__(self) -> int:
        return len(self.rows)


def _evaluate(method: str, lb: LinkBudget, mc: McConfig):
    """Return (ser, stderr, trials, status) for one cell."""
    if method == "mc":
        res = simulate_ser(lb, mc)
        return res.ser_hat, res.stderr, res.trials_run, STATUS_OK
    try:
        if method == "exact":
            ser = ser_exact_rician(lb)
        elif method == "integral":
            ser = ser_numeric_integration(lb)
        elif method == "upper":
            ser = ser_upper(lb)
        elif method == "lower":
            ser = ser_lower(lb)
        elif method == "upper_exp":
            ser = ser_upper_exp(lb)
        elif method == "lower_exp":
            ser = ser_lower_exp(lb)
        elif method == "upper_rayleigh":
            ser = ser_upper_rayleigh(lb.params, lb.ch.sigma_h2, lb.es_n0)
        elif method == "lower_rayleigh":
            ser = ser_lower_rayleigh(lb.params, lb.ch.sigma_h2, lb.es_n0)
        else:
            raise ConfigError("methods", f"unknown method {method!r}")
    except PrecisionError:
        return None, None, None, SKIP_PRECISION
    except QuadratureError:
        return None, None, None, SKIP_QUADRATURE
    except BoundDomainError:
        return None, None, None, SKIP_DOMAIN
    return ser, None, None, STATUS_OK


def run_sweep(cfg: SweepConfig) -> ErrorCurve:
    """Evaluate every (method, sf, preset, Eb/N0) cell; rows come back sorted."""
    cfg.validate()
    rows = []
    grid = cfg.ebn0_db.values()
    for sf in cfg.sf_list:
        params = LoRaParams(sf)
        for preset in cfg.presets:
            ch = preset.channel()
            k = preset.reported_k
            for ebn0_db in grid:
                lb = LinkBudget.from_ebn0_db(sf, ch, ebn0_db)
                for method in cfg.methods:
                    ser, stderr, trials, status = _evaluate(method, lb, cfg.mc)
                    ber = ber_from_ser(params, ser) if ser is not None else None
                    rows.append(ErrorRow(method, sf, k, ebn0_db, ser, ber, stderr, trials, status))
    return ErrorCurve(rows).sorted()


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def write_csv(curve: ErrorCurve, path) -> None:
    """Write rows sorted by (method, sf, k_factor, ebn0_db), LF line endings."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in curve.sorted().rows:
            w.writerow([
                r.method, str(r.sf), _fmt(r.k_factor), _fmt(r.ebn0_db), _fmt(r.ser),
                _fmt(r.ber), _fmt(r.stderr), _fmt(r.trials), r.status,
            ])


def read_csv(path) -> ErrorCurve:
    def opt_float(s):
        return float(s) if s != "" else None

    with open(path, newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        rows = [
            ErrorRow(
                method=m, sf=int(sf), k_factor=float(k), ebn0_db=float(db),
                ser=opt_float(ser), ber=opt_float(ber), stderr=opt_float(se),
                trials=int(tr) if tr != "" else None, status=st,
            )
            for m, sf, k, db, ser, ber, se, tr, st in reader
        ]
    return ErrorCurve(rows)


def build_figure(curve: ErrorCurve, title: Optional[str] = None):
    """BER waterfall: one polyline per (method, sf, k_factor)."""
    if not curve.rows:
        raise ValueError("cannot plot an empty error curve")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    groups: dict[tuple, list[ErrorRow]] = {}
    for r in curve.sorted().rows:
        groups.setdefault((r.method, r.sf, r.k_factor), []).append(r)
    for (method, sf, k), rows in groups.items():
        pts = [(r.ebn0_db, r.ber) for r in rows if r.status == STATUS_OK and r.ber and r.ber > 0]
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.semilogy(
            xs, ys,
            linestyle="--" if method == "mc" else "-",
            marker="o" if method == "mc" or len(pts) == 1 else None,
            label=f"{method}, SF={sf}, K={k:g}",
        )
    ax.set_ylim(1e-6, 1.0)
    ax.set_xlabel("Eb/N0 (dB)")
    ax.set_ylabel("bit error probability")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    if title:
        ax.set_title(title)
    return fig


def emit_plot(curve: ErrorCurve, path, title: Optional[str] = None) -> None:
    """Write the BER waterfall as a self-contained SVG file."""
    import matplotlib.pyplot as plt

    fig = build_figure(curve, title)
    with plt.rc_context({"svg.hashsalt": "lora-ser", "svg.fonttype": "path"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# -- config files -----------------------------------------------------------

def _split_list(text: str) -> list[str]:
    return [t.strip() for t in text.replace(";", ",").split(",") if t.strip()]


def parse_int_list(text: str, field_name: str) -> list[int]:
    try:
        return [int(t) for t in _split_list(text)]
    except ValueError:
        raise ConfigError(field_name, f"expected comma-separated integers, got {text!r}") from None


def parse_float_list(text: str, field_name: str) -> list[float]:
    try:
        return [float(t) for t in _split_list(text)]
    except ValueError:
        raise ConfigError(field_name, f"expected comma-separated numbers, got {text!r}") from None


def _parse_complex(text: str, field_name: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError(field_name, f"expected a complex number such as 0.5+0.5j, got {text!r}") from None


def _get(section, key, conv, field_name=None):
    raw = section.get(key)
    if raw is None or raw.strip() == "":
        return None
    try:
        return conv(raw.strip())
    except ValueError:
        raise ConfigError(field_name or key, f"cannot parse {raw!r}") from None


def load_config(path, base: Optional[SweepConfig] = None) -> SweepConfig:
    """Read an INI-style sweep file.

    ``[sweep]`` holds sf_list, ebn0_db, methods, output_path, plot_path;
    ``[mc]`` holds trials, seed, batch_size, target_errors, parallel_workers;
    every ``[preset NAME]`` section holds k_factor or mu_h and sigma_h2.
    """
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError("config", str(exc)) from None
    cfg = replace(base) if base is not None else SweepConfig()

    known = {"sweep", "mc"}
    for name in cp.sections():
        if name not in known and not name.startswith("preset"):
            raise ConfigError(name, "unknown section")

    if cp.has_section("sweep"):
        s = cp["sweep"]
        for key in s:
            if key not in {"sf_list", "ebn0_db", "methods", "output_path", "plot_path"}:
                raise ConfigError(key, "unknown key in [sweep]")
        if "sf_list" in s:
            cfg.sf_list = parse_int_list(s["sf_list"], "sf_list")
        if "ebn0_db" in s:
            cfg.ebn0_db = GridSpec.parse(s["ebn0_db"])
        if "methods" in s:
            cfg.methods = _split_list(s["methods"])
        if "output_path" in s:
            cfg.output_path = s["output_path"].strip()
        if s.get("plot_path", "").strip():
            cfg.plot_path = s["plot_path"].strip()

    if cp.has_section("mc"):
        s = cp["mc"]
        fields = {"trials", "seed", "batch_size", "target_errors", "parallel_workers"}
        for key in s:
            if key not in fields:
                raise ConfigError(key, "unknown key in [mc]")
        # a blank target_errors means "no early stop"; other blanks keep defaults
        updates = {k: _get(s, k, int) for k in s}
        updates = {k: v for k, v in updates.items() if v is not None or k == "target_errors"}
        try:
            cfg.mc = replace(cfg.mc, **updates)
        except ValueError as exc:
            raise ConfigError("mc", str(exc)) from None

    presets = []
    for name in cp.sections():
        if not name.startswith("preset"):
            continue
        s = cp[name]
        for key in s:
            if key not in {"k_factor", "mu_h", "sigma_h2"}:
                raise ConfigError(key, f"unknown key in [{name}]")
        label = name[len("preset"):].strip(" .:") or f"preset{len(presets)}"
        presets.append(ChannelPreset(
            label,
            k_factor=_get(s, "k_factor", float),
            mu_h=_get(s, "mu_h", lambda t: _parse_complex(t, "mu_h")),
            sigma_h2=_get(s, "sigma_h2", float),
        ))
    if presets:
        cfg.presets = presets
    return cfg


def _fig(sf_list, presets, methods, step=1.0):
    return SweepConfig(
        sf_list=list(sf_list),
        presets=list(presets),
        ebn0_db=GridSpec(0.0, 40.0, step),
        methods=list(methods),
    )


def _k(*ks: float) -> Iterable[ChannelPreset]:
    return [ChannelPreset(f"k{k:g}", k_factor=k) for k in ks]


# Named sweep setups: SF5 and SF7 at K=1, SF12 across K, SF7 Rayleigh.
FIGURES = {
    "fig1": lambda: _fig([5], _k(1.0), ["mc", "exact", "integral", "upper", "lower"]),
    "fig2": lambda: _fig([7], _k(1.0), ["mc", "integral", "upper", "lower"]),
    "fig3": lambda: _fig([12], _k(0.1, 1.0, 10.0), ["integral", "upper", "lower"]),
    "fig4": lambda: _fig(
        [7], [ChannelPreset("rayleigh", mu_h=0j, sigma_h2=1.0)],
        ["mc", "integral", "upper_rayleigh", "lower_rayleigh"],
    ),
}
