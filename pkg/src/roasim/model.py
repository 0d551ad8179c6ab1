"""System and bath model types, bath discretization, scenario validation.

A scenario couples an N-state system (Hermitian hopping matrix ``couplings``)
to independent harmonic baths, one bath per basis state.  Each bath is
described either by a sum of Lorentzian spectral-density peaks or by an
explicit list of discrete modes.  Scenario files are strict JSON: unknown
fields are rejected and every error is reported with its field path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "LorentzianPeak",
    "SiteBath",
    "DiscreteBath",
    "DiscretizationConfig",
    "IntegratorConfig",
    "PMConfig",
    "Scenario",
    "ScenarioError",
    "METHODS",
    "LORENTZIAN_METHODS",
    "GENERAL_METHODS",
    "spectral_density",
    "correlation_function",
    "total_bath_weight",
    "discretize",
    "default_frequency_window",
    "validate_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "load_scenario",
    "dump_scenario",
]

METHODS = (
    "general-low",
    "general-high",
    "lorentzian-low",
    "lorentzian-high",
    "pm-reference",
)
GENERAL_METHODS = ("general-low", "general-high")
LORENTZIAN_METHODS = ("lorentzian-low", "lorentzian-high")

# Discretization defaults: window of 50 half widths on both sides of the
# peak centers, about one hundred modes per site across that window.
DEFAULT_MODES_PER_SITE = 100
DEFAULT_WINDOW_HALF_WIDTHS = 50.0


class ScenarioError(ValueError):
    """Scenario validation failure carrying a list of field-path messages."""

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class LorentzianPeak:
    """One Lorentzian peak of a bath spectral density.

    Attributes
    ----------
    weight : float
        Integrated weight of the peak (the JSON key is ``Gamma``).
    half_width : float
        Half width at half maximum (JSON key ``gamma``), must be > 0.
    center : float
        Peak center frequency (JSON key ``omega0``); may be any real
        number, negative centers included.
    """

    weight: float
    half_width: float
    center: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError(f"peak half_width must be > 0, got {self.half_width}")
        if self.weight < 0:
            raise ValueError(f"peak weight must be >= 0, got {self.weight}")


@dataclass(frozen=True)
class SiteBath:
    """Bath attached to one system basis state."""

    site: int
    peaks: tuple[LorentzianPeak, ...]

    def __post_init__(self):
        object.__setattr__(self, "peaks", tuple(self.peaks))


@dataclass(frozen=True)
class DiscreteBath:
    """Explicit discrete bath modes shared by all sites.

    ``frequencies`` has one entry per mode; ``couplings`` has shape
    (n_modes, n_sites) and holds the coupling of each mode to each site.
    Modes produced by :func:`discretize` couple to a single site each.
    """

    frequencies: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        g = np.asarray(self.couplings, dtype=complex)
        if f.ndim != 1:
            raise ValueError("frequencies must be one dimensional")
        if g.ndim != 2 or g.shape[0] != f.shape[0]:
            raise ValueError(
                f"couplings shape {g.shape} incompatible with {f.shape[0]} modes"
            )
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g))):
            raise ValueError("discrete bath contains non-finite entries")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "couplings", g)

    @property
    def n_modes(self) -> int:
        return self.frequencies.shape[0]

    @property
    def n_sites(self) -> int:
        return self.couplings.shape[1]


@dataclass(frozen=True)
class DiscretizationConfig:
    """Frequency grid settings used to discretize Lorentzian baths."""

    delta_omega: Optional[float] = None
    omega_min: Optional[float] = None
    omega_max: Optional[float] = None

    def __post_init__(self):
        if self.delta_omega is not None and not self.delta_omega > 0:
            raise ValueError("delta_omega must be > 0")


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings with an optional embedded adaptive mode."""

    dt: float = 1e-3
    t_max: float = 30.0
    sample_stride: int = 100
    adaptive: bool = False
    tol: float = 1e-8
    blowup_threshold: float = 1e6
    max_step_factor: float = 10.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if not self.t_max > 0:
            raise ValueError("t_max must be > 0")
        if not self.dt < self.t_max:
            raise ValueError("dt must be smaller than t_max")
        if self.sample_stride < 1:
            raise ValueError("sample_stride must be >= 1")
        if not 0 < self.tol < 1:
            raise ValueError("tol must lie in (0, 1)")


@dataclass(frozen=True)
class PMConfig:
    """Pseudomode reference settings.

    ``n_max`` is the Fock-space truncation per pseudomode (``None`` picks a
    default from the bath strength); ``dim_cap`` bounds the composite
    Hilbert-space dimension.
    """

    n_max: Optional[int] = None
    dim_cap: int = 20_000

    def __post_init__(self):
        if self.n_max is not None and self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.dim_cap < 2:
            raise ValueError("dim_cap must be >= 2")


@dataclass(frozen=True)
class Scenario:
    """Complete simulation request."""

    n_sites: int
    couplings: np.ndarray
    bath: Union[tuple[SiteBath, ...], DiscreteBath]
    initial_state: np.ndarray
    method: str
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    pm: PMConfig = field(default_factory=PMConfig)
    discretization: DiscretizationConfig = field(default_factory=DiscretizationConfig)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(
            self, "couplings", np.asarray(self.couplings, dtype=complex)
        )
        object.__setattr__(
            self, "initial_state", np.asarray(self.initial_state, dtype=complex)
        )
        if isinstance(self.bath, (list, tuple)):
            object.__setattr__(self, "bath", tuple(self.bath))

    def with_overrides(self, **kwargs) -> "Scenario":
        return replace(self, **kwargs)

    def initial_density(self) -> np.ndarray:
        """Initial system density matrix (outer product for pure states)."""
        psi = self.initial_state
        if psi.ndim == 1:
            return np.outer(psi, psi.conj())
        return psi.copy()


# ---------------------------------------------------------------------------
# Spectral density and correlation function
# ---------------------------------------------------------------------------

def spectral_density(peaks: Sequence[LorentzianPeak], omega) -> np.ndarray:
    """Sum-of-Lorentzians spectral density evaluated at ``omega``.

    Each peak contributes ``weight / pi * half_width /
    ((omega - center)^2 + half_width^2)``, which integrates to ``weight``
    over the whole real line.  Nonnegative everywhere.
    """
    w = np.asarray(omega, dtype=float)
    out = np.zeros_like(w, dtype=float)
    for p in peaks:
        out += (p.weight / np.pi) * p.half_width / (
            (w - p.center) ** 2 + p.half_width**2
        )
    return out


def correlation_function(peaks: Sequence[LorentzianPeak], tau) -> np.ndarray:
    """Zero-temperature bath correlation function for a sum of peaks.

    Each peak contributes ``weight * exp(-1j * center * tau -
    half_width * |tau|)``; at tau = 0 the value is the total weight.
    """
    t = np.asarray(tau, dtype=float)
    out = np.zeros_like(t, dtype=complex)
    for p in peaks:
        out += p.weight * np.exp(-1j * p.center * t - p.half_width * np.abs(t))
    return out


def total_bath_weight(peaks: Sequence[LorentzianPeak]) -> float:
    """Integrated spectral density (sum of peak weights)."""
    return float(sum(p.weight for p in peaks))


def default_frequency_window(peaks: Sequence[LorentzianPeak]) -> tuple[float, float]:
    """Default discretization window covering all peaks.

    Extends ``DEFAULT_WINDOW_HALF_WIDTHS`` half widths beyond every peak
    center on both sides; negative frequencies are kept.
    """
    if not peaks:
        raise ValueError("cannot build a frequency window without peaks")
    lo = min(p.center - DEFAULT_WINDOW_HALF_WIDTHS * p.half_width for p in peaks)
    hi = max(p.center + DEFAULT_WINDOW_HALF_WIDTHS * p.half_width for p in peaks)
    return lo, hi


def discretize(
    site_baths: Sequence[SiteBath],
    n_sites: int,
    delta_omega: Optional[float] = None,
    omega_min: Optional[float] = None,
    omega_max: Optional[float] = None,
) -> DiscreteBath:
    """Sample Lorentzian site baths on a uniform frequency grid.

    Modes sit at integer multiples of ``delta_omega`` inside
    [omega_min, omega_max]; a mode at frequency w belonging to site s gets
    coupling ``sqrt(delta_omega * J_s(w))`` to that site only.  Defaults
    per site: the window from :func:`default_frequency_window` and a
    spacing that puts about ``DEFAULT_MODES_PER_SITE`` modes across it.
    Negative grid frequencies are kept.
    """
    chunks: list[tuple[int, np.ndarray, np.ndarray]] = []
    for sb in site_baths:
        if not sb.peaks:
            continue
        if not 0 <= sb.site < n_sites:
            raise ValueError(f"bath site {sb.site} outside 0..{n_sites - 1}")
        lo, hi = omega_min, omega_max
        if lo is None or hi is None:
            dlo, dhi = default_frequency_window(sb.peaks)
            lo = dlo if lo is None else lo
            hi = dhi if hi is None else hi
        if not hi > lo:
            raise ValueError("empty frequency window")
        dw = delta_omega
        if dw is None:
            dw = (hi - lo) / DEFAULT_MODES_PER_SITE
        k_lo = int(np.ceil(lo / dw - 1e-9))
        k_hi = int(np.floor(hi / dw + 1e-9))
        if k_hi < k_lo:
            raise ValueError("empty frequency grid: window narrower than spacing")
        grid = np.arange(k_lo, k_hi + 1, dtype=float) * dw
        g = np.sqrt(dw * spectral_density(sb.peaks, grid))
        chunks.append((sb.site, grid, g))
    if not chunks:
        return DiscreteBath(np.zeros(0), np.zeros((0, n_sites), dtype=complex))
    n_modes = sum(grid.shape[0] for _, grid, _ in chunks)
    frequencies = np.empty(n_modes)
    couplings = np.zeros((n_modes, n_sites), dtype=complex)
    pos = 0
    for site, grid, g in chunks:
        k = grid.shape[0]
        frequencies[pos : pos + k] = grid
        couplings[pos : pos + k, site] = g
        pos += k
    return DiscreteBath(frequencies, couplings)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

HERMITICITY_TOL = 1e-12
NORMALIZATION_TOL = 1e-12
PSD_TOL = 1e-10


def validate_scenario(sc: Scenario) -> list[str]:
    """Collect validation errors for a scenario; empty list means valid."""
    errors: list[str] = []
    n = sc.n_sites
    if not isinstance(n, int) or n < 1:
        errors.append("n_sites: must be a positive integer")
        return errors

    v = sc.couplings
    if v.shape != (n, n):
        errors.append(f"couplings: expected shape ({n}, {n}), got {v.shape}")
    elif not np.all(np.isfinite(v)):
        errors.append("couplings: non-finite entries")
    elif np.abs(v - v.conj().T).max() > HERMITICITY_TOL:
        errors.append("couplings: matrix is not Hermitian")

    psi = sc.initial_state
    if psi.ndim == 1:
        if psi.shape != (n,):
            errors.append(f"initial_state: expected length {n}, got {psi.shape}")
        elif not np.all(np.isfinite(psi)):
            errors.append("initial_state: non-finite entries")
        elif abs(np.linalg.norm(psi) - 1.0) > NORMALIZATION_TOL:
            errors.append("initial_state: vector is not normalized")
    elif psi.ndim == 2:
        if psi.shape != (n, n):
            errors.append(f"initial_state: expected shape ({n}, {n}), got {psi.shape}")
        elif not np.all(np.isfinite(psi)):
            errors.append("initial_state: non-finite entries")
        else:
            if np.abs(psi - psi.conj().T).max() > NORMALIZATION_TOL:
                errors.append("initial_state: density matrix is not Hermitian")
            elif abs(np.trace(psi).real - 1.0) > NORMALIZATION_TOL:
                errors.append("initial_state: density matrix trace is not 1")
            elif np.linalg.eigvalsh(0.5 * (psi + psi.conj().T)).min() < -PSD_TOL:
                errors.append("initial_state: density matrix is not positive")
    else:
        errors.append("initial_state: must be a vector or a square matrix")

    if sc.method not in METHODS:
        errors.append(
            f"method: unknown method {sc.method!r}, expected one of {list(METHODS)}"
        )

    if isinstance(sc.bath, DiscreteBath):
        if sc.bath.n_sites != n:
            errors.append(
                f"bath: discrete bath has {sc.bath.n_sites} site columns, expected {n}"
            )
        if sc.method in LORENTZIAN_METHODS or sc.method == "pm-reference":
            errors.append(
                f"bath: method {sc.method!r} requires Lorentzian site baths, "
                "got explicit discrete modes"
            )
    else:
        seen: set[int] = set()
        for i, sb in enumerate(sc.bath):
            if not 0 <= sb.site < n:
                errors.append(f"baths[{i}]: site {sb.site} outside 0..{n - 1}")
            if sb.site in seen:
                errors.append(f"baths[{i}]: duplicate bath for site {sb.site}")
            seen.add(sb.site)

    return errors


# ---------------------------------------------------------------------------
# Strict JSON parsing
# ---------------------------------------------------------------------------

def _want_keys(d: dict, path: str, required: set, optional: set, errors: list):
    for key in d:
        if key not in required and key not in optional:
            errors.append(f"{path}{key}: unknown field")
    for key in required:
        if key not in d:
            errors.append(f"{path}{key}: missing required field")


def _parse_complex(value, path: str, errors: list) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        return complex(value[0], value[1])
    errors.append(f"{path}: expected a number or a [re, im] pair")
    return 0j


def _parse_number(value, path: str, errors: list) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{path}: expected a number")
        return 0.0
    return float(value)


def _parse_peak(obj, path: str, errors: list) -> Optional[LorentzianPeak]:
    if not isinstance(obj, dict):
        errors.append(f"{path}: expected an object with gamma, Gamma, omega0")
        return None
    _want_keys(obj, path + ".", {"gamma", "Gamma", "omega0"}, set(), errors)
    gamma = _parse_number(obj.get("gamma", 0.0), f"{path}.gamma", errors)
    strength = _parse_number(obj.get("Gamma", 0.0), f"{path}.Gamma", errors)
    center = _parse_number(obj.get("omega0", 0.0), f"{path}.omega0", errors)
    if gamma <= 0:
        errors.append(f"{path}.gamma: must be > 0")
        return None
    if strength < 0:
        errors.append(f"{path}.Gamma: must be >= 0")
        return None
    return LorentzianPeak(weight=strength, half_width=gamma, center=center)


def scenario_from_dict(data: dict, name: str = "") -> Scenario:
    """Build and validate a scenario from a JSON-style dictionary.

    Raises :class:`ScenarioError` with all collected field-path messages
    when anything is malformed; unknown fields are rejected.
    """
    errors: list[str] = []
    if not isinstance(data, dict):
        raise ScenarioError(["top level: expected a JSON object"])
    _want_keys(
        data,
        "",
        {"n_sites", "couplings", "baths", "initial_state", "method"},
        {"discretization", "integrator", "pm"},
        errors,
    )
    if errors:
        raise ScenarioError(errors)

    n = data["n_sites"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ScenarioError(["n_sites: must be a positive integer"])

    raw_v = data["couplings"]
    couplings = np.zeros((n, n), dtype=complex)
    if not isinstance(raw_v, list) or len(raw_v) != n:
        errors.append(f"couplings: expected {n} rows")
    else:
        for i, row in enumerate(raw_v):
            if not isinstance(row, list) or len(row) != n:
                errors.append(f"couplings[{i}]: expected {n} entries")
                continue
            for j, entry in enumerate(row):
                couplings[i, j] = _parse_complex(entry, f"couplings[{i}][{j}]", errors)

    raw_b = data["baths"]
    site_baths: list[SiteBath] = []
    if not isinstance(raw_b, list) or len(raw_b) != n:
        errors.append(f"baths: expected one peak list per site ({n} lists)")
    else:
        for s, peak_list in enumerate(raw_b):
            if not isinstance(peak_list, list):
                errors.append(f"baths[{s}]: expected a list of peaks")
                continue
            peaks = []
            for j, peak in enumerate(peak_list):
                parsed = _parse_peak(peak, f"baths[{s}][{j}]", errors)
                if parsed is not None:
                    peaks.append(parsed)
            site_baths.append(SiteBath(site=s, peaks=tuple(peaks)))

    raw_psi = data["initial_state"]
    if not isinstance(raw_psi, list) or not raw_psi:
        errors.append("initial_state: expected a non-empty array")
        initial = np.zeros(n, dtype=complex)
    elif isinstance(raw_psi[0], list) and raw_psi and all(
        isinstance(r, list) and len(r) == 2 and isinstance(r[0], (int, float))
        for r in raw_psi
    ):
        # list of [re, im] pairs: a state vector
        initial = np.array(
            [_parse_complex(x, f"initial_state[{i}]", errors) for i, x in enumerate(raw_psi)]
        )
    elif all(isinstance(r, list) for r in raw_psi):
        initial = np.zeros((len(raw_psi), len(raw_psi)), dtype=complex)
        for i, row in enumerate(raw_psi):
            if len(row) != len(raw_psi):
                errors.append(f"initial_state[{i}]: ragged matrix row")
                continue
            for j, entry in enumerate(row):
                initial[i, j] = _parse_complex(entry, f"initial_state[{i}][{j}]", errors)
    else:
        initial = np.array(
            [_parse_complex(x, f"initial_state[{i}]", errors) for i, x in enumerate(raw_psi)]
        )

    method = data["method"]
    if not isinstance(method, str):
        errors.append("method: expected a string")
        method = ""

    integrator = IntegratorConfig()
    if "integrator" in data:
        raw_i = data["integrator"]
        if not isinstance(raw_i, dict):
            errors.append("integrator: expected an object")
        else:
            _want_keys(
                raw_i,
                "integrator.",
                set(),
                {"dt", "t_max", "sample_stride", "adaptive", "tol"},
                errors,
            )
            kwargs = {}
            for key in ("dt", "t_max", "tol"):
                if key in raw_i:
                    kwargs[key] = _parse_number(raw_i[key], f"integrator.{key}", errors)
            if "sample_stride" in raw_i:
                ss = raw_i["sample_stride"]
                if isinstance(ss, bool) or not isinstance(ss, int):
                    errors.append("integrator.sample_stride: expected an integer")
                else:
                    kwargs["sample_stride"] = ss
            if "adaptive" in raw_i:
                if not isinstance(raw_i["adaptive"], bool):
                    errors.append("integrator.adaptive: expected a boolean")
                else:
                    kwargs["adaptive"] = raw_i["adaptive"]
            try:
                integrator = IntegratorConfig(**kwargs)
            except ValueError as exc:
                errors.append(f"integrator: {exc}")

    pm = PMConfig()
    if "pm" in data:
        raw_pm = data["pm"]
        if not isinstance(raw_pm, dict):
            errors.append("pm: expected an object")
        else:
            _want_keys(raw_pm, "pm.", set(), {"n_max", "dim_cap"}, errors)
            kwargs = {}
            if "n_max" in raw_pm:
                nm = raw_pm["n_max"]
                if isinstance(nm, bool) or not isinstance(nm, int):
                    errors.append("pm.n_max: expected an integer")
                else:
                    kwargs["n_max"] = nm
            if "dim_cap" in raw_pm:
                dc = raw_pm["dim_cap"]
                if isinstance(dc, bool) or not isinstance(dc, int):
                    errors.append("pm.dim_cap: expected an integer")
                else:
                    kwargs["dim_cap"] = dc
            try:
                pm = PMConfig(**kwargs)
            except ValueError as exc:
                errors.append(f"pm: {exc}")

    discretization = DiscretizationConfig()
    if "discretization" in data:
        raw_d = data["discretization"]
        if not isinstance(raw_d, dict):
            errors.append("discretization: expected an object")
        else:
            _want_keys(
                raw_d,
                "discretization.",
                set(),
                {"delta_omega", "omega_min", "omega_max"},
                errors,
            )
            kwargs = {}
            for key in ("delta_omega", "omega_min", "omega_max"):
                if key in raw_d:
                    kwargs[key] = _parse_number(raw_d[key], f"discretization.{key}", errors)
            try:
                discretization = DiscretizationConfig(**kwargs)
            except ValueError as exc:
                errors.append(f"discretization: {exc}")

    if errors:
        raise ScenarioError(errors)

    scenario = Scenario(
        n_sites=n,
        couplings=couplings,
        bath=tuple(site_baths),
        initial_state=initial,
        method=method,
        integrator=integrator,
        pm=pm,
        discretization=discretization,
        name=name,
    )
    errors = validate_scenario(scenario)
    if errors:
        raise ScenarioError(errors)
    return scenario


def _complex_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def scenario_to_dict(sc: Scenario) -> dict:
    """Serialize a scenario to the strict JSON layout."""
    if isinstance(sc.bath, DiscreteBath):
        raise ValueError("scenario files support Lorentzian site baths only")
    baths: list[list[dict]] = [[] for _ in range(sc.n_sites)]
    for sb in sc.bath:
        baths[sb.site] = [
            {"gamma": p.half_width, "Gamma": p.weight, "omega0": p.center}
            for p in sb.peaks
        ]
    psi = sc.initial_state
    if psi.ndim == 1:
        initial = [_complex_pair(z) for z in psi]
    else:
        initial = [[_complex_pair(z) for z in row] for row in psi]
    data = {
        "n_sites": sc.n_sites,
        "couplings": [[_complex_pair(z) for z in row] for row in sc.couplings],
        "baths": baths,
        "initial_state": initial,
        "method": sc.method,
        "integrator": {
            "dt": sc.integrator.dt,
            "t_max": sc.integrator.t_max,
            "sample_stride": sc.integrator.sample_stride,
            "adaptive": sc.integrator.adaptive,
            "tol": sc.integrator.tol,
        },
        "pm": {},
    }
    if sc.pm.n_max is not None:
        data["pm"]["n_max"] = sc.pm.n_max
    if sc.discretization.delta_omega is not None or sc.discretization.omega_min is not None:
        d: dict = {}
        if sc.discretization.delta_omega is not None:
            d["delta_omega"] = sc.discretization.delta_omega
        if sc.discretization.omega_min is not None:
            d["omega_min"] = sc.discretization.omega_min
        if sc.discretization.omega_max is not None:
            d["omega_max"] = sc.discretization.omega_max
        data["discretization"] = d
    return data


def load_scenario(path) -> Scenario:
    """Load and validate a scenario JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError([f"invalid JSON: {exc}"]) from exc
    return scenario_from_dict(data, name=str(path))


def dump_scenario(sc: Scenario, path) -> None:
    """Write a scenario to a JSON file."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(sc), fh, indent=2)
        fh.write("\n")
