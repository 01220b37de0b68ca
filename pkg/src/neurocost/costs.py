"""Closed-form time, space, and energy bounds for both architectures.

The conventional side follows the work/span model: time is sandwiched by
max(t_inf, ceil(t1/p)) and ceil(t1/p) + t_inf, and energy scales with the
total work t1. The neuromorphic side runs the whole graph as a physical
network: ideal time is the depth t_inf alone, space scales with the
instantiated neurons and synapses, and energy per step scales with the
firing rate, so a converging computation gets cheaper as it settles.

All evaluators are pure functions of their arguments; energy totals are
built by summing the breakdown terms in a fixed order so the identity
total == sum(breakdown.values()) holds bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Iterable, Mapping, Sequence

from .errors import FiringRateOutOfRange
from .graph import GraphMetrics
from .neural import ResourceCount

TIME_MODELS = ("cpu_ideal", "gpu", "nmc_ideal", "nmc_realized")


@dataclass(frozen=True)
class CostConstants:
    """Per-event and per-unit constants for both cost models.

    e_op / e_mem / b_p drive the conventional energy model; c_p / c_mem are
    conventional space constants; c_n / c_s are per-neuron and per-synapse
    space; e_voltage / e_spikegen / e_synapse / e_spike / ell drive the
    event-driven energy model; n_core is the physical core count used by
    the realized neuromorphic bounds.
    """

    e_op: float = 1.0
    e_mem: float = 1.0
    b_p: float = 1.0
    c_p: float = 1.0
    c_mem: float = 1.0
    c_n: float = 1.0
    c_s: float = 1.0
    e_voltage: float = 1.0
    e_spikegen: float = 1.0
    e_synapse: float = 1.0
    e_spike: float = 1.0
    ell: float = 1.0
    n_core: int = 1

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "n_core":
                if not isinstance(value, int) or value < 1:
                    raise ValueError(f"n_core must be an integer >= 1, got {value!r}")
            elif value < 0:
                raise ValueError(f"{f.name} must be nonnegative, got {value}")


#: Built-in presets: "unit" sets every constant to 1; "digital-skew" makes
#: communication-heavy events expensive relative to local ones.
PRESETS: Mapping[str, CostConstants] = {
    "unit": CostConstants(),
    "digital-skew": CostConstants(e_spike=100.0, e_spikegen=10.0, e_synapse=5.0,
                                  e_voltage=1.0),
}


def preset(name: str) -> CostConstants:
    from .errors import UnknownPreset

    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(name) from None


@dataclass(frozen=True)
class TimeBounds:
    lower: float
    upper: float
    model: str

    def __post_init__(self):
        if self.model not in TIME_MODELS:
            raise ValueError(f"unknown time model {self.model!r}")
        if self.lower > self.upper:
            raise ValueError(f"time bounds inverted: [{self.lower}, {self.upper}]")


@dataclass(frozen=True)
class SpaceBounds:
    lower: float
    upper: float
    unbounded_above: bool = False
    breakdown: Mapping[str, float] | None = None


@dataclass(frozen=True)
class EnergyEstimate:
    total: float
    breakdown: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "breakdown", dict(self.breakdown))


def _estimate(breakdown: dict[str, float]) -> EnergyEstimate:
    # Plain left-to-right sum in insertion order; keeps total == sum(terms)
    # reproducible bit for bit.
    total = 0.0
    for value in breakdown.values():
        total += value
    return EnergyEstimate(total=total, breakdown=breakdown)


def conventional_time(m: GraphMetrics, p_threads: int, model: str = "cpu_ideal") -> TimeBounds:
    """Work/span sandwich for p_threads parallel execution units."""
    if not isinstance(p_threads, int) or p_threads < 1:
        raise ValueError(f"p_threads must be an integer >= 1, got {p_threads!r}")
    chunks = math.ceil(m.t1 / p_threads)
    return TimeBounds(lower=max(m.t_inf, chunks), upper=chunks + m.t_inf, model=model)


def nmc_time(m: GraphMetrics, n_core: int | None = None) -> TimeBounds:
    """Ideal network time is the depth alone; a realized machine with
    n_core cores pays at most n_core times that."""
    if n_core is None:
        return TimeBounds(lower=m.t_inf, upper=m.t_inf, model="nmc_ideal")
    if not isinstance(n_core, int) or n_core < 1:
        raise ValueError(f"n_core must be an integer >= 1, got {n_core!r}")
    return TimeBounds(lower=m.t_inf, upper=n_core * m.t_inf, model="nmc_realized")


def conventional_space(c: CostConstants, p: int, program_size: float,
                       data_size: float) -> SpaceBounds:
    """Lower bound c_p * p + program + data; no useful upper bound exists
    (a conventional machine may cache and copy arbitrarily)."""
    if not isinstance(p, int) or p < 1:
        raise ValueError(f"processor count must be an integer >= 1, got {p!r}")
    if program_size < 0 or data_size < 0:
        raise ValueError("program_size and data_size must be nonnegative")
    lower = c.c_p * p + program_size + data_size
    return SpaceBounds(lower=lower, upper=math.inf, unbounded_above=True,
                       breakdown={"processors": c.c_p * p,
                                  "program": float(program_size),
                                  "data": float(data_size)})


def nmc_space(r: ResourceCount, m: GraphMetrics, c: CostConstants,
              n_core: int | None = None) -> SpaceBounds:
    """Structural network capacity.

    Instantiating the whole graph costs (c_n * n_bar + c_s * s_bar) * t1;
    reusing physical neurons across the t_inf levels compresses that by at
    most t1 / t_inf, giving the lower bound. The realized variant divides
    both bounds by n_core.
    """
    per_op = c.c_n * r.n_bar + c.c_s * r.s_bar
    upper = per_op * m.t1
    lower = upper / m.t_inf
    divisor = 1
    if n_core is not None:
        if not isinstance(n_core, int) or n_core < 1:
            raise ValueError(f"n_core must be an integer >= 1, got {n_core!r}")
        divisor = n_core
    return SpaceBounds(
        lower=lower / divisor,
        upper=upper / divisor,
        unbounded_above=False,
        breakdown={"neurons": c.c_n * r.n_bar * m.t1 / divisor,
                   "synapses": c.c_s * r.s_bar * m.t1 / divisor},
    )


def conventional_energy(m: GraphMetrics, c: CostConstants) -> EnergyEstimate:
    """Every operation costs e_op, plus e_mem * b_p of traffic per op."""
    return _estimate({
        "operations": c.e_op * m.t1,
        "communication": c.e_mem * c.b_p * m.t1,
    })


def nmc_energy_per_step(r: ResourceCount, c: CostConstants, f_t: float,
                        k: int = 1, refined: bool = False) -> EnergyEstimate:
    """Event-driven per-step energy at firing rate f_t.

    Terms: membrane upkeep (e_voltage, over all neurons, or over the
    expected touched fraction 1 - (1 - f_t)^k when refined), spike
    generation (per firing neuron), synaptic operations and spike
    transport (per active synapse, transport scaled by wire length ell).
    """
    if not (0.0 <= f_t <= 1.0):
        raise FiringRateOutOfRange(f_t)
    if refined and (not isinstance(k, int) or k < 1):
        raise ValueError(f"refined model needs integer fan-in k >= 1, got {k!r}")
    touched = r.n_total * (1.0 - (1.0 - f_t) ** k) if refined else r.n_total
    return _estimate({
        "voltage": c.e_voltage * touched,
        "spikegen": c.e_spikegen * f_t * r.n_total,
        "synapse": c.e_synapse * f_t * r.s_total,
        "spike": c.e_spike * c.ell * f_t * r.s_total,
    })


def nmc_total_energy(per_step: Iterable[EnergyEstimate | float]) -> float:
    """Sum per-step energies over a run."""
    total = 0.0
    for item in per_step:
        total += item.total if isinstance(item, EnergyEstimate) else float(item)
    return total


@dataclass(frozen=True)
class ComparisonRow:
    architecture: str
    time: TimeBounds
    space: SpaceBounds
    energy: EnergyEstimate


@dataclass(frozen=True)
class ComparisonTable:
    """Side-by-side analytic bounds, one row per architecture."""

    workload: str
    rows: tuple[ComparisonRow, ...]
    params: Mapping[str, float]
    crossover_step: int | None = None
    nmc_energy_series: tuple[float, ...] = ()
    conv_energy_per_step: float | None = None

    def row(self, architecture: str) -> ComparisonRow:
        for r in self.rows:
            if r.architecture == architecture:
                return r
        raise KeyError(architecture)


def mesh_cost_report(m_s: int, m_t: int, k: int, t1s: int, t_infs: int,
                     n_mesh: int, c: CostConstants, f_series: Sequence[float],
                     p: int = 1, include_memory_comm: bool = False) -> ComparisonTable:
    """Compare both architectures on an iterated stencil of m_s points.

    Conventional: the whole graph has work m_s * m_t * t1s and depth
    m_t * t_infs; energy is e_op per operation (memory traffic optional,
    off by default). Neuromorphic: the mesh instantiates n_total =
    m_s * n_mesh neurons and s_total = k * n_total synapses; per-step
    energy is (e_voltage + (e_spikegen + e_synapse + e_spike*ell) * f_t * k)
    * n_total, evaluated over the supplied firing-rate series.

    crossover_step is the earliest step index after which the cumulative
    neuromorphic energy stays strictly below the cumulative conventional
    energy, or None if that never happens within the series.
    """
    if len(f_series) == 0:
        raise ValueError("f_series must contain at least one firing rate")
    metrics = GraphMetrics(t1=m_s * m_t * t1s, t_inf=m_t * t_infs,
                           level_widths=(), max_fan_in=k, max_fan_out=k)
    conv_breakdown = {"operations": c.e_op * m_s * m_t * t1s}
    if include_memory_comm:
        conv_breakdown["communication"] = c.e_mem * c.b_p * m_s * m_t * t1s
    conv_energy = _estimate(conv_breakdown)
    conv_per_step = conv_energy.total / m_t

    n_total = m_s * n_mesh
    per_step: list[float] = []
    for f_t in f_series:
        if not (0.0 <= f_t <= 1.0):
            raise FiringRateOutOfRange(f_t)
        per_step.append(
            (c.e_voltage + (c.e_spikegen + c.e_synapse + c.e_spike * c.ell) * f_t * k)
            * n_total)
    nmc_energy = _estimate({"per_step_series": math.fsum(per_step)})

    crossover = None
    conv_cum = 0.0
    nmc_cum = 0.0
    for t, e_t in enumerate(per_step):
        conv_cum += conv_per_step
        nmc_cum += e_t
        if nmc_cum < conv_cum:
            if crossover is None:
                crossover = t
        else:
            crossover = None  # must stay below through the end of the series

    conv_row = ComparisonRow(
        architecture="conventional",
        time=conventional_time(metrics, p),
        space=conventional_space(c, p, program_size=t1s, data_size=c.c_mem * m_s),
        energy=conv_energy,
    )
    nmc_row = ComparisonRow(
        architecture="nmc",
        time=nmc_time(metrics),
        space=SpaceBounds(lower=c.c_n * n_total, upper=c.c_n * n_total,
                          breakdown={"neurons": c.c_n * n_total}),
        energy=nmc_energy,
    )
    return ComparisonTable(
        workload="mesh",
        rows=(conv_row, nmc_row),
        params={"m_s": m_s, "m_t": m_t, "k": k, "t1s": t1s, "t_infs": t_infs,
                "n_mesh": n_mesh, "p": p},
        crossover_step=crossover,
        nmc_energy_series=tuple(per_step),
        conv_energy_per_step=conv_per_step,
    )


def ff_cost_report(n_i: int, n_j: int, c: CostConstants, f_t: float,
                   p: int = 1) -> ComparisonTable:
    """Compare both architectures on one dense feed-forward layer.

    The layer decomposes into n_i * n_j synaptic operations, n_j
    summations, and n_j nonlinearities (depth 3). The network form uses
    one neuron per unit (n_total = n_i + n_j, s_total = n_i * n_j), so the
    firing-dependent synapse and spike terms carry the quadratic cost.
    """
    if n_i < 1 or n_j < 1:
        raise ValueError("layer dimensions must be >= 1")
    if not (0.0 <= f_t <= 1.0):
        raise FiringRateOutOfRange(f_t)
    s_total = n_i * n_j
    n_total = n_i + n_j
    t1 = n_i * n_j + 2 * n_j
    metrics = GraphMetrics(t1=t1, t_inf=3, level_widths=(n_i * n_j, n_j, n_j),
                           max_fan_in=n_i, max_fan_out=n_j)
    resources = ResourceCount(n_total=n_total, s_total=s_total,
                              n_bar=1.0, s_bar=s_total / n_total)
    conv_row = ComparisonRow(
        architecture="conventional",
        time=conventional_time(metrics, p),
        space=conventional_space(c, p, program_size=3, data_size=c.c_mem * s_total),
        energy=conventional_energy(metrics, c),
    )
    nmc_row = ComparisonRow(
        architecture="nmc",
        time=nmc_time(metrics),
        space=SpaceBounds(lower=c.c_n * n_total + c.c_s * s_total,
                          upper=c.c_n * n_total + c.c_s * s_total,
                          breakdown={"neurons": c.c_n * n_total,
                                     "synapses": c.c_s * s_total}),
        energy=nmc_energy_per_step(resources, c, f_t),
    )
    return ComparisonTable(
        workload="ff_layer",
        rows=(conv_row, nmc_row),
        params={"n_i": n_i, "n_j": n_j, "f_t": f_t, "p": p},
    )
