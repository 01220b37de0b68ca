"""Event-driven spiking simulator with per-step energy instrumentation.

The engine only touches neurons that have work to do: a neuron is
evaluated on a step when summed synaptic input arrives, when membrane
decay would change its state representation, or (once, at t = 0) when its
initial state already satisfies the firing condition. Untouched neurons
cost nothing, which is the whole accounting model: energy follows change
of state, not wall-clock time.

Per step the recorded energy is

    e_t = e_voltage * neurons_touched + e_spikegen * spikes
        + e_synapse * synaptic_events + e_spike * ell * synaptic_events

where neurons_touched counts neurons whose state word actually changed
under the configured encoding. Digital encodings quantize the membrane to
a two's-complement fixed-point word and measure change as Hamming
distance; the analog encoding measures summed |dx|.

Determinism: identical graph, encoding, seed, and inputs reproduce the
trace bitwise. The engine draws no random numbers; the seed is carried
for workload generators that do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .costs import PRESETS, CostConstants
from .errors import (
    MismatchDetected,
    NonFiniteInput,
    NonFiniteState,
    UnknownInputNeuron,
)
from .neural import NeuralGraph, NeuronSpec, ResourceCount, advance


@dataclass(frozen=True)
class DigitalEncoding:
    """Fixed-point state words: clamp to [-scale, +scale), word_width bits."""

    word_width: int = 16
    scale: float = 1.0

    def __post_init__(self):
        if not (4 <= self.word_width <= 64):
            raise ValueError(f"word_width must be in [4, 64], got {self.word_width}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    def words(self, x: np.ndarray) -> np.ndarray:
        w = self.word_width
        lo = -(2 ** (w - 1))
        hi = 2 ** (w - 1) - 1
        step = self.scale / 2 ** (w - 1)
        q = np.floor(np.asarray(x, dtype=float) / step)
        # For w > 53 the exact ceiling is not float-representable; snap to
        # the largest representable value below it (clamp-edge artifact).
        hi_f = float(hi) if w <= 53 else math.nextafter(float(2 ** (w - 1)), 0.0)
        q = np.clip(q, float(lo), hi_f)
        return q.astype(np.int64)


@dataclass(frozen=True)
class AnalogEncoding:
    """Continuous state; change of state is summed |dx|."""


EncodingMode = DigitalEncoding | AnalogEncoding

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


def _popcount(v: np.ndarray) -> np.ndarray:
    """Vectorized SWAR bit count on uint64 words."""
    v = v - ((v >> np.uint64(1)) & _M1)
    v = (v & _M2) + ((v >> np.uint64(2)) & _M2)
    v = (v + (v >> np.uint64(4))) & _M4
    return (v * _H01) >> np.uint64(56)


def hamming_bits(old_words: np.ndarray, new_words: np.ndarray, word_width: int) -> np.ndarray:
    """Per-element changed-bit counts between two's-complement words."""
    mask = np.uint64((1 << word_width) - 1) if word_width < 64 else np.uint64(0xFFFFFFFFFFFFFFFF)
    xor = (old_words.view(np.uint64) ^ new_words.view(np.uint64)) & mask
    return _popcount(xor).astype(np.int64)


@dataclass(frozen=True)
class StepRecord:
    """Events and energy of one simulation step."""

    t: int
    spikes: int
    spike_ids: tuple[str, ...]
    synaptic_events: int
    neurons_touched: int
    delta_n: float
    e_voltage_term: float
    e_spikegen_term: float
    e_synapse_term: float
    e_spike_term: float
    e_t: float


@dataclass(frozen=True)
class SimTrace:
    """Whole-run record: per-step events, firing-rate series, outputs."""

    records: tuple[StepRecord, ...]
    f_series: np.ndarray
    e_n: float
    outputs: np.ndarray
    output_ids: tuple[str, ...]
    n_total: int

    def __len__(self) -> int:
        return len(self.records)


class _CompiledNet:
    """Index-based view of a NeuralGraph plus CSR outgoing synapses."""

    def __init__(self, ng: NeuralGraph):
        self.graph = ng
        self.ids = ng.neuron_ids
        self.index = {nid: i for i, nid in enumerate(self.ids)}
        self.n = len(self.ids)
        self.x0 = np.array([x0 for _nid, _spec, x0 in ng.neurons], dtype=float)

        # Group neuron indices by identical spec so updates vectorize.
        groups: dict[NeuronSpec, list[int]] = {}
        for i, (_nid, spec, _x0) in enumerate(ng.neurons):
            groups.setdefault(spec, []).append(i)
        self.groups: list[tuple[NeuronSpec, np.ndarray]] = [
            (spec, np.asarray(idx, dtype=np.intp)) for spec, idx in groups.items()
        ]

        order = sorted(range(len(ng.synapses)), key=lambda s: self.index[ng.synapses[s].source])
        src_sorted = [self.index[ng.synapses[s].source] for s in order]
        self.syn_target = np.array([self.index[ng.synapses[s].target] for s in order],
                                   dtype=np.intp)
        self.syn_weight = np.array([ng.synapses[s].weight for s in order], dtype=float)
        self.syn_delay = np.array([ng.synapses[s].delay for s in order], dtype=np.int64)
        self.out_indptr = np.zeros(self.n + 1, dtype=np.intp)
        for s in src_sorted:
            self.out_indptr[s + 1] += 1
        np.cumsum(self.out_indptr, out=self.out_indptr)

        self.input_idx = {self.index[nid] for nid in ng.input_neurons}
        self.output_idx = np.array([self.index[nid] for nid in ng.output_neurons],
                                   dtype=np.intp)


@dataclass
class SimState:
    """Mutable simulation state; create with init_sim."""

    net: _CompiledNet
    x: np.ndarray
    t: int
    rng_seed: int
    encoding: EncodingMode
    constants: CostConstants
    deliver_zero_weight: bool
    pending: dict[int, list[tuple[np.ndarray, np.ndarray]]]
    armed: np.ndarray  # indices to evaluate at the first step, then empty
    last_y: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def n_total(self) -> int:
        return self.net.n

    def membrane(self, neuron_id: str) -> float:
        return float(self.x[self.net.index[neuron_id]])


def init_sim(ng: NeuralGraph, encoding: EncodingMode, seed: int,
             constants: CostConstants = PRESETS["unit"],
             deliver_zero_weight: bool = False) -> SimState:
    """Compile the graph and seed initial state.

    Neurons whose initial state already satisfies their firing condition
    are marked for evaluation on the first step; an event-driven engine
    would otherwise never notice them.
    """
    net = _CompiledNet(ng)
    x = net.x0.copy()
    if not np.all(np.isfinite(x)):
        bad = net.ids[int(np.flatnonzero(~np.isfinite(x))[0])]
        raise NonFiniteState(f"initial state of {bad!r} is not finite")

    armed: list[int] = []
    for spec, idx in net.groups:
        xi = x[idx]
        if spec.model_kind in ("threshold_gate", "lif"):
            hot = xi > spec.v_thresh
        elif spec.model_kind == "ann_relu":
            hot = xi > 0.0
        else:  # ann_tanh
            hot = xi != 0.0
        armed.extend(int(i) for i in idx[hot])

    return SimState(
        net=net,
        x=x,
        t=0,
        rng_seed=seed,
        encoding=encoding,
        constants=constants,
        deliver_zero_weight=deliver_zero_weight,
        pending={},
        armed=np.array(sorted(armed), dtype=np.intp),
        last_y=np.zeros(net.n, dtype=float),
    )


def _transfer_only(spec: NeuronSpec, x: np.ndarray) -> np.ndarray:
    """Output rule applied to the current state without integrating input.

    Used for armed gate/ann neurons at t = 0: their state predates any
    input, so only the transfer function applies.
    """
    if spec.model_kind == "threshold_gate":
        return (x > spec.v_thresh).astype(float)
    if spec.model_kind == "ann_relu":
        return np.maximum(0.0, x)
    return np.tanh(x)  # ann_tanh


def step_sim(s: SimState, external_inputs: Sequence[tuple[str, float]] = ()) -> StepRecord:
    """Advance one step: deliver due events, evaluate touched neurons,
    enqueue emitted spikes, and account energy."""
    net = s.net
    t = s.t

    # 1. Deliver queued synaptic events due now, then external injections.
    input_sum = np.zeros(net.n, dtype=float)
    synaptic_events = 0
    for targets, values in s.pending.pop(t, ()):
        np.add.at(input_sum, targets, values)
        synaptic_events += len(targets)
    for neuron_id, value in external_inputs:
        idx = net.index.get(neuron_id)
        if idx is None or idx not in net.input_idx:
            raise UnknownInputNeuron(neuron_id)
        if not math.isfinite(value):
            raise NonFiniteInput(f"external input to {neuron_id!r} is {value}")
        input_sum[idx] += value

    has_input = input_sum != 0.0
    armed = s.armed
    if len(armed):
        s.armed = np.array([], dtype=np.intp)

    # 2. Evaluate neurons with input, with a decay-visible change, or armed.
    new_x = s.x  # copy-on-write per group below
    y_now = np.zeros(net.n, dtype=float)
    spike_idx: list[np.ndarray] = []
    spike_y: list[np.ndarray] = []
    touched_count = 0
    delta_n = 0.0
    evaluated_any = False

    digital = isinstance(s.encoding, DigitalEncoding)

    for spec, idx in net.groups:
        group_eval = has_input[idx]

        if spec.model_kind == "lif" and spec.decay_factor != 1.0:
            xi = s.x[idx]
            if digital:
                decays = s.encoding.words(xi * spec.decay_factor) != s.encoding.words(xi)
            else:
                decays = xi != 0.0
            group_eval = group_eval | decays

        armed_in_group = np.intersect1d(armed, idx, assume_unique=False) if len(armed) else None
        normal_idx = idx[group_eval]
        transfer_idx = np.array([], dtype=np.intp)
        if armed_in_group is not None and len(armed_in_group):
            if spec.model_kind == "lif":
                # Reset is part of the integration rule; a zero-input
                # evaluation handles an armed integrator correctly.
                normal_idx = np.union1d(normal_idx, armed_in_group).astype(np.intp)
            else:
                transfer_idx = np.setdiff1d(armed_in_group, normal_idx).astype(np.intp)

        if len(normal_idx) == 0 and len(transfer_idx) == 0:
            continue
        if not evaluated_any:
            new_x = s.x.copy()
            evaluated_any = True

        eval_idx_parts: list[np.ndarray] = []
        y_parts: list[np.ndarray] = []

        if len(normal_idx):
            x_next, y = advance(spec, s.x[normal_idx], input_sum[normal_idx])
            if not np.all(np.isfinite(x_next)):
                bad = net.ids[int(normal_idx[int(np.flatnonzero(~np.isfinite(x_next))[0])])]
                raise NonFiniteState(f"state of {bad!r} diverged at t={t}")
            new_x[normal_idx] = x_next
            eval_idx_parts.append(normal_idx)
            y_parts.append(y)
        if len(transfer_idx):
            y = _transfer_only(spec, s.x[transfer_idx])
            eval_idx_parts.append(transfer_idx)
            y_parts.append(y)

        eval_idx = np.concatenate(eval_idx_parts)
        y_all = np.concatenate(y_parts)
        y_now[eval_idx] = y_all

        # 4. Change-of-state accounting under the configured encoding.
        old_vals = s.x[eval_idx]
        new_vals = new_x[eval_idx]
        if digital:
            bits = hamming_bits(s.encoding.words(old_vals), s.encoding.words(new_vals),
                                s.encoding.word_width)
            touched_count += int(np.count_nonzero(bits))
            delta_n += float(bits.sum())
        else:
            diffs = np.abs(new_vals - old_vals)
            touched_count += int(np.count_nonzero(diffs))
            delta_n += float(diffs.sum())

        firing = y_all != 0.0
        if np.any(firing):
            spike_idx.append(eval_idx[firing])
            spike_y.append(y_all[firing])

    # 3. Emit: every outgoing synapse of a firing neuron enqueues one event.
    if spike_idx:
        all_spikes = np.concatenate(spike_idx)
        all_y = np.concatenate(spike_y)
        order = np.argsort(all_spikes, kind="stable")
        all_spikes = all_spikes[order]
        all_y = all_y[order]
        for src, y_val in zip(all_spikes, all_y):
            lo, hi = net.out_indptr[src], net.out_indptr[src + 1]
            if lo == hi:
                continue
            weights = net.syn_weight[lo:hi]
            keep = slice(None) if s.deliver_zero_weight else weights != 0.0
            targets = net.syn_target[lo:hi][keep]
            if len(targets) == 0:
                continue
            values = weights[keep] * y_val
            delays = net.syn_delay[lo:hi][keep]
            for d in np.unique(delays):
                sel = delays == d
                s.pending.setdefault(t + int(d), []).append((targets[sel], values[sel]))
        spike_count = int(len(all_spikes))
        spike_ids = tuple(net.ids[int(i)] for i in all_spikes)
    else:
        spike_count = 0
        spike_ids = ()

    # 5. Energy from this step's events, fixed term order.
    c = s.constants
    e_voltage_term = c.e_voltage * touched_count
    e_spikegen_term = c.e_spikegen * spike_count
    e_synapse_term = c.e_synapse * synaptic_events
    e_spike_term = c.e_spike * c.ell * synaptic_events
    e_t = e_voltage_term + e_spikegen_term + e_synapse_term + e_spike_term

    s.x = new_x
    s.last_y = y_now
    s.t = t + 1
    return StepRecord(
        t=t,
        spikes=spike_count,
        spike_ids=spike_ids,
        synaptic_events=synaptic_events,
        neurons_touched=touched_count,
        delta_n=delta_n,
        e_voltage_term=e_voltage_term,
        e_spikegen_term=e_spikegen_term,
        e_synapse_term=e_synapse_term,
        e_spike_term=e_spike_term,
        e_t=e_t,
    )


@dataclass(frozen=True)
class ZeroActivity:
    """Stop after `window` consecutive steps with zero spikes."""

    window: int = 3


@dataclass(frozen=True)
class OutputConvergence:
    """Stop when output neuron emissions change by < tol over `window` steps."""

    window: int = 3
    tol: float = 1e-6


StopCondition = ZeroActivity | OutputConvergence | None

InputSchedule = Callable[[int], Sequence[tuple[str, float]]] | Mapping[int, Sequence[tuple[str, float]]] | None


def run_sim(s: SimState, max_steps: int, stop: StopCondition = None,
            inputs: InputSchedule = None) -> SimTrace:
    """Run up to max_steps, optionally stopping early, and build the trace.

    `inputs` maps a step index to external (neuron id, value) injections,
    either as a mapping or a callable.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    net = s.net
    records: list[StepRecord] = []
    out_rows: list[np.ndarray] = []
    zero_run = 0

    for k in range(max_steps):
        if inputs is None:
            ext: Sequence[tuple[str, float]] = ()
        elif callable(inputs):
            ext = inputs(s.t)
        else:
            ext = inputs.get(s.t, ())

        rec = step_sim(s, ext)
        records.append(rec)
        out_rows.append(s.last_y[net.output_idx].copy())

        if isinstance(stop, ZeroActivity):
            zero_run = zero_run + 1 if rec.spikes == 0 else 0
            if zero_run >= stop.window:
                break
        elif isinstance(stop, OutputConvergence) and len(records) > stop.window:
            recent = out_rows[-(stop.window + 1):]
            deltas = [float(np.max(np.abs(a - b))) if len(a) else 0.0
                      for a, b in zip(recent[1:], recent)]
            if max(deltas) < stop.tol:
                break

    e_n = 0.0
    for rec in records:
        e_n += rec.e_t
    f_series = np.array([rec.spikes / net.n for rec in records], dtype=float)
    return SimTrace(
        records=tuple(records),
        f_series=f_series,
        e_n=e_n,
        outputs=np.vstack(out_rows) if out_rows else np.zeros((0, 0)),
        output_ids=s.net.graph.output_neurons,
        n_total=net.n,
    )


def measure_firing_rate(tr: SimTrace, window: int) -> np.ndarray:
    """Mean firing rate per non-overlapping window of `window` steps."""
    if window < 1:
        raise ValueError("window must be >= 1")
    if window > len(tr.records):
        raise ValueError(f"window {window} exceeds trace length {len(tr.records)}")
    n_windows = len(tr.records) // window
    rates = np.empty(n_windows, dtype=float)
    for w in range(n_windows):
        chunk = tr.records[w * window:(w + 1) * window]
        rates[w] = sum(rec.spikes for rec in chunk) / (window * tr.n_total)
    return rates


@dataclass(frozen=True)
class TermComparison:
    analytic: float
    measured: float
    ratio: float


@dataclass(frozen=True)
class ReconciliationReport:
    """Bit-exact recomputation result plus analytic-vs-measured ratios."""

    steps: int
    f_mean: float
    terms: Mapping[str, TermComparison]
    voltage_measured_mean: float
    voltage_unrefined_prediction: float
    voltage_refined_prediction: float


def reconcile_energy(tr: SimTrace, r: ResourceCount, c: CostConstants) -> ReconciliationReport:
    """Recompute every e_t from its recorded event counts (must match
    bit-exactly; MismatchDetected otherwise) and compare the measured
    firing-dependent terms against their closed-form predictions at the
    trace's mean firing rate."""
    e_n = 0.0
    for rec in tr.records:
        e_voltage_term = c.e_voltage * rec.neurons_touched
        e_spikegen_term = c.e_spikegen * rec.spikes
        e_synapse_term = c.e_synapse * rec.synaptic_events
        e_spike_term = c.e_spike * c.ell * rec.synaptic_events
        e_t = e_voltage_term + e_spikegen_term + e_synapse_term + e_spike_term
        if (e_voltage_term != rec.e_voltage_term or e_spikegen_term != rec.e_spikegen_term
                or e_synapse_term != rec.e_synapse_term or e_spike_term != rec.e_spike_term
                or e_t != rec.e_t):
            raise MismatchDetected(f"recorded energy at t={rec.t} disagrees with its events")
        e_n += e_t
    if e_n != tr.e_n:
        raise MismatchDetected("trace total energy disagrees with per-step records")

    steps = len(tr.records)
    f_mean = float(np.mean(tr.f_series)) if steps else 0.0

    def mean_of(attr: str) -> float:
        return sum(getattr(rec, attr) for rec in tr.records) / steps if steps else 0.0

    analytic = {
        "spikegen": c.e_spikegen * f_mean * r.n_total,
        "synapse": c.e_synapse * f_mean * r.s_total,
        "spike": c.e_spike * c.ell * f_mean * r.s_total,
    }
    measured = {
        "spikegen": mean_of("e_spikegen_term"),
        "synapse": mean_of("e_synapse_term"),
        "spike": mean_of("e_spike_term"),
    }
    terms = {}
    for name in analytic:
        a, m = analytic[name], measured[name]
        if a == 0.0 and m == 0.0:
            ratio = 1.0
        elif m == 0.0:
            ratio = math.inf
        else:
            ratio = a / m
        terms[name] = TermComparison(analytic=a, measured=m, ratio=ratio)

    k_bar = r.s_total / r.n_total if r.n_total else 0.0
    refined = c.e_voltage * r.n_total * (1.0 - (1.0 - f_mean) ** k_bar) if k_bar else 0.0
    return ReconciliationReport(
        steps=steps,
        f_mean=f_mean,
        terms=terms,
        voltage_measured_mean=mean_of("e_voltage_term"),
        voltage_unrefined_prediction=c.e_voltage * r.n_total,
        voltage_refined_prediction=refined,
    )
