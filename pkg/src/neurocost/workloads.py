"""Workload generators and reference oracles.

Two families of benchmark workloads plus random-graph fuel for property
tests:

* an iterative mesh relaxation (local diffusion or a discrete-time Markov
  chain) realized as a spiking network that transports residual in
  threshold-sized quanta, so activity dies out as the solution converges;
* a dense feed-forward layer (vector-matrix multiply plus nonlinearity)
  driven by deterministic rate-coded spike trains.

The mesh oracle is a dense matrix iteration; the spiking version is
compared against it by decoding membrane state back to mesh values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateMesh, NonStochasticMatrix
from .graph import ComputeGraph, OpNode
from .neural import NeuralGraph, NeuronSpec, SynapseSpec
from .sim import SimState

_STOCHASTIC_TOL = 1e-9


@dataclass(frozen=True)
class Diffusion:
    """Nearest-neighbor averaging on a ring: each point keeps (1 - alpha)
    of its value and receives alpha/k from each of its k ring neighbors."""

    alpha: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class Dtmc:
    """Expected-value iteration of a discrete-time Markov chain: the state
    row-vector is multiplied by the transition matrix each step."""

    matrix: tuple[tuple[float, ...], ...]

    @staticmethod
    def from_array(matrix: np.ndarray | Sequence[Sequence[float]]) -> "Dtmc":
        arr = np.asarray(matrix, dtype=float)
        return Dtmc(tuple(tuple(float(v) for v in row) for row in arr))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=float)


@dataclass(frozen=True)
class MeshSpec:
    """A mesh relaxation problem: m_s points, fan-out k, m_t timesteps,
    n_mesh neurons per point, and an initial state vector."""

    m_s: int
    k: int
    m_t: int
    dynamics: Diffusion | Dtmc
    init: tuple[float, ...]
    n_mesh: int = 2
    v_thresh: float = 0.05

    def __post_init__(self) -> None:
        if self.m_s < 1:
            raise ValueError("m_s must be >= 1")
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.m_t < 1:
            raise ValueError("m_t must be >= 1")
        if self.n_mesh < 2:
            raise ValueError("n_mesh must be >= 2 (one rail per residual sign)")
        if self.v_thresh <= 0:
            raise ValueError("v_thresh must be positive")
        object.__setattr__(self, "init", tuple(float(v) for v in self.init))
        if len(self.init) != self.m_s:
            raise ValueError(f"init has {len(self.init)} entries for m_s={self.m_s}")
        if not all(math.isfinite(v) for v in self.init):
            raise ValueError("init must be finite")


def _ring_offsets(spec: MeshSpec) -> list[int]:
    """Signed ring offsets covered by fan-out k; validates degeneracy."""
    if spec.m_s == 1:
        return []
    if spec.k == 0:
        raise DegenerateMesh("k=0 with more than one mesh point leaves the mesh uncoupled")
    if spec.k % 2 != 0:
        raise DegenerateMesh(f"ring diffusion needs an even fan-out, got k={spec.k}")
    if spec.k >= spec.m_s:
        raise DegenerateMesh(f"fan-out k={spec.k} does not fit a ring of {spec.m_s} points")
    half = spec.k // 2
    return [off for d in range(1, half + 1) for off in (d, -d)]


def _check_dtmc(spec: MeshSpec, p: np.ndarray) -> None:
    if p.shape != (spec.m_s, spec.m_s):
        raise NonStochasticMatrix(
            f"transition matrix shape {p.shape} does not match m_s={spec.m_s}")
    if not np.all(np.isfinite(p)):
        raise NonStochasticMatrix("transition matrix must be finite")
    if np.any(p < 0):
        raise NonStochasticMatrix("transition matrix entries must be nonnegative")
    sums = p.sum(axis=1)
    bad = np.nonzero(np.abs(sums - 1.0) > _STOCHASTIC_TOL)[0]
    if bad.size:
        raise NonStochasticMatrix(
            f"row {bad[0]} sums to {sums[bad[0]]!r}, expected 1 within {_STOCHASTIC_TOL}")
    off_diag = (p > 0).sum(axis=1) - (np.diag(p) > 0).astype(int)
    if np.any(off_diag > spec.k):
        worst = int(np.argmax(off_diag))
        raise ValueError(
            f"mesh point {worst} couples to {int(off_diag[worst])} neighbors, limit is k={spec.k}")


def coupling_matrix(spec: MeshSpec) -> np.ndarray:
    """The row-stochastic update matrix W with x(t+1) = x(t) @ W."""
    if isinstance(spec.dynamics, Dtmc):
        p = spec.dynamics.as_array()
        _check_dtmc(spec, p)
        return p
    alpha = spec.dynamics.alpha
    if spec.m_s == 1:
        _ring_offsets(spec)
        return np.ones((1, 1))
    offsets = _ring_offsets(spec)
    w = np.zeros((spec.m_s, spec.m_s))
    np.fill_diagonal(w, 1.0 - alpha)
    share = alpha / spec.k
    for i in range(spec.m_s):
        for off in offsets:
            w[i, (i + off) % spec.m_s] += share
    return w


def reference_mesh_solve(spec: MeshSpec) -> np.ndarray:
    """Dense oracle: iterate the update matrix for m_t steps.

    Returns an (m_t + 1, m_s) array whose row t is the state after t
    steps; row 0 is the initial state.
    """
    if isinstance(spec.dynamics, Dtmc):
        w = spec.dynamics.as_array()
        _check_dtmc(spec, w)
    else:
        alpha = spec.dynamics.alpha
        if spec.m_s > 1:
            offsets = _ring_offsets(spec)
            neighbor = np.zeros((spec.m_s, spec.m_s))
            for off in offsets:
                neighbor += np.roll(np.eye(spec.m_s), off, axis=1)
            w = (1.0 - alpha) * np.eye(spec.m_s) + (alpha / spec.k) * neighbor
        else:
            _ring_offsets(spec)
            w = np.ones((1, 1))
    series = np.empty((spec.m_t + 1, spec.m_s))
    series[0] = np.asarray(spec.init, dtype=float)
    for t in range(spec.m_t):
        series[t + 1] = series[t] @ w
    return series


def mesh_equilibrium(spec: MeshSpec) -> np.ndarray:
    """Fixed point the iteration relaxes toward, scaled to initial mass.

    Diffusion mixes toward the mean. For a chain the stationary row
    vector pi (pi = pi @ P, sum 1) is solved by least squares, so
    reducible chains get the minimum-norm stationary vector.
    """
    init = np.asarray(spec.init, dtype=float)
    if isinstance(spec.dynamics, Diffusion):
        return np.full(spec.m_s, init.mean())
    p = spec.dynamics.as_array()
    _check_dtmc(spec, p)
    a = np.vstack([p.T - np.eye(spec.m_s), np.ones((1, spec.m_s))])
    b = np.zeros(spec.m_s + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    return pi * init.sum()


def rail_ids(spec: MeshSpec) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Neuron ids of the positive and negative residual rails."""
    pos = tuple(f"p{i}" for i in range(spec.m_s))
    neg = tuple(f"n{i}" for i in range(spec.m_s))
    return pos, neg


def gen_mesh(spec: MeshSpec) -> tuple[ComputeGraph, NeuralGraph]:
    """Mesh template graph plus its spiking realization.

    The template is the per-point op chain (gather neighbor values,
    form the residual, apply the update), so its metrics give the
    per-point work and depth of one timestep.

    The network carries each point's deviation from the known fixed
    point on two integrate-and-fire rails (one per sign). A rail fires
    when its held residual exceeds v_thresh and the spike transports
    one threshold quantum along the coupling weights, so firing is
    driven by local residual and stops once every residual sits below
    threshold. Points beyond the two rails (n_mesh > 2) are padded with
    silent neurons so resource counts match the configured density.
    """
    template = ComputeGraph(
        nodes=(
            OpNode("gather", "dot"),
            OpNode("residual", "sub", ("gather",)),
            OpNode("update", "add", ("residual",)),
        ),
        declared_inputs=("gather",),
        declared_outputs=("update",),
    )

    w = coupling_matrix(spec)
    equilibrium = mesh_equilibrium(spec)
    deviation = np.asarray(spec.init, dtype=float) - equilibrium
    pos_ids, neg_ids = rail_ids(spec)

    rail = NeuronSpec("lif", v_thresh=spec.v_thresh, v_reset=0.0)
    neurons: list[tuple[str, NeuronSpec, float]] = []
    for i in range(spec.m_s):
        neurons.append((pos_ids[i], rail, float(max(deviation[i], 0.0))))
    for i in range(spec.m_s):
        neurons.append((neg_ids[i], rail, float(max(-deviation[i], 0.0))))
    for i in range(spec.m_s):
        for j in range(spec.n_mesh - 2):
            neurons.append((f"r{i}_{j}", rail, 0.0))

    synapses: list[SynapseSpec] = []
    for i in range(spec.m_s):
        for j in np.nonzero(w[i])[0]:
            quantum = spec.v_thresh * float(w[i, j])
            synapses.append(SynapseSpec(pos_ids[i], pos_ids[int(j)], quantum))
            synapses.append(SynapseSpec(neg_ids[i], neg_ids[int(j)], quantum))

    network = NeuralGraph(
        neurons=tuple(neurons),
        synapses=tuple(synapses),
        input_neurons=(),
        output_neurons=(),
    )
    return template, network


def decode_mesh_state(spec: MeshSpec, state: SimState) -> np.ndarray:
    """Read the mesh values back out of rail membranes."""
    equilibrium = mesh_equilibrium(spec)
    pos_ids, neg_ids = rail_ids(spec)
    decoded = equilibrium.copy()
    for i in range(spec.m_s):
        decoded[i] += state.membrane(pos_ids[i]) - state.membrane(neg_ids[i])
    return decoded


def sinusoid_init(m_s: int, amplitude: float = 1.0, mean: float = 1.0,
                  cycles: int = 1) -> tuple[float, ...]:
    """Smooth periodic initial state, handy for size sweeps."""
    phase = 2.0 * math.pi * cycles * np.arange(m_s) / m_s
    return tuple(float(v) for v in mean + amplitude * np.sin(phase))


@dataclass(frozen=True)
class FFLayerSpec:
    """A dense layer: n_i sources, n_j units, an n_i x n_j weight matrix,
    and a deterministic rate code (per-source rates, steps per
    presentation)."""

    n_i: int
    n_j: int
    weights: tuple[tuple[float, ...], ...]
    rate_code: tuple[tuple[float, ...], int]

    @staticmethod
    def from_arrays(weights: np.ndarray | Sequence[Sequence[float]],
                    rates: Sequence[float],
                    steps_per_presentation: int) -> "FFLayerSpec":
        arr = np.asarray(weights, dtype=float)
        if arr.ndim != 2:
            raise ValueError("weights must be a 2-d matrix")
        return FFLayerSpec(
            n_i=arr.shape[0],
            n_j=arr.shape[1],
            weights=tuple(tuple(float(v) for v in row) for row in arr),
            rate_code=(tuple(float(r) for r in rates), int(steps_per_presentation)),
        )

    def __post_init__(self) -> None:
        if self.n_i < 1 or self.n_j < 1:
            raise ValueError("layer widths must be >= 1")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.n_i, self.n_j):
            raise ValueError(f"weights shape {w.shape} does not match {self.n_i}x{self.n_j}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        rates, steps = self.rate_code
        if len(rates) != self.n_i:
            raise ValueError(f"rate code has {len(rates)} rates for n_i={self.n_i}")
        if any(not (0.0 <= r <= 1.0) for r in rates):
            raise ValueError("rates must lie in [0, 1]")
        if steps < 1:
            raise ValueError("steps per presentation must be >= 1")


FF_INPUT_THRESH = 0.5


def ff_input_ids(spec: FFLayerSpec) -> tuple[str, ...]:
    return tuple(f"in{i}" for i in range(spec.n_i))


def ff_output_ids(spec: FFLayerSpec) -> tuple[str, ...]:
    return tuple(f"out{j}" for j in range(spec.n_j))


def gen_ff_layer(spec: FFLayerSpec) -> NeuralGraph:
    """Dense layer network: every source couples to every unit.

    Sources are integrate-and-fire relays driven by injected spikes;
    units apply a rectifying nonlinearity to their weighted input sum.
    All n_i * n_j synapses are materialized, zero weights included, so
    the structural synapse count is exactly the weight-matrix size.
    """
    sources = ff_input_ids(spec)
    units = ff_output_ids(spec)
    source_spec = NeuronSpec("lif", v_thresh=FF_INPUT_THRESH, v_reset=0.0)
    unit_spec = NeuronSpec("ann_relu")
    neurons = [(nid, source_spec, 0.0) for nid in sources]
    neurons += [(nid, unit_spec, 0.0) for nid in units]
    synapses = tuple(
        SynapseSpec(sources[i], units[j], float(spec.weights[i][j]))
        for i in range(spec.n_i)
        for j in range(spec.n_j)
    )
    return NeuralGraph(
        neurons=tuple(neurons),
        synapses=synapses,
        input_neurons=sources,
        output_neurons=units,
    )


def ff_input_schedule(spec: FFLayerSpec) -> Callable[[int], tuple[tuple[str, float], ...]]:
    """Evenly spaced spike trains realizing the configured rates.

    Within each presentation of S steps a source with rate r fires on
    exactly floor(S * r) steps, spaced as evenly as integer arithmetic
    allows; the pattern repeats every presentation. The returned callable
    maps a step index to (neuron id, injected value) pairs.
    """
    rates, steps = spec.rate_code
    sources = ff_input_ids(spec)

    def schedule(t: int) -> tuple[tuple[str, float], ...]:
        s = t % steps
        fires = []
        for nid, rate in zip(sources, rates):
            if math.floor((s + 1) * rate) > math.floor(s * rate):
                fires.append((nid, 1.0))
        return tuple(fires)

    return schedule


def gen_self_exciting_loop(v_thresh: float = 1.0,
                           weight: float | None = None) -> NeuralGraph:
    """One neuron that keeps itself firing: the non-converging control.

    The loop starts above threshold and each spike re-injects more than
    a threshold's worth of drive, so it fires every step forever and
    its cumulative energy is exactly linear in the step count.
    """
    if weight is None:
        weight = 1.5 * v_thresh
    spec = NeuronSpec("lif", v_thresh=v_thresh, v_reset=0.0)
    return NeuralGraph(
        neurons=(("loop0", spec, 1.5 * v_thresh),),
        synapses=(SynapseSpec("loop0", "loop0", weight),),
        input_neurons=(),
        output_neurons=("loop0",),
    )


def gen_random_dag(n: int, edge_density: float, alphabet: Sequence[str],
                   seed: int) -> ComputeGraph:
    """Seed-deterministic random DAG; edges only run from lower to
    higher index, so the result is acyclic by construction."""
    if not (0.0 <= edge_density <= 1.0):
        raise ValueError(f"edge_density must lie in [0, 1], got {edge_density}")
    if not alphabet:
        raise ValueError("alphabet must be non-empty")
    rng = np.random.default_rng(seed)
    kinds = [str(alphabet[int(k)]) for k in rng.integers(0, len(alphabet), size=n)]
    inputs: list[list[str]] = [[] for _ in range(n)]
    for j in range(1, n):
        coins = rng.random(j)
        for i in range(j):
            if coins[i] < edge_density:
                inputs[j].append(f"x{i}")
    nodes = tuple(
        OpNode(f"x{i}", kinds[i], tuple(inputs[i])) for i in range(n)
    )
    has_out = {ref for node in nodes for ref in node.inputs}
    declared_inputs = tuple(node.id for node in nodes if not node.inputs)
    declared_outputs = tuple(node.id for node in nodes if node.id not in has_out)
    return ComputeGraph(nodes=nodes, declared_inputs=declared_inputs,
                        declared_outputs=declared_outputs)
