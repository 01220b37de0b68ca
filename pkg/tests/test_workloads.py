"""Workload generator tests: mesh transport, rate-coded layers, controls."""

from __future__ import annotations

import numpy as np
import pytest

import neurocost as nc
from neurocost.workloads import (
    Dtmc,
    FFLayerSpec,
    decode_mesh_state,
    ff_input_ids,
    ff_input_schedule,
    ff_output_ids,
    gen_ff_layer,
    mesh_equilibrium,
    rail_ids,
    reference_mesh_solve,
)


def ring_spec(m_s, init, m_t=20, v_thresh=0.25, alpha=0.5, k=2):
    return nc.MeshSpec(m_s=m_s, k=k, m_t=m_t, dynamics=nc.Diffusion(alpha),
                       init=init, v_thresh=v_thresh)


class TestMeshTransport:
    def test_single_seed_ring(self):
        # one point one unit above a cold ring: a single spike carries a
        # quantum out and every later step stays within one quantum of
        # the dense reference trajectory
        spec = ring_spec(4, (1.0, 0.0, 0.0, 0.0), m_t=12)
        _, ng = nc.gen_mesh(spec)
        state = nc.init_sim(ng, nc.AnalogEncoding(), 0)
        ref = reference_mesh_solve(spec)
        spikes, errs = [], []
        for t in range(12):
            rec = nc.step_sim(state, ())
            spikes.append(rec.spikes)
            errs.append(float(np.max(np.abs(decode_mesh_state(spec, state) - ref[t + 1]))))
        assert sum(spikes) == 1 and spikes[0] == 1
        assert errs[0] == pytest.approx(0.25, abs=1e-12)
        assert max(errs) <= 0.25 + 1e-12

    def test_reference_conserves_mass(self):
        spec = ring_spec(8, nc.sinusoid_init(8, amplitude=0.5, mean=1.0))
        ref = reference_mesh_solve(spec)
        mass = float(np.sum(spec.init))
        for row in ref:
            assert float(row.sum()) == pytest.approx(mass, rel=1e-12)

    def test_equilibrium_is_uniform_for_diffusion(self):
        spec = ring_spec(4, (1.0, 0.0, 0.0, 0.0))
        assert mesh_equilibrium(spec).tolist() == [0.25] * 4

    def test_uniform_start_is_silent(self):
        spec = ring_spec(6, (1.0,) * 6, m_t=10)
        _, ng = nc.gen_mesh(spec)
        tr = nc.run_sim(nc.init_sim(ng, nc.AnalogEncoding(), 0), 10)
        assert sum(r.spikes for r in tr.records) == 0
        assert tr.e_n == 0.0

    def test_single_point_mesh(self):
        spec = nc.MeshSpec(m_s=1, k=0, m_t=5, dynamics=nc.Diffusion(0.5),
                           init=(2.0,), v_thresh=0.25)
        _, ng = nc.gen_mesh(spec)
        state = nc.init_sim(ng, nc.AnalogEncoding(), 0)
        assert len(ng.neurons) == 2  # one rail pair
        assert decode_mesh_state(spec, state).tolist() == [2.0]
        tr = nc.run_sim(state, 5)
        assert sum(r.spikes for r in tr.records) == 0

    def test_rail_ids_cover_mesh(self):
        spec = ring_spec(4, (1.0, 0.0, 0.0, 0.0))
        pos, neg = rail_ids(spec)
        assert len(pos) == len(neg) == 4
        _, ng = nc.gen_mesh(spec)
        assert set(pos) | set(neg) == set(ng.neuron_ids)

    def test_fidelity_through_relaxation(self):
        # a full wave: amplitude 1 against threshold 0.25, tracked to the
        # flat state; decode error stays inside the transport budget
        spec = ring_spec(32, nc.sinusoid_init(32, amplitude=1.0, mean=1.0, cycles=2),
                         m_t=40)
        _, ng = nc.gen_mesh(spec)
        state = nc.init_sim(ng, nc.AnalogEncoding(), 0)
        ref = reference_mesh_solve(spec)
        worst = 0.0
        for t in range(40):
            nc.step_sim(state, ())
            err = float(np.max(np.abs(decode_mesh_state(spec, state) - ref[t + 1])))
            worst = max(worst, err)
        assert worst <= 5 * spec.v_thresh


class TestMeshValidation:
    @pytest.mark.parametrize("k", [0, 3, 4, 6])
    def test_degenerate_rings(self, k):
        spec = nc.MeshSpec(m_s=4, k=k, m_t=5, dynamics=nc.Diffusion(0.5),
                           init=(1.0,) * 4, v_thresh=0.25)
        with pytest.raises(nc.DegenerateMesh):
            nc.gen_mesh(spec)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            nc.MeshSpec(m_s=0, k=2, m_t=5, dynamics=nc.Diffusion(0.5),
                        init=(), v_thresh=0.25)
        with pytest.raises(ValueError):
            nc.MeshSpec(m_s=4, k=2, m_t=5, dynamics=nc.Diffusion(0.5),
                        init=(1.0,) * 3, v_thresh=0.25)


class TestDtmc:
    @pytest.mark.parametrize("matrix", [
        ((0.5, 0.4), (0.1, 0.9)),            # row does not sum to one
        ((1.1, -0.1), (0.1, 0.9)),            # negative entry
        ((0.5, 0.5, 0.0), (0.1, 0.9, 0.0)),   # shape mismatch with m_s
    ])
    def test_non_stochastic_rejected(self, matrix):
        spec = nc.MeshSpec(m_s=2, k=2, m_t=5, dynamics=Dtmc(matrix),
                           init=(1.0, 1.0), v_thresh=0.25)
        with pytest.raises(nc.NonStochasticMatrix):
            nc.coupling_matrix(spec)
        with pytest.raises(nc.NonStochasticMatrix):
            nc.gen_mesh(spec)

    def test_coupling_wider_than_fanout_rejected(self):
        dense = Dtmc((
            (0.2, 0.3, 0.3, 0.2),
            (0.25, 0.25, 0.25, 0.25),
            (0.25, 0.25, 0.25, 0.25),
            (0.2, 0.3, 0.3, 0.2),
        ))
        spec = nc.MeshSpec(m_s=4, k=2, m_t=5, dynamics=dense,
                           init=(1.0,) * 4, v_thresh=0.25)
        with pytest.raises(ValueError):
            nc.gen_mesh(spec)

    def test_two_state_chain_equilibrium(self):
        # pi = (1/6, 5/6), scaled to the initial mass of 4
        chain = Dtmc(((0.5, 0.5), (0.1, 0.9)))
        spec = nc.MeshSpec(m_s=2, k=2, m_t=60, dynamics=chain,
                           init=(3.0, 1.0), v_thresh=0.05)
        equil = mesh_equilibrium(spec)
        assert equil.tolist() == pytest.approx([2 / 3, 10 / 3], rel=1e-9)
        ref = reference_mesh_solve(spec)
        assert ref[-1].tolist() == pytest.approx([2 / 3, 10 / 3], rel=1e-6)

        _, ng = nc.gen_mesh(spec)
        state = nc.init_sim(ng, nc.AnalogEncoding(), 0)
        nc.run_sim(state, 60)
        decoded = decode_mesh_state(spec, state)
        assert np.max(np.abs(decoded - ref[-1])) <= 0.05

    def test_reducible_chain_gets_min_norm_equilibrium(self):
        # an identity chain holds (3, 1) exactly; the least-squares
        # stationary vector is the uniform split, and the transported
        # network relaxes to that artifact instead
        ident = Dtmc(((1.0, 0.0), (0.0, 1.0)))
        spec = nc.MeshSpec(m_s=2, k=2, m_t=30, dynamics=ident,
                           init=(3.0, 1.0), v_thresh=0.05)
        assert mesh_equilibrium(spec).tolist() == pytest.approx([2.0, 2.0])
        assert reference_mesh_solve(spec)[-1].tolist() == [3.0, 1.0]
        _, ng = nc.gen_mesh(spec)
        state = nc.init_sim(ng, nc.AnalogEncoding(), 0)
        nc.run_sim(state, 30)
        decoded = decode_mesh_state(spec, state)
        assert np.max(np.abs(decoded - np.array([2.0, 2.0]))) <= 0.1


class TestSinusoidInit:
    def test_shape_and_bounds(self):
        init = nc.sinusoid_init(16, amplitude=0.5, mean=1.0, cycles=2)
        arr = np.asarray(init)
        assert len(init) == 16
        assert float(arr.mean()) == pytest.approx(1.0, abs=1e-12)
        assert float(arr.max()) <= 1.5 + 1e-12
        assert float(arr.min()) >= 0.5 - 1e-12

    def test_cycles_change_pattern(self):
        one = np.asarray(nc.sinusoid_init(16, cycles=1))
        two = np.asarray(nc.sinusoid_init(16, cycles=2))
        assert not np.allclose(one, two)


class TestFFLayer:
    def make_spec(self, n_i=8, n_j=4, rate=0.5, steps=10, seed=3):
        rng = np.random.default_rng(seed)
        weights = rng.uniform(0.5, 1.0, size=(n_i, n_j))
        return FFLayerSpec.from_arrays(weights, [rate] * n_i, steps)

    def test_structure(self):
        spec = self.make_spec()
        ng = gen_ff_layer(spec)
        assert len(ng.neurons) == 12
        assert len(ng.synapses) == 8 * 4
        assert ng.input_neurons == ff_input_ids(spec)
        assert ng.output_neurons == ff_output_ids(spec)

    def test_zero_weights_are_materialized(self):
        spec = FFLayerSpec.from_arrays(np.zeros((8, 4)), [0.5] * 8, 10)
        assert len(gen_ff_layer(spec).synapses) == 32

    def test_schedule_spacing(self):
        sched = ff_input_schedule(self.make_spec(rate=0.5))
        pattern = [t for t in range(10) if sched(t)]
        assert pattern == [1, 3, 5, 7, 9]
        assert all(len(sched(t)) == 8 for t in pattern)
        # the pattern repeats every presentation
        assert [t for t in range(10, 20) if sched(t)] == [t + 10 for t in pattern]

    def test_schedule_counts_match_rate(self):
        for rate, expect in ((0.3, [3, 6, 9]), (0.0, []), (1.0, list(range(10)))):
            sched = ff_input_schedule(self.make_spec(rate=rate))
            assert [t for t in range(10) if sched(t)] == expect

    def test_units_fire_after_each_volley(self):
        spec = self.make_spec()
        ng = gen_ff_layer(spec)
        state = nc.init_sim(ng, nc.AnalogEncoding(), 0)
        tr = nc.run_sim(state, 12, inputs=ff_input_schedule(spec))
        assert [r.spikes for r in tr.records] == [0, 8, 4, 8, 4, 8, 4, 8, 4, 8, 4, 8]
        outs = set(ff_output_ids(spec))
        unit_spikes = sum(1 for r in tr.records for sid in r.spike_ids if sid in outs)
        assert unit_spikes == 20

    def test_spec_validation(self):
        rng = np.random.default_rng(0)
        wts = rng.uniform(0.5, 1.0, size=(8, 4))
        with pytest.raises(ValueError):
            FFLayerSpec.from_arrays(wts, [1.5] * 8, 10)
        with pytest.raises(ValueError):
            FFLayerSpec.from_arrays(wts, [0.5] * 7, 10)
        with pytest.raises(ValueError):
            FFLayerSpec.from_arrays(wts, [0.5] * 8, 0)
        with pytest.raises(ValueError):
            FFLayerSpec.from_arrays(np.ones(8), [0.5] * 8, 10)
        with pytest.raises(ValueError):
            FFLayerSpec(n_i=0, n_j=4, weights=(), rate_code=((), 10))


class TestSelfExcitingLoop:
    def test_fires_every_step(self):
        ng = nc.gen_self_exciting_loop()
        assert len(ng.neurons) == 1
        assert ng.self_loops == ng.synapses
        tr = nc.run_sim(nc.init_sim(ng, nc.AnalogEncoding(), 0), 40)
        assert [r.spikes for r in tr.records] == [1] * 40
        assert tr.e_n == 2.0 + 3.0 * 39
