"""A diffusing ring tracked by a two-rail spiking transport.

Each mesh point carries a pair of threshold neurons holding its positive
and negative deviation from equilibrium. Spikes move quantized parcels
of value between neighbors, so activity (and therefore energy) dies out
as the profile flattens, while a clocked solver would keep paying for
every point at every step. A self-exciting loop is run alongside as the
non-converging control.
"""

import numpy as np

import neurocost as nc
from neurocost.workloads import decode_mesh_state, reference_mesh_solve

M_S, K, STEPS = 64, 4, 80
spec = nc.MeshSpec(
    m_s=M_S, k=K, m_t=STEPS,
    dynamics=nc.Diffusion(0.5),
    init=nc.sinusoid_init(M_S, amplitude=1.0, mean=1.0, cycles=1),
    v_thresh=0.25,
)
_, ng = nc.gen_mesh(spec)
state = nc.init_sim(ng, nc.AnalogEncoding(), 0)
reference = reference_mesh_solve(spec)

print(f"ring of {M_S} points, fan-out {K}, threshold {spec.v_thresh}")
print(f"{'t':>4} {'spikes':>7} {'e_t':>9} {'decode err':>11}")
records = []
for t in range(STEPS):
    rec = nc.step_sim(state, ())
    records.append(rec)
    if t < 10 or t % 10 == 0:
        err = float(np.max(np.abs(decode_mesh_state(spec, state) - reference[t + 1])))
        print(f"{t:>4} {rec.spikes:>7} {rec.e_t:>9.1f} {err:>11.4f}")

total = sum(r.e_t for r in records)
half = sum(r.e_t for r in records[: STEPS // 2])
print(f"\nmesh energy: first half {half:.0f}, full run {total:.0f} "
      f"(flat tail adds {(total - half) / max(total, 1):.1%})")

# the control never converges, so its energy grows strictly linearly
loop = nc.gen_self_exciting_loop()
for m_t in (40, 80):
    tr = nc.run_sim(nc.init_sim(loop, nc.AnalogEncoding(), 0), m_t)
    print(f"control loop, {m_t} steps: e_n={tr.e_n:.0f}")
