"""How event-driven energy scales with problem size.

Two sweeps, each fit with a log-log regression:

* diffusion meshes of growing size under a constant-activity warm-up
  window: mean per-step energy grows linearly with mesh size (slope 1),
  because only points that change state cost anything;
* square dense layers of growing width under a fixed rate code: energy
  per presentation grows with the synapse count (slope 2).
"""

import neurocost as nc

print("mesh size sweep (diffusion ring, k=4)")
rows, reg = nc.run_sweep(nc.SweepSpec(
    workload="mesh",
    param="m_s",
    values=(64.0, 128.0, 256.0, 512.0, 1024.0),
    fixed=(("k", 4.0),),
))
for row in rows:
    print(f"  m_s={row.value:>6.0f} mean_e_t={row.mean_e_t:>10.1f} "
          f"steps={row.steps}")
print(f"  slope={reg.slope:.4f} r2={reg.r_squared:.6f}  (expected 1.0)")

print()
print("dense layer width sweep (rate-coded, skewed electrical costs)")
rows, reg = nc.run_sweep(nc.SweepSpec(
    workload="ff",
    param="n",
    values=(8.0, 16.0, 32.0, 64.0, 128.0),
    constants=nc.preset("digital-skew"),
))
for row in rows:
    print(f"  n={row.value:>6.0f} mean_e_t={row.mean_e_t:>12.1f} "
          f"steps={row.steps}")
print(f"  slope={reg.slope:.4f} r2={reg.r_squared:.6f}  (expected 2.0)")
