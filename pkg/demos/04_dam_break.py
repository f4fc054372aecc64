"""Straight dam with a gap: compare the EC and ES fluxes along y = 5 and dump a snapshot."""

import os

import numpy as np

from twolayer_dg.output import solution_filename, write_solution
from twolayer_dg.scenarios import build_dam_break, sample_line, total_variation
from twolayer_dg.timestep import TimeIntegratorConfig, run

xs = np.linspace(0.05, 9.95, 199)
line = np.column_stack([xs, np.full_like(xs, 5.0)])
out = "demo_output"
os.makedirs(out, exist_ok=True)

for flux in ("es", "ec"):
    sc = build_dam_break(N=3, flux=flux)
    U, rec = run(sc.semi, TimeIntegratorConfig(t_end=0.25, cfl=0.7, diagnostics_interval=25), sc.U0)
    h1 = sample_line(sc.semi, U[0], line)
    print(f"{flux}: {len(sc.semi.geometry)} elements, TV of h1 along y=5: {total_variation(h1):.3f}")
    print("    h1 every 20th sample:", np.round(h1[::20], 3))
    path = os.path.join(out, f"{flux}_" + solution_filename(rec.t[-1]))
    write_solution(path, sc.semi, U)
    print("    wrote", path)
