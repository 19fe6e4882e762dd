# %% [markdown]
# # How sharp is the CFL condition c tau <= h?
#
# The Rusanov term (c tau h / 2) D2 u damps the high modes that the centred
# flux difference would otherwise amplify, but it is itself an explicit
# diffusion step and turns unstable once c tau / h exceeds 1. Both sides of
# the condition matter: c must be large enough to dominate the flux, and tau
# must be small enough for the explicit diffusion.

# %%
import warnings

from lawson_kdv import CFLWarning, cfl_sweep, soliton_problem

warnings.simplefilter("ignore", CFLWarning)
problem = soliton_problem()

# %% [markdown]
# c = 4 with tau = d h. d = 1/4 sits on the boundary c d = 1; d = 3/4 is three
# times past it and explodes within a few dozen steps.

# %%
smap = cfl_sweep(problem, [4.0], [0.25, 0.75], [1 / 40, 1 / 80, 1 / 160], T=2.0)
for e in smap.entries:
    state = "stable" if e.stable else f"blow-up at step {e.blowup_step}"
    print(f"c={e.c:g} d={e.d:<5g} h={e.h:.5f}  c*d={e.c * e.d:<5g} {state}")

# %% [markdown]
# c = 2 with d = 1/2 also satisfies c d = 1, yet once h <= 1/320 the run still
# blows up: c = 2 is too little dissipation for a wave of height 3, whose
# heuristic floor sqrt(2) max|u0| is about 4.2. The coarser runs reach T = 2.

# %%
smap = cfl_sweep(problem, [2.0], [0.5], [1 / 80, 1 / 160, 1 / 320], T=2.0)
for e in smap.entries:
    state = "stable" if e.stable else f"blow-up at step {e.blowup_step}"
    print(f"c={e.c:g} d={e.d:<5g} h={e.h:.5f}  {state}")
