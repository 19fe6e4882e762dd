# %% [markdown]
# # Discrete identities behind the stability argument
#
# The scheme's energy estimates rest on a handful of exact algebraic identities
# for periodic difference stencils, plus two inequalities on trigonometric
# polynomials. Here we check them on random vectors and look at the residuals.

# %%
import numpy as np

from lawson_kdv import Grid, Field, identity_suite, norm, propagate_airy, sup_norm
from lawson_kdv.harness import identity_residuals

# %% [markdown]
# A single pair of random vectors on a 33-point grid. Each entry is a relative
# residual: the identities hold to round-off, the inequalities are never violated.

# %%
grid = Grid(16)
rng = np.random.default_rng(1)
a, b = rng.uniform(-1, 1, (2, grid.size))
for name, r in identity_residuals(a, b, grid).items():
    print(f"{name:<26} {r:.2e}")

# %% [markdown]
# The full suite: 100 vector pairs for each cutoff, worst residual per identity.

# %%
report = identity_suite(seed=2024)
names = sorted({r.identity_name for r in report.rows})
print(f"{'identity':<26}" + "".join(f"N={n:<9}" for n in (4, 16, 64, 256)))
for name in names:
    vals = [r.max_rel_residual for r in report.rows if r.identity_name == name]
    print(f"{name:<26}" + "".join(f"{v:<11.1e}" for v in vals))
print(f"elapsed {report.elapsed:.2f} s, all passed: {report.passed}")

# %% [markdown]
# The Airy propagator only rotates Fourier coefficients, so it preserves the
# L2 norm for any time. The sup norm is not preserved: dispersion spreads a bump.

# %%
u = grid.sample(lambda x: np.exp(-4 * x**2))
for t in (0.0, 0.1, 1.0, 10.0):
    v = propagate_airy(u, t)
    print(f"t={t:<5} L2={norm(v):.15f}  sup={sup_norm(v):.4f}")

# %% [markdown]
# Nikolski's inequality is sharp: the Dirichlet kernel centred on a node
# attains |u|_inf = |u|_L2 / sqrt(h).

# %%
k = np.arange(-grid.N, grid.N + 1)
kernel = Field.from_coeffs(grid, (-1.0) ** k)
print(sup_norm(kernel), norm(kernel) / np.sqrt(grid.h))
