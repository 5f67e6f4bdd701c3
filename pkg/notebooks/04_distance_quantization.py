# %% [markdown]
# # Distance quantization on the grid
#
# Point-to-point distances between voxel centers on a unit grid can only
# take values sqrt(i^2 + j^2 + k^2). An NSD curve computed that way is a
# staircase with few steps. Point-to-surface distances vary continuously.

# %%
import numpy as np

from meshdist import nsd_curve
from meshdist.baseline import grid_distance_values
from meshdist.oracle import ShapeSpec, rasterize

extent = ([0.0] * 3, [32.0] * 3)
a = rasterize(ShapeSpec.sphere(6.0, (15.7, 16.2, 15.9)), 1.0, extent)
b = rasterize(ShapeSpec.sphere(7.4, (17.1, 15.3, 16.6)), 1.0, extent)
taus = np.round(np.arange(501) * 0.01, 10)

grid = np.array([v for _, v in nsd_curve(a, b, taus, "grid")])
mesh = np.array([v for _, v in nsd_curve(a, b, taus, "mesh")])
print("distinct NSD values: grid", len(np.unique(grid)), "mesh", len(np.unique(mesh)))

# %%
jumps = grid_distance_values(a, b)
print("grid jump locations and their squares:")
for d in jumps[:8]:
    print(f"  {d:.6f}  ->  {d * d:.6f}")

# %%
for t in (1.0, 1.2, 1.41, 1.42, 2.0, 2.5):
    k = int(round(t * 100))
    print(f"tau={t:4.2f}  grid={grid[k]:.4f}  mesh={mesh[k]:.4f}")
