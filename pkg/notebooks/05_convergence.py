# %% [markdown]
# # Convergence under grid refinement
#
# Squares A = [0,10]^2 and B = [2,12]^2 have a closed-form MASD. Each
# directed boundary integral is 16 + (2 sqrt 2 + 2 ln(1 + sqrt 2)) over the
# two sides facing away plus 16 over the other two, on a perimeter of 40.
# As the grid is refined the mesh-based MASD approaches it.

# %%
import math

from meshdist import evaluate, grid_metrics
from meshdist.oracle import ShapeSpec, rasterize

analytic = 2 * (16 + 2 * math.sqrt(2) + 2 * math.log(1 + math.sqrt(2)) + 16) / 40
extent = ([-2.0, -2.0], [14.0, 14.0])
sq_a = ShapeSpec.rectangle((5, 5), (5, 5))
sq_b = ShapeSpec.rectangle((5, 5), (7, 7))
print(f"analytic MASD = {analytic:.5f} mm")

# %%
print(" spacing   mesh MASD   error    grid MASD   error")
for h in (1.0, 0.5, 0.25, 0.125):
    a, b = rasterize(sq_a, h, extent), rasterize(sq_b, h, extent)
    m = evaluate(a, b, metrics=["masd"])["masd"]
    g = grid_metrics(a, b, metrics=["masd"])["masd"]
    print(f"{h:8.3f}  {m:9.5f}  {abs(m - analytic):.5f}  {g:9.5f}  {abs(g - analytic):.5f}")
