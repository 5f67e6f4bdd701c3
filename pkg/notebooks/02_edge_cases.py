# %% [markdown]
# # Empty segmentations
#
# When exactly one mask is empty the distance metrics have no boundary to
# measure against. The library returns the worst value (inf mm or 0) and
# when both are empty the best value (0 mm or 1). Either way a warning is
# raised and flags record which input was empty.

# %%
import warnings

import numpy as np

from meshdist import BinaryMask, EmptySegmentationWarning, evaluate

full = BinaryMask(np.pad(np.ones((4, 4), bool), 3))
empty = BinaryMask(np.zeros((10, 10), bool))

# %%
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always", EmptySegmentationWarning)
    for label, ref, pred in (("missed", full, empty), ("false alarm", empty, full), ("true negative", empty, empty)):
        rep = evaluate(ref, pred)
        print(f"{label:14s} ref_empty={rep.ref_empty!s:5} pred_empty={rep.pred_empty!s:5}", rep.values)
print(len(caught), "warnings raised")

# %% [markdown]
# The flags make it easy to split a cohort into detection failures and
# true negatives before averaging, instead of letting inf or 1.0 values
# dominate the means.
