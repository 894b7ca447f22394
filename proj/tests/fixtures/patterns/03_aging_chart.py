"""
Aging buckets per slab.

Older versions did df.merge(...) against INVENTORY_MASTER here and then
called df.groupby twice; both are gone.
"""
import matplotlib.pyplot as plt
import pandas as pd

aging = load_table("STOCK_AGING")
# aging = aging.merge(load_table("INVENTORY_MASTER"), on="ITEM_CODE")
buckets = aging.groupby("SLAB", as_index=False)["AGED_VALUE"].sum()
buckets = buckets.sort_values("SLAB")

fig, ax = plt.subplots(figsize=(8, 4))
ax.bar(buckets["SLAB"], buckets["AGED_VALUE"])
ax.set_xlabel("Slab")
ax.set_ylabel("Aged value")
plt.tight_layout()
plt.savefig("aging.png")
