import os

import pandas as pd

BASE = os.path.join("exports", "daily")

costs = pd.read_parquet(os.path.join(BASE, "item_costs.parquet"))
label = ", ".join(["UNIT_COST", "COST_TYPE"])

avg_cost = costs.groupby("COST_TYPE")["UNIT_COST"].mean()
print("Columns:", label)
for cost_type, value in avg_cost.items():
    print(f"{cost_type:<12} {value:>10.2f}")
