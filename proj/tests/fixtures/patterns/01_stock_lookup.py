"""On-hand quantity for one item at one organization."""
import pandas as pd

ITEM = "ITEM-014-KX4"
ORG = "Plant-C"

# current balances only
soh = load_table("STOCK_ON_HAND")
soh = soh[soh["ITEM_CODE"] == ITEM]
soh = soh[soh["ORGANIZATION"] == ORG]

result = soh[["ITEM_CODE", "ORGANIZATION", "LOCATOR", "ON_HAND_QTY"]]
result = result.sort_values("LOCATOR").reset_index(drop=True)
print(result.to_string(index=False))
