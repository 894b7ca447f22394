import pandas as pd
import seaborn as sns

counts = read_table("CYCLE_COUNTS")
locators = read_table("LOCATORS")
counts = counts.join(locators.set_index("LOCATOR"), on="LOCATOR")

grid = counts.pivot_table(index="ZONE", columns="ITEM_CODE", values="VARIANCE_QTY", aggfunc="sum")
grid = grid.fillna(0)
sns.heatmap(grid, cmap="coolwarm", center=0)
