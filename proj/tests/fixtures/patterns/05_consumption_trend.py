import pandas as pd

txns = load_table("MATERIAL_TRANSACTIONS")
txns["TRANSACTION_DATE"] = pd.to_datetime(txns["TRANSACTION_DATE"])

window = txns.loc[txns["TRANSACTION_DATE"] >= "2024-01-01"]
window = window.assign(MONTH=window["TRANSACTION_DATE"].dt.to_period("M"))

monthly = window.groupby("MONTH")["CONSUMED_QTY"].sum()
ax = monthly.plot(kind="line", marker="o", title="Monthly consumption")
ax.figure.savefig("consumption.png")
