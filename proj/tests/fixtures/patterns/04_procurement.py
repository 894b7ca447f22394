import pandas as pd
from sqlalchemy import create_engine

engine = create_engine("sqlite:///erp.db")

orders = pd.read_sql("SELECT * FROM PURCHASE_ORDERS", engine)
lines = pd.read_sql("SELECT * FROM PO_LINES", engine)
suppliers = pd.read_sql("SELECT * FROM SUPPLIERS", engine)

po = pd.merge(orders, lines, on=["PO_NUMBER"], how="inner")
po = po.merge(suppliers, left_on="SUPPLIER_ID", right_on="SUPPLIER_ID", how="left")
open_po = po.query("STATUS == 'OPEN' and ITEM_CODE == 'ITEM-003-RR2'")

per_supplier = open_po.groupby("NAME")["PO_NUMBER"].nunique()
per_supplier = per_supplier.sort_values(ascending=False)
print(per_supplier.head(10))
