import pandas as pd


def main():
    soh = pd.read_parquet("warehouse/stock_on_hand.parquet")
    soh = soh[soh.ON_HAND_QTY > 0]
    locs = pd.read_parquet("warehouse/locators.parquet")
    merged = soh.merge(locs, on=["LOCATOR", "ORGANIZATION"], how="inner")
    cols = ["ITEM_CODE", "LOCATOR", "ZONE", "ON_HAND_QTY"]
    print(merged[cols].head(50).to_string(index=False))


if __name__ == "__main__":
    main()
