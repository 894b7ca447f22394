"""Formatting helpers shared by the report scripts."""

CURRENCY = "$"


def format_currency(value, digits=2):
    # group thousands and pin the decimals
    return f"{CURRENCY}{value:,.{digits}f}"


def format_percent(ratio):
    return f"{ratio * 100:.1f}%"


def banner(title, width=40):
    line = "=" * width
    return "\n".join([line, title.center(width), line])
