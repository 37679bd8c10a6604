"""Numeric formatting for report files."""


def format_number(value: float, full_precision: bool = False) -> str:
    """Render a float with 6 significant digits, or exactly when asked."""
    if full_precision:
        return repr(float(value))
    return format(float(value), ".6g")
