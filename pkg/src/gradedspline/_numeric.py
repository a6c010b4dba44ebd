import math

_CEIL_GUARD = 1e-12


def guarded_ceil(x: float, minimum: int = 1) -> int:
    """``ceil`` that ignores rounding noise just above an integer, clamped below at ``minimum``."""
    if not math.isfinite(x):
        raise ValueError(f"cannot take ceil of {x}")
    c = math.ceil(x - _CEIL_GUARD * max(1.0, abs(x)))
    return max(minimum, c)


def log_power(x: float, p: float) -> float:
    """``ln(x) ** p`` with ``ln(x) ** 0 == 1``; requires ``ln(x) >= 0`` for fractional ``p``."""
    if p == 0:
        return 1.0
    lx = math.log(x)
    if lx < 0:
        lx = 0.0
    return lx ** p
