"""Detection of eventually periodic streams."""

from __future__ import annotations

import numpy as np

from ..circuit.bitstream import as_bits


def find_period(stream, max_period: int = 1 << 14) -> int | None:
    """Smallest p <= max_period with x[i] == x[i + p] over the second half of the stream.

    The first half is ignored so start-up transients do not hide the cycle.
    Returns None when no such p exists.
    """
    b = as_bits(stream)
    tail = b[len(b) // 2:]
    if len(tail) <= max_period:
        raise ValueError(f"need more than {2 * max_period} bits to search periods up to {max_period}")
    for p in range(1, max_period + 1):
        if np.array_equal(tail[:-p], tail[p:]):
            return p
    return None
