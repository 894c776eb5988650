"""Size caps, overridable through the ``TORILAT_CAPS`` environment variable.

The variable holds comma separated ``key=value`` pairs, for example
``TORILAT_CAPS="h2=32,subgroups=128"``.
"""

import os
from contextlib import contextmanager
from contextvars import ContextVar

DEFAULT_CAPS = {
    "closure": 256,  # largest group built by closure
    "subgroups": 64,  # largest group whose subgroups are enumerated
    "cohomology": 64,  # degrees -1, 0, 1
    "h2": 16,  # degree 2 and Sha^2_omega
    "nlqp": 48,  # m * 2^nu for the C_m x D_{2^nu} construction
}


_RAISED: ContextVar[dict] = ContextVar("torilat_raised_caps", default={})


@contextmanager
def raised_caps(**values: int):
    """Temporarily lift named caps to at least the given values."""
    current = dict(_RAISED.get())
    for key, value in values.items():
        current[key] = max(value, current.get(key, 0))
    token = _RAISED.set(current)
    try:
        yield
    finally:
        _RAISED.reset(token)


def cap(name: str) -> int:
    return max(_base_cap(name), _RAISED.get().get(name, 0))


def _base_cap(name: str) -> int:
    raw = os.environ.get("TORILAT_CAPS", "")
    for item in raw.split(","):
        if "=" in item:
            key, value = item.split("=", 1)
            if key.strip() == name:
                return int(value)
    return DEFAULT_CAPS[name]
