"""Backend selection for the survival-moment kernel.

The compiled ``_kernels`` extension is used when it was built; otherwise the
pure-Python ``_kernels_py`` module with the identical algorithm. Setting
``REFUND_ANNUITY_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import importlib
import math
import os

from .errors import NumericalFailure
from .quadrature import QuadratureSettings

__all__ = ["BACKEND", "available_backends", "survival_moments"]

_STATUS_MESSAGES = {
    1: "moment quadrature did not converge",
    2: "integrand envelope never falls below the truncation floor",
    3: "integrand is not finite",
}


def _load():
    if not os.environ.get("REFUND_ANNUITY_PURE_PYTHON"):
        try:
            return "cython", importlib.import_module("._kernels", __package__)
        except ImportError:
            pass
    return "python", importlib.import_module("._kernels_py", __package__)


BACKEND, _impl = _load()


def available_backends() -> dict:
    """Map of backend name to raw kernel function, for tests and benchmarks."""
    found = {"python": importlib.import_module("._kernels_py", __package__).survival_moments}
    try:
        found["cython"] = importlib.import_module("._kernels", __package__).survival_moments
    except ImportError:
        pass
    return found


def survival_moments(law, x, r, lo=0.0, hi=math.inf, settings=QuadratureSettings(),
                     hazard_weight=False, kernel=None):
    """Discounted survival moments over ``[lo, hi]``.

    Returns ``(m0, m1, m2)`` with ``mk = int_lo^hi t**k e^{-rt} tpx dt``
    (times ``hazard(x + t)`` when ``hazard_weight``).
    """
    code, p1, p2 = law.kernel_params()
    fn = kernel or _impl.survival_moments
    m0, m1, m2, status, _ = fn(
        code, p1, p2, float(x), float(r), float(lo), float(hi), bool(hazard_weight),
        settings.relative_tolerance, settings.absolute_tolerance,
        settings.truncation_survival_floor, settings.max_subdivisions,
    )
    if status:
        raise NumericalFailure(
            f"{_STATUS_MESSAGES[status]} (law={law!r}, x={x}, r={r}, range=[{lo}, {hi}])",
            (m0, m1, m2),
        )
    return m0, m1, m2
