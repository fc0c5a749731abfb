"""Order-restricted estimation of matrix parameters and ordinal trend tests."""

from . import _orderest
from ._orderest import (
    OrderestError,
    Restriction,
    check_rank1,
    cumulative_umle,
    demo,
    hp_estimate,
    is_feasible,
    ks_one_sided,
    minmax,
    pava,
    pooled_pi,
    scenarios,
    simulate_estimation,
    simulate_power,
)

__version__ = _orderest.__version__

__all__ = [
    "OrderestError",
    "Restriction",
    "check_rank1",
    "cumulative_umle",
    "demo",
    "estimate",
    "hp_estimate",
    "is_feasible",
    "ks_one_sided",
    "minmax",
    "pava",
    "pooled_pi",
    "restriction",
    "scenarios",
    "simulate_estimation",
    "simulate_power",
    "statistic",
    "test",
]


def restriction(spec, p):
    """Restriction from a Restriction or its text form ("simple", "tree:0", ...)."""
    if isinstance(spec, Restriction):
        if spec.size != p:
            raise OrderestError(f"restriction covers {spec.size} indices, expected {p}")
        return spec
    return Restriction.parse(str(spec), p)


def _shape(a):
    import numpy as np

    a = np.asarray(a)
    if a.ndim != 2:
        raise OrderestError("expected a 2-d array")
    return a.shape


def estimate(theta_hat, row_order="simple", col_order="simple", row_weights=None, col_weights=None,
             tol=1e-10, max_cycles=1000):
    """Alternating column/row estimate of an I x J matrix.

    row_order applies along each row (J indices), col_order down each column.
    """
    rows, cols = _shape(theta_hat)
    return _orderest.estimate(theta_hat, restriction(row_order, cols), restriction(col_order, rows),
                              row_weights, col_weights, tol, max_cycles)


def statistic(counts, hypothesis="columns", row_order="simple", col_order="simple"):
    groups, categories = _shape(counts)
    return _orderest.statistic(counts, hypothesis, restriction(row_order, categories),
                               restriction(col_order, groups))


def test(counts, hypothesis="columns", row_order="simple", col_order="simple", replicates=10000, seed=1,
         strict=True, threads=1):
    """Bootstrap p-value for an I x J table of counts."""
    groups, categories = _shape(counts)
    return _orderest.test(counts, hypothesis, restriction(row_order, categories), restriction(col_order, groups),
                          replicates, seed, strict, threads)


test.__test__ = False
