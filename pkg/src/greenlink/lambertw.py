"""Real Lambert W, branches 0 and -1.

Halley iteration from a branch-appropriate starting point, with a bisection
fallback on a bracketing interval.  Near the branch point x = -1/e the
function is evaluated through ``r = 1 + e*x``; callers that can form ``r``
more accurately than ``1 + e*x`` can use :func:`lambert_w_offset`, and
:func:`lambert_w_plus_one` when they need ``w + 1`` itself to full relative
precision.
"""

from __future__ import annotations

import math

INV_E = math.exp(-1.0)
# |1 + e x| below which the branch-point series is used directly.
_SERIES_RADIUS = 1e-4
_RESIDUAL_TOL = 1e-14
_MAX_HALLEY = 60

# Series of W about the branch point in p = +-sqrt(2 (1 + e x)).
_BRANCH_SERIES = (
    -1.0,
    1.0,
    -1.0 / 3.0,
    11.0 / 72.0,
    -43.0 / 540.0,
    769.0 / 17280.0,
    -221.0 / 8505.0,
    680863.0 / 43545600.0,
    -1963.0 / 204120.0,
    226287557.0 / 37623398400.0,
)


def _branch_series(p):
    w = 0.0
    for coeff in reversed(_BRANCH_SERIES):
        w = w * p + coeff
    return w


def _check_branch(branch):
    if branch not in (0, -1):
        raise ValueError(f"branch must be 0 or -1, got {branch!r}")


def _residual(w, x):
    return w * math.exp(w) - x


def _bracket(branch, x):
    """Interval [a, b] with w*exp(w) - x changing sign."""
    if branch == 0:
        if x <= 0:
            return -1.0, 0.0
        hi = max(1.0, math.log(x) + 1.0)
        return 0.0, hi
    lo = -2.0
    while _residual(lo, x) < 0:  # w e^w -> 0- as w -> -inf
        lo *= 2.0
    return lo, -1.0


def _initial_guess(branch, x, r):
    if r < 0.25:
        p = math.sqrt(2.0 * r)
        return _branch_series(p if branch == 0 else -p)
    if branch == 0:
        if x < 3.0:
            return math.log1p(x) * (1.0 - math.log1p(math.log1p(x)) / (2.0 + math.log1p(x)))
        lx = math.log(x)
        return lx - math.log(lx)
    l1 = math.log(-x)
    l2 = math.log(-l1)
    return l1 - l2 + l2 / l1


def _solve(branch, x, r):
    if r < _SERIES_RADIUS:
        p = math.sqrt(2.0 * r)
        return _branch_series(p if branch == 0 else -p)
    if branch == 0 and x == 0.0:
        return 0.0
    lo, hi = _bracket(branch, x)
    w = min(max(_initial_guess(branch, x, r), lo), hi)
    for _ in range(_MAX_HALLEY):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= _RESIDUAL_TOL * abs(x):
            return w
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w_new = w - step
        if not (lo <= w_new <= hi) or not math.isfinite(w_new):
            break
        if w_new == w:
            return w
        w = w_new
    return _bisect(x, lo, hi)


def _bisect(x, lo, hi):
    f_lo = _residual(lo, x)
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = _residual(mid, x)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def lambert_w(branch: int, x: float) -> float:
    """Real branch ``branch`` (0 or -1) of the inverse of w*exp(w).

    Branch 0 is defined on [-1/e, inf) and returns w >= -1; branch -1 on
    [-1/e, 0) and returns w <= -1.  Arguments a few ulps below -1/e (the
    rounding of -1/e itself is one of them) are treated as the branch point.
    """
    _check_branch(branch)
    x = float(x)
    if math.isnan(x):
        raise ValueError("x is NaN")
    r = math.fma(math.e, x, 1.0) if hasattr(math, "fma") else 1.0 + math.e * x
    if r < 0.0:
        if r > -1e-15:
            r = 0.0
        else:
            raise ValueError(f"x = {x!r} lies below the branch point -1/e")
    if branch == -1 and x >= 0.0:
        raise ValueError(f"branch -1 is defined on [-1/e, 0), got x = {x!r}")
    if branch == 0 and math.isinf(x):
        return math.inf
    return _solve(branch, x, r)


def lambert_w_offset(branch: int, r: float) -> float:
    """Lambert W at x = (r - 1)/e, parameterised by the branch-point offset r = 1 + e x.

    Use this when ``r`` is small and known to better precision than ``x``.
    """
    _check_branch(branch)
    if not r >= 0.0:
        raise ValueError(f"offset r must be >= 0, got {r!r}")
    x = (r - 1.0) * INV_E
    if branch == -1 and not r < 1.0:
        raise ValueError("branch -1 requires r < 1")
    return _solve(branch, x, r)


def lambert_w_plus_one(branch: int, r: float) -> float:
    """1 + W at x = (r - 1)/e, without the cancellation of forming W first.

    Close to the branch point W rounds to -1 while 1 + W ~ +-sqrt(2 r) is
    still representable.
    """
    _check_branch(branch)
    if not r >= 0.0:
        raise ValueError(f"offset r must be >= 0, got {r!r}")
    if r < _SERIES_RADIUS:
        p = math.sqrt(2.0 * r)
        if branch == -1:
            p = -p
        return p * _series_tail(p)
    return 1.0 + lambert_w_offset(branch, r)


def _series_tail(p):
    # (W + 1) / p from the branch-point series
    acc = 0.0
    for coeff in reversed(_BRANCH_SERIES[1:]):
        acc = acc * p + coeff
    return acc
