"""Inverse multiquadric kernel and its exact algebraic identities.

The kernel is phi(t) = (alpha^2 + t^2)^(-k) with shape alpha > 0 and integer
order k >= 1.  Everything here is pure and stateless, so the functions are
safe for unrestricted concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class KernelParams:
    """Shape and order of the inverse multiquadric kernel.

    Parameters
    ----------
    alpha : float
        Shape parameter, in the same length units as the node spacing.
        Must be strictly positive.
    k : int
        Integer order of the kernel.  Must be >= 1.
    """

    alpha: float
    k: int

    def __post_init__(self):
        if not self.alpha > 0:  # also rejects NaN
            raise ValidationError(f"alpha must be > 0, got {self.alpha}")
        if int(self.k) != self.k or self.k < 1:
            raise ValidationError(f"k must be a positive integer, got {self.k}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "k", int(self.k))


def _int_power(base, k: int):
    """base**k for integer k >= 1 by repeated squaring.

    Avoids pow-with-real-exponent roundoff; works elementwise on arrays.
    """
    result = None
    square = base
    while k:
        if k & 1:
            result = square if result is None else result * square
        k >>= 1
        if k:
            square = square * square
    return result


def imq_eval(params: KernelParams, t):
    """Evaluate (alpha^2 + t^2)^(-k) at offset(s) t.

    Accepts a scalar or an ndarray of offsets and returns a matching scalar
    or array.  The result is strictly positive, even in t, and maximal at
    t = 0 where it equals alpha^(-2k).
    """
    t = np.asarray(t, dtype=float)
    base = params.alpha * params.alpha + t * t
    out = 1.0 / _int_power(base, params.k)
    return float(out) if out.ndim == 0 else out


def partial_fraction_split(alpha: float, M: int, j: int) -> tuple[float, float]:
    """Evaluate both sides of the partial-fraction identity

        1 / [(a2 + j^2)(a2 + (M-j)^2)]
            = (4 a2 + M^2)^(-1) [ ((2/M)j + 1)/(a2 + j^2)
                                  + (3 - (2/M)j)/(a2 + (M-j)^2) ]

    with a2 = alpha^2.  The two sides are computed independently and
    returned as ``(lhs, rhs)``; they agree exactly up to roundoff.

    The endpoints j = 0 and j = M are admitted (the identity holds there).
    M = 0 is rejected because the identity divides by M.
    """
    if not alpha > 0:
        raise ValidationError(f"alpha must be > 0, got {alpha}")
    if M < 1:
        raise ValidationError(f"M must be >= 1 (the identity divides by M), got {M}")
    if not 0 <= j <= M:
        raise ValidationError(f"j must lie in [0, {M}], got {j}")
    a2 = alpha * alpha
    left = a2 + j * j
    right = a2 + (M - j) ** 2
    lhs = 1.0 / (left * right)
    s = (2.0 / M) * j
    rhs = ((s + 1.0) / left + (3.0 - s) / right) / (4.0 * a2 + M * M)
    return lhs, rhs
