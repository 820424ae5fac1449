"""Fourth-order central finite-difference stencils for array-valued functions.

Samples are combined in symmetric pairs first, so a constant function
differentiates to exactly zero.
"""

import numpy as np


def first(f, x, p, h):
    """d f / d x_p at x."""
    x = np.asarray(x, dtype=float)
    e = np.zeros_like(x)
    e[p] = h
    return (8.0 * (f(x + e) - f(x - e)) - (f(x + 2 * e) - f(x - 2 * e))) / (12.0 * h)


def second(f, x, p, q, h):
    """d^2 f / d x_p d x_q at x (pure or mixed)."""
    x = np.asarray(x, dtype=float)
    if p == q:
        e = np.zeros_like(x)
        e[p] = h
        near = f(x + e) + f(x - e)
        far = f(x + 2 * e) + f(x - 2 * e)
        return (16.0 * near - far - 30.0 * f(x)) / (12.0 * h * h)
    return first(lambda y: first(f, y, q, h), x, p, h)


def partial(f, x, alpha, h):
    """Mixed partial derivative for a multi-index with |alpha| <= 2."""
    idx = [p for p, a in enumerate(alpha) for _ in range(a)]
    if not idx:
        return f(np.asarray(x, dtype=float))
    if len(idx) == 1:
        return first(f, x, idx[0], h)
    if len(idx) == 2:
        return second(f, x, idx[0], idx[1], h)
    raise ValueError("only derivatives up to order 2 are supported")
