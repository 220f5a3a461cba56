"""Compiled in-place sweeps over the bidiagonal factors E_k and F_k.

Each function applies an ordered product of n - 1 bidiagonal factors (or
their inverses) to a float64 vector in place.  ``d`` is the diagonal
scaling parameter of the factors; ``d == 1`` takes an add-only branch.

Factor conventions, for row j >= k of the active block:

    E_k^(d):  x_j <- d * (x_{j-1} + x_j)
    F_k^(d):  x_j <- x_{j-1} + d * x_j

Row k - 1 and everything above it is left alone.
"""

from numba import njit


@njit(cache=True)
def e_forward(x, d):
    """x <- E_{n-1} ... E_1 x   (= D^(d) P x)."""
    n = x.shape[0]
    if d == 1.0:
        for k in range(1, n):
            for j in range(n - 1, k - 1, -1):
                x[j] = x[j] + x[j - 1]
    else:
        for k in range(1, n):
            for j in range(n - 1, k - 1, -1):
                x[j] = d * (x[j] + x[j - 1])


@njit(cache=True)
def e_inverse(x, d):
    """x <- E_1^{-1} ... E_{n-1}^{-1} x   (= (D^(d) P)^{-1} x)."""
    n = x.shape[0]
    r = 1.0 / d
    if d == 1.0:
        for k in range(n - 1, 0, -1):
            for j in range(k, n):
                x[j] = x[j] - x[j - 1]
    else:
        for k in range(n - 1, 0, -1):
            for j in range(k, n):
                x[j] = r * x[j] - x[j - 1]


@njit(cache=True)
def et_forward(x, d):
    """x <- E_1^T ... E_{n-1}^T x   (= P^T D^(d) x)."""
    n = x.shape[0]
    if d == 1.0:
        for k in range(n - 1, 0, -1):
            x[k - 1] = x[k - 1] + x[k]
            for j in range(k, n - 1):
                x[j] = x[j] + x[j + 1]
    else:
        for k in range(n - 1, 0, -1):
            prev = d * x[k]
            x[k - 1] = x[k - 1] + prev
            for j in range(k, n - 1):
                nxt = d * x[j + 1]
                x[j] = prev + nxt
                prev = nxt
            x[n - 1] = prev


@njit(cache=True)
def et_inverse(x, d):
    """x <- E_{n-1}^{-T} ... E_1^{-T} x   (= (P^T D^(d))^{-1} x)."""
    n = x.shape[0]
    r = 1.0 / d
    for k in range(1, n):
        # back substitution on d-scaled unknowns keeps one multiply per row
        for j in range(n - 2, k - 1, -1):
            x[j] = x[j] - x[j + 1]
        x[k - 1] = x[k - 1] - x[k]
        if d != 1.0:
            for j in range(k, n):
                x[j] = r * x[j]


@njit(cache=True)
def f_forward(x, d):
    """x <- F_{n-1} ... F_1 x   (= P D^(d) x)."""
    n = x.shape[0]
    if d == 1.0:
        for k in range(1, n):
            for j in range(n - 1, k - 1, -1):
                x[j] = x[j - 1] + x[j]
    else:
        for k in range(1, n):
            for j in range(n - 1, k - 1, -1):
                x[j] = x[j - 1] + d * x[j]


@njit(cache=True)
def f_inverse(x, d):
    """x <- F_1^{-1} ... F_{n-1}^{-1} x   (= (P D^(d))^{-1} x)."""
    n = x.shape[0]
    r = 1.0 / d
    if d == 1.0:
        for k in range(n - 1, 0, -1):
            for j in range(k, n):
                x[j] = x[j] - x[j - 1]
    else:
        for k in range(n - 1, 0, -1):
            for j in range(k, n):
                x[j] = r * (x[j] - x[j - 1])


@njit(cache=True)
def ft_forward(x, d):
    """x <- F_1^T ... F_{n-1}^T x   (= D^(d) P^T x).

    Inner loop is add-then-scale, one pass per factor.
    """
    n = x.shape[0]
    if d == 1.0:
        for i in range(n - 2, -1, -1):
            for j in range(i, n - 1):
                x[j] = x[j] + x[j + 1]
    else:
        for i in range(n - 2, -1, -1):
            for j in range(i, n - 1):
                x[j] = x[j] + x[j + 1]
                x[j + 1] = d * x[j + 1]


@njit(cache=True)
def ft_inverse(x, d):
    """x <- F_{n-1}^{-T} ... F_1^{-T} x   (= (D^(d) P^T)^{-1} x)."""
    n = x.shape[0]
    r = 1.0 / d
    if d == 1.0:
        for k in range(1, n):
            for j in range(n - 2, k - 2, -1):
                x[j] = x[j] - x[j + 1]
    else:
        for k in range(1, n):
            x[n - 1] = r * x[n - 1]
            for j in range(n - 2, k - 1, -1):
                x[j] = r * (x[j] - x[j + 1])
            x[k - 1] = x[k - 1] - x[k]


@njit(cache=True)
def g_forward(x, t):
    """x <- G_{n-1}^(t) ... G_1^(t) x, the Bernstein-matrix sweep."""
    n = x.shape[0]
    s = 1.0 - t
    for k in range(1, n):
        for j in range(n - 1, k - 1, -1):
            x[j] = s * x[j - 1] + t * x[j]


@njit(cache=True)
def gt_forward(x, t):
    """x <- G_1^(t)T ... G_{n-1}^(t)T x, the transposed Bernstein-matrix sweep."""
    n = x.shape[0]
    s = 1.0 - t
    for k in range(n - 1, 0, -1):
        x[k - 1] = x[k - 1] + s * x[k]
        for j in range(k, n - 1):
            x[j] = t * x[j] + s * x[j + 1]
        x[n - 1] = t * x[n - 1]
