"""Multi-limb fixed-point sweeps used by the large-n oracle.

A number is stored as ``L`` uint64 limbs in two's complement, most
significant limb first; limb 0 holds the integer part and the rest hold
``64 * (L - 1)`` fraction bits.  Halving is an arithmetic shift, so each
step truncates at most one unit in the last fraction bit.
"""

import numpy as np
from numba import njit

_ONE = np.uint64(1)
_SH = np.uint64(63)
_TOP = np.uint64(1) << np.uint64(63)


@njit(cache=True, inline="always")
def _add_into(dst, src):
    carry = np.uint64(0)
    for l in range(dst.shape[0] - 1, -1, -1):
        a = dst[l]
        s1 = a + src[l]
        s = s1 + carry
        carry = np.uint64(s1 < a) | np.uint64(s < s1)
        dst[l] = s


@njit(cache=True, inline="always")
def _half_into(dst, src):
    prev = np.uint64(0)
    for l in range(src.shape[0]):
        v = src[l]
        if l == 0:
            dst[l] = (v >> _ONE) | (v & _TOP)
        else:
            dst[l] = (v >> _ONE) | (prev << _SH)
        prev = v & _ONE


@njit(cache=True)
def q_sweep(a):
    """Rows of ``a`` <- E_{n-1} ... E_1 rows with E = E^(1/2); that is Q a."""
    n = a.shape[0]
    for k in range(1, n):
        for j in range(n - 1, k - 1, -1):
            _add_into(a[j], a[j - 1])
            _half_into(a[j], a[j])


@njit(cache=True)
def qt_sweep(a):
    """Rows of ``a`` <- E_1^T ... E_{n-1}^T rows with E = E^(1/2); that is Q^T a."""
    n, L = a.shape
    prev = np.empty(L, np.uint64)
    nxt = np.empty(L, np.uint64)
    for k in range(n - 1, 0, -1):
        _half_into(prev, a[k])
        _add_into(a[k - 1], prev)
        for j in range(k, n - 1):
            _half_into(nxt, a[j + 1])
            for l in range(L):
                a[j, l] = prev[l]
            _add_into(a[j], nxt)
            for l in range(L):
                prev[l] = nxt[l]
        for l in range(L):
            a[n - 1, l] = prev[l]
