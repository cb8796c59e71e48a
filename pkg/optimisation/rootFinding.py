from collections import namedtuple

import numpy as np

from utils.errors import BracketError, DomainError


Bracket = namedtuple("Bracket", ["lo", "hi", "f_lo", "f_hi", "iterations"])


def bisect(func, lo, hi, atol=1e-12, rtol=1e-9, max_iter=200, scale=None):
    """
    Bracketed bisection for a continuous function with a sign change on [lo, hi].
    Stops when |f(mid)| <= max(atol, rtol * scale(mid)) or when the bracket can
    no longer be halved in floating point

    Args:
        func (callable): Scalar function of one variable
        lo (float): Left end of the bracket
        hi (float): Right end of the bracket
        atol (float): Absolute tolerance on the function value
        rtol (float): Relative tolerance on the function value
        max_iter (int): Maximum number of halvings
        scale (callable): Reference magnitude for rtol, defaults to 1 + |f(mid)|

    Returns:
        Bracket: The final bracket; lo == hi when stopped on the function tolerance
    """
    if not lo <= hi:
        raise DomainError(f"Empty bracket [{lo}, {hi}]")

    f_lo = func(lo)
    f_hi = func(hi)

    if f_lo == 0.0:
        return Bracket(lo, lo, f_lo, f_lo, 0)
    if f_hi == 0.0:
        return Bracket(hi, hi, f_hi, f_hi, 0)
    if np.sign(f_lo) == np.sign(f_hi):
        raise BracketError(f"No sign change on [{lo}, {hi}]: f(lo)={f_lo:.6g}, f(hi)={f_hi:.6g}")

    for iteration in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # Bracket already at floating point resolution
            return Bracket(lo, hi, f_lo, f_hi, iteration - 1)

        f_mid = func(mid)
        reference = scale(mid) if scale else 1.0 + abs(f_mid)
        if abs(f_mid) <= max(atol, rtol * reference):
            return Bracket(mid, mid, f_mid, f_mid, iteration)

        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid

    return Bracket(lo, hi, f_lo, f_hi, max_iter)


def first_sign_change(values):
    """
    Finds the first pair of neighbours where a sampled function leaves the sign
    of its first sample. Zero counts as non-positive

    Args:
        values (np.ndarray): Function samples on an ordered grid

    Returns:
        int: Index i such that values[i] and values[i + 1] straddle the change,
             or None when the sign never changes
    """
    values = np.asarray(values)
    if values.size < 2:
        raise DomainError("Need at least two samples to look for a sign change")

    positive = values > 0.0
    changed = np.flatnonzero(positive[1:] != positive[0])
    if changed.size == 0:
        return None
    return int(changed[0])


def polynomial_real_roots(coefficients, lo=-np.inf, hi=np.inf, imag_tol=1e-7, polish_steps=3):
    """
    Real roots of a polynomial through the eigenvalues of its companion matrix,
    polished by Newton steps and restricted to [lo, hi]

    Args:
        coefficients (list): Coefficients, highest degree first
        lo (float): Smallest root kept
        hi (float): Largest root kept
        imag_tol (float): Largest imaginary part, relative to 1 + |root|, treated as real
        polish_steps (int): Newton iterations applied to each real root

    Returns:
        list: Sorted real roots in [lo, hi]
    """
    coefficients = np.trim_zeros(np.asarray(coefficients, dtype=float), "f")
    if coefficients.size < 2:
        return []

    derivative = np.polyder(coefficients)
    ret = []

    for root in np.roots(coefficients):
        if abs(root.imag) > imag_tol * (1.0 + abs(root.real)):
            continue

        x = root.real
        for _ in range(polish_steps):
            slope = np.polyval(derivative, x)
            if slope == 0.0:
                break
            x -= np.polyval(coefficients, x) / slope

        if lo <= x <= hi:
            ret.append(float(x))

    return sorted(ret)
