import math
from dataclasses import dataclass

import numpy as np

from models.channelModel import ComplexGain
from utils.errors import DomainError, PowerConstraintError


POWER_RTOL = 1e-9


@dataclass(frozen=True)
class RelayControl:
    """
    An eavesdropper action: power splitting ratio rho and amplification coefficient v
    """
    rho: float
    v: ComplexGain = ComplexGain()

    def __post_init__(self):
        check_rho(self.rho)

    @classmethod
    def from_polar(cls, rho, magnitude, phase):
        return cls(rho, ComplexGain.from_polar(magnitude, phase))


@dataclass(frozen=True)
class Envelope:
    """
    An end point of the achievable SNR interval at D for a fixed rho, and the
    amplification coefficient reaching it
    """
    gamma: float
    v_opt: ComplexGain


def check_rho(rho):
    values = np.asarray(rho, dtype=float)
    if not np.all(np.isfinite(values)) or np.any(values < 0.0) or np.any(values > 1.0):
        raise DomainError(f"Power splitting ratio must lie in [0, 1], got {rho}")
    return values


def _unwrap(values, like):
    # Scalars in, scalars out
    if np.ndim(like) == 0:
        return float(values)
    return values


def passive_rate_d(s):
    """
    Capacity of the legitimate link without any attack (bps/Hz)
    """
    return math.log2(1.0 + s.ps_norm * s.g_sd)


def passive_rate_e(s):
    """
    Capacity of the source-eavesdropper link (bps/Hz)
    """
    return math.log2(1.0 + s.ps_norm * s.g_se)


def passive_leakage(s):
    """
    Information leakage of a passive eavesdropper: the legitimate rate when
    the eavesdropper can decode it, otherwise nothing

    Args:
        s (Scenario): The scenario

    Returns:
        float: Leakage rate in bps/Hz
    """
    rate_d = passive_rate_d(s)
    if passive_rate_e(s) >= rate_d:
        return rate_d
    return 0.0


def relay_power_used(s, c):
    """
    Transmit power of the relay, |v|^2 (rho |h_SE|^2 P_S + sigma2)

    Args:
        s (Scenario): The scenario
        c (RelayControl): The relay action

    Returns:
        float: Power in the units of s.p_e
    """
    return c.v.power * (c.rho * s.g_se * s.p_s + s.sigma2)


def within_power_budget(s, c, rtol=POWER_RTOL):
    return relay_power_used(s, c) <= s.p_e * (1.0 + rtol)


def power_cap(s, rho):
    """
    Largest amplification magnitude |v| allowed by the power budget at a given rho

    Args:
        s (Scenario): The scenario
        rho (float or np.ndarray): Power splitting ratio(s)

    Returns:
        float or np.ndarray: sqrt(P_E / (rho |h_SE|^2 P_S + sigma2))
    """
    values = check_rho(rho)
    cap = np.sqrt(s.pe_norm / (values * s.g_se * s.ps_norm + 1.0))
    return _unwrap(cap, rho)


def effective_snr_d(s, c, check_power=True):
    """
    SNR at D when the eavesdropper relays with splitting ratio rho and
    amplification v, using full complex arithmetic

    Args:
        s (Scenario): The scenario
        c (RelayControl): The relay action
        check_power (bool): Reject actions above the power budget

    Returns:
        float: The effective SNR at D
    """
    if check_power and not within_power_budget(s, c):
        raise PowerConstraintError(
            f"Relay control needs power {relay_power_used(s, c):.6g} but the budget is {s.p_e:.6g}")

    v = c.v.value
    signal = s.h_sd.value + v * math.sqrt(c.rho) * s.h_se.value * s.h_ed.value
    noise = 1.0 + abs(v) ** 2 * s.g_ed

    return abs(signal) ** 2 * s.ps_norm / noise


def effective_snr_d_array(s, rho, v):
    """
    Vectorised effective SNR at D for one rho and an array of complex
    amplification coefficients. No power check is applied

    Args:
        s (Scenario): The scenario
        rho (float): Power splitting ratio
        v (np.ndarray): Complex amplification coefficients

    Returns:
        np.ndarray: SNR at D for every coefficient
    """
    check_rho(rho)
    v = np.asarray(v, dtype=complex)
    signal = s.h_sd.value + v * (math.sqrt(rho) * s.h_se.value * s.h_ed.value)
    return np.abs(signal) ** 2 * s.ps_norm / (1.0 + np.abs(v) ** 2 * s.g_ed)


def eavesdropper_snr(s, rho):
    """
    SNR at the eavesdropper's decoder after a fraction rho is split off for relaying

    Args:
        s (Scenario): The scenario
        rho (float or np.ndarray): Power splitting ratio(s)

    Returns:
        float or np.ndarray: (1 - rho) |h_SE|^2 P_S / sigma2
    """
    values = check_rho(rho)
    return _unwrap((1.0 - values) * s.g_se * s.ps_norm, rho)


def active_rate_d(s, c):
    return math.log2(1.0 + effective_snr_d(s, c))


def active_rate_e(s, rho):
    return math.log2(1.0 + eavesdropper_snr(s, rho))


def rho1(s):
    """
    Splitting ratio above which the unconstrained maximiser of the D-side SNR
    exceeds the power budget

    Args:
        s (Scenario): The scenario

    Returns:
        float: The breakpoint in [0, 1]
    """
    if s.g_se == 0.0:
        return 1.0

    x = 4.0 * s.ps_norm * s.pe_norm * s.g_sd * s.g_ed

    # (-1 + sqrt(1 + x)) / (2 |h_SE|^2 P_S), rationalised against cancellation
    value = 2.0 * s.pe_norm * s.g_sd * s.g_ed / ((1.0 + math.sqrt(1.0 + x)) * s.g_se)
    return min(1.0, value)


def rho2(s):
    """
    Splitting ratio from which destructive forwarding can null the source
    signal at D

    Args:
        s (Scenario): The scenario

    Returns:
        float: C when 0 <= C <= 1, otherwise 1
    """
    denominator = s.g_se * (s.g_ed * s.pe_norm - s.g_sd * s.ps_norm)
    if denominator <= 0.0:
        return 1.0

    c = s.g_sd / denominator
    if 0.0 <= c <= 1.0:
        return c
    return 1.0


def _capped_snr(s, rho, sign):
    # SNR at D with |v| on the power cap, phase aligned (+1) or opposed (-1)
    u = 1.0 + rho * s.g_se * s.ps_norm
    radical = np.sqrt(s.g_sd * u) + sign * np.sqrt(rho * s.g_se * s.g_ed * s.pe_norm)
    return radical ** 2 * s.ps_norm / (u + s.g_ed * s.pe_norm)


def snr_d_max_gamma(s, rho):
    """
    Upper end of the achievable SNR interval at D, vectorised over rho
    """
    values = check_rho(rho)
    interior = (s.g_sd + values * s.g_se) * s.ps_norm
    gamma = np.where(values <= rho1(s), interior, _capped_snr(s, values, 1.0))
    return _unwrap(gamma, rho)


def snr_d_min_gamma(s, rho):
    """
    Lower end of the achievable SNR interval at D, vectorised over rho
    """
    values = check_rho(rho)
    gamma = np.where(values <= rho2(s), _capped_snr(s, values, -1.0), 0.0)
    return _unwrap(gamma, rho)


def _forwarding_phase(s):
    return s.h_sd.phase - s.h_se.phase - s.h_ed.phase


def snr_d_max(s, rho):
    """
    Maximum SNR at D for a fixed rho (constructive information forwarding).
    The optimal |v| is the stationary point sqrt(rho) |h_SE| / (|h_SD| |h_ED|)
    clipped to the power cap

    Args:
        s (Scenario): The scenario
        rho (float): Power splitting ratio

    Returns:
        Envelope: The maximum SNR and the maximising v
    """
    check_rho(rho)
    rho = float(rho)
    cap = power_cap(s, rho)

    if rho * s.g_se == 0.0:
        magnitude = 0.0
    elif s.g_sd * s.g_ed == 0.0:
        magnitude = cap
    else:
        magnitude = min(math.sqrt(rho * s.g_se / (s.g_sd * s.g_ed)), cap)

    return Envelope(snr_d_max_gamma(s, rho), ComplexGain.from_polar(magnitude, _forwarding_phase(s)))


def snr_d_min(s, rho):
    """
    Minimum SNR at D for a fixed rho (destructive forwarding plus jamming).
    |v| sits on the power cap until it can reach the signal-nulling magnitude
    |h_SD| / (sqrt(rho) |h_SE| |h_ED|)

    Args:
        s (Scenario): The scenario
        rho (float): Power splitting ratio

    Returns:
        Envelope: The minimum SNR and the minimising v
    """
    check_rho(rho)
    rho = float(rho)
    cap = power_cap(s, rho)

    relayed = rho * s.g_se * s.g_ed
    if relayed > 0.0:
        magnitude = min(math.sqrt(s.g_sd / relayed), cap)
    else:
        magnitude = cap

    return Envelope(snr_d_min_gamma(s, rho), ComplexGain.from_polar(magnitude, math.pi + _forwarding_phase(s)))


def envelope_curves(s, n_points=201):
    """
    Samples both SNR envelopes at D and the eavesdropper SNR on a uniform rho grid

    Args:
        s (Scenario): The scenario
        n_points (int): Number of rho values, end points included

    Returns:
        dict: Arrays keyed rho, gamma_d_max, gamma_d_min, gamma_e
    """
    if n_points < 2:
        raise DomainError(f"Need at least two curve points, got {n_points}")

    rho = np.linspace(0.0, 1.0, n_points)
    return {
        "rho": rho,
        "gamma_d_max": snr_d_max_gamma(s, rho),
        "gamma_d_min": snr_d_min_gamma(s, rho),
        "gamma_e": eavesdropper_snr(s, rho)
    }
