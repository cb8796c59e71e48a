import math
from dataclasses import dataclass, field

from utils.errors import DomainError


SPEED_OF_LIGHT = 299792458.0


def wrap_phase(theta):
    """
    Wraps an angle into the half-open interval (-pi, pi]

    Args:
        theta (float): An angle in radians

    Returns:
        float: The equivalent angle in (-pi, pi]
    """
    wrapped = (theta + math.pi) % (2 * math.pi) - math.pi
    if wrapped <= -math.pi:
        wrapped += 2 * math.pi
    return wrapped


def db_to_linear(value_db):
    """
    Converts a power ratio from decibels to linear scale
    """
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value):
    """
    Converts a positive power ratio from linear scale to decibels
    """
    if value <= 0:
        raise DomainError(f"Cannot express non-positive ratio {value} in dB")
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class ComplexGain:
    """
    A complex channel or amplification coefficient stored as its real and
    imaginary parts
    """
    re: float = 0.0
    im: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise DomainError(f"Complex gain must be finite, got ({self.re}, {self.im})")

    @classmethod
    def from_complex(cls, value):
        return cls(float(value.real), float(value.imag))

    @classmethod
    def from_polar(cls, magnitude, phase):
        """
        Builds a gain from its magnitude and phase (radians)
        """
        return cls(magnitude * math.cos(phase), magnitude * math.sin(phase))

    @property
    def value(self):
        return complex(self.re, self.im)

    @property
    def magnitude(self):
        return math.hypot(self.re, self.im)

    @property
    def power(self):
        return self.re * self.re + self.im * self.im

    @property
    def phase(self):
        # Zero gains carry phase 0 by convention
        if self.re == 0.0 and self.im == 0.0:
            return 0.0
        return wrap_phase(math.atan2(self.im, self.re))

    def rotated(self, angle):
        """
        Returns the gain multiplied by exp(j*angle)
        """
        return ComplexGain.from_complex(self.value * complex(math.cos(angle), math.sin(angle)))


@dataclass(frozen=True)
class Scenario:
    """
    Channels and powers of the source-destination link with an eavesdropper.
    Powers share one unit; sigma2 is the noise power at every receiver
    """
    h_sd: ComplexGain
    h_se: ComplexGain
    h_ed: ComplexGain
    p_s: float
    p_e: float
    sigma2: float = 1.0

    def __post_init__(self):
        for name in ("p_s", "p_e", "sigma2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"Scenario field {name} must be finite, got {value}")

        if self.p_s <= 0:
            raise DomainError(f"Source power p_s must be positive, got {self.p_s}")
        if self.p_e < 0:
            raise DomainError(f"Eavesdropper power p_e must be non-negative, got {self.p_e}")
        if self.sigma2 <= 0:
            raise DomainError(f"Noise power sigma2 must be positive, got {self.sigma2}")
        if not (math.isfinite(self.ps_norm) and math.isfinite(self.pe_norm)):
            raise DomainError("Normalised powers overflow; rescale p_s, p_e and sigma2")

    @property
    def ps_norm(self):
        """
        Normalised source power P_S / sigma2
        """
        return self.p_s / self.sigma2

    @property
    def pe_norm(self):
        """
        Normalised eavesdropper power P_E / sigma2
        """
        return self.p_e / self.sigma2

    @property
    def g_sd(self):
        return self.h_sd.power

    @property
    def g_se(self):
        return self.h_se.power

    @property
    def g_ed(self):
        return self.h_ed.power

    def rotated(self, phi_sd=0.0, phi_se=0.0, phi_ed=0.0):
        """
        Returns a copy with each channel multiplied by a unit-modulus phasor

        Args:
            phi_sd (float): Rotation of h_sd in radians
            phi_se (float): Rotation of h_se in radians
            phi_ed (float): Rotation of h_ed in radians

        Returns:
            Scenario: The rotated scenario
        """
        return Scenario(self.h_sd.rotated(phi_sd), self.h_se.rotated(phi_se), self.h_ed.rotated(phi_ed),
                        self.p_s, self.p_e, self.sigma2)

    def to_dict(self):
        return {
            "h_sd_re": self.h_sd.re,
            "h_sd_im": self.h_sd.im,
            "h_se_re": self.h_se.re,
            "h_se_im": self.h_se.im,
            "h_ed_re": self.h_ed.re,
            "h_ed_im": self.h_ed.im,
            "p_s": self.p_s,
            "p_e": self.p_e,
            "sigma2": self.sigma2
        }

    @classmethod
    def from_power_gains(cls, g_sd, g_se, g_ed, ps_norm, pe_norm, phases=(0.0, 0.0, 0.0)):
        """
        Builds a unit-noise scenario from power gains and normalised powers

        Args:
            g_sd (float): |h_SD|^2
            g_se (float): |h_SE|^2
            g_ed (float): |h_ED|^2
            ps_norm (float): Normalised source power
            pe_norm (float): Normalised eavesdropper power
            phases (tuple): Phases of h_sd, h_se, h_ed in radians

        Returns:
            Scenario: The scenario with sigma2 = 1
        """
        gains = [ComplexGain.from_polar(math.sqrt(g), phase) for g, phase in zip((g_sd, g_se, g_ed), phases)]
        return cls(gains[0], gains[1], gains[2], p_s=ps_norm, p_e=pe_norm, sigma2=1.0)


@dataclass(frozen=True)
class GeometryConfig:
    """
    Collinear placement: the eavesdropper sits on the line through source and
    destination at distance d_se from the source
    """
    d_sd: float = 1000.0
    d_se: float = 500.0
    carrier_hz: float = 1.8e9
    snr_d_db: float = 10.0
    pe_over_ps: float = 1.0
    min_distance_m: float = field(default=1.0)

    def __post_init__(self):
        for name in ("d_sd", "d_se", "carrier_hz", "min_distance_m"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"Geometry field {name} must be positive, got {value}")
        if not (math.isfinite(self.pe_over_ps) and self.pe_over_ps >= 0):
            raise DomainError(f"Geometry field pe_over_ps must be non-negative, got {self.pe_over_ps}")
        if not math.isfinite(self.snr_d_db):
            raise DomainError(f"Geometry field snr_d_db must be finite, got {self.snr_d_db}")

    @property
    def d_ed(self):
        return max(abs(self.d_se - self.d_sd), self.min_distance_m)

    @classmethod
    def from_cfg(cls, cfg, d_se=None):
        """
        Reads the GEOMETRY node of a config

        Args:
            cfg (CfgNode): A config created by config.get_cfg
            d_se (float): Optional override of the eavesdropper distance

        Returns:
            GeometryConfig: The geometry
        """
        geometry = cfg.GEOMETRY
        return cls(d_sd=float(geometry.D_SD),
                   d_se=float(geometry.D_SE if d_se is None else d_se),
                   carrier_hz=float(geometry.CARRIER_HZ),
                   snr_d_db=float(geometry.SNR_D_DB),
                   pe_over_ps=float(geometry.PE_OVER_PS),
                   min_distance_m=float(geometry.MIN_DISTANCE_M))

    def to_dict(self):
        return {
            "d_sd": self.d_sd,
            "d_se": self.d_se,
            "carrier_hz": self.carrier_hz,
            "snr_d_db": self.snr_d_db,
            "pe_over_ps": self.pe_over_ps,
            "min_distance_m": self.min_distance_m
        }


def wavelength(carrier_hz):
    if not (carrier_hz > 0 and math.isfinite(carrier_hz)):
        raise DomainError(f"Carrier frequency must be positive, got {carrier_hz}")
    return SPEED_OF_LIGHT / carrier_hz


def friis_power_gain(d, carrier_hz):
    """
    Free-space line-of-sight power gain between isotropic antennas

    Args:
        d (float): Link distance in meters
        carrier_hz (float): Carrier frequency in hertz

    Returns:
        float: The power gain (lambda / (4 pi d))^2
    """
    if not (d > 0 and math.isfinite(d)):
        raise DomainError(f"Link distance must be positive, got {d}")
    return (wavelength(carrier_hz) / (4 * math.pi * d)) ** 2


def gain_from_distance(d, carrier_hz):
    """
    Complex line-of-sight gain with Friis magnitude and propagation phase -2 pi d / lambda

    Args:
        d (float): Link distance in meters
        carrier_hz (float): Carrier frequency in hertz

    Returns:
        ComplexGain: The channel coefficient
    """
    magnitude = math.sqrt(friis_power_gain(d, carrier_hz))

    # Reduce the cycle count first so long links keep their phase precision
    cycles = d / wavelength(carrier_hz)
    phase = wrap_phase(-2 * math.pi * (cycles - math.floor(cycles)))

    return ComplexGain.from_polar(magnitude, phase)


def build_collinear_scenario(cfg):
    """
    Builds the scenario of an eavesdropper placed on the source-destination line.
    The noise power is normalised to one and the source power is chosen so that
    the unattacked destination SNR equals cfg.snr_d_db

    Args:
        cfg (GeometryConfig): The geometry

    Returns:
        Scenario: Channels and powers for the geometry
    """
    h_sd = gain_from_distance(cfg.d_sd, cfg.carrier_hz)
    h_se = gain_from_distance(cfg.d_se, cfg.carrier_hz)
    h_ed = gain_from_distance(cfg.d_ed, cfg.carrier_hz)

    p_s = db_to_linear(cfg.snr_d_db) / h_sd.power
    p_e = cfg.pe_over_ps * p_s

    return Scenario(h_sd, h_se, h_ed, p_s=p_s, p_e=p_e, sigma2=1.0)
