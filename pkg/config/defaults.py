from yacs.config import CfgNode as CN


_C = CN()

# Collinear geometry of the numerical study
_C.GEOMETRY = CN()
_C.GEOMETRY.D_SD = 1000.0
_C.GEOMETRY.D_SE = 500.0
_C.GEOMETRY.CARRIER_HZ = 1.8e9
# Received SNR at the destination without the attack
_C.GEOMETRY.SNR_D_DB = 10.0
_C.GEOMETRY.PE_OVER_PS = 1.0
# Clamp for the eavesdropper-destination distance when the two coincide
_C.GEOMETRY.MIN_DISTANCE_M = 1.0

_C.SWEEP = CN()
_C.SWEEP.START = 50.0
_C.SWEEP.STOP = 3000.0
_C.SWEEP.STEP = 5.0
_C.SWEEP.OUTPUT = "distance_sweep.csv"

_C.SOLVER = CN()
# Points of the first sign-change scan for destructive forwarding
_C.SOLVER.N_SCAN = 4096
# Bisection stops once |gap| <= max(ATOL, RTOL * (1 + eavesdropper SNR))
_C.SOLVER.ATOL = 1e-12
_C.SOLVER.RTOL = 1e-9
_C.SOLVER.MAX_ITER = 200
_C.SOLVER.QUARTIC_CROSS_CHECK = False

_C.ORACLE = CN()
_C.ORACLE.N_RHO = 256
_C.ORACLE.N_MAG = 256
_C.ORACLE.N_PHASE = 64
_C.ORACLE.ENVELOPE_SAMPLES = 10000
_C.ORACLE.ENVELOPE_RHOS = 8
_C.ORACLE.MC_SYMBOLS = 1000000
_C.ORACLE.MC_PAIRS = 20

_C.VERIFY = CN()
_C.VERIFY.SEED = 42
_C.VERIFY.N_SCENARIOS = 100
# Allowed gap between the closed-form solver and the grid oracle (bps/Hz)
_C.VERIFY.AGREEMENT_TOL = 0.02
_C.VERIFY.ENVELOPE_TOL = 1e-9
# Log-uniform ranges of the random scenario generator
_C.VERIFY.GAIN_RANGE = (1e-3, 10.0)
_C.VERIFY.POWER_RANGE = (0.1, 1000.0)
_C.VERIFY.COUNTEREXAMPLE_DIR = "temp"


def get_cfg():
    """
    Get a copy of the default config

    Returns:
        CfgNode: A mutable copy of the default configuration
    """
    return _C.clone()
