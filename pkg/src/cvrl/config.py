"""Package-wide numerical defaults.

Everything tunable lives here so that ``cvrl config`` can print one
reproducible dump of the settings a run used.
"""
import os

# per-factor photon-number cutoffs by number of tensor copies
CUTOFF_SINGLE = 40
CUTOFF_TWO_COPY = 20
CUTOFF_FOUR_COPY = 8

# largest dense operator side we are willing to allocate (8**4)
MAX_SIDE = 4096

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-8
BONA_FIDE_TOL = 1e-9
ENTROPY_EIG_CUTOFF = 1e-14

# D_max support handling
SIGMA_FLOOR = 1e-12

# truncated Gaussian states: largest tolerated lost probability
TAIL_TOL = 1e-8
OPTIMIZER_TAIL_TOL = 1e-6
# candidate Gaussians may spill past the state's cutoff; they are synthesized
# on up to this multiple of it, and never less than the minimum below
# (the state is zero-padded)
OPTIMIZER_SIGMA_PAD = 4
OPTIMIZER_SIGMA_MIN_CUTOFF = 160

OPTIMIZER = {
    "starts": 12,
    "max_evals": 2000,
    "xtol": 1e-8,
    "ftol": 1e-12,
    "seed": 0,
    "box": {
        "nbar": [0.0, 20.0],
        "r": [0.0, 2.0],
        "phi": [0.0, 6.283185307179586],
        "ax": [-6.0, 6.0],
        "ay": [-6.0, 6.0],
    },
}

HOMODYNE_X_STEP = 0.01
HOMODYNE_X_SPAN = 8.0
HOMODYNE_A_MAX = 1e4


def worker_count():
    """Worker threads for concurrent sweeps, capped by ``CVRL_THREADS``."""
    raw = os.environ.get("CVRL_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, n)


def dump():
    return {
        "cutoff": CUTOFF_SINGLE,
        "cutoff2": CUTOFF_TWO_COPY,
        "cutoff4": CUTOFF_FOUR_COPY,
        "max_side": MAX_SIDE,
        "hermitian_tol": HERMITIAN_TOL,
        "psd_tol": PSD_TOL,
        "trace_tol": TRACE_TOL,
        "bona_fide_tol": BONA_FIDE_TOL,
        "sigma_floor": SIGMA_FLOOR,
        "tail_tol": TAIL_TOL,
        "optimizer_tail_tol": OPTIMIZER_TAIL_TOL,
        "optimizer_sigma_pad": OPTIMIZER_SIGMA_PAD,
        "optimizer_sigma_min_cutoff": OPTIMIZER_SIGMA_MIN_CUTOFF,
        "optimizer": OPTIMIZER,
        "homodyne": {
            "x_step": HOMODYNE_X_STEP,
            "x_span": HOMODYNE_X_SPAN,
            "a_max": HOMODYNE_A_MAX,
        },
        "threads": worker_count(),
    }
