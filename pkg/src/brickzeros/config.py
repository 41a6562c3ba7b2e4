"""Precision defaults.

BRICKZEROS_PRECISION overrides the default working precision (decimal
digits) of the multiprecision layers: sector matrices and numeric
amplitudes floor at 64 digits, solvers and diagonalization at 128.
Root finding picks its own default from the polynomial degree unless a
precision is passed explicitly.
"""

import os

MATRIX_DPS_FLOOR = 64
SOLVER_DPS_DEFAULT = 128


def _env_precision():
    raw = os.environ.get("BRICKZEROS_PRECISION")
    if raw is None:
        return None
    try:
        val = int(raw)
    except ValueError as exc:
        raise ValueError(
            f"BRICKZEROS_PRECISION must be an integer, got {raw!r}") from exc
    if val < 16:
        raise ValueError("BRICKZEROS_PRECISION must be >= 16")
    return val


def default_matrix_dps() -> int:
    env = _env_precision()
    return max(MATRIX_DPS_FLOOR, env) if env else MATRIX_DPS_FLOOR


def default_solver_dps() -> int:
    env = _env_precision()
    return env if env else SOLVER_DPS_DEFAULT


def default_rootfind_dps(degree: int) -> int:
    env = _env_precision()
    if env:
        return env
    return 256 if degree > 1000 else 128
