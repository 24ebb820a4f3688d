"""Self-consistent bottom-node voltage of the memristor / bank divider."""
from __future__ import annotations

import logging

import constants
from components import nmos_resistor
from components.memristor import MemristorState
from components.nmos_resistor import NmosResistorSpec
from exceptions import DomainError, SolverError

logger = logging.getLogger(__name__)


def solve_bottom_voltage(
    mem: MemristorState,
    spec: NmosResistorSpec,
    v_read: float,
    *,
    linear: bool = False,
    damping: float = constants.SOLVER_DAMPING,
    max_iterations: int = constants.SOLVER_MAX_ITERATIONS,
    tolerance: float = constants.SOLVER_TOLERANCE,
) -> float:
    """
    Return V_b with (v_read - V_b) G == I_triode(V_b)

    Damped fixed point V_b <- v_read R(V_b) / (R_mem + R(V_b)). The map is a
    contraction because R(V_b) moves by well under 1 % across the valid range.
    With `linear` the device is an ideal resistor at its small-signal value.
    """
    if not v_read > 0:
        raise DomainError(f"v_read must be > 0, got {v_read!r}")

    def resistance(v_b: float) -> float:
        if linear:
            return spec.on_resistance
        return nmos_resistor.effective_resistance(spec, v_b)

    def branch_current(v_b: float) -> float:
        if linear:
            return v_b / spec.on_resistance
        return nmos_resistor.triode_current(spec, v_b)

    r_mem = mem.resistance
    v_b = v_read * spec.on_resistance / (r_mem + spec.on_resistance)
    residual = float("inf")
    for iteration in range(1, max_iterations + 1):
        r = resistance(v_b)
        target = v_read * r / (r_mem + r)
        step = damping * (target - v_b)
        v_b += step
        residual = mem.current(v_read, v_b) - branch_current(v_b)
        if abs(residual) <= tolerance and abs(step) <= constants.SOLVER_STEP_TOLERANCE * v_b:
            logger.debug(
                "bottom node of resistor %s settled at %.6e V after %d iterations",
                spec.index, v_b, iteration,
            )
            break
    else:
        raise SolverError(
            f"bottom node did not converge in {max_iterations} iterations "
            f"(residual {residual:.3e} A)",
            residual=residual,
        )

    if not 0.0 < v_b < v_read:
        raise SolverError(
            f"bottom voltage {v_b!r} V outside (0, {v_read}) V", residual=residual
        )
    return v_b
