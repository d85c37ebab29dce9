"""Built-in 5-level hydrogen model and its interaction-picture dynamics.

Basis order (1-based labels): ground state, then the four degenerate
first-excited states; a z-polarized field couples only ground <-> excited
state 3 and excited state 2 <-> excited state 3.  Excited states 4 and 5
(labels 4, 5) never couple, so their amplitudes are constants of motion.

The two coupling magnitudes are the classic z-dipole matrix elements in
units of (Bohr radius x elementary charge): 128*sqrt(2)/243 for the
ground channel and 3 for the excited channel.  Internally everything is
dimensionless with hbar = 1; the field amplitude absorbs the a*e/hbar
factor and only the excitation gap enters the dynamics (default 1.0).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .amplification import GoodSubspace, success_probability
from .core import ControlPulse, StateVector, SystemSpec
from .errors import DimensionMismatchError, IntegrationError

KAPPA_GROUND = 128.0 * math.sqrt(2.0) / 243.0   # ground <-> excited-3 channel
KAPPA_EXCITED = 3.0                              # excited-2 <-> excited-3 channel

NORM_DRIFT_TARGET = 1e-9
NORM_DRIFT_ACCEPT = 1e-8
NORM_DRIFT_FAIL = 1e-6
MAX_REFINEMENTS = 12

FieldLike = Union[ControlPulse, Callable[[float], float]]

__all__ = [
    "HydrogenModel",
    "CasePreset",
    "hydrogen_spec",
    "propagate_interaction_picture",
    "case1_preset",
    "case2_preset",
]


@dataclass(frozen=True)
class HydrogenModel:
    """Energies and coupling constants of the truncated 5-level atom."""

    energy_gap: float = 1.0
    kappa_ground: float = KAPPA_GROUND
    kappa_excited: float = KAPPA_EXCITED

    def __post_init__(self):
        if self.energy_gap <= 0:
            raise ValueError(f"energy gap must be positive, got {self.energy_gap}")


def hydrogen_spec(energy_gap: float = 1.0) -> SystemSpec:
    """SystemSpec for the 5-level model: diagonal drift plus dipole coupling.

    Drift eigenvalues are (0, gap, gap, gap, gap).  The coupling matrix
    carries the signed z-dipole elements: -kappa_ground on the (1, 3)
    channel and +kappa_excited on the (2, 3) channel; all other
    off-diagonals vanish, so states 4 and 5 are uncoupled.
    """
    model = HydrogenModel(energy_gap)
    drift = np.array([0.0, model.energy_gap, model.energy_gap, model.energy_gap, model.energy_gap])
    b = np.zeros((5, 5), dtype=complex)
    b[0, 2] = b[2, 0] = -model.kappa_ground
    b[1, 2] = b[2, 1] = model.kappa_excited
    return SystemSpec(dim=5, drift=drift, coupling=b)


def _field_function(field: FieldLike) -> Callable[[float], float]:
    if isinstance(field, ControlPulse):
        return field.amplitude
    if callable(field):
        return field
    raise TypeError(f"field must be a ControlPulse or a callable, got {type(field)!r}")


def _intervals(field: FieldLike, duration: Optional[float], t0: float):
    """(start, end, u(t)) intervals; pulse segments become intervals so
    integration steps never straddle a control discontinuity."""
    if duration is not None and duration < 0:
        raise ValueError(f"duration must be nonnegative, got {duration}")
    if isinstance(field, ControlPulse):
        if not field.segments:
            return []
        total = field.duration if duration is None else float(duration)
        out = []
        t = t0
        acc = 0.0
        for d, u in field.segments:
            end = min(d, total - acc)
            if end <= 0:
                break
            out.append((t, t + end, (lambda s, uu=u: uu)))
            t += end
            acc += end
        return out
    if duration is None:
        raise ValueError("a callable field needs an explicit duration")
    if duration == 0:
        return []
    fn = _field_function(field)
    return [(t0, t0 + float(duration), fn)]


def _peak_amplitude(intervals) -> float:
    peak = 0.0
    for start, end, fn in intervals:
        for s in np.linspace(start, end, 64):
            peak = max(peak, abs(fn(float(s))))
    return peak


def _integrate(intervals, c, model: HydrogenModel, steps_scale: float, hermitian_phase: bool):
    """Fixed-step RK4 over the coupled 3-level block.

    Only the first three amplitudes evolve; the generator is evaluated
    with scalar complex arithmetic, which is faster than array ops at
    this size.
    """
    gap = model.energy_gap
    k1 = model.kappa_ground
    k2 = model.kappa_excited
    y0, y1, y2 = complex(c[0]), complex(c[1]), complex(c[2])

    def deriv(t, a0, a1, a2, fn):
        f = fn(t)
        p = cmath.exp(-1j * gap * t)
        t02 = 1j * k1 * f * p
        t20 = 1j * k1 * f * (p.conjugate() if hermitian_phase else p)
        t12 = -1j * k2 * f
        return t02 * a2, t12 * a2, t20 * a0 + t12 * a1

    for start, end, fn in intervals:
        span = end - start
        n = max(int(math.ceil(span / steps_scale)), 2)
        dt = span / n
        t = start
        for _ in range(n):
            k1a, k1b, k1c = deriv(t, y0, y1, y2, fn)
            h = dt / 2.0
            k2a, k2b, k2c = deriv(t + h, y0 + h * k1a, y1 + h * k1b, y2 + h * k1c, fn)
            k3a, k3b, k3c = deriv(t + h, y0 + h * k2a, y1 + h * k2b, y2 + h * k2c, fn)
            k4a, k4b, k4c = deriv(t + dt, y0 + dt * k3a, y1 + dt * k3b, y2 + dt * k3c, fn)
            y0 += dt / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a)
            y1 += dt / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b)
            y2 += dt / 6.0 * (k1c + 2 * k2c + 2 * k3c + k4c)
            t += dt
    out = np.array(c, dtype=complex)
    out[0], out[1], out[2] = y0, y1, y2
    return out


def propagate_interaction_picture(
    model: HydrogenModel,
    field: FieldLike,
    initial: StateVector,
    duration: Optional[float] = None,
    t0: float = 0.0,
    hermitian_phase: bool = True,
    max_step: Optional[float] = None,
) -> StateVector:
    """Integrate the interaction-picture coefficient equation dC/dt = T C.

    ``field`` is either a piecewise-constant pulse (duration taken from
    the pulse) or a callable u(t) with an explicit ``duration``; ``t0``
    sets the absolute start time so long integrations can be chained.
    The generator keeps the oscillating phase on the ground channel and
    its conjugate on the transpose entry, which makes it skew-Hermitian
    and norm-conserving.  ``hermitian_phase=False`` switches the
    transpose entry to the same un-conjugated phase for comparison; that
    variant does not conserve the norm and normally fails integration.

    Fixed-step 4th-order integration with step control: the step is
    halved until the norm drift falls below {target:g} or stops improving
    (drift then is not a discretization artifact); drift above {fail:g}
    raises IntegrationError.  The coupled block is rescaled back to its
    exact initial weight afterwards, so the uncoupled amplitudes (labels
    4 and 5) come back bit-exact and the state stays normalized.
    """
    if initial.dim != 5:
        raise DimensionMismatchError(f"hydrogen model is 5-level, state has {initial.dim}")
    intervals = _intervals(field, duration, t0)
    if not intervals:
        return initial
    peak = _peak_amplitude(intervals)
    rate = max(
        model.energy_gap,
        peak * max(model.kappa_ground, model.kappa_excited),
        1e-6,
    )
    dt = 0.02 / rate
    if max_step is not None:
        dt = min(dt, float(max_step))

    c = initial.amplitudes
    prev_drift = None
    result = None
    for _ in range(MAX_REFINEMENTS + 1):
        result = _integrate(intervals, c, model, dt, hermitian_phase)
        drift = abs(float(np.linalg.norm(result)) - 1.0)
        if drift <= NORM_DRIFT_TARGET:
            break
        if prev_drift is not None and drift > 0.5 * prev_drift:
            break  # halving no longer helps: drift is not a step-size effect
        prev_drift = drift
        dt /= 2.0
    drift = abs(float(np.linalg.norm(result)) - 1.0)
    if drift > NORM_DRIFT_FAIL:
        raise IntegrationError(
            f"norm drift {drift:.3e} exceeds {NORM_DRIFT_FAIL:g} and step refinement "
            "cannot reduce it (non-norm-conserving generator or unstable field)"
        )
    # the generator only moves weight within the coupled block, so pin the
    # block back to its exact initial weight instead of renormalizing the
    # whole vector; amplitudes 4 and 5 stay bit-exact
    block_target = float(np.linalg.norm(c[:3]))
    block_raw = float(np.linalg.norm(result[:3]))
    if block_target > 1e-15 and block_raw > 0.0:
        result[:3] *= block_target / block_raw
    return StateVector(result)


propagate_interaction_picture.__doc__ = propagate_interaction_picture.__doc__.format(
    target=NORM_DRIFT_TARGET, fail=NORM_DRIFT_FAIL
)


@dataclass(frozen=True, eq=False)
class CasePreset:
    """A named worked example: initial state, target subspace, phases,
    and the iteration count / success probability the run should hit."""

    name: str
    initial: StateVector
    good: GoodSubspace
    phi1: float
    phi2: float
    expected_iterations: int
    expected_success: float
    algorithm: int  # 1 = single eigenstate target, 2 = subspace target


def case1_preset() -> CasePreset:
    """Amplify a 1% population on the uncoupled state 5 before measuring."""
    initial = StateVector([0.7, 0.5, 0.3, 0.4, 0.1])
    good = GoodSubspace.of(5, 5)
    return CasePreset(
        name="hydrogen-case1",
        initial=initial,
        good=good,
        phi1=math.pi,
        phi2=math.pi,
        expected_iterations=7,
        expected_success=success_probability(0.01, 7),
        algorithm=1,
    )


def case2_preset() -> CasePreset:
    """Amplify a 2% weight on the coupled subspace {1, 2, 3} before measuring."""
    initial = StateVector([0.1, 0.06, 0.08, 0.7, 0.7])
    good = GoodSubspace.of([1, 2, 3], 5)
    return CasePreset(
        name="hydrogen-case2",
        initial=initial,
        good=good,
        phi1=math.pi,
        phi2=math.pi,
        expected_iterations=5,
        expected_success=success_probability(0.02, 5),
        algorithm=2,
    )
