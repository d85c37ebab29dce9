"""Amplitude amplification: phase oracles, the amplification operator,
closed-form weight tracking, and iteration-count selection.

The amplification operator for a preparation unitary U, a good index set
chi, and phase angles (phi1, phi2) is

    Q = -U P0(phi1) U^{-1} Pchi(phi2)

where P0 multiplies the first basis state by e^{i phi1} and Pchi
multiplies every good basis state by e^{i phi2}.  With phi1 = phi2 = pi
and initial good weight g = sin^2(theta), L applications of Q to the
prepared state U e1 leave good weight sin^2((2L+1) theta).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .core import StateVector, UnitaryOperator, apply_operator, prepare_unitary
from .errors import DimensionMismatchError, ZeroOverlapError

DEFAULT_L_MAX = 10**6
MIN_GOOD_WEIGHT = 1e-15
PRE_ROTATION_ANGLE = 0.1  # radians; mixes basis state 1 with the first good state

__all__ = [
    "GoodSubspace",
    "Decomposition",
    "AmplificationPlan",
    "decompose",
    "phase_oracle_zero",
    "phase_oracle_chi",
    "amplification_operator",
    "closed_form_step",
    "closed_form_weights",
    "success_probability",
    "optimal_iterations",
    "make_plan",
    "amplified_state",
    "pre_rotation_operator",
    "DEFAULT_L_MAX",
]


@dataclass(frozen=True)
class GoodSubspace:
    """Nonempty strict subset of basis labels 1..dim marked as targets."""

    indices: frozenset[int]
    dim: int

    def __post_init__(self):
        idx = frozenset(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if not idx:
            raise ValueError("good subspace must be nonempty")
        if not all(1 <= i <= self.dim for i in idx):
            raise ValueError(f"good indices {sorted(idx)} outside 1..{self.dim}")
        if len(idx) >= self.dim:
            raise ValueError("good subspace must be a strict subset of the basis")

    @classmethod
    def of(cls, indices: Union[int, Iterable[int]], dim: int) -> "GoodSubspace":
        if isinstance(indices, int):
            indices = [indices]
        return cls(frozenset(indices), dim)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.dim, dtype=bool)
        for i in self.indices:
            m[i - 1] = True
        return m


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Split of a state into its good-support and bad-support parts.

    good_part + bad_part reconstructs the state; g is the weight of the
    good part, b = 1 - g, and theta = arcsin(sqrt(g)).
    """

    good_part: np.ndarray
    bad_part: np.ndarray
    g: float
    b: float
    theta: float

    def state(self) -> StateVector:
        return StateVector(self.good_part + self.bad_part)


def decompose(state: StateVector, good: GoodSubspace) -> Decomposition:
    """Project ``state`` onto the good index set and its complement."""
    if good.dim != state.dim:
        raise DimensionMismatchError(
            f"good subspace dimension {good.dim} does not match state dimension {state.dim}"
        )
    mask = good.mask()
    good_part = np.where(mask, state.amplitudes, 0.0)
    bad_part = np.where(mask, 0.0, state.amplitudes)
    g = float(np.vdot(good_part, good_part).real)
    g = min(max(g, 0.0), 1.0)
    return Decomposition(
        good_part=good_part,
        bad_part=bad_part,
        g=g,
        b=1.0 - g,
        theta=math.asin(math.sqrt(g)),
    )


def _check_phase(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= math.pi:
        raise ValueError(f"{name} must lie in [0, pi], got {value}")
    return value


def phase_oracle_zero(dim: int, phi1: float) -> UnitaryOperator:
    """Diagonal operator putting phase e^{i phi1} on the first basis state."""
    phi1 = _check_phase("phi1", phi1)
    diag = np.ones(dim, dtype=complex)
    diag[0] = cmath.exp(1j * phi1)
    return UnitaryOperator(np.diag(diag))


def phase_oracle_chi(dim: int, good: GoodSubspace, phi2: float) -> UnitaryOperator:
    """Diagonal operator putting phase e^{i phi2} on every good basis state."""
    phi2 = _check_phase("phi2", phi2)
    if good.dim != dim:
        raise DimensionMismatchError(
            f"good subspace dimension {good.dim} does not match {dim}"
        )
    diag = np.where(good.mask(), cmath.exp(1j * phi2), 1.0 + 0j)
    return UnitaryOperator(np.diag(diag))


def amplification_operator(
    prep: UnitaryOperator, good: GoodSubspace, phi1: float, phi2: float
) -> UnitaryOperator:
    """Explicit matrix Q = -U P0(phi1) U^H Pchi(phi2)."""
    if good.dim != prep.dim:
        raise DimensionMismatchError(
            f"good subspace dimension {good.dim} does not match operator dimension {prep.dim}"
        )
    p0 = phase_oracle_zero(prep.dim, phi1).matrix
    pchi = phase_oracle_chi(prep.dim, good, phi2).matrix
    q = -(prep.matrix @ p0 @ prep.matrix.conj().T @ pchi)
    return UnitaryOperator(q)


def _step_matrix(g: float, phi1: float, phi2: float) -> np.ndarray:
    """2x2 action of Q on (good_part, bad_part) coordinates.

    Columns are the images of the unnormalized good and bad parts of the
    state Q was built from, whose good weight is g.
    """
    e1 = cmath.exp(1j * phi1)
    e2 = cmath.exp(1j * phi2)
    return np.array(
        [
            [e2 * ((1.0 - e1) * g - 1.0), (1.0 - e1) * (1.0 - g)],
            [e2 * (1.0 - e1) * g, -((1.0 - e1) * g + e1)],
        ],
        dtype=complex,
    )


def closed_form_step(d: Decomposition, phi1: float, phi2: float) -> Decomposition:
    """One application of the amplification operator built for d's state.

    Uses the closed-form 2x2 action, so the good and bad parts are each
    scaled in place and the supports never mix.  Note the operator is the
    one whose preparation maps e1 to d's own state; iterating this
    function re-builds the reflection around the current state each time.
    For the weights left by L applications of one fixed operator use
    :func:`closed_form_weights`.
    """
    phi1 = _check_phase("phi1", phi1)
    phi2 = _check_phase("phi2", phi2)
    m = _step_matrix(d.g, phi1, phi2)
    coef = m @ np.array([1.0, 1.0], dtype=complex)
    good_part = coef[0] * d.good_part
    bad_part = coef[1] * d.bad_part
    g = float(np.vdot(good_part, good_part).real)
    g = min(max(g, 0.0), 1.0)
    return Decomposition(
        good_part=good_part,
        bad_part=bad_part,
        g=g,
        b=1.0 - g,
        theta=math.asin(math.sqrt(g)),
    )


def closed_form_weights(
    g: float, phi1: float, phi2: float, iterations: int
) -> tuple[float, float]:
    """(good, bad) weights after ``iterations`` applications of one fixed
    amplification operator to the state it was built from.

    Tracks the two coordinates of the state in the span of its initial
    good and bad parts through the closed-form 2x2 action; equivalent to
    applying the explicit operator matrix ``iterations`` times.
    """
    phi1 = _check_phase("phi1", phi1)
    phi2 = _check_phase("phi2", phi2)
    if iterations < 0:
        raise ValueError(f"iterations must be nonnegative, got {iterations}")
    if not 0.0 <= g <= 1.0:
        raise ValueError(f"good weight must lie in [0, 1], got {g}")
    m = _step_matrix(g, phi1, phi2)
    coords = np.array([1.0, 1.0], dtype=complex)
    for _ in range(iterations):
        coords = m @ coords
    good = float(abs(coords[0]) ** 2 * g)
    bad = float(abs(coords[1]) ** 2 * (1.0 - g))
    return good, bad


def success_probability(g: float, iterations: int) -> float:
    """sin^2((2L+1) theta) with sin^2(theta) = g, for L = iterations."""
    if iterations < 0:
        raise ValueError(f"iterations must be nonnegative, got {iterations}")
    if not 0.0 < g <= 1.0:
        raise ValueError(
            f"initial good weight must lie in (0, 1], got {g}; "
            "amplification from zero weight is undefined"
        )
    theta = math.asin(math.sqrt(g))
    return math.sin((2 * iterations + 1) * theta) ** 2


def optimal_iterations(g: float, l_max: int = DEFAULT_L_MAX) -> int:
    """Iteration count bringing sin^2((2L+1) theta) closest to 1.

    Uses the standard amplitude-amplification optimum (2L+1) theta ~ pi/2,
    i.e. L = round(pi/(4 theta) - 1/2), then verifies against both
    neighbors; the result is clamped to [0, l_max].  Ties within float
    noise resolve toward the smaller count.
    """
    if l_max < 0:
        raise ValueError(f"l_max must be nonnegative, got {l_max}")
    if not 0.0 < g <= 1.0:
        raise ValueError(f"initial good weight must lie in (0, 1], got {g}")
    theta = math.asin(math.sqrt(g))
    guess = int(round(math.pi / (4.0 * theta) - 0.5))
    guess = min(max(guess, 0), l_max)
    candidates = sorted(
        {min(max(guess + delta, 0), l_max) for delta in (-1, 0, 1)}
    )
    best = candidates[0]
    best_value = success_probability(g, best)
    for cand in candidates[1:]:
        value = success_probability(g, cand)
        if value > best_value + 1e-12:
            best, best_value = cand, value
    return best


def pre_rotation_operator(good: GoodSubspace) -> UnitaryOperator:
    """Small real rotation mixing basis state 1 with the first good state.

    Applied to an initial state with zero good weight before planning; it
    moves sin^2(angle) of any weight on basis state 1 into the good
    subspace.
    """
    target = min(good.indices)
    mat = np.eye(good.dim, dtype=complex)
    if target == 1:
        return UnitaryOperator(mat)
    c, s = math.cos(PRE_ROTATION_ANGLE), math.sin(PRE_ROTATION_ANGLE)
    mat[0, 0] = c
    mat[target - 1, target - 1] = c
    mat[target - 1, 0] = s
    mat[0, target - 1] = -s
    return UnitaryOperator(mat)


@dataclass(frozen=True, eq=False)
class AmplificationPlan:
    """Preparation unitary, phases, iteration count and predicted outcome."""

    preparation: UnitaryOperator
    good: GoodSubspace
    phi1: float
    phi2: float
    iterations: int
    predicted_success: float
    initial_good_weight: float
    pre_rotated: bool = False

    def prepared_state(self) -> StateVector:
        """The state the plan amplifies: preparation applied to e1."""
        return StateVector(self.preparation.matrix[:, 0])


def make_plan(
    initial: StateVector,
    good: GoodSubspace,
    phi1: float = math.pi,
    phi2: float = math.pi,
    iterations: Union[int, str] = "auto",
    l_max: int = DEFAULT_L_MAX,
    pre_rotation: bool = False,
) -> AmplificationPlan:
    """Plan the amplification of ``initial`` toward the good subspace.

    Fails when the initial good weight is numerically zero; enabling
    ``pre_rotation`` first mixes a small amplitude from basis state 1
    into the good subspace, which fixes the common case where the weight
    sits on state 1.  ``iterations="auto"`` selects
    :func:`optimal_iterations`.
    """
    phi1 = _check_phase("phi1", phi1)
    phi2 = _check_phase("phi2", phi2)
    pre_rotated = False
    d = decompose(initial, good)
    if d.g < MIN_GOOD_WEIGHT and pre_rotation:
        initial = apply_operator(pre_rotation_operator(good), initial)
        d = decompose(initial, good)
        pre_rotated = True
    if d.g < MIN_GOOD_WEIGHT:
        hint = (
            "the pre-rotation also left no good weight"
            if pre_rotated
            else "apply a unitary mixing some amplitude into the good subspace "
            "first, e.g. enable pre_rotation"
        )
        raise ZeroOverlapError(
            f"initial state has no weight on good indices {sorted(good.indices)}; {hint}"
        )
    if iterations == "auto":
        count = optimal_iterations(d.g, l_max)
    else:
        count = int(iterations)
        if count < 0:
            raise ValueError(f"iterations must be nonnegative, got {count}")
    predicted, _ = closed_form_weights(d.g, phi1, phi2, count)
    return AmplificationPlan(
        preparation=prepare_unitary(initial),
        good=good,
        phi1=phi1,
        phi2=phi2,
        iterations=count,
        predicted_success=predicted,
        initial_good_weight=d.g,
        pre_rotated=pre_rotated,
    )


def amplified_state(plan: AmplificationPlan) -> StateVector:
    """Apply the plan's operator ``iterations`` times to its prepared state."""
    q = amplification_operator(plan.preparation, plan.good, plan.phi1, plan.phi2)
    c = plan.preparation.matrix[:, 0].copy()
    for _ in range(plan.iterations):
        c = q.matrix @ c
    return StateVector(c)
