"""State vectors, operators, and piecewise-constant-control propagation.

Internal units set hbar = 1: energies and times are reciprocal to each
other.  Basis labels in the public API are 1-based (state 1 is the first
entry of the amplitude vector); numpy arrays are indexed 0-based as usual.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    HermiticityError,
    NormalizationError,
    UnitarityError,
)

NORM_TOL = 1e-10          # unit norm, inputs
PROPAGATION_NORM_TOL = 1e-9   # unit norm, propagated outputs
UNITARITY_TOL = 1e-10
HERMITICITY_TOL = 1e-12
COMMUTATOR_TOL = 1e-12

__all__ = [
    "StateVector",
    "SystemSpec",
    "UnitaryOperator",
    "ControlPulse",
    "prepare_unitary",
    "propagate",
    "apply_operator",
]


def _as_complex_vector(values: Sequence) -> np.ndarray:
    arr = np.asarray(values, dtype=complex).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitudes over the drift eigenbasis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        arr = _as_complex_vector(self.amplitudes)
        object.__setattr__(self, "amplitudes", arr)
        if arr.size < 2:
            raise DimensionMismatchError(
                f"state needs at least 2 levels, got {arr.size}"
            )
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(
                f"state norm is {norm!r}, expected 1 within {NORM_TOL:g}"
            )

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def populations(self) -> np.ndarray:
        """|c_i|^2 per basis state."""
        return np.abs(self.amplitudes) ** 2

    def overlap(self, other: "StateVector") -> complex:
        """Inner product <self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    @classmethod
    def basis_state(cls, index: int, dim: int) -> "StateVector":
        """Basis state with 1-based label ``index``."""
        if not 1 <= index <= dim:
            raise DimensionMismatchError(f"basis label {index} outside 1..{dim}")
        amps = np.zeros(dim, dtype=complex)
        amps[index - 1] = 1.0
        return cls(amps)


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """Drift eigenvalues plus a Hermitian coupling matrix.

    ``drift`` holds the eigenvalues in basis order; the order is the basis
    labeling and is never sorted.  ``exact_drift`` optionally carries the
    same eigenvalues as exact rationals, which makes the frequency-ratio
    controllability condition decidable instead of heuristic.
    """

    dim: int
    drift: np.ndarray
    coupling: np.ndarray
    exact_drift: Optional[tuple[Fraction, ...]] = field(default=None)

    def __post_init__(self):
        if self.dim < 2:
            raise DimensionMismatchError(f"system dimension must be >= 2, got {self.dim}")
        drift = np.asarray(self.drift, dtype=float).reshape(-1)
        coupling = np.asarray(self.coupling, dtype=complex)
        if drift.size != self.dim:
            raise DimensionMismatchError(
                f"drift has {drift.size} eigenvalues for dimension {self.dim}"
            )
        if coupling.shape != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"coupling shape {coupling.shape} does not match dimension {self.dim}"
            )
        dev = np.max(np.abs(coupling - coupling.conj().T))
        if dev > HERMITICITY_TOL:
            raise HermiticityError(
                f"coupling is not Hermitian: max |B - B^H| = {dev:.3e}"
            )
        if self.exact_drift is not None:
            exact = tuple(Fraction(x) for x in self.exact_drift)
            if len(exact) != self.dim:
                raise DimensionMismatchError(
                    f"exact_drift has {len(exact)} entries for dimension {self.dim}"
                )
            for i, (num, approx) in enumerate(zip(exact, drift)):
                if abs(float(num) - approx) > 1e-9:
                    raise ValueError(
                        f"exact_drift[{i}] = {num} disagrees with drift[{i}] = {approx}"
                    )
            object.__setattr__(self, "exact_drift", exact)
        drift.setflags(write=False)
        coupling.setflags(write=False)
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "coupling", coupling)
        # [A, B] = 0 means the control cannot move populations at all.
        commutator = drift[:, None] * coupling - coupling * drift[None, :]
        if np.max(np.abs(commutator)) <= COMMUTATOR_TOL:
            warnings.warn(
                "drift and coupling commute; the control problem is trivial",
                stacklevel=2,
            )

    def transition_frequency(self, i: int, j: int) -> float:
        """nu_ij = lambda_i - lambda_j for 1-based labels i, j."""
        return float(self.drift[i - 1] - self.drift[j - 1])

    def hamiltonian(self, u: float) -> np.ndarray:
        """Total Hamiltonian matrix A + u*B."""
        return np.diag(self.drift).astype(complex) + u * self.coupling


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    """N x N matrix with U^H U = I within tolerance."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got shape {mat.shape}")
        dev = np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])))
        if dev > UNITARITY_TOL:
            raise UnitarityError(f"matrix is not unitary: max |U^H U - I| = {dev:.3e}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def adjoint(self) -> "UnitaryOperator":
        return UnitaryOperator(self.matrix.conj().T)

    @classmethod
    def identity(cls, dim: int) -> "UnitaryOperator":
        return cls(np.eye(dim, dtype=complex))


@dataclass(frozen=True)
class ControlPulse:
    """Piecewise-constant control: ordered (duration, amplitude) segments."""

    segments: tuple[tuple[float, float], ...]

    def __post_init__(self):
        segs = tuple((float(d), float(u)) for d, u in self.segments)
        for k, (d, _) in enumerate(segs):
            if d <= 0.0:
                raise ValueError(f"segment {k} duration must be positive, got {d}")
        object.__setattr__(self, "segments", segs)

    @property
    def duration(self) -> float:
        return sum(d for d, _ in self.segments)

    def amplitude(self, t: float) -> float:
        """Control value at time t (last segment value beyond the end)."""
        acc = 0.0
        for d, u in self.segments:
            acc += d
            if t < acc:
                return u
        return self.segments[-1][1] if self.segments else 0.0


def prepare_unitary(target: StateVector) -> UnitaryOperator:
    """Unitary sending the first basis state to ``target``.

    Built from a single Householder reflection with the reflector chosen
    on the side that avoids cancellation, then phased so that the first
    column is exactly the target.  A target equal to the first basis state
    returns the identity.
    """
    t = target.amplitudes
    dim = t.size
    e1 = np.zeros(dim, dtype=complex)
    e1[0] = 1.0
    if abs(t[0] - 1.0) < 1e-14 and (dim == 1 or np.max(np.abs(t[1:])) < 1e-14):
        return UnitaryOperator.identity(dim)
    t0 = t[0]
    phase = t0 / abs(t0) if abs(t0) > 0.0 else 1.0
    # reflector v = t + phase*e1 has |v|^2 = 2(1+|t0|), never small
    v = t + phase * e1
    h = np.eye(dim, dtype=complex) - 2.0 * np.outer(v, v.conj()) / np.vdot(v, v)
    u = -phase * h
    return UnitaryOperator(u)


def _segment_unitary(spec: SystemSpec, u: float, dt: float) -> np.ndarray:
    """exp(-i (A + u B) dt), exact via Hermitian eigendecomposition."""
    w, v = np.linalg.eigh(spec.hamiltonian(u))
    return (v * np.exp(-1j * w * dt)) @ v.conj().T


def propagate(spec: SystemSpec, pulse: ControlPulse, initial: StateVector) -> StateVector:
    """Evolve ``initial`` under i dC/dt = (A + u(t) B) C for the pulse.

    Each piecewise-constant segment is applied as an exact matrix
    exponential, so unitarity holds to round-off with no step-size
    tuning.  An empty pulse returns the initial state unchanged.
    """
    if initial.dim != spec.dim:
        raise DimensionMismatchError(
            f"state dimension {initial.dim} does not match system dimension {spec.dim}"
        )
    if not pulse.segments:
        return initial
    c = initial.amplitudes.copy()
    for dt, u in pulse.segments:
        c = _segment_unitary(spec, u, dt) @ c
    drift = abs(float(np.linalg.norm(c)) - 1.0)
    if drift > PROPAGATION_NORM_TOL:
        raise NormalizationError(
            f"propagation lost normalization: |norm - 1| = {drift:.3e}"
        )
    if drift > 1e-12:  # long pulses accumulate round-off past the type tolerance
        c = c / np.linalg.norm(c)
    return StateVector(c)


def apply_operator(op: UnitaryOperator, state: StateVector) -> StateVector:
    """Matrix-vector product U c.  No renormalization: U preserves norm."""
    if op.dim != state.dim:
        raise DimensionMismatchError(
            f"operator dimension {op.dim} does not match state dimension {state.dim}"
        )
    return StateVector(op.matrix @ state.amplitudes)
