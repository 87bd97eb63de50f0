"""Scalar continuous-time LTI primitives.

Polynomial and rational transfer-function arithmetic, state-space models,
conversions between the two, frequency responses, and exact step-response
simulation via zero-order-hold discretization.

Coefficient convention used everywhere in this package: polynomials store
ascending powers of s, i.e. ``coeffs[k]`` multiplies ``s**k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.linalg import expm

# Trailing coefficients below TRIM_REL_TOL times the largest magnitude are
# treated as zero.  Transfer-function comparison uses the REL/ABS pair below
# after monic normalization of the denominator.
TRIM_REL_TOL = 1e-12
COEFF_REL_TOL = 1e-9
COEFF_ABS_TOL = 1e-12


class ImproperTransferFunctionError(ValueError):
    """A proper transfer function was required but deg(num) > deg(den)."""


class AlgebraicLoopError(ValueError):
    """A feedback interconnection has a direct feedthrough loop."""


def _trimmed(coeffs: Sequence[float]) -> tuple[float, ...]:
    c = [float(x) for x in coeffs]
    if not c:
        raise ValueError("polynomial needs at least one coefficient")
    tol = TRIM_REL_TOL * max(abs(x) for x in c)
    while len(c) > 1 and abs(c[-1]) <= tol:
        c.pop()
    if len(c) == 1 and abs(c[0]) <= tol:
        return (0.0,)
    return tuple(c)


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial in s; ``coeffs[k]`` multiplies ``s**k``."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trimmed(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    @property
    def leading(self) -> float:
        return self.coeffs[-1]

    def __call__(self, s):
        return npoly.polyval(s, self.coeffs)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(tuple(npoly.polyadd(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(tuple(npoly.polysub(self.coeffs, other.coeffs)))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(tuple(npoly.polymul(self.coeffs, other.coeffs)))

    def scaled(self, factor: float) -> "Polynomial":
        return Polynomial(tuple(factor * c for c in self.coeffs))

    def roots(self) -> np.ndarray:
        """Roots via the companion-matrix eigenvalue solver."""
        if self.is_zero:
            raise ValueError("zero polynomial has no well-defined root set")
        if self.degree == 0:
            return np.array([], dtype=complex)
        return np.atleast_1d(npoly.polyroots(self.coeffs))

    @staticmethod
    def from_roots(roots: Sequence[complex], leading: float = 1.0) -> "Polynomial":
        base = npoly.polyfromroots(np.asarray(roots, dtype=complex))
        return Polynomial(tuple(np.real(base) * leading))


@dataclass(frozen=True)
class RationalTransferFunction:
    """Ratio of two real polynomials in s."""

    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        if self.den.is_zero:
            raise ValueError("denominator must not be the zero polynomial")

    @classmethod
    def from_coeffs(cls, num: Sequence[float], den: Sequence[float]) -> "RationalTransferFunction":
        return cls(Polynomial(tuple(num)), Polynomial(tuple(den)))

    @classmethod
    def constant(cls, value: float) -> "RationalTransferFunction":
        return cls.from_coeffs((float(value),), (1.0,))

    def __call__(self, s):
        return self.num(s) / self.den(s)

    def canonicalized(self) -> "RationalTransferFunction":
        """Scale num and den so the denominator is monic."""
        lead = self.den.leading
        if lead == 1.0:
            return self
        inv = 1.0 / lead
        return RationalTransferFunction(self.num.scaled(inv), self.den.scaled(inv))

    @property
    def is_proper(self) -> bool:
        return self.num.degree <= self.den.degree or self.num.is_zero

    def poles(self) -> np.ndarray:
        return self.den.roots()

    def zeros(self) -> np.ndarray:
        return self.num.roots() if not self.num.is_zero else np.array([], dtype=complex)

    def __mul__(self, other):
        return tf_multiply(self, _as_tf(other))

    __rmul__ = __mul__

    def __add__(self, other):
        return tf_add(self, _as_tf(other))

    __radd__ = __add__

    def __sub__(self, other):
        return tf_add(self, tf_neg(_as_tf(other)))

    def __neg__(self):
        return tf_neg(self)

    def __truediv__(self, other):
        return tf_multiply(self, tf_inverse(_as_tf(other)))


def _as_tf(value) -> RationalTransferFunction:
    if isinstance(value, RationalTransferFunction):
        return value
    return RationalTransferFunction.constant(value)


def tf_multiply(a: RationalTransferFunction, b: RationalTransferFunction) -> RationalTransferFunction:
    """Product of two transfer functions; no implicit pole-zero cancellation."""
    return RationalTransferFunction(a.num * b.num, a.den * b.den).canonicalized()


def tf_add(a: RationalTransferFunction, b: RationalTransferFunction) -> RationalTransferFunction:
    """Cross-multiplied sum; no implicit cancellation."""
    return RationalTransferFunction(a.num * b.den + b.num * a.den, a.den * b.den).canonicalized()


def tf_neg(a: RationalTransferFunction) -> RationalTransferFunction:
    return RationalTransferFunction(a.num.scaled(-1.0), a.den).canonicalized()


def tf_scale(a: RationalTransferFunction, factor: float) -> RationalTransferFunction:
    return RationalTransferFunction(a.num.scaled(factor), a.den).canonicalized()


def tf_inverse(a: RationalTransferFunction) -> RationalTransferFunction:
    if a.num.is_zero:
        raise ZeroDivisionError("cannot invert a zero transfer function")
    return RationalTransferFunction(a.den, a.num).canonicalized()


def _divide_out(p: Polynomial, roots: list[complex]) -> Polynomial:
    """Quotient of p by the monic polynomial with the given roots."""
    if not roots:
        return p
    factor = np.real(npoly.polyfromroots(np.asarray(roots, dtype=complex)))
    quotient, _ = npoly.polydiv(p.coeffs, factor)
    return Polynomial(tuple(quotient))


def tf_minreal(a: RationalTransferFunction, tol: float) -> RationalTransferFunction:
    """Cancel num/den root pairs closer than tol, greedy nearest pair first.

    Surviving coefficients are obtained by dividing out the cancelled
    factors, so an input with nothing to cancel is returned bit-exact (up to
    monic normalization).
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    a = a.canonicalized()
    if a.num.is_zero or a.num.degree == 0 or a.den.degree == 0:
        return a
    zeros = a.num.roots()
    poles = a.den.roots()
    pairs = sorted(
        (abs(z - p), i, j)
        for i, z in enumerate(zeros)
        for j, p in enumerate(poles)
    )
    cancel_z: list[complex] = []
    cancel_p: list[complex] = []
    used_z = [False] * len(zeros)
    used_p = [False] * len(poles)
    for dist, i, j in pairs:
        if dist > tol:
            break
        if not used_z[i] and not used_p[j]:
            used_z[i] = True
            used_p[j] = True
            cancel_z.append(zeros[i])
            cancel_p.append(poles[j])
    if not cancel_z:
        return a
    num = _divide_out(a.num, cancel_z)
    den = _divide_out(a.den, cancel_p)
    return RationalTransferFunction(num, den).canonicalized()


def _padded_pair(a: Polynomial, b: Polynomial) -> tuple[np.ndarray, np.ndarray]:
    n = max(len(a.coeffs), len(b.coeffs))
    pa = np.zeros(n)
    pb = np.zeros(n)
    pa[: len(a.coeffs)] = a.coeffs
    pb[: len(b.coeffs)] = b.coeffs
    return pa, pb


def tf_is_close(
    a: RationalTransferFunction,
    b: RationalTransferFunction,
    rtol: float = COEFF_REL_TOL,
    atol: float = COEFF_ABS_TOL,
) -> bool:
    """Coefficient-wise comparison after monic normalization of both."""
    a = a.canonicalized()
    b = b.canonicalized()
    for pa, pb in (_padded_pair(a.num, b.num), _padded_pair(a.den, b.den)):
        scale = np.maximum(np.abs(pa), np.abs(pb))
        if np.any(np.abs(pa - pb) > atol + rtol * scale):
            return False
    return True


def poly_residual(a: Polynomial, b: Polynomial) -> float:
    """Largest per-coefficient relative deviation between two polynomials.

    The scale floor ABS/REL makes ``poly_residual(a, b) <= rtol`` agree with
    the atol+rtol acceptance rule, so absolute noise below the floor does not
    blow up the quotient.
    """
    pa, pb = _padded_pair(a, b)
    floor = COEFF_ABS_TOL / COEFF_REL_TOL
    scale = np.maximum(np.maximum(np.abs(pa), np.abs(pb)), floor)
    return float(np.max(np.abs(pa - pb) / scale))


def tf_residual(a: RationalTransferFunction, b: RationalTransferFunction) -> float:
    """Largest per-coefficient relative deviation after monic normalization."""
    a = a.canonicalized()
    b = b.canonicalized()
    return max(poly_residual(a.num, b.num), poly_residual(a.den, b.den))


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """Real matrix quadruple (A, B, C, D) with named inputs and outputs."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    input_labels: tuple[str, ...] = ()
    output_labels: tuple[str, ...] = ()

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        D = np.atleast_2d(np.asarray(self.D, dtype=float))
        n = A.shape[0]
        m = B.shape[1]
        p = C.shape[0]
        if A.shape != (n, n):
            raise ValueError("A must be square")
        if B.shape != (n, m) or C.shape != (p, n) or D.shape != (p, m):
            raise ValueError("inconsistent state-space dimensions")
        if m < 1 or p < 1:
            raise ValueError("need at least one input and one output")
        in_labels = self.input_labels or tuple(f"u{j + 1}" for j in range(m))
        out_labels = self.output_labels or tuple(f"y{i + 1}" for i in range(p))
        if len(in_labels) != m or len(out_labels) != p:
            raise ValueError("label counts must match input/output counts")
        for name, mat in (("A", A), ("B", B), ("C", C), ("D", D)):
            mat.setflags(write=False)
            object.__setattr__(self, name, mat)
        object.__setattr__(self, "input_labels", tuple(in_labels))
        object.__setattr__(self, "output_labels", tuple(out_labels))

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.B.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.C.shape[0]


def _resolvent(A: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Faddeev-LeVerrier recursion.

    Returns the characteristic polynomial of A (ascending, monic) and the
    matrix coefficients N_k of adj(sI - A) = sum_k s**k N_k for k < n.
    """
    n = A.shape[0]
    char = np.zeros(n + 1)
    char[n] = 1.0
    mats: list[np.ndarray] = [np.zeros((n, n))] * n
    M = np.eye(n)
    for k in range(1, n + 1):
        if k > 1:
            M = A @ M + char[n - k + 1] * np.eye(n)
        mats[n - k] = M
        char[n - k] = -np.trace(A @ M) / k
    return char, mats


def ss_to_tf(m: StateSpaceModel, input: int = 0, output: int = 0) -> RationalTransferFunction:
    """Transfer function C (sI - A)^-1 B + D of one scalar channel."""
    if not 0 <= input < m.n_inputs:
        raise IndexError("input index out of range")
    if not 0 <= output < m.n_outputs:
        raise IndexError("output index out of range")
    n = m.n_states
    char, mats = _resolvent(m.A)
    b = m.B[:, input]
    c = m.C[output, :]
    d = float(m.D[output, input])
    num = d * char
    for k in range(n):
        num[k] += float(c @ mats[k] @ b)
    return RationalTransferFunction(Polynomial(tuple(num)), Polynomial(tuple(char))).canonicalized()


def tf_to_ss(a: RationalTransferFunction) -> StateSpaceModel:
    """Controllable canonical realization of a proper transfer function."""
    if not a.is_proper:
        raise ImproperTransferFunctionError(
            f"deg(num)={a.num.degree} exceeds deg(den)={a.den.degree}"
        )
    a = a.canonicalized()
    n = a.den.degree
    den = np.asarray(a.den.coeffs)
    num = np.zeros(n + 1)
    num[: len(a.num.coeffs)] = a.num.coeffs
    d = num[n]
    residual = num[:n] - d * den[:n]
    A = np.zeros((n, n))
    if n:
        A[:-1, 1:] = np.eye(n - 1)
        A[-1, :] = -den[:n]
    B = np.zeros((n, 1))
    if n:
        B[-1, 0] = 1.0
    C = residual.reshape(1, n)
    D = np.array([[d]])
    return StateSpaceModel(A, B, C, D, input_labels=("u",), output_labels=("y",))


@dataclass(frozen=True, eq=False)
class FrequencyResponseTable:
    """Complex responses on a shared ascending positive frequency grid."""

    omega: np.ndarray
    columns: dict[str, np.ndarray]

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        if omega.ndim != 1 or omega.size == 0:
            raise ValueError("omega must be a nonempty 1-d array")
        if np.any(omega <= 0) or np.any(np.diff(omega) <= 0):
            raise ValueError("omega must be strictly increasing and positive")
        omega.setflags(write=False)
        cols = {}
        for name, values in self.columns.items():
            v = np.asarray(values, dtype=complex)
            if v.shape != omega.shape:
                raise ValueError(f"column {name!r} length does not match omega")
            v.setflags(write=False)
            cols[name] = v
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "columns", cols)

    def magnitude(self, name: str) -> np.ndarray:
        return np.abs(self.columns[name])

    def phase_deg(self, name: str) -> np.ndarray:
        """Unwrapped phase in degrees."""
        return np.degrees(np.unwrap(np.angle(self.columns[name])))


@dataclass(frozen=True, eq=False)
class StepResponseTable:
    """Named signal traces on a shared uniform time grid starting at 0."""

    t: np.ndarray
    columns: dict[str, np.ndarray]

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("t must hold at least two samples")
        if t[0] != 0.0:
            raise ValueError("t must start at 0")
        h = t[1] - t[0]
        if h <= 0 or not np.allclose(np.diff(t), h, rtol=1e-9, atol=0.0):
            raise ValueError("t must be uniformly spaced with positive step")
        t.setflags(write=False)
        cols = {}
        for name, values in self.columns.items():
            v = np.asarray(values, dtype=float)
            if v.shape != t.shape:
                raise ValueError(f"column {name!r} length does not match t")
            v.setflags(write=False)
            cols[name] = v
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "columns", cols)


def freq_response(a, omega, label: str | None = None) -> FrequencyResponseTable:
    """Evaluate a transfer function or state-space model at s = j*omega.

    State-space evaluation solves (j*omega*I - A) x = B directly at every
    grid point; it does not go through a transfer function.
    """
    omega = np.asarray(omega, dtype=float)
    if isinstance(a, RationalTransferFunction):
        values = np.asarray(a(1j * omega), dtype=complex)
        return FrequencyResponseTable(omega, {label or "H": values})
    n = a.n_states
    response = np.empty((omega.size, a.n_outputs, a.n_inputs), dtype=complex)
    eye = np.eye(n)
    for k, w in enumerate(omega):
        if n:
            x = np.linalg.solve(1j * w * eye - a.A, a.B)
        else:
            x = np.zeros((0, a.n_inputs))
        response[k] = a.C @ x + a.D
    cols = {}
    for i, out in enumerate(a.output_labels):
        for j, inp in enumerate(a.input_labels):
            cols[f"{out}<-{inp}"] = response[:, i, j].copy()
    return FrequencyResponseTable(omega, cols)


def step_response(m: StateSpaceModel, input: int = 0, t_end: float = 10.0, n_steps: int = 4000) -> StepResponseTable:
    """Unit-step response from zero initial state, exact at sample instants.

    The state is extended with the constant input and the augmented matrix is
    exponentiated once at h = t_end / n_steps, so the zero-order-hold
    discretization reproduces the continuous solution exactly on the grid.
    """
    if n_steps < 2:
        raise ValueError("n_steps must be >= 2")
    if t_end <= 0:
        raise ValueError("t_end must be > 0")
    if not 0 <= input < m.n_inputs:
        raise IndexError("input index out of range")
    n = m.n_states
    h = t_end / n_steps
    aug = np.zeros((n + 1, n + 1))
    aug[:n, :n] = m.A
    aug[:n, n] = m.B[:, input]
    phi = expm(aug * h)
    Ad = phi[:n, :n]
    bd = phi[:n, n]
    d_col = m.D[:, input]
    samples = np.empty((n_steps + 1, m.n_outputs))
    x = np.zeros(n)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_steps + 1):
            samples[k] = m.C @ x + d_col
            x = Ad @ x + bd
    t = np.linspace(0.0, t_end, n_steps + 1)
    cols = {name: samples[:, i].copy() for i, name in enumerate(m.output_labels)}
    return StepResponseTable(t, cols)


def poles(a) -> np.ndarray:
    """Poles of a transfer function (denominator roots) or model (eig(A))."""
    if isinstance(a, StateSpaceModel):
        if a.n_states == 0:
            return np.array([], dtype=complex)
        return np.linalg.eigvals(a.A)
    if a.den.degree < 1:
        raise ValueError("zero-degree denominator has no poles")
    return a.poles()


def is_stable(a) -> bool:
    """True iff every pole has strictly negative real part."""
    if isinstance(a, StateSpaceModel):
        p = poles(a)
    elif a.den.degree < 1:
        return True
    else:
        p = a.poles()
    return bool(np.all(p.real < 0)) if p.size else True


def log_grid(lo: float = 1e-2, hi: float = 1e4, n: int = 600) -> np.ndarray:
    """Logarithmic frequency grid, never containing 0."""
    if lo <= 0 or hi <= lo or n < 2:
        raise ValueError("need 0 < lo < hi and n >= 2")
    return np.logspace(np.log10(lo), np.log10(hi), n)
