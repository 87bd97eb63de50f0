"""Linear active disturbance-rejection controllers from the bandwidth rule.

A design is fixed by the desired settling time T_s, the observer pole
multiplier g, and the characteristic plant gain b0.  Controllers are built
directly in substituted closed form (observer dynamics with the control law
already eliminated), as 2-input state-space systems with inputs [r, y] and
output u.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lti import RationalTransferFunction, StateSpaceModel, ss_to_tf, tf_neg


def _validate_tuning(T_s: float, g: float, b0: float) -> None:
    if T_s <= 0:
        raise ValueError("T_s must be > 0")
    if g <= 0:
        raise ValueError("g must be > 0")
    if b0 == 0:
        raise ValueError("b0 must be nonzero")


@dataclass(frozen=True)
class AdrcDesign1:
    """First-order design: 2-state observer, proportional state feedback.

    Derived gains: K_P = 4/T_s, observer gains l1 = 2 g K_P and
    l2 = (g K_P)^2, which place both observer poles at -g*K_P.
    """

    T_s: float
    g: float
    b0: float = 1.0

    def __post_init__(self):
        _validate_tuning(self.T_s, self.g, self.b0)

    @property
    def K_P(self) -> float:
        return 4.0 / self.T_s

    @property
    def l1(self) -> float:
        return 2.0 * self.g * self.K_P

    @property
    def l2(self) -> float:
        return (self.g * self.K_P) ** 2


@dataclass(frozen=True)
class AdrcDesign2:
    """Second-order design: 3-state observer, PD state feedback.

    The closed-loop poles are placed at -omega_cl = -6/T_s (double, via
    K_P = omega_cl^2 and K_D = 2 omega_cl) and the observer poles g times
    faster at -g*omega_cl (triple).
    """

    T_s: float
    g: float
    b0: float = 1.0

    def __post_init__(self):
        _validate_tuning(self.T_s, self.g, self.b0)

    @property
    def omega_cl(self) -> float:
        return 6.0 / self.T_s

    @property
    def K_P(self) -> float:
        return self.omega_cl**2

    @property
    def K_D(self) -> float:
        return 2.0 * self.omega_cl

    @property
    def l1(self) -> float:
        return 3.0 * self.g * self.omega_cl

    @property
    def l2(self) -> float:
        return 3.0 * (self.g * self.omega_cl) ** 2

    @property
    def l3(self) -> float:
        return (self.g * self.omega_cl) ** 3


AdrcDesign = AdrcDesign1 | AdrcDesign2


def tune_first_order(T_s: float, g: float, b0: float = 1.0) -> AdrcDesign1:
    return AdrcDesign1(T_s=float(T_s), g=float(g), b0=float(b0))


def tune_second_order(T_s: float, g: float, b0: float = 1.0) -> AdrcDesign2:
    return AdrcDesign2(T_s=float(T_s), g=float(g), b0=float(b0))


@dataclass(frozen=True, eq=False)
class TwoInputController:
    """Controller with inputs ordered [r, y] and single output u."""

    ss: StateSpaceModel

    def __post_init__(self):
        if self.ss.n_inputs != 2 or self.ss.n_outputs != 1:
            raise ValueError("controller must have exactly inputs [r, y] and output u")

    def reference_tf(self) -> RationalTransferFunction:
        """Transfer function from r to u (C_r)."""
        return ss_to_tf(self.ss, input=0, output=0)

    def measurement_tf(self) -> RationalTransferFunction:
        """Transfer function from y to u; equals -C_y by convention."""
        return ss_to_tf(self.ss, input=1, output=0)


def build_first_order(design: AdrcDesign1) -> TwoInputController:
    """2-state controller: observer dynamics with the control law substituted."""
    K_P, l1, l2, b0 = design.K_P, design.l1, design.l2, design.b0
    A = np.array([[-(l1 + K_P), 0.0], [-l2, 0.0]])
    B = np.array([[K_P, l1], [0.0, l2]])
    C = np.array([[-K_P / b0, -1.0 / b0]])
    D = np.array([[K_P / b0, 0.0]])
    return TwoInputController(StateSpaceModel(A, B, C, D, ("r", "y"), ("u",)))


def build_second_order(design: AdrcDesign2) -> TwoInputController:
    """3-state controller: extended observer with PD feedback substituted."""
    K_P, K_D, b0 = design.K_P, design.K_D, design.b0
    l1, l2, l3 = design.l1, design.l2, design.l3
    A = np.array(
        [
            [-l1, 1.0, 0.0],
            [-(l2 + K_P), -K_D, 0.0],
            [-l3, 0.0, 0.0],
        ]
    )
    B = np.array([[0.0, l1], [K_P, l2], [0.0, l3]])
    C = np.array([[-K_P / b0, -K_D / b0, -1.0 / b0]])
    D = np.array([[K_P / b0, 0.0]])
    return TwoInputController(StateSpaceModel(A, B, C, D, ("r", "y"), ("u",)))


def build_adrc(design: AdrcDesign) -> TwoInputController:
    if isinstance(design, AdrcDesign1):
        return build_first_order(design)
    return build_second_order(design)


def extract_cr_cy(c: TwoInputController) -> tuple[RationalTransferFunction, RationalTransferFunction]:
    """Split a 2-input controller into (C_r, C_y) with u = C_r r - C_y y."""
    c_r = c.reference_tf().canonicalized()
    c_y = tf_neg(c.measurement_tf()).canonicalized()
    return c_r, c_y


def observer_matrix(design: AdrcDesign) -> np.ndarray:
    """Dynamics matrix of the pure observer (before feedback substitution)."""
    if isinstance(design, AdrcDesign1):
        return np.array([[-design.l1, 1.0], [-design.l2, 0.0]])
    return np.array(
        [
            [-design.l1, 1.0, 0.0],
            [-design.l2, 0.0, 1.0],
            [-design.l3, 0.0, 0.0],
        ]
    )
