"""Mean-field model of the open Dicke system with delayed photon-number feedback.

The cavity mode is split into quadratures a = x + i*y and the collective spin
into J+- = jx +- i*jy, giving five real variables (x, y, jx, jy, jz).  The
atom-field coupling g(t) is modulated by a feedback loop acting on the cavity
occupation x^2 + y^2 measured at time t - tau.

Units convention: all frequencies (omega, omega0, g0, lam) are angular
frequencies in rad/us whose numeric values equal the usual MHz figures, kappa
is a rate in 1/us, and times are in us, so products like omega*t and
Omega*tau are dimensionless.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

#: Relative tolerance used when checking that a state sits on the spin shell.
SHELL_RTOL = 1e-9


class FeedbackMode(enum.Enum):
    """How the delayed photon signal enters the coupling g(t)."""

    NONE = "none"
    PYRAGAS = "pyragas"
    DIRECT = "direct"

    @classmethod
    def parse(cls, text: str) -> "FeedbackMode":
        try:
            return cls(text.strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise DomainError(f"unknown feedback mode {text!r} (expected one of: {valid})")


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the controlled Dicke model.

    Attributes
    ----------
    omega : cavity angular frequency [rad/us], > 0
    omega0 : atomic level splitting [rad/us], >= 0
    g0 : bare atom-field coupling [rad/us]
    kappa : cavity decay rate [1/us], >= 0
    lam : feedback strength [rad/us per photon]
    tau : feedback delay [us], >= 0
    n_atoms : atom number N (real-valued; the mean-field equations never
        need integrality), > 0
    feedback_mode : coupling law for g(t)

    Defaults reproduce the strongly dissipative working point used throughout
    the phase diagrams (omega = 10, omega0 = 0.05, kappa = 8.1, g0 = 1.5,
    lam = 5, tau = 20, N = 1).  N enters the intensive dynamics only through
    the product lam * N, so any other atom number is a rescaling of lam.
    """

    omega: float = 10.0
    omega0: float = 0.05
    g0: float = 1.5
    kappa: float = 8.1
    lam: float = 5.0
    tau: float = 20.0
    n_atoms: float = 1.0
    feedback_mode: FeedbackMode = FeedbackMode.PYRAGAS

    def __post_init__(self):
        if not (self.omega > 0):
            raise DomainError(f"omega must be > 0, got {self.omega}")
        if self.omega0 < 0:
            raise DomainError(f"omega0 must be >= 0, got {self.omega0}")
        if self.kappa < 0:
            raise DomainError(f"kappa must be >= 0, got {self.kappa}")
        if not (self.n_atoms > 0):
            raise DomainError(f"n_atoms must be > 0, got {self.n_atoms}")
        if self.tau < 0:
            raise DomainError(f"tau must be >= 0, got {self.tau}")
        for name in ("omega", "omega0", "g0", "kappa", "lam", "tau", "n_atoms"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def sqrt_2j(self) -> float:
        """sqrt(2j) = sqrt(N); normalizes the coupling in the equations of motion."""
        return math.sqrt(self.n_atoms)

    @property
    def spin_radius(self) -> float:
        """Radius N/2 of the Bloch sphere the spin moves on."""
        return 0.5 * self.n_atoms

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class State:
    """The five real mean-field variables (x, y, jx, jy, jz)."""

    x: float
    y: float
    jx: float
    jy: float
    jz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.jx, self.jy, self.jz], dtype=float)

    @classmethod
    def from_array(cls, arr) -> "State":
        x, y, jx, jy, jz = (float(v) for v in arr)
        return cls(x, y, jx, jy, jz)

    @property
    def photon(self) -> float:
        """Cavity occupation |a|^2 = x^2 + y^2."""
        return self.x * self.x + self.y * self.y

    @property
    def spin_norm_sq(self) -> float:
        return self.jx * self.jx + self.jy * self.jy + self.jz * self.jz


def on_shell(state: State, n_atoms: float, rtol: float = SHELL_RTOL) -> bool:
    """True if jx^2 + jy^2 + jz^2 = (N/2)^2 within relative tolerance."""
    r2 = (0.5 * n_atoms) ** 2
    return abs(state.spin_norm_sq - r2) <= rtol * r2


class Branch(enum.Enum):
    NORMAL = "normal"
    SUPER_PLUS = "super+"
    SUPER_MINUS = "super-"


@dataclass(frozen=True)
class FixedPoint:
    """A steady state of the g = g0 dynamics together with its branch label."""

    branch: Branch
    state: State


def critical_coupling(p: ModelParams) -> float:
    """Critical coupling g_c = sqrt(omega0 (kappa^2 + omega^2) / (4 omega)).

    The superradiant steady states exist only for g0 >= g_c.
    """
    if p.omega <= 0:
        raise DomainError("critical coupling requires omega > 0")
    return math.sqrt(p.omega0 * (p.kappa**2 + p.omega**2) / (4.0 * p.omega))


def fixed_points(p: ModelParams) -> list[FixedPoint]:
    """All steady states of the mean-field dynamics with g = g0.

    Always contains the normal branch (empty cavity, spin fully down).  When
    g0 >= g_c the two superradiant branches are appended:

        jz0 = -N omega0 (kappa^2 + omega^2) / (8 g0^2 omega)
        jx0 = +-sqrt(N^2/4 - jz0^2),     jy0 = 0
        x0  = -jx0 * 2 g0 omega / (sqrt(N) (kappa^2 + omega^2))
        y0  = kappa x0 / omega

    The feedback difference vanishes at any steady state, so these points do
    not depend on tau or lam.  For Pyragas or disabled feedback they are
    exact steady states of the delayed dynamics; in direct-feedback mode the
    cavity occupation shifts the effective coupling and the superradiant
    expressions serve as reference states only (the normal branch stays
    exact).
    """
    n = p.n_atoms
    pts = [FixedPoint(Branch.NORMAL, State(0.0, 0.0, 0.0, 0.0, -0.5 * n))]
    g_c = critical_coupling(p)
    if p.g0 >= g_c and p.g0 > 0:
        k2w2 = p.kappa**2 + p.omega**2
        jz0 = -n * p.omega0 * k2w2 / (8.0 * p.g0**2 * p.omega)
        jx0 = math.sqrt(max(0.25 * n * n - jz0 * jz0, 0.0))
        for branch, sign in ((Branch.SUPER_PLUS, 1.0), (Branch.SUPER_MINUS, -1.0)):
            jx = sign * jx0
            x = -jx * 2.0 * p.g0 * p.omega / (math.sqrt(n) * k2w2)
            y = p.kappa * x / p.omega
            pts.append(FixedPoint(branch, State(x, y, jx, 0.0, jz0)))
    return pts


def get_fixed_point(p: ModelParams, branch: Branch) -> FixedPoint:
    """The fixed point of a given branch, or DomainError if it does not exist."""
    for fp in fixed_points(p):
        if fp.branch is branch:
            return fp
    raise DomainError(
        f"branch {branch.value} does not exist at g0 = {p.g0:.6g} "
        f"(g_c = {critical_coupling(p):.6g})"
    )


def coupling_strength(p: ModelParams, now: State, delayed: State) -> float:
    """Instantaneous coupling g(t) for the configured feedback mode.

    Pyragas feeds back the difference of the cavity occupation at t - tau and
    t, so it vanishes identically on any steady state; direct feedback adds
    the delayed occupation itself; with feedback disabled g = g0 regardless
    of lam and tau.
    """
    mode = p.feedback_mode
    if mode is FeedbackMode.NONE:
        return p.g0
    n_tau = delayed.x * delayed.x + delayed.y * delayed.y
    if mode is FeedbackMode.DIRECT:
        return p.g0 + p.lam * n_tau
    return p.g0 + p.lam * (n_tau - now.x * now.x - now.y * now.y)


def rhs(p: ModelParams, now: State, delayed: State) -> np.ndarray:
    """Time derivatives (dx, dy, djx, djy, djz) of the mean-field equations.

    With G = g(t)/sqrt(2j):

        dx  = -kappa x + omega y
        dy  = -kappa y - omega x - 2 G jx
        djx = -omega0 jy
        djy =  omega0 jx - 4 G x jz
        djz =  4 G x jy

    The spin norm jx^2 + jy^2 + jz^2 is conserved exactly, so trajectories
    stay on the Bloch sphere of radius N/2.
    """
    g_over = coupling_strength(p, now, delayed) / p.sqrt_2j
    x, y, jx, jy, jz = now.x, now.y, now.jx, now.jy, now.jz
    return np.array(
        [
            -p.kappa * x + p.omega * y,
            -p.kappa * y - p.omega * x - 2.0 * g_over * jx,
            -p.omega0 * jy,
            p.omega0 * jx - 4.0 * g_over * x * jz,
            4.0 * g_over * x * jy,
        ]
    )


def perturbed_state(p: ModelParams, fp: FixedPoint, rel: float = 1e-3) -> State:
    """Fixed point displaced by a small relative kick along (jx, x).

    jz is re-solved from the conservation law afterwards so the returned
    state sits exactly on the spin shell.  For the normal branch (jx0 = 0)
    the kick scales are N/2 for jx and sqrt(N) for x.
    """
    s = fp.state
    n = p.n_atoms
    djx = rel * (abs(s.jx) if s.jx != 0.0 else 0.5 * n)
    dx = rel * (abs(s.x) if s.x != 0.0 else math.sqrt(n))
    jx = s.jx + djx
    jy = s.jy
    r2 = (0.5 * n) ** 2
    rem = r2 - jx * jx - jy * jy
    if rem < 0:
        raise DomainError("perturbation pushed the spin off the Bloch sphere")
    jz = math.copysign(math.sqrt(rem), s.jz if s.jz != 0.0 else -1.0)
    return State(s.x + dx, s.y, jx, jy, jz)
