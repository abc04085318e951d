"""Linear stability of fixed points under delayed feedback.

Around a fixed point the deviations dv = (djx, djy, dx, dy) obey

    dv'(t) = B dv(t) + A dv(t - tau),

where the jz deviation has been eliminated through conservation of the spin
norm.  Stability is decided by the characteristic roots L solving

    det(L I - B - A exp(-L tau)) = 0,

a transcendental equation with infinitely many solutions; the fixed point is
stable iff every root has negative real part.  For a rank-one delayed block
the determinant collapses to Q0(L) + Q1(L) exp(-L tau) with polynomial Q0,
Q1, which this module exploits for fast, vectorized evaluation.

Root finding is certified: an argument-principle count over the search
rectangle must match the number of roots actually located (Newton-polished
from quartic, eigenvalue, and exponential-chain seed families), with
recursive bisection as the fallback for anything the seeds miss.

The module also carries the small-splitting analysis (omega0 << omega, g0):
the Hopf frequency Omega, the tan(Omega tau) boundary condition with its
C1, C2, C3 coefficients, and the critical feedback strength below which no
boundary exists.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BelowThresholdError,
    CountMismatchError,
    DegenerateFixedPointError,
    DomainError,
    NoConvergenceError,
)
from .model import (
    Branch,
    FeedbackMode,
    FixedPoint,
    ModelParams,
    critical_coupling,
)

DEFAULT_RES_TOL = 1e-10

__all__ = [
    "Linearization",
    "RootInfo",
    "SpectrumResult",
    "BoundaryPoint",
    "linearize",
    "characteristic_value",
    "CharacteristicFunction",
    "rightmost_roots",
    "max_real_part",
    "hopf_frequency",
    "boundary_delays",
    "critical_feedback_strength",
]


# ---------------------------------------------------------------------------
# linearization


@dataclass(frozen=True)
class Linearization:
    """Instantaneous (B) and delayed (A) 4x4 blocks around a fixed point."""

    a_matrix: np.ndarray
    b_matrix: np.ndarray
    fixed_point: FixedPoint
    params: ModelParams

    @property
    def delay_free(self) -> bool:
        """True when the delayed block vanishes and the spectrum is plain eig(B)."""
        return not self.a_matrix.any()


def linearize(p: ModelParams, fp: FixedPoint) -> Linearization:
    """Linearized blocks A, B at a fixed point, in (djx, djy, dx, dy) order.

    The entries follow the mean-field equations with the jz deviation
    eliminated via djz = -(jx0/jz0) djx; every coupling row carries the
    1/sqrt(2j) normalization, which reduces to the familiar N = 1 form.
    Feedback mode 'none' freezes g(t) = g0, so the feedback entries drop out;
    direct feedback is rejected because its steady states are not the g = g0
    fixed points this linearization is built around.
    """
    if p.feedback_mode is FeedbackMode.DIRECT:
        raise DomainError(
            "linear stability is defined for feedback that vanishes at the "
            "fixed point; direct feedback shifts the steady state itself"
        )
    s = fp.state
    jx0, jz0, x0, y0 = s.jx, s.jz, s.x, s.y
    if jz0 == 0.0:
        raise DegenerateFixedPointError("jz = 0 fixed point: conservation row is singular")
    lam = p.lam if p.feedback_mode is FeedbackMode.PYRAGAS else 0.0
    r = 1.0 / p.sqrt_2j
    g0, omega, omega0, kappa = p.g0, p.omega, p.omega0, p.kappa

    a = np.zeros((4, 4))
    a[1, 2] = -8.0 * jz0 * x0 * x0 * lam * r
    a[1, 3] = -8.0 * jz0 * x0 * y0 * lam * r
    a[3, 2] = -4.0 * jx0 * x0 * lam * r
    a[3, 3] = -4.0 * jx0 * y0 * lam * r

    b = np.zeros((4, 4))
    b[0, 1] = -omega0
    b[1, 0] = 4.0 * g0 * jx0 * x0 * r / jz0 + omega0
    b[1, 2] = 8.0 * jz0 * x0 * x0 * lam * r - 4.0 * g0 * jz0 * r
    b[1, 3] = 8.0 * jz0 * x0 * y0 * lam * r
    b[2, 2] = -kappa
    b[2, 3] = omega
    b[3, 0] = -2.0 * g0 * r
    b[3, 2] = 4.0 * jx0 * x0 * lam * r - omega
    b[3, 3] = 4.0 * jx0 * y0 * lam * r - kappa
    return Linearization(a, b, fp, p)


def characteristic_value(lin: Linearization, tau: float, lam: complex) -> complex:
    """The 4x4 determinant det(L I - B - A exp(-L tau)) at L = lam."""
    m = lam * np.eye(4) - lin.b_matrix - lin.a_matrix * cmath.exp(-lam * tau)
    return complex(np.linalg.det(m))


# ---------------------------------------------------------------------------
# cached characteristic function


class CharacteristicFunction:
    """det(L I - B - A z) expanded as Q0(L) + Q1(L) z + Q2(L) z^2, z = exp(-L tau).

    The expansion is exact (the determinant is at most quadratic in z) and is
    recovered from eleven plain determinant evaluations; from then on every
    evaluation is a pair of polynomial evaluations plus one exponential,
    which vectorizes over arrays of L.  For the rank-one delayed blocks
    produced by photon-number feedback Q2 vanishes identically.

    Evaluations along contours deep in the left half-plane are scaled by a
    positive real factor exp(-m) to avoid overflow of exp(-L tau); positive
    real factors change neither the argument nor the zeros, so winding
    numbers are unaffected.
    """

    def __init__(self, lin: Linearization, tau: float):
        if tau < 0:
            raise DomainError("tau must be >= 0")
        self.tau = float(tau)
        self.norm_a = float(np.linalg.norm(lin.a_matrix, 2))
        self.norm_b = float(np.linalg.norm(lin.b_matrix, 2))
        s = max(1.0, self.norm_a + self.norm_b)
        self._node_scale = s
        nodes = s * np.array([-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0])
        eye = np.eye(4)
        b, a = lin.b_matrix, lin.a_matrix

        def dets(z):
            return np.array(
                [np.linalg.det(lm * eye - b - a * z) for lm in nodes]
            )

        f0, fp, fm = dets(0.0), dets(1.0), dets(-1.0)
        self.q0 = np.polyfit(nodes, f0, 4)
        self.q1 = np.polyfit(nodes, 0.5 * (fp - fm), 4)
        q2_vals = 0.5 * (fp + fm) - f0
        if np.max(np.abs(q2_vals)) < 1e-8 * s**4:
            self.q2 = np.zeros(5)
        else:
            self.q2 = np.polyfit(nodes, q2_vals, 4)
        self.has_q2 = bool(self.q2.any())
        self.dq0 = np.polyder(self.q0)
        self.dq1 = np.polyder(self.q1)
        self.dq2 = np.polyder(self.q2)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, lam):
        """True determinant value; may overflow for Re(L) tau << -700."""
        lam = np.asarray(lam, dtype=complex)
        e1 = np.exp(-lam * self.tau)
        out = np.polyval(self.q0, lam) + np.polyval(self.q1, lam) * e1
        if self.has_q2:
            out = out + np.polyval(self.q2, lam) * e1 * e1
        return out

    def _scaled_terms(self, lam):
        """(f * exp(-m), termwise magnitude scale * exp(-m), m), overflow-free.

        The scale is |Q0| + |Q1 e^{-L tau}| + |Q2 e^{-2 L tau}|: the size of
        the cancellation that defines the relative residual of a root.
        """
        lam = np.asarray(lam, dtype=complex)
        u = -lam.real * self.tau          # log-magnitude of exp(-L tau)
        n_exp = 2.0 if self.has_q2 else 1.0
        m = np.maximum(0.0, n_exp * u)
        phase = np.exp(-1j * lam.imag * self.tau)
        q0v = np.polyval(self.q0, lam)
        q1v = np.polyval(self.q1, lam)
        e0 = np.exp(-m)
        e1 = np.exp(u - m)
        val = q0v * e0 + q1v * phase * e1
        scale = np.abs(q0v) * e0 + np.abs(q1v) * e1
        if self.has_q2:
            q2v = np.polyval(self.q2, lam)
            e2 = np.exp(2.0 * u - m)
            val = val + q2v * phase * phase * e2
            scale = scale + np.abs(q2v) * e2
        return val, scale, m

    def scaled(self, lam):
        """(f(L) * exp(-m), m) with m >= 0 chosen per point so nothing overflows."""
        val, _, m = self._scaled_terms(lam)
        return val, m

    def log10_residual(self, lam):
        """log10 of |det| relative to the termwise cancellation scale."""
        val, scale, _ = self._scaled_terms(lam)
        with np.errstate(divide="ignore"):
            return np.log10(np.abs(val) / (scale + 1e-300) + 1e-300)

    def newton_step(self, lam):
        """f / f' evaluated through the overflow-safe representation.

        Works on g = f * exp(k L tau) with k chosen per point; then
        f/f' = g / (g' - k tau g) and every exponential stays bounded.
        """
        lam = np.asarray(lam, dtype=complex)
        u = -lam.real * self.tau
        k = np.where(u > 50.0, 2.0 if self.has_q2 else 1.0, 0.0)

        def term(q, dq, j):
            w = np.exp((k - j) * lam * self.tau)
            qv = np.polyval(q, lam)
            return qv * w, (np.polyval(dq, lam) + (k - j) * self.tau * qv) * w

        g, gp = term(self.q0, self.dq0, 0.0)
        t1, t1p = term(self.q1, self.dq1, 1.0)
        g, gp = g + t1, gp + t1p
        if self.has_q2:
            t2, t2p = term(self.q2, self.dq2, 2.0)
            g, gp = g + t2, gp + t2p
        denom = gp - k * self.tau * g
        denom = np.where(denom == 0, 1e-300, denom)
        return g / denom

    def quartic_roots(self) -> np.ndarray:
        """Roots of Q0 + Q1 + Q2: the exact spectrum when tau = 0."""
        coeffs = self.q0 + self.q1 + self.q2
        nz = np.flatnonzero(np.abs(coeffs) > 0)
        if nz.size == 0:
            return np.array([], dtype=complex)
        return np.roots(coeffs[nz[0]:])


def newton_polish(cf: CharacteristicFunction, seeds, log10_tol: float, max_iter: int = 80):
    """Vectorized Newton iteration on all seeds at once.

    Returns (roots, log10_residuals, converged_mask).  Seeds that wander or
    stagnate simply fail to converge; callers decide whether that matters.
    """
    z = np.asarray(seeds, dtype=complex).copy()
    if z.size == 0:
        return z, np.array([]), np.array([], dtype=bool)
    res = cf.log10_residual(z)
    for _ in range(max_iter):
        active = ~(res <= log10_tol) & np.isfinite(z)
        if not active.any():
            break
        step = cf.newton_step(z[active])
        cap = 0.5 * (1.0 + np.abs(z[active]))
        mag = np.abs(step)
        step = np.where(mag > cap, step * cap / mag, step)
        z[active] = z[active] - step
        res[active] = cf.log10_residual(z[active])
    ok = np.isfinite(z) & (res <= log10_tol)
    return z, res, ok


# ---------------------------------------------------------------------------
# argument-principle machinery


class _BoundaryRootError(Exception):
    """The contour passed too close to a root; the caller must nudge it."""


_WINDING_FLOOR = 1e-12


def _edge_phase(cf, za, zb, budget):
    """Total change of arg f along the straight segment za -> zb."""
    length_im = abs(zb.imag - za.imag)
    n0 = min(int(budget / 3), 32 + int(0.7 * cf.tau * length_im) + 32)
    t = np.linspace(0.0, 1.0, n0 + 1)
    z = za + (zb - za) * t
    v, scale, _ = cf._scaled_terms(z)
    evals = z.size
    for _ in range(60):
        if np.any(np.abs(v) < _WINDING_FLOOR * scale):
            raise _BoundaryRootError
        dphi = np.angle(v[1:] / np.where(v[:-1] == 0, 1e-300, v[:-1]))
        bad = np.abs(dphi) > 0.5 * math.pi
        if not bad.any():
            return float(dphi.sum()), evals
        if evals > budget:
            raise CountMismatchError("winding refinement budget exceeded")
        mids = 0.5 * (t[:-1][bad] + t[1:][bad])
        t = np.sort(np.concatenate([t, mids]))
        z = za + (zb - za) * t
        v, scale, _ = cf._scaled_terms(z)
        evals += mids.size
    raise CountMismatchError("winding refinement did not settle")


def _winding(cf, rect, budget=400_000):
    """Number of characteristic roots strictly inside the rectangle."""
    re0, re1, im0, im1 = rect
    corners = [
        complex(re0, im0),
        complex(re1, im0),
        complex(re1, im1),
        complex(re0, im1),
        complex(re0, im0),
    ]
    total = 0.0
    evals = 0
    for za, zb in zip(corners[:-1], corners[1:]):
        dphi, n = _edge_phase(cf, za, zb, budget)
        total += dphi
        evals += n
    count = total / (2.0 * math.pi)
    if abs(count - round(count)) > 0.25:
        raise CountMismatchError(f"non-integer winding number {count:.3f}")
    return int(round(count)), evals


def _winding_nudged(cf, rect, budget=400_000, attempts=8):
    """Winding count, expanding the rectangle slightly if a root sits on it."""
    re0, re1, im0, im1 = rect
    w, h = re1 - re0, im1 - im0
    for i in range(attempts):
        grow = 1e-4 * (i + 1) * (1.3**i)
        r = (re0 - grow * w, re1 + grow * w, im0 - grow * h, im1 + grow * h)
        if i == 0:
            r = rect
        try:
            count, evals = _winding(cf, r, budget)
            return count, r, evals
        except _BoundaryRootError:
            continue
    raise CountMismatchError("could not find a root-free contour near the rectangle")


def _in_rect(z, rect, pad=0.0):
    re0, re1, im0, im1 = rect
    return (re0 - pad <= z.real <= re1 + pad) and (im0 - pad <= z.imag <= im1 + pad)


def _chain_seeds(cf, k_max):
    """Approximate roots of Q0 + Q1 exp(-L tau) = 0 along the exponential chains.

    Rearranging gives L = -(Log(-Q0/Q1) + 2 pi i k)/tau; fixed-point iterating
    this map from L = 2 pi i k / tau converges wherever the polynomial part
    varies slowly, which is exactly where the quartic seeds are blind.
    """
    if cf.tau == 0 or k_max < 1:
        return np.array([], dtype=complex)
    ks = np.arange(1, k_max + 1, dtype=float)
    target = 2.0 * math.pi * ks / cf.tau
    z = -0.05 + 1j * target
    for _ in range(25):
        q0 = np.polyval(cf.q0, z)
        q1 = np.polyval(cf.q1, z)
        bad = (np.abs(q1) < 1e-290) | (np.abs(q0) < 1e-290) | ~np.isfinite(z)
        ratio = np.where(bad, 1.0, -q0 / np.where(q1 == 0, 1.0, q1))
        ln_mag = np.log(np.abs(ratio))
        ang = np.angle(ratio)
        # choose the branch of the logarithm that keeps Im(L) near the target
        m = np.round((-target * cf.tau - ang) / (2.0 * math.pi))
        z_new = -(ln_mag + 1j * (ang + 2.0 * math.pi * m)) / cf.tau
        z = np.where(bad, z, z_new)
    return z[np.isfinite(z)]


@dataclass
class _FoundRoot:
    z: complex
    multiplicity: int
    log10_res: float


def _dedupe_add(roots: list[_FoundRoot], z: complex, log10_res: float, mult: int = 1) -> bool:
    for r in roots:
        if abs(r.z - z) <= 1e-7 * (1.0 + abs(z)):
            return False
    roots.append(_FoundRoot(complex(z), mult, float(log10_res)))
    return True


def _count_inside(roots, rect):
    return sum(r.multiplicity for r in roots if _in_rect(r.z, rect))


def _split_rect(cf, rect, budget):
    """Split a rectangle into two halves whose winding numbers are computable."""
    re0, re1, im0, im1 = rect
    horizontal = (re1 - re0) >= (im1 - im0)
    for frac in (0.5, 0.53, 0.47, 0.57, 0.43, 0.61):
        if horizontal:
            mid = re0 + frac * (re1 - re0)
            r1, r2 = (re0, mid, im0, im1), (mid, re1, im0, im1)
        else:
            mid = im0 + frac * (im1 - im0)
            r1, r2 = (re0, re1, im0, mid), (re0, re1, mid, im1)
        try:
            c1, _ = _winding(cf, r1, budget)
            c2, _ = _winding(cf, r2, budget)
            return (r1, c1), (r2, c2)
        except _BoundaryRootError:
            continue
    raise CountMismatchError("no admissible split line found")


def enumerate_roots(cf: CharacteristicFunction, rect, res_tol=DEFAULT_RES_TOL, seeds=None):
    """All characteristic roots inside `rect`, certified by winding count.

    Returns (roots, outer_count, rect_used, diagnostics).  Seeds are polished
    first; recursive bisection hunts down whatever they miss, and a final
    count comparison raises CountMismatchError on any disagreement.
    """
    log_tol = math.log10(res_tol)
    outer_count, rect_used, evals = _winding_nudged(cf, rect)
    diagnostics = {"winding_evals": evals, "subdivisions": 0, "newton_calls": 0}
    roots: list[_FoundRoot] = []
    if outer_count == 0:
        return roots, 0, rect_used, diagnostics

    seed_list = [np.asarray(seeds, complex)] if seeds is not None and len(seeds) else []
    seed_list.append(cf.quartic_roots())
    if cf.tau > 0:
        k_max = int(math.ceil(max(abs(rect_used[2]), abs(rect_used[3])) * cf.tau / (2 * math.pi))) + 2
        k_max = min(k_max, 100_000)
        seed_list.append(_chain_seeds(cf, k_max))
    cand = np.concatenate(seed_list) if seed_list else np.array([], complex)
    cand = np.concatenate([cand, np.conj(cand)])
    z, res, ok = newton_polish(cf, cand, log_tol)
    diagnostics["newton_calls"] += 1
    for zi, ri, oki in zip(z, res, ok):
        if oki and _in_rect(zi, rect_used):
            _dedupe_add(roots, zi, ri)

    if _count_inside(roots, rect_used) != outer_count:
        stack = [(rect_used, outer_count)]
        while stack:
            r, cnt = stack.pop()
            known = _count_inside(roots, r)
            if known == cnt:
                continue
            if known > cnt:
                raise CountMismatchError(
                    "more roots located than the winding count admits "
                    f"({known} > {cnt} in {r})"
                )
            re0, re1, im0, im1 = r
            center = complex(0.5 * (re0 + re1), 0.5 * (im0 + im1))
            diag = math.hypot(re1 - re0, im1 - im0)
            if diag <= 1e-8 * (1.0 + abs(center)):
                z, res, ok = newton_polish(cf, np.array([center]), log_tol, max_iter=200)
                zc = complex(z[0]) if ok[0] else center
                rc = float(res[0]) if ok[0] else float(cf.log10_residual(np.array([center]))[0])
                if not ok[0] and rc > log_tol + 4:
                    raise NoConvergenceError(f"Newton stagnated near {center}")
                _dedupe_add(roots, zc, rc, mult=cnt - known)
                continue
            # try local Newton starts before splitting further
            starts = np.array(
                [
                    center,
                    complex(re0 + 0.25 * (re1 - re0), im0 + 0.25 * (im1 - im0)),
                    complex(re0 + 0.75 * (re1 - re0), im0 + 0.25 * (im1 - im0)),
                    complex(re0 + 0.25 * (re1 - re0), im0 + 0.75 * (im1 - im0)),
                    complex(re0 + 0.75 * (re1 - re0), im0 + 0.75 * (im1 - im0)),
                ]
            )
            z, res, ok = newton_polish(cf, starts, log_tol)
            diagnostics["newton_calls"] += 1
            added = False
            for zi, ri, oki in zip(z, res, ok):
                if oki and _in_rect(zi, rect_used):
                    added |= _dedupe_add(roots, zi, ri)
            if added and _count_inside(roots, r) == cnt:
                continue
            (r1, c1), (r2, c2) = _split_rect(cf, r, budget=400_000)
            diagnostics["subdivisions"] += 1
            if c1 + c2 != cnt:
                raise CountMismatchError(
                    f"split counts {c1}+{c2} != parent count {cnt}"
                )
            stack.append((r1, c1))
            stack.append((r2, c2))

    total = sum(r.multiplicity for r in roots if _in_rect(r.z, rect_used))
    if total != outer_count:
        raise CountMismatchError(
            f"located {total} roots but the argument principle counts {outer_count}"
        )
    return roots, outer_count, rect_used, diagnostics


# ---------------------------------------------------------------------------
# public spectrum results


@dataclass(frozen=True)
class RootInfo:
    """One characteristic root (the Im >= 0 member of its conjugate pair)."""

    value: complex
    residual: float          # log10 of |det| / scale
    multiplicity: int
    has_conjugate: bool


@dataclass
class SpectrumResult:
    roots: list[RootInfo]
    max_re: float
    sigma_cut: float
    omega_max: float
    n_counted: int
    diagnostics: dict = field(default_factory=dict)


def _fold_conjugates(roots: list[_FoundRoot]) -> list[RootInfo]:
    pair_tol = 1e-6
    out: list[RootInfo] = []
    used = [False] * len(roots)
    order = sorted(range(len(roots)), key=lambda i: (-roots[i].z.real, abs(roots[i].z.imag)))
    for i in order:
        if used[i]:
            continue
        ri = roots[i]
        if abs(ri.z.imag) <= pair_tol * (1.0 + abs(ri.z)):
            out.append(RootInfo(complex(ri.z.real, 0.0), ri.log10_res, ri.multiplicity, False))
            used[i] = True
            continue
        mate = None
        for j in order:
            if j != i and not used[j] and abs(roots[j].z - ri.z.conjugate()) <= 1e-6 * (1.0 + abs(ri.z)):
                mate = j
                break
        rep = ri.z if ri.z.imag >= 0 else ri.z.conjugate()
        out.append(RootInfo(rep, ri.log10_res, ri.multiplicity, mate is not None))
        used[i] = True
        if mate is not None:
            used[mate] = True
    out.sort(key=lambda r: -r.value.real)
    return out


def rightmost_roots(
    lin: Linearization,
    tau: float,
    sigma_cut: float | None = None,
    omega_max: float | None = None,
    res_tol: float = DEFAULT_RES_TOL,
) -> SpectrumResult:
    """All characteristic roots with Re > -sigma_cut and |Im| <= omega_max.

    Completeness inside the rectangle is certified by the argument principle;
    every reported root is Newton-polished to the residual tolerance.  The
    right edge of the search rectangle is ||B|| + ||A|| + 1, beyond which no
    root can exist.  Defaults: sigma_cut = 2 max(kappa, omega) and
    omega_max = 10 omega, wide enough for every root that can matter for
    stability at the scales of the phase diagrams.
    """
    p = lin.params
    if sigma_cut is None:
        sigma_cut = 2.0 * max(p.kappa, p.omega)
    if omega_max is None:
        omega_max = 10.0 * p.omega
    if sigma_cut <= 0:
        raise DomainError("sigma_cut must be > 0")
    cf = CharacteristicFunction(lin, tau)
    re_hi = cf.norm_a + cf.norm_b + 1.0
    rect = (-float(sigma_cut), re_hi, -float(omega_max), float(omega_max))
    roots, n_counted, rect_used, diag = enumerate_roots(cf, rect, res_tol)
    folded = _fold_conjugates(roots)
    max_re = max((r.value.real for r in folded), default=-math.inf)
    diag["rect"] = rect_used
    return SpectrumResult(folded, max_re, float(sigma_cut), float(omega_max), n_counted, diag)


def max_real_part(
    lin: Linearization,
    tau: float,
    margin: float | None = None,
    certify: bool = True,
    res_tol: float = DEFAULT_RES_TOL,
) -> tuple[float, bool]:
    """Real part of the rightmost characteristic root, tuned for sweeps.

    Candidate roots come from the tau = 0 quartic, eig(B), and the
    exponential chains, all Newton-polished on the true characteristic
    function.  When `certify` is set, an argument-principle count over the
    band Re >= -1.25 margin checks that no root relevant to the stability
    label was missed; on mismatch the band is enumerated exhaustively.
    Roots deeper than the found maximum but left of the band may escape the
    value (never the sign against +-margin).
    """
    p = lin.params
    if margin is None:
        margin = 1e-4 * p.omega
    if lin.delay_free:
        eig = np.linalg.eigvals(lin.b_matrix + lin.a_matrix)
        return float(eig.real.max()), True
    cf = CharacteristicFunction(lin, tau)
    if tau == 0:
        z, res, ok = newton_polish(cf, cf.quartic_roots(), math.log10(res_tol))
        vals = z[ok] if ok.any() else cf.quartic_roots()
        return float(np.max(vals.real)), True

    i_cap = cf.norm_a + cf.norm_b + 6.0 * (2.0 * math.pi / tau)
    k_max = min(int(math.ceil(i_cap * tau / (2.0 * math.pi))) + 2, 50_000)
    seeds = np.concatenate(
        [cf.quartic_roots(), np.linalg.eigvals(lin.b_matrix), _chain_seeds(cf, k_max)]
    )
    z, res, ok = newton_polish(cf, seeds, math.log10(res_tol))
    found = z[ok]
    best = float(found.real.max()) if found.size else -math.inf
    if not certify:
        return best, False

    band_lo = -1.25 * margin
    im_hi = cf.norm_b + cf.norm_a * math.exp(min(-band_lo * tau, 50.0)) + 1.0
    band = (band_lo, cf.norm_a + cf.norm_b + 1.0, -im_hi, im_hi)
    n_band, band_used, _ = _winding_nudged(cf, band)
    in_band = sum(1 for zi in found if _in_rect(zi, band_used))
    if in_band != n_band:
        roots, _, _, _ = enumerate_roots(cf, band_used, res_tol, seeds=found)
        if roots:
            best = max(best, max(r.z.real for r in roots))
    return best, True


# ---------------------------------------------------------------------------
# analytic boundary machinery (small level splitting omega0 << omega, g0)


def hopf_frequency(p: ModelParams) -> float:
    """Oscillation frequency Omega = 4 g0^2 omega / (N (kappa^2 + omega^2)).

    In the small-splitting limit the spin deviations decouple from the field
    and oscillate at Omega; roots crossing the imaginary axis do so at
    L = +-i Omega.
    """
    if p.g0 < critical_coupling(p):
        raise BelowThresholdError(
            f"g0 = {p.g0:.6g} is below g_c = {critical_coupling(p):.6g}"
        )
    return 4.0 * p.g0**2 * p.omega / (p.n_atoms * (p.kappa**2 + p.omega**2))


@dataclass(frozen=True)
class BoundaryPoint:
    """A delay at which a conjugate root pair sits on the imaginary axis."""

    tau: float
    branch_k: int
    sign: int                # +1 / -1 branch of the square root
    omega_hopf: float
    c1: float
    c2: float
    c3: float
    residual: float          # relative defect of the boundary condition


def _c_coefficients(p: ModelParams, lam: float | None = None):
    lam = p.lam if lam is None else lam
    om = hopf_frequency(p)
    c1 = 2.0 * p.kappa * om + lam * p.kappa / (p.g0 * p.omega) * om**2
    c2 = 4.0 * p.g0 * lam
    c3 = lam * p.kappa / (p.g0 * p.omega) * om**2
    return om, c1, c2, c3


def _boundary_residual(theta, c1, c2, c3, sign, root):
    num = c2 * c3 + sign * c1 * root
    den = c1 * c1 - c2 * c2
    scale = math.hypot(num, den)
    if scale == 0.0:
        return 0.0
    return abs(math.sin(theta) * den - math.cos(theta) * num) / scale


def boundary_delays(p: ModelParams, k_max: int) -> list[BoundaryPoint]:
    """Delays 0 < tau solving tan(Omega tau) = (C2 C3 +- C1 sqrt(R)) / (C1^2 - C2^2).

    R = -C1^2 + C2^2 + C3^2 is the radicand; for R < 0 (feedback below the
    critical strength) there is no boundary and the list is empty.  Each
    branch k contributes tau = (theta + k pi)/Omega with theta the principal
    angle, which remains well defined when C1^2 = C2^2 (theta = pi/2 there).
    """
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    if p.lam == 0.0:
        return []
    om, c1, c2, c3 = _c_coefficients(p)
    radicand = -c1 * c1 + c2 * c2 + c3 * c3
    if radicand < 0.0:
        return []
    root = math.sqrt(radicand)
    den = c1 * c1 - c2 * c2
    points = []
    for sign in (1, -1):
        num = c2 * c3 + sign * c1 * root
        theta = math.atan2(num, den) % math.pi
        for k in range(k_max + 1):
            tau = (theta + k * math.pi) / om
            if tau <= 0.0:
                continue
            res = _boundary_residual(om * tau, c1, c2, c3, sign, root)
            points.append(BoundaryPoint(tau, k, sign, om, c1, c2, c3, res))
    points.sort(key=lambda b: b.tau)
    return points


def critical_feedback_strength(p: ModelParams) -> float:
    """Smallest lam > 0 at which the boundary radicand C2^2 + C3^2 - C1^2 reaches zero.

    Below this feedback strength no delay can destabilize the superradiant
    fixed point.  Found by bracketing and bisection to 1e-10 relative; for a
    lossless cavity (kappa = 0) the radicand is positive for any lam > 0 and
    the critical strength is zero.
    """
    if p.g0 < critical_coupling(p):
        raise BelowThresholdError(
            f"g0 = {p.g0:.6g} is below g_c = {critical_coupling(p):.6g}"
        )
    if p.kappa == 0.0:
        return 0.0

    def radicand(lam):
        _, c1, c2, c3 = _c_coefficients(p, lam)
        return -c1 * c1 + c2 * c2 + c3 * c3

    lo, hi = 0.0, 1.0
    for _ in range(200):
        if radicand(hi) > 0.0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NoConvergenceError("no positive radicand found while bracketing lam")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if radicand(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-10 * hi:
            break
    return 0.5 * (lo + hi)
