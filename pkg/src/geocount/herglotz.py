"""Matrix-valued Herglotz functions attached to Jacobi data, and their
boundary measures.

The function f carries the ratio of the two fundamental Jacobi solutions
(H = Xi f on the real axis); G = -f^{-1} has positive-definite imaginary part
on the upper half plane, and its boundary behaviour encodes a purely atomic
matrix measure that is recovered here by Poisson-kernel integration with
extrapolation in the regularization parameter.  Closed forms exist for
constant curvature; for general metrics only real-axis identities are
checked, since the complex extension is exactly the entire-tube hypothesis.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import (ConditioningError, ConvergenceError, DegeneracyError,
                     InputError, NumericalError, PoleError)

POLE_MARGIN = 1e-8
SAMPLING_POLE_MARGIN = 0.05
FD_STEP = 1e-5
COND_LIMIT = 1e12


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def symmetry_defect(F: np.ndarray) -> float:
    """Max-entry deviation of a matrix from (complex) symmetry."""
    return float(np.max(np.abs(F - F.T)))


def min_im_eigenvalue(F: np.ndarray) -> float:
    """Smallest eigenvalue of the symmetrized imaginary part."""
    return float(np.min(np.linalg.eigvalsh(_sym(np.imag(F)))))


# ---------------------------------------------------------------------------
# closed-form scalars for constant curvature
# ---------------------------------------------------------------------------

def _f_scalar(c: float, zeta: complex) -> complex:
    if c == 0:
        return zeta
    s = math.sqrt(abs(c))
    u = s * zeta
    if c > 0:
        if abs(u.imag) > 30.0:  # tan saturates; avoids overflow in sin/cos
            return 1j * math.copysign(1.0, u.imag) / s
        return cmath.tan(u) / s
    if abs(u.real) > 30.0:
        return math.copysign(1.0, u.real) / s
    return cmath.tanh(u) / s


def _g_scalar(c: float, zeta: complex) -> complex:
    """-1/f in closed form, regular at the poles of f."""
    if c == 0:
        return -1.0 / zeta
    s = math.sqrt(abs(c))
    u = s * zeta
    if c > 0:
        if abs(u.imag) > 30.0:
            return s * 1j * math.copysign(1.0, u.imag)
        return -s * cmath.cos(u) / cmath.sin(u)
    if abs(u.real) > 30.0:
        return -s * math.copysign(1.0, u.real)
    return -s * cmath.cosh(u) / cmath.sinh(u)


def _g_prime_scalar(c: float, sigma: float) -> float:
    """d/dsigma of -1/f on the real axis, in closed form."""
    if c == 0:
        return 1.0 / (sigma * sigma)
    s = math.sqrt(abs(c))
    if c > 0:
        return c / math.sin(s * sigma) ** 2
    return -c / math.sinh(s * sigma) ** 2


def _pole_family(offset: float, period: float, window) -> np.ndarray:
    lo, hi = window
    k_lo = math.ceil((lo - offset) / period)
    k_hi = math.floor((hi - offset) / period)
    return offset + period * np.arange(k_lo, k_hi + 1)


def f_pole_distance(c: float, zeta: complex) -> float:
    """Distance from zeta to the nearest pole of the closed-form f."""
    if c == 0:
        return math.inf
    s = math.sqrt(abs(c))
    if c > 0:  # poles at odd multiples of pi/(2s) on the real axis
        period = math.pi / s
        shifted = zeta.real - period / 2
        d_re = abs(shifted - round(shifted / period) * period)
        return math.hypot(d_re, zeta.imag)
    period = math.pi / s  # poles at odd multiples of i*pi/(2s)
    shifted = zeta.imag - period / 2
    d_im = abs(shifted - round(shifted / period) * period)
    return math.hypot(zeta.real, d_im)


def g_pole_distance(c: float, zeta: complex) -> float:
    """Distance from zeta to the nearest pole of the closed-form -1/f."""
    if c == 0:
        return abs(zeta)
    s = math.sqrt(abs(c))
    period = math.pi / s
    if c > 0:  # poles at multiples of pi/s on the real axis
        d_re = abs(zeta.real - round(zeta.real / period) * period)
        return math.hypot(d_re, zeta.imag)
    d_im = abs(zeta.imag - round(zeta.imag / period) * period)
    return math.hypot(zeta.real, d_im)


def f_constant_curvature(c: float, n: int, zeta: complex) -> np.ndarray:
    """Closed-form matrix f for constant curvature c: scalar profile times Id.

    zeta * Id for flat, tan-type for positive curvature, tanh-type (for
    contrast experiments; not Herglotz) for negative curvature.
    """
    zeta = complex(zeta)
    if f_pole_distance(c, zeta) < POLE_MARGIN:
        raise PoleError(
            f"herglotz.f_constant_curvature: zeta={zeta} within {POLE_MARGIN} "
            "of a pole")
    return _f_scalar(c, zeta) * np.eye(n - 1, dtype=complex)


# ---------------------------------------------------------------------------
# evaluator objects
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HerglotzMatrix:
    """Evaluator for a matrix function on the closed upper half plane.

    ``pole_set`` lists the real poles inside the working window;
    ``pole_distance`` is the proximity guard used before every evaluation.
    Sources backed by real-axis Jacobi data refuse complex arguments.
    """

    evaluator: Callable[[complex], np.ndarray]
    dim: int
    source: str  # "closed_form" | "real_axis_numeric"
    pole_set: np.ndarray
    pole_distance: Callable[[complex], float]
    window: tuple = (-12.0, 12.0)
    real_axis_only: bool = False
    curvature: float | None = None

    def __call__(self, zeta) -> np.ndarray:
        zeta = complex(zeta)
        if self.real_axis_only and zeta.imag != 0.0:
            raise InputError(
                "herglotz.HerglotzMatrix: real-axis numeric source evaluated "
                f"at zeta={zeta} off the real axis")
        if self.pole_distance(zeta) < POLE_MARGIN:
            raise PoleError(
                f"herglotz.HerglotzMatrix: zeta={zeta} within {POLE_MARGIN} of a pole")
        return self.evaluator(zeta)

    @classmethod
    def from_constant_curvature(cls, c: float, n: int, window=(-12.0, 12.0)):
        if c > 0:
            s = math.sqrt(c)
            poles = _pole_family(math.pi / (2 * s), math.pi / s, window)
        else:
            poles = np.array([])
        return cls(
            evaluator=lambda z: _f_scalar(c, z) * np.eye(n - 1, dtype=complex),
            dim=n - 1, source="closed_form", pole_set=poles,
            pole_distance=lambda z: f_pole_distance(c, z),
            window=tuple(window), curvature=float(c))

    @classmethod
    def from_jacobi(cls, js):
        xi_zeros = np.asarray(js.xi_zeros, dtype=float)

        def dist(z, zeros=xi_zeros):
            if len(zeros) == 0:
                return math.inf
            return float(np.min(np.abs(zeros - z.real))) if z.imag == 0 else math.inf

        return cls(
            evaluator=lambda z: f_real_axis_numeric(js, z.real).astype(complex),
            dim=js.dim, source="real_axis_numeric", pole_set=xi_zeros,
            pole_distance=dist, window=(0.0, js.T), real_axis_only=True)

    def neg_inverse_function(self) -> "HerglotzMatrix":
        """The G = -f^{-1} evaluator, with its own pole bookkeeping."""
        if self.source == "closed_form" and self.curvature is not None:
            c = self.curvature
            if c > 0:
                s = math.sqrt(c)
                poles = _pole_family(0.0, math.pi / s, self.window)
            else:
                poles = np.array([0.0]) if self.window[0] <= 0 <= self.window[1] \
                    else np.array([])
            return HerglotzMatrix(
                evaluator=lambda z: _g_scalar(c, z) * np.eye(self.dim, dtype=complex),
                dim=self.dim, source="closed_form", pole_set=poles,
                pole_distance=lambda z: g_pole_distance(c, z),
                window=self.window, curvature=c)
        inner = self
        return HerglotzMatrix(
            evaluator=lambda z: neg_inverse(inner(z)),
            dim=self.dim, source=self.source, pole_set=np.array([]),
            pole_distance=lambda z: math.inf, window=self.window,
            real_axis_only=self.real_axis_only, curvature=self.curvature)


def f_real_axis_numeric(js, sigma: float) -> np.ndarray:
    """f(sigma) = Xi(sigma)^{-1} H(sigma) from propagated Jacobi data.

    The poles of f sit where det Xi vanishes, so the proximity margin is
    measured against those zeros (det H zeros are zeros of f, harmless here).
    Symmetry of the result is a consequence of the frame being parallel and
    orthonormal, so it is asserted as a free consistency check.
    """
    zeros = np.asarray(js.xi_zeros, dtype=float)
    dist = math.inf if len(zeros) == 0 else float(np.min(np.abs(zeros - sigma)))
    if dist < 10 * 1e-10:
        raise InputError(
            f"herglotz.f_real_axis_numeric: sigma={sigma} within 10x detection "
            "tolerance of a pole of f")
    xi, _, h, _ = js.eval_at(sigma)
    cond = np.linalg.cond(xi)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ConditioningError(
            f"herglotz.f_real_axis_numeric: Xi({sigma}) condition {cond:.2e}, "
            f"distance {dist:.3e} to the nearest singular point",
            distance=dist)
    f = np.linalg.solve(xi, h)
    defect = symmetry_defect(f)
    if defect > 1e-8 * max(1.0, float(np.max(np.abs(f)))):
        raise NumericalError(
            f"herglotz.f_real_axis_numeric: symmetry defect {defect:.3e} at "
            f"sigma={sigma} (frame inconsistency)")
    return f


def neg_inverse(F: np.ndarray) -> np.ndarray:
    """-F^{-1} for a complex symmetric matrix with well-conditioned F.

    When Im F is positive definite the imaginary part of the result must be
    positive definite as well; that propagation is asserted post hoc.
    """
    F = np.asarray(F, dtype=complex)
    cond = np.linalg.cond(F)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise DegeneracyError(f"herglotz.neg_inverse: condition number {cond:.2e}")
    G = -np.linalg.inv(F)
    scale = max(1.0, float(np.max(np.abs(F))))
    if symmetry_defect(F) <= 1e-8 * scale:
        im_in = min_im_eigenvalue(F)
        if im_in > 0:
            im_out = min_im_eigenvalue(G)
            if im_out < -1e-10 * max(1.0, float(np.max(np.abs(G)))):
                raise NumericalError(
                    "herglotz.neg_inverse: positive-definite imaginary part "
                    f"not propagated (min eig {im_out:.3e})")
    return G


# ---------------------------------------------------------------------------
# identity and positivity checks
# ---------------------------------------------------------------------------

def _f_from_source(source, sigma: float) -> np.ndarray:
    if hasattr(source, "xi_zeros"):
        return f_real_axis_numeric(source, sigma)
    xi, _, h, _ = source.eval_at(sigma)
    cond = np.linalg.cond(xi)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ConditioningError(
            f"herglotz: Xi({sigma}) condition {cond:.2e} too large to invert")
    return np.linalg.solve(xi, h)


def check_theorem_nice(Fh: HerglotzMatrix, sample_zeta) -> dict:
    """Report symmetry, normalization at 0, and imaginary-part positivity.

    f(0) must vanish, f'(0) must be the identity (finite differences), and
    Im f must be positive definite at every upper-half-plane sample.
    """
    eye = np.eye(Fh.dim)
    samples = [complex(z) for z in sample_zeta]
    sym = 0.0
    min_eig = math.inf
    max_real_im = 0.0
    n_upper = 0
    for z in samples:
        F = Fh(z)
        sym = max(sym, symmetry_defect(F))
        if z.imag > 0:
            n_upper += 1
            min_eig = min(min_eig, min_im_eigenvalue(F))
        else:
            max_real_im = max(max_real_im, float(np.max(np.abs(np.imag(F)))))
    f0 = Fh(0.0)
    h = FD_STEP
    if Fh.real_axis_only:
        fprime = (4.0 * Fh(h) - Fh(2 * h) - 3.0 * f0) / (2 * h)
    else:
        fprime = (Fh(h) - Fh(-h)) / (2 * h)
    return {
        "symmetry_defect": sym,
        "f_zero_norm": float(np.max(np.abs(f0))),
        "fprime_zero_defect": float(np.max(np.abs(fprime - eye))),
        "min_im_eigenvalue": None if n_upper == 0 else min_eig,
        "max_real_axis_im": max_real_im,
        "samples": len(samples),
    }


def _fd_step(source, sigma: float) -> float:
    """Centered-difference step, shrunk near singular points.

    Both f and -1/f blow up like 1/d at distance d from their poles; a step
    proportional to d keeps the relative truncation error flat instead of
    letting it grow like 1/d^2.
    """
    scale = max(1.0, abs(sigma))
    dist = source.distance_to_singular(sigma)
    if math.isfinite(dist):
        scale = min(scale, max(0.5 * dist, 1e-3))
    return FD_STEP * scale


def check_key1(source, sigma: float) -> float:
    """Residual of det(H^T H) * det((-f^{-1})'(sigma)) = 1.

    The derivative of -f^{-1} uses centered differences with a locally scaled
    step; ``source`` is any Jacobi data provider (propagated system or closed
    form).
    """
    h = _fd_step(source, sigma)
    if sigma - h <= 0:
        raise InputError(f"herglotz.check_key1: sigma={sigma} too close to 0")
    g_plus = -np.linalg.inv(_f_from_source(source, sigma + h))
    g_minus = -np.linalg.inv(_f_from_source(source, sigma - h))
    gprime = (g_plus - g_minus) / (2 * h)
    _, _, H, _ = source.eval_at(sigma)
    val = float(np.linalg.det(H.T @ H) * np.linalg.det(gprime))
    return abs(val - 1.0)


def check_xi_identity(source, sigma: float) -> float:
    """Residual of (Xi^T Xi) f'(sigma) = Id with a finite-difference f'."""
    h = _fd_step(source, sigma)
    if sigma - h <= 0:
        raise InputError(f"herglotz.check_xi_identity: sigma={sigma} too close to 0")
    fprime = (_f_from_source(source, sigma + h)
              - _f_from_source(source, sigma - h)) / (2 * h)
    xi, _, _, _ = source.eval_at(sigma)
    k = xi.shape[0]
    return float(np.max(np.abs(xi.T @ xi @ fprime - np.eye(k))))


def minkowski_det_lower_bound(A1, A2) -> float:
    """det(A1+A2) - det A1 - det A2 for positive semidefinite inputs.

    Superadditivity of the determinant on the PSD cone makes the margin
    nonnegative up to round-off.
    """
    A1 = np.asarray(A1, dtype=float)
    A2 = np.asarray(A2, dtype=float)
    if A1.shape != A2.shape or A1.ndim != 2 or A1.shape[0] != A1.shape[1]:
        raise InputError("herglotz.minkowski_det_lower_bound: need two square "
                         "matrices of equal shape")
    for name, A in (("A1", A1), ("A2", A2)):
        scale = max(1.0, float(np.max(np.abs(A))))
        if float(np.max(np.abs(A - A.T))) > 1e-8 * scale:
            raise InputError(f"herglotz.minkowski_det_lower_bound: {name} not symmetric")
        if float(np.min(np.linalg.eigvalsh(_sym(A)))) < -1e-10 * scale:
            raise InputError(f"herglotz.minkowski_det_lower_bound: {name} not PSD")
    return float(np.linalg.det(A1 + A2) - np.linalg.det(A1) - np.linalg.det(A2))


class DetBound(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


def det_growth_bound(c: float, n: int, sigma: float) -> DetBound:
    """Compare 1/det((-f^{-1})') with sigma^(2n-2) at real sigma > 0.

    Flat curvature saturates the bound exactly; positive curvature stays
    strictly below it.  Negative curvature (contrast case) violates it for
    large sigma, as it must.
    """
    if sigma <= 0:
        raise InputError(f"herglotz.det_growth_bound: sigma={sigma} must be positive")
    rhs = sigma ** (2 * n - 2)
    if c == 0:
        lhs = sigma ** (2 * n - 2)  # analytic simplification; exact equality
        return DetBound(lhs, rhs, True)
    if g_pole_distance(c, complex(sigma)) < POLE_MARGIN:
        raise PoleError(f"herglotz.det_growth_bound: sigma={sigma} too close to a pole")
    s = math.sqrt(abs(c))
    if c > 0:
        lhs = (math.sin(s * sigma) ** 2 / c) ** (n - 1)
    else:
        lhs = (math.sinh(s * sigma) ** 2 / -c) ** (n - 1)
    return DetBound(lhs, rhs, bool(lhs <= rhs + 1e-10))


def check_b_decomposition(c: float, n: int, sigma: float) -> float:
    """Min eigenvalue of (-f^{-1})'(sigma) - Id/sigma^2 (must be >= 0).

    Removing the atom at the origin from the derivative representation leaves
    a positive semidefinite remainder.
    """
    if sigma == 0:
        raise InputError("herglotz.check_b_decomposition: sigma must be nonzero")
    gp = _g_prime_scalar(c, sigma)
    return gp - 1.0 / (sigma * sigma)


def adapted_complex_structure_at(Fh: HerglotzMatrix) -> np.ndarray:
    """Matrix of the complex structure on the span of the two parallel frames.

    With W = f(i) = X + iY, the structure maps the first frame block by
    columns of [-X Y^{-1}; Y^{-1}]; the second block is forced by J^2 = -Id.
    """
    W = Fh(1j)
    X = _sym(np.real(W))
    Y = _sym(np.imag(W))
    eig = np.linalg.eigvalsh(Y)
    if np.min(np.abs(eig)) < 1e-12 * max(1.0, float(np.max(np.abs(eig)))):
        raise DegeneracyError(
            "herglotz.adapted_complex_structure_at: Im f(i) numerically singular")
    E = np.linalg.inv(Y)
    k = Fh.dim
    J = np.block([[-X @ E, -(Y + X @ E @ X)], [E, E @ X]])
    defect = float(np.max(np.abs(J @ J + np.eye(2 * k))))
    if defect > 1e-8:
        raise NumericalError(
            f"herglotz.adapted_complex_structure_at: J^2 defect {defect:.3e}")
    return J


# ---------------------------------------------------------------------------
# boundary-measure recovery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FatouData:
    """Derivative representation data: constant part A and point masses.

    F'(zeta) = A + (1/pi) * sum_j mass_j / (zeta - t_j)^2 for the recovered
    atoms (t_j, mass_j); ``continuous_mass`` is the residual boundary mass
    found away from all atoms (flagged when non-negligible, since the model
    is purely atomic).
    """

    A: np.ndarray
    atoms: tuple  # ((t, mass matrix), ...)
    tau_schedule: tuple
    interval: tuple
    continuous_mass: float = 0.0
    has_continuous_part: bool = False

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if float(np.min(np.linalg.eigvalsh(_sym(A)))) < -1e-10:
            raise NumericalError(
                "herglotz.FatouData: constant part A not PSD within tolerance")
        for t, m in self.atoms:
            if float(np.min(np.linalg.eigvalsh(_sym(np.asarray(m))))) < -1e-10:
                raise NumericalError(
                    f"herglotz.FatouData: atom mass at t={t} not PSD within tolerance")
        object.__setattr__(self, "A", A)

    @property
    def locations(self) -> np.ndarray:
        return np.array([t for t, _ in self.atoms])

    def to_dict(self) -> dict:
        return {
            "A": self.A.tolist(),
            "atoms": [{"t": float(t), "mass_matrix": np.asarray(m).tolist()}
                      for t, m in self.atoms],
            "tau_schedule": list(self.tau_schedule),
            "interval": list(self.interval),
            "continuous_mass": self.continuous_mass,
            "has_continuous_part": self.has_continuous_part,
        }


def _golden_max(f, a, b, tol=1e-8):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _window_mass(Fh, t, delta, tau):
    """Matrix integral of Im F(sigma + i tau) over (t-delta, t+delta)."""
    npts = int(max(61, min(40001, 2 * delta / (tau / 6.0) + 1)))
    grid = np.linspace(t - delta, t + delta, npts)
    vals = np.stack([np.imag(Fh(complex(s, tau))) for s in grid])
    return np.trapezoid(vals, grid, axis=0)


def stieltjes_invert(Fh: HerglotzMatrix, interval, tau_schedule=(1e-1, 1e-2, 1e-3),
                     atom_threshold: float = 0.1) -> FatouData:
    """Recover the boundary measure of a Herglotz matrix function.

    The constant part A comes from the large-argument limit of
    Im F(i tau)/tau, extrapolated quadratically in 1/tau.  Atoms are the
    local maxima of trace Im F(sigma + i tau) above atom_threshold/tau at the
    smallest tau, refined by golden-section search; each mass is the window
    integral of Im F extrapolated linearly in tau (the Poisson smoothing
    error at an isolated atom is O(tau)).  Disagreement above 5% between
    successive extrapolants raises ConvergenceError.
    """
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise InputError(f"herglotz.stieltjes_invert: empty interval ({a}, {b})")
    taus = tuple(float(t) for t in tau_schedule)
    if any(t2 >= t1 for t1, t2 in zip(taus, taus[1:])) or taus[-1] > 1e-3:
        raise InputError(
            "herglotz.stieltjes_invert: tau_schedule must decrease strictly "
            "to <= 1e-3")
    if len(taus) < 3:
        raise InputError("herglotz.stieltjes_invert: need >= 3 tau values")
    for endpoint in (a, b):
        if len(Fh.pole_set) and float(np.min(np.abs(Fh.pole_set - endpoint))) \
                < SAMPLING_POLE_MARGIN:
            raise InputError(
                f"herglotz.stieltjes_invert: interval endpoint {endpoint} within "
                f"{SAMPLING_POLE_MARGIN} of a pole")
    k = Fh.dim

    # constant part from the large-tau limit
    taus_A = (1e2, 1e3, 1e4)
    xs = np.array([1.0 / t for t in taus_A])
    V = np.stack([np.imag(Fh(complex(0.0, t))) / t for t in taus_A])
    coef = np.polynomial.polynomial.polyfit(xs, V.reshape(3, -1), 2)
    A_quad = _sym(coef[0].reshape(k, k))
    A_lin = _sym((V[2] * xs[1] - V[1] * xs[2]) / (xs[1] - xs[2]))
    drift = float(np.max(np.abs(A_quad - A_lin)))
    if drift > max(0.05 * float(np.max(np.abs(A_quad))), 1e-4):
        raise ConvergenceError(
            f"herglotz.stieltjes_invert: A extrapolants differ by {drift:.3e}")

    # atom scan at the smallest tau
    tau_min = taus[-1]
    h_scan = min(tau_min / 2.0, (b - a) / 2000.0)
    npts = int(math.ceil((b - a) / h_scan)) + 1
    grid = np.linspace(a, b, npts)
    trace = np.array([float(np.trace(np.imag(Fh(complex(s, tau_min)))))
                      for s in grid])
    threshold = atom_threshold / tau_min
    locations = []
    for j in range(1, npts - 1):
        if trace[j] > threshold and trace[j] >= trace[j - 1] and trace[j] >= trace[j + 1]:
            t = _golden_max(
                lambda s: float(np.trace(np.imag(Fh(complex(s, tau_min))))),
                grid[j - 1], grid[j + 1])
            if not locations or t - locations[-1] > 50 * h_scan:
                locations.append(t)

    # masses by windowed Poisson integrals, extrapolated linearly in tau
    atoms = []
    boundaries = [a] + locations + [b]
    for idx, t in enumerate(locations):
        gap = min(t - boundaries[idx], boundaries[idx + 2] - t)
        delta = min(0.5, 0.4 * gap)
        usable = [tau for tau in taus if tau <= delta / 3.0]
        if len(usable) < 2:
            raise ConvergenceError(
                f"herglotz.stieltjes_invert: atom at t={t:.6f} too close to its "
                "neighbours for the tau schedule")
        masses = [_window_mass(Fh, t, delta, tau) for tau in usable]

        def extrap(m1, m2, t1, t2):
            return (m2 * t1 - m1 * t2) / (t1 - t2)

        fine = extrap(masses[-2], masses[-1], usable[-2], usable[-1])
        if len(usable) >= 3:
            coarse = extrap(masses[-3], masses[-2], usable[-3], usable[-2])
            diff = float(np.max(np.abs(fine - coarse)))
            if diff > 0.05 * max(float(np.max(np.abs(fine))), 1e-3):
                raise ConvergenceError(
                    f"herglotz.stieltjes_invert: mass extrapolants at t={t:.6f} "
                    f"differ by {diff:.3e}")
        atoms.append((float(t), _sym(fine)))

    # residual boundary mass away from every atom window
    cont = 0.0
    step = (b - a) / 4000.0
    for j in range(4001):
        s = a + j * step
        if locations and min(abs(s - t) for t in locations) < 0.4:
            continue
        cont += step * float(np.trace(np.imag(Fh(complex(s, tau_min)))))
    flagged = cont > 0.05 * (b - a)

    return FatouData(A=A_quad, atoms=tuple(atoms), tau_schedule=taus,
                     interval=(a, b), continuous_mass=cont,
                     has_continuous_part=bool(flagged))


def fatou_reconstruct(fd: FatouData, zeta: complex) -> np.ndarray:
    """Evaluate the derivative representation A + (1/pi) sum mass/(zeta-t)^2."""
    zeta = complex(zeta)
    if zeta.imag <= 0:
        raise InputError(
            f"herglotz.fatou_reconstruct: zeta={zeta} must lie in the upper half plane")
    out = fd.A.astype(complex).copy()
    for t, m in fd.atoms:
        out = out + np.asarray(m) / (math.pi * (zeta - t) ** 2)
    return out
