"""Unit-speed geodesics and matrix Jacobi fields along them.

Everything is sampled on a uniform arc-length grid.  The two fundamental
matrix solutions of Y'' + K(sigma) Y = 0 are propagated together with
classical fixed-step RK4: one with (Id, 0) initial data and one with (0, Id),
in a parallel orthonormal frame of the normal space.  Cubic Hermite dense
output (exact to the integrator's order) supports evaluation between samples
and the refinement of determinant zeros.
"""

import csv
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import maximum_filter1d
from scipy.optimize import brentq

from . import manifolds as mf
from .errors import (ConfigurationError, DomainError, InputError,
                     IntegrationFailureError)

WRONSKIAN_TOL = 1e-8
SPEED_DRIFT_TOL = 1e-6
DET_ZERO_REL = 1e-8      # |det| threshold relative to (local matrix norm)^k
SIGMA_REFINE_TOL = 1e-10


def _grid(T: float, step: float) -> np.ndarray:
    if T <= 0 or step <= 0:
        raise InputError(f"flow: parameters T={T}, step={step} must be positive")
    if step > T:
        raise InputError(f"flow: parameter step={step} exceeds T={T}")
    m = max(1, int(math.ceil(T / step - 1e-12)))
    return np.linspace(0.0, T, m + 1)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def closed_form_jacobi(c: float, sigma: float, n: int):
    """Exact (Xi, Xi', H, H') for constant curvature c in dimension n.

    The solutions of Y'' = -c Y with (Id, 0) and (0, Id) data: cosine/sine
    families for c > 0, linear for c = 0, hyperbolic for c < 0.
    """
    k = n - 1
    eye = np.eye(k)
    if c > 0:
        s = math.sqrt(c)
        return (
            math.cos(s * sigma) * eye,
            -s * math.sin(s * sigma) * eye,
            math.sin(s * sigma) / s * eye,
            math.cos(s * sigma) * eye,
        )
    if c < 0:
        s = math.sqrt(-c)
        return (
            math.cosh(s * sigma) * eye,
            s * math.sinh(s * sigma) * eye,
            math.sinh(s * sigma) / s * eye,
            math.cosh(s * sigma) * eye,
        )
    return eye.copy(), 0.0 * eye, sigma * eye, eye.copy()


@dataclass(frozen=True)
class ClosedFormJacobi:
    """Closed-form Jacobi data for constant curvature, same shape as a system."""

    c: float
    n: int

    @property
    def dim(self) -> int:
        return self.n - 1

    def eval_at(self, sigma: float):
        return closed_form_jacobi(self.c, sigma, self.n)

    def distance_to_singular(self, sigma: float) -> float:
        if self.c > 0:
            s = math.sqrt(self.c)
            period = math.pi / s
            d_h = abs(sigma - round(sigma / period) * period)
            shifted = sigma - period / 2
            d_xi = abs(shifted - round(shifted / period) * period)
            return min(d_h, d_xi)
        return abs(sigma)  # det H vanishes at 0 only; Xi never degenerates


# ---------------------------------------------------------------------------
# geodesic trajectories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeodesicTrajectory:
    """Sampled unit-speed geodesic with a parallel orthonormal normal frame."""

    spec: mf.ManifoldSpec
    x0: np.ndarray
    theta0: np.ndarray
    sigma: np.ndarray      # (m+1,)
    positions: np.ndarray  # (m+1, d); torus positions are wrapped
    velocities: np.ndarray
    frames: np.ndarray     # (m+1, n-1, d)
    step: float

    @property
    def T(self) -> float:
        return float(self.sigma[-1])


def _normal_frame_at(spec, x, theta):
    """Orthonormal basis of the normal space of theta inside T_x M."""
    basis = mf.tangent_frame(spec, x)
    frame = []
    for cand in basis:
        v = cand - theta * mf.metric_dot(spec, x, cand, theta)
        for e in frame:
            v = v - e * mf.metric_dot(spec, x, v, e)
        norm2 = mf.metric_dot(spec, x, v, v)
        if norm2 > 1e-8:
            frame.append(v / math.sqrt(norm2))
        if len(frame) == spec.n - 1:
            break
    if len(frame) != spec.n - 1:
        raise InputError("flow.integrate_geodesic: could not complete a normal frame")
    return np.array(frame)


def _check_trajectory(spec, sigma, positions, velocities, frames):
    for j in range(len(sigma)):
        x, v = positions[j], velocities[j]
        drift = abs(mf.metric_dot(spec, x, v, v) - 1.0)
        if drift > SPEED_DRIFT_TOL:
            raise IntegrationFailureError(
                f"flow.integrate_geodesic: unit-speed drift {drift:.3e} at "
                f"sigma={sigma[j]:.6f}", sigma=float(sigma[j]))
    # frame orthonormality and normality to the velocity, spot-checked on a
    # subsample (parallel transport is exact for every closed-form branch)
    idx = np.unique(np.linspace(0, len(sigma) - 1, min(len(sigma), 64)).astype(int))
    for j in idx:
        x, v, E = positions[j], velocities[j], frames[j]
        k = E.shape[0]
        defect = 0.0
        for a in range(k):
            defect = max(defect, abs(mf.metric_dot(spec, x, E[a], v)))
            for b in range(a, k):
                g = mf.metric_dot(spec, x, E[a], E[b])
                defect = max(defect, abs(g - (1.0 if a == b else 0.0)))
        if defect > 1e-8:
            raise IntegrationFailureError(
                f"flow.integrate_geodesic: frame orthonormality defect "
                f"{defect:.3e} at sigma={sigma[j]:.6f}", sigma=float(sigma[j]))


def integrate_geodesic(spec, x, theta, T, step):
    """Integrate the unit-speed geodesic with gamma(0)=x, gamma'(0)=theta.

    Constant-curvature members run RK4 on the ambient quadric model (the
    acceleration is -c * g(v,v) * x and parallel transport keeps tangent
    vectors quadric-tangent); flat tori are straight lines in the universal
    cover wrapped back to the fundamental domain; warped products support
    radial rays, integrated exactly.
    """
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    mf.require_unit_direction(spec, x, theta)
    sigma = _grid(T, step)
    m = len(sigma) - 1
    h = sigma[1] - sigma[0]
    k = spec.n - 1

    if spec.kind == mf.FLAT_TORUS:
        raw = x[None, :] + sigma[:, None] * theta[None, :]
        positions = np.array([mf.torus_wrap(spec.basis, p) for p in raw])
        velocities = np.tile(theta, (m + 1, 1))
        frames = np.tile(_normal_frame_at(spec, x, theta), (m + 1, 1, 1))
    elif spec.kind == mf.WARPED_PRODUCT:
        if abs(abs(theta[0]) - 1.0) > 1e-10 or np.linalg.norm(theta[1:]) > 1e-10:
            raise ConfigurationError(
                "flow.integrate_geodesic: warped products support radial "
                "directions only")
        sign = 1.0 if theta[0] > 0 else -1.0
        r = x[0] + sign * sigma
        lo, hi = spec.warp.domain
        if np.any(r <= lo) or np.any(r >= hi):
            bad = float(r[(r <= lo) | (r >= hi)][0])
            raise DomainError(
                f"flow.integrate_geodesic: warp '{spec.warp.name}' leaves its "
                f"domain ({lo}, {hi}) at r={bad}")
        positions = np.tile(x, (m + 1, 1))
        positions[:, 0] = r
        velocities = np.tile(theta, (m + 1, 1))
        y = x[1:]
        fiber = _normal_frame_at(spec, x, theta)[:, 1:] * spec.warp.value(x[0])
        frames = np.zeros((m + 1, k, 1 + spec.n))
        for j in range(m + 1):
            w = spec.warp.value(r[j])
            frames[j, :, 1:] = fiber / w
    elif spec.kind == mf.CONSTANT_CURVATURE:
        sig = mf.ambient_signature(spec)
        c = spec.c
        E0 = _normal_frame_at(spec, x, theta)
        d = len(x)
        state = np.concatenate([x, theta, E0.ravel()])

        def deriv(s):
            xx = s[:d]
            vv = s[d:2 * d]
            EE = s[2 * d:].reshape(k, d)
            acc = -c * float(np.sum(sig * vv * vv)) * xx
            dE = -c * (EE @ (sig * vv)).reshape(k, 1) * xx[None, :]
            return np.concatenate([vv, acc, dE.ravel()])

        states = np.empty((m + 1, len(state)))
        states[0] = state
        for j in range(m):
            k1 = deriv(state)
            k2 = deriv(state + 0.5 * h * k1)
            k3 = deriv(state + 0.5 * h * k2)
            k4 = deriv(state + h * k3)
            state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            states[j + 1] = state
        positions = states[:, :d]
        velocities = states[:, d:2 * d]
        frames = states[:, 2 * d:].reshape(m + 1, k, d)
    else:
        raise ConfigurationError(f"flow.integrate_geodesic: unknown kind {spec.kind}")

    _check_trajectory(spec, sigma, positions, velocities, frames)
    return GeodesicTrajectory(spec, x, theta, sigma, positions, velocities, frames, h)


# ---------------------------------------------------------------------------
# Jacobi systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JacobiSystem:
    """The two fundamental matrix Jacobi solutions on a trajectory's grid.

    Xi has (Id, 0) initial data, H has (0, Id).  ``singular_set`` lists the
    detected zeros of det Xi and det H (the conjugate-point locations live in
    ``h_zeros``).
    """

    spec: mf.ManifoldSpec
    trajectory: GeodesicTrajectory
    kop: mf.CurvatureFrameOperator
    sigma: np.ndarray
    xi: np.ndarray   # (m+1, k, k)
    dxi: np.ndarray
    h: np.ndarray
    dh: np.ndarray
    det_xi: np.ndarray
    det_h: np.ndarray
    xi_zeros: np.ndarray
    h_zeros: np.ndarray
    singular_set: np.ndarray
    step: float

    @property
    def dim(self) -> int:
        return self.xi.shape[1]

    @property
    def T(self) -> float:
        return float(self.sigma[-1])

    def _bracket(self, sigma: float) -> int:
        if sigma < self.sigma[0] - 1e-12 or sigma > self.sigma[-1] + 1e-12:
            raise InputError(
                f"flow.JacobiSystem: sigma={sigma} outside grid "
                f"[{self.sigma[0]}, {self.sigma[-1]}]")
        j = int(np.searchsorted(self.sigma, sigma, side="right")) - 1
        return min(max(j, 0), len(self.sigma) - 2)

    def eval_at(self, sigma: float):
        """Dense output: cubic Hermite in each cell, O(step^4) accurate."""
        j = self._bracket(sigma)
        hcell = self.sigma[j + 1] - self.sigma[j]
        t = (sigma - self.sigma[j]) / hcell
        h00 = 2 * t**3 - 3 * t**2 + 1
        h10 = t**3 - 2 * t**2 + t
        h01 = -2 * t**3 + 3 * t**2
        h11 = t**3 - t**2
        kap0 = float(self.kop.profile(self.sigma[j]))
        kap1 = float(self.kop.profile(self.sigma[j + 1]))
        out = []
        for Y, DY in ((self.xi, self.dxi), (self.h, self.dh)):
            val = (h00 * Y[j] + h10 * hcell * DY[j]
                   + h01 * Y[j + 1] + h11 * hcell * DY[j + 1])
            dval = (h00 * DY[j] + h10 * hcell * (-kap0 * Y[j])
                    + h01 * DY[j + 1] + h11 * hcell * (-kap1 * Y[j + 1]))
            out.extend([val, dval])
        return out[0], out[1], out[2], out[3]

    def distance_to_singular(self, sigma: float) -> float:
        if len(self.singular_set) == 0:
            return math.inf
        return float(np.min(np.abs(self.singular_set - sigma)))


def _rk4_linear_second_order(kprofile, sigma, y0, dy0, nsub=1):
    """RK4 for Y'' = -kappa(sigma) Y on a given grid, any batch shape.

    ``kprofile`` maps an array of sigmas to the scalar curvature profile;
    y0/dy0 may carry leading batch axes.  Returns values at the grid points.
    """
    m = len(sigma) - 1
    Y = np.array(y0, dtype=float)
    DY = np.array(dy0, dtype=float)
    out_y = np.empty((m + 1,) + Y.shape)
    out_dy = np.empty_like(out_y)
    out_y[0], out_dy[0] = Y, DY
    for j in range(m):
        h = (sigma[j + 1] - sigma[j]) / nsub
        for q in range(nsub):
            s0 = sigma[j] + q * h
            ka = float(kprofile(s0))
            km = float(kprofile(s0 + 0.5 * h))
            kb = float(kprofile(s0 + h))
            k1y, k1d = DY, -ka * Y
            y2, d2 = Y + 0.5 * h * k1y, DY + 0.5 * h * k1d
            k2y, k2d = d2, -km * y2
            y3, d3 = Y + 0.5 * h * k2y, DY + 0.5 * h * k2d
            k3y, k3d = d3, -km * y3
            y4, d4 = Y + h * k3y, DY + h * k3d
            k4y, k4d = d4, -kb * y4
            Y = Y + (h / 6.0) * (k1y + 2 * k2y + 2 * k3y + k4y)
            DY = DY + (h / 6.0) * (k1d + 2 * k2d + 2 * k3d + k4d)
        out_y[j + 1], out_dy[j + 1] = Y, DY
    return out_y, out_dy


def _golden_min(f, a, b, tol=SIGMA_REFINE_TOL):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _detect_det_zeros(js_sigma, dets, norms, det_interp, k, h):
    """Zeros of a determinant sample sequence, refined to SIGMA_REFINE_TOL.

    Sign changes bracket simple zeros (Brent); near-zero local minima catch
    even-order zeros.  The accept threshold scales with the k-th power of the
    matrix norm over a half-unit window, per the detector contract.
    """
    window = 2 * max(1, int(round(0.5 / h))) + 1
    local = maximum_filter1d(np.maximum(norms, 1e-3), size=window, mode="nearest")
    thr = DET_ZERO_REL * local**k
    zeros = []
    absd = np.abs(dets)
    m = len(dets) - 1
    if absd[0] <= thr[0]:
        zeros.append(js_sigma[0])
    if absd[m] <= thr[m]:
        zeros.append(js_sigma[m])
    for j in range(m):
        if dets[j] == 0.0 and js_sigma[j] not in zeros:
            zeros.append(js_sigma[j])
        elif dets[j] * dets[j + 1] < 0.0:
            zeros.append(brentq(det_interp, js_sigma[j], js_sigma[j + 1],
                                xtol=SIGMA_REFINE_TOL))
    for j in range(1, m):
        if absd[j] < absd[j - 1] and absd[j] <= absd[j + 1]:
            if dets[j - 1] * dets[j] < 0 or dets[j] * dets[j + 1] < 0:
                continue  # already handled as a sign change
            if absd[j] > 1e-4 * local[j]**k:
                continue
            s = _golden_min(lambda t: abs(det_interp(t)),
                            js_sigma[j - 1], js_sigma[j + 1])
            if abs(det_interp(s)) <= thr[j]:
                zeros.append(s)
    zeros = sorted(zeros)
    merged = []
    for z in zeros:
        if not merged or z - merged[-1] > 10 * SIGMA_REFINE_TOL:
            merged.append(z)
    return np.array(merged)


def propagate_jacobi(spec, traj: GeodesicTrajectory, step: float | None = None):
    """Propagate both fundamental Jacobi solutions on the trajectory's grid.

    ``step`` (default: the trajectory step) may subdivide each grid cell.
    Raises IntegrationFailureError when the Wronskian or the finite-difference
    second-order residual exceeds its tolerance.
    """
    k = spec.n - 1
    kop = mf.curvature_along(spec, (traj.x0, traj.theta0))
    hgrid = traj.step
    if step is None:
        step = hgrid
    if step <= 0:
        raise InputError(f"flow.propagate_jacobi: parameter step={step} must be positive")
    nsub = max(1, int(round(hgrid / step)))

    y0 = np.concatenate([np.eye(k), np.zeros((k, k))], axis=1)   # [Xi | H]
    dy0 = np.concatenate([np.zeros((k, k)), np.eye(k)], axis=1)
    Y, DY = _rk4_linear_second_order(kop.profile, traj.sigma, y0, dy0, nsub=nsub)
    xi, h = Y[:, :, :k], Y[:, :, k:]
    dxi, dh = DY[:, :, :k], DY[:, :, k:]

    det_xi = np.linalg.det(xi)
    det_h = np.linalg.det(h)

    js = JacobiSystem(
        spec=spec, trajectory=traj, kop=kop, sigma=traj.sigma,
        xi=xi, dxi=dxi, h=h, dh=dh, det_xi=det_xi, det_h=det_h,
        xi_zeros=np.array([]), h_zeros=np.array([]),
        singular_set=np.array([]), step=hgrid / nsub,
    )

    drift = wronskian_drift(js)
    if drift > WRONSKIAN_TOL:
        raise IntegrationFailureError(
            f"flow.propagate_jacobi: Wronskian drift {drift:.3e} exceeds "
            f"{WRONSKIAN_TOL}")
    resid = jacobi_residual(js)
    if resid > 1e-4 * js.step:
        raise IntegrationFailureError(
            f"flow.propagate_jacobi: Jacobi residual {resid:.3e} exceeds "
            f"{1e-4 * js.step:.3e}")

    norm_xi = np.max(np.abs(xi), axis=(1, 2))
    norm_h = np.max(np.abs(h), axis=(1, 2))
    xz = _detect_det_zeros(traj.sigma, det_xi, norm_xi,
                           lambda s: float(np.linalg.det(js.eval_at(s)[0])), k, hgrid)
    hz = _detect_det_zeros(traj.sigma, det_h, norm_h,
                           lambda s: float(np.linalg.det(js.eval_at(s)[2])), k, hgrid)
    sing = np.unique(np.concatenate([xz, hz]))
    return replace(js, xi_zeros=xz, h_zeros=hz, singular_set=sing)


def wronskian_drift(js: JacobiSystem) -> float:
    """Max deviation of Xi'^T H - Xi^T H' from -Id, relative to term size.

    The normalization guards against cancellation: for hyperbolic curvature
    the two bilinear terms reach ~1e8 while their difference stays -Id, so an
    absolute measure would only see round-off.
    """
    a = np.einsum("sji,sjk->sik", js.dxi, js.h)
    b = np.einsum("sji,sjk->sik", js.xi, js.dh)
    eye = np.eye(js.dim)
    defect = np.max(np.abs(a - b + eye), axis=(1, 2))
    scale = np.maximum(1.0, np.maximum(np.max(np.abs(a), axis=(1, 2)),
                                       np.max(np.abs(b), axis=(1, 2))))
    return float(np.max(defect / scale))


def jacobi_residual(js: JacobiSystem) -> float:
    """Max normalized ||Y'' + kappa Y|| via a 4th-order second-difference stencil."""
    if len(js.sigma) < 5:
        return 0.0
    hg = js.sigma[1] - js.sigma[0]
    kap = js.kop.profile(js.sigma)
    worst = 0.0
    for Y in (js.xi, js.h):
        d2 = (-Y[:-4] + 16 * Y[1:-3] - 30 * Y[2:-2] + 16 * Y[3:-1] - Y[4:]) / (12 * hg**2)
        resid = d2 + kap[2:-2, None, None] * Y[2:-2]
        scale = np.maximum(1.0, np.max(np.abs(Y[2:-2]), axis=(1, 2)))
        worst = max(worst, float(np.max(np.max(np.abs(resid), axis=(1, 2)) / scale)))
    return worst


def write_jacobi_csv(js: JacobiSystem, path, metadata: dict | None = None):
    """Columnar dump (sigma, position..., det Xi, det H) for inspection."""
    pos = js.trajectory.positions
    with open(path, "w", newline="") as fh:
        for key, val in (metadata or {}).items():
            fh.write(f"# {key}={val}\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["sigma"] + [f"x{i}" for i in range(pos.shape[1])] + ["det_xi", "det_h"])
        for j in range(len(js.sigma)):
            row = [js.sigma[j], *pos[j], js.det_xi[j], js.det_h[j]]
            writer.writerow([format(v, ".17g") for v in row])
