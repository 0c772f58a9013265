"""Geodesic-counting integrals, combinatorial counting oracles, growth fits.

The total count of geodesic arcs out of a point, integrated over targets,
equals a double integral of the Jacobi-field Gram determinant: arc length
along each geodesic, directions over the unit tangent sphere.  This module
evaluates that double integral on the model manifolds, provides independent
counting oracles for the round sphere and flat tori, and classifies the
growth of the resulting curves in the length cutoff T.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import flow
from . import manifolds as mf
from .errors import (CatalogError, ConfigurationError, GeocountError,
                     InputError, IntegrationFailureError, NumericalError)

DET_CLAMP = -1e-14


# ---------------------------------------------------------------------------
# curves and reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CountingCurve:
    """Sampled values of the total counting integral against the cutoff T."""

    T: np.ndarray
    values: np.ndarray
    manifold: str
    method: str  # "berger_bott" or "oracle"

    def __post_init__(self):
        T = np.asarray(self.T, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if T.shape != v.shape or T.ndim != 1:
            raise InputError("counting.CountingCurve: T and values must be 1-d and equal length")
        if np.any(np.diff(T) <= 0):
            raise InputError("counting.CountingCurve: parameter T must be strictly increasing")
        if np.any(v < 0):
            raise InputError("counting.CountingCurve: values must be nonnegative")
        if np.any(np.diff(v) < 0):
            raise InputError("counting.CountingCurve: values must be nondecreasing in T")
        if T[0] == 0.0 and v[0] != 0.0:
            raise InputError("counting.CountingCurve: value at T=0 must be 0")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "values", v)

    def to_csv(self, path, metadata: dict | None = None):
        with open(path, "w", newline="") as fh:
            for key, val in (metadata or {}).items():
                fh.write(f"# {key}={val}\n")
            writer = csv.writer(fh)
            writer.writerow(["T", "value"])
            for t, v in zip(self.T, self.values):
                writer.writerow([format(t, ".17g"), format(v, ".17g")])


@dataclass(frozen=True)
class GrowthReport:
    """Fitted growth class of a counting curve on its asymptotic window."""

    kind: str  # "polynomial" | "exponential"
    degree: int | None
    rate: float | None
    fit_residual: float
    window: tuple

    def to_dict(self) -> dict:
        return {
            "class": self.kind,
            "degree": self.degree,
            "rate": self.rate,
            "fit_residual": self.fit_residual,
            "window": list(self.window),
        }


# ---------------------------------------------------------------------------
# the counting integral
# ---------------------------------------------------------------------------

def berger_bott_integrand(js: flow.JacobiSystem, sigma: float) -> float:
    """sqrt det of the Gram matrix of the (0, Id) Jacobi solution at sigma.

    In the parallel frame this is |det H(sigma)|.  Values between grid
    samples interpolate linearly; determinant round-off below DET_CLAMP in
    magnitude is clamped to zero, anything more negative is an error.
    """
    gram = np.einsum("sji,sjk->sik", js.h, js.h)
    dets = np.linalg.det(gram)
    bad = dets < DET_CLAMP
    if np.any(bad):
        raise NumericalError(
            "counting.berger_bott_integrand: Gram determinant "
            f"{dets[bad][0]:.3e} below clamp at sigma={js.sigma[bad][0]:.6f}")
    vals = np.sqrt(np.maximum(dets, 0.0))
    return float(np.interp(sigma, js.sigma, vals))


def _counting_cumulative(spec, x, T, quad, step):
    """Cumulative counting integral on the arc-length grid.

    Propagates the (0, Id) Jacobi solution for every quadrature direction at
    once (vectorized RK4 over the direction axis), accumulates the composite
    trapezoid of |det H| per direction, and reduces with the quadrature
    weights in node order (numpy pairwise summation, thread-count independent).
    """
    if quad.n != spec.n:
        raise ConfigurationError(
            f"counting.berger_bott_total: quadrature dimension {quad.n} does "
            f"not match manifold dimension {spec.n}")
    if spec.kind == mf.WARPED_PRODUCT:
        raise ConfigurationError(
            "counting.berger_bott_total: warped products expose radial "
            "geodesics only; direction quadrature is not available")
    x = np.asarray(x, dtype=float)
    frame = mf.tangent_frame(spec, x)
    dirs = quad.nodes @ frame
    # both remaining kinds have arc-length-constant curvature profiles, so
    # one sample per direction fully determines the Jacobi equation
    kappas = np.empty(quad.size)
    for i, th in enumerate(dirs):
        try:
            kop = mf.curvature_along(spec, (x, th))
        except GeocountError as exc:
            raise IntegrationFailureError(
                f"counting.berger_bott_total: direction {i}: {exc}") from exc
        kappas[i] = float(kop.profile(0.0))

    grid = flow._grid(T, step)
    m = len(grid) - 1
    k = spec.normal_dim
    B = quad.size
    H = np.zeros((B, k, k))
    DH = np.broadcast_to(np.eye(k), (B, k, k)).copy()
    kap = kappas.reshape(B, 1, 1)
    weights = quad.weights
    cum = np.zeros(B)
    prev = np.zeros(B)  # |det H(0)| = 0
    totals = np.empty(m + 1)
    totals[0] = 0.0
    for j in range(m):
        h = grid[j + 1] - grid[j]
        k1y, k1d = DH, -kap * H
        y2, d2 = H + 0.5 * h * k1y, DH + 0.5 * h * k1d
        k2y, k2d = d2, -kap * y2
        y3, d3 = H + 0.5 * h * k2y, DH + 0.5 * h * k2d
        k3y, k3d = d3, -kap * y3
        y4, d4 = H + h * k3y, DH + h * k3d
        k4y, k4d = d4, -kap * y4
        H = H + (h / 6.0) * (k1y + 2 * k2y + 2 * k3y + k4y)
        DH = DH + (h / 6.0) * (k1d + 2 * k2d + 2 * k3d + k4d)
        gram = np.einsum("bji,bjk->bik", H, H)
        dets = np.linalg.det(gram)
        low = dets < DET_CLAMP
        if np.any(low):
            i = int(np.nonzero(low)[0][0])
            raise NumericalError(
                f"counting.berger_bott_total: direction {i}: Gram determinant "
                f"{dets[i]:.3e} below clamp at sigma={grid[j + 1]:.6f}")
        intg = np.sqrt(np.maximum(dets, 0.0))
        cum = cum + 0.5 * h * (prev + intg)
        prev = intg
        totals[j + 1] = np.sum(weights * cum)
    if not np.all(np.isfinite(cum)):
        i = int(np.nonzero(~np.isfinite(cum))[0][0])
        raise IntegrationFailureError(
            f"counting.berger_bott_total: direction {i}: non-finite Jacobi "
            "solution")
    return grid, totals


def berger_bott_total(spec, x, T, quad, step) -> float:
    """Total counting integral up to length T at the base point x."""
    if T == 0:
        return 0.0
    _, totals = _counting_cumulative(spec, x, T, quad, step)
    return float(totals[-1])


def berger_bott_curve(spec, x, T_values, quad, step) -> CountingCurve:
    """Counting totals at several cutoffs from a single propagation pass."""
    T_values = np.asarray(T_values, dtype=float)
    if np.any(np.diff(T_values) <= 0):
        raise InputError("counting.berger_bott_curve: parameter T_values must "
                         "be strictly increasing")
    if np.any(T_values < 0):
        raise InputError("counting.berger_bott_curve: parameter T_values must "
                         "be nonnegative")
    grid, totals = _counting_cumulative(spec, x, float(T_values[-1]), quad, step)
    vals = np.interp(T_values, grid, totals)
    return CountingCurve(T_values, vals, spec.label, "berger_bott")


# ---------------------------------------------------------------------------
# independent counting oracles
# ---------------------------------------------------------------------------

def count_sphere_arcs(d: float, T: float) -> int:
    """Number of geodesic arcs of length <= T joining points at distance d
    on the unit round sphere (generic pair, 0 < d < pi).

    Arc lengths one way around are d + 2k*pi, the other way 2k*pi - d.
    """
    if not 0.0 < d < math.pi:
        raise InputError(f"counting.count_sphere_arcs: parameter d={d} must be in (0, pi)")
    if T <= 0:
        raise InputError(f"counting.count_sphere_arcs: parameter T={T} must be positive")
    two_pi = 2.0 * math.pi
    forward = int(math.floor((T - d) / two_pi)) + 1 if T >= d else 0
    backward = max(0, int(math.floor((T + d) / two_pi)))
    return forward + backward


def count_torus_lattice(basis, x, y, T: float) -> int:
    """Number of lattice translates v with ||y - x + v|| <= T.

    Geodesic arcs on the torus from x to y correspond one-to-one to lattice
    vectors; enumeration runs over the bounded coefficient box that can reach
    the ball of radius T.
    """
    basis = np.asarray(basis, dtype=float)
    diff = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    n = basis.shape[0]
    binv = np.linalg.inv(basis)
    reach = T + float(np.linalg.norm(diff))
    bounds = [int(math.ceil(reach * np.linalg.norm(binv[:, i]))) + 1 for i in range(n)]
    axes = [np.arange(-b, b + 1) for b in bounds]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    vecs = mesh @ basis
    dist = np.linalg.norm(diff[None, :] + vecs, axis=1)
    return int(np.count_nonzero(dist <= T))


def torus_count_integral_oracle(basis, T: float, samples: int, seed: int = 0) -> float:
    """Monte Carlo estimate of the torus counting integral over targets.

    |det basis| times the mean arc count over uniform targets; deterministic
    for a fixed seed.
    """
    if samples < 1:
        raise InputError(
            f"counting.torus_count_integral_oracle: parameter samples={samples} "
            "must be >= 1")
    basis = np.asarray(basis, dtype=float)
    n = basis.shape[0]
    if T <= 0:
        return 0.0
    rng = np.random.default_rng(seed)
    binv = np.linalg.inv(basis)
    diam = float(np.sum(np.linalg.norm(basis, axis=1)))
    reach = T + diam
    bounds = [int(math.ceil(reach * np.linalg.norm(binv[:, i]))) + 1 for i in range(n)]
    axes = [np.arange(-b, b + 1) for b in bounds]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    vecs = mesh @ basis
    vecs = vecs[np.linalg.norm(vecs, axis=1) <= reach]

    total = 0
    chunk = max(1, int(2e7) // max(1, len(vecs)))
    done = 0
    while done < samples:
        take = min(chunk, samples - done)
        y = rng.random((take, n)) @ basis
        d2 = np.sum((y[:, None, :] + vecs[None, :, :]) ** 2, axis=2)
        total += int(np.count_nonzero(d2 <= T * T))
        done += take
    vol = abs(float(np.linalg.det(basis)))
    return vol * total / samples


# ---------------------------------------------------------------------------
# growth classification
# ---------------------------------------------------------------------------

def classify_growth(curve: CountingCurve, holdout_fraction: float = 0.25) -> GrowthReport:
    """Fit polynomial vs exponential growth on the upper half of the samples.

    log(value) is regressed against log(T) and against T on the window minus
    a held-out tail; the model with the smaller held-out residual wins, ties
    going to polynomial.  The polynomial degree is the rounded log-log slope.
    """
    T, v = curve.T, curve.values
    if len(T) < 8:
        raise InputError(
            f"counting.classify_growth: need >= 8 samples, got {len(T)}")
    pos = T > 0
    if not np.any(pos) or np.max(T[pos]) / np.min(T[pos]) < 10.0:
        raise InputError(
            "counting.classify_growth: samples must span at least one decade in T")
    start = min(len(T) // 2, max(0, len(T) - 6))  # upper half, >= 6 points
    wT, wV = T[start:], v[start:]
    keep = wV > 0
    wT, wV = wT[keep], wV[keep]
    if len(wT) < 6:
        raise InputError(
            "counting.classify_growth: too few positive values in the fit window")
    nh = max(2, int(round(holdout_fraction * len(wT))))
    fit_T, fit_v = wT[:-nh], wV[:-nh]
    out_T, out_v = wT[-nh:], wV[-nh:]

    bp, ap = np.polyfit(np.log(fit_T), np.log(fit_v), 1)
    res_poly = float(np.sqrt(np.mean(
        (np.log(out_v) - (ap + bp * np.log(out_T))) ** 2)))
    be, ae = np.polyfit(fit_T, np.log(fit_v), 1)
    res_exp = float(np.sqrt(np.mean((np.log(out_v) - (ae + be * out_T)) ** 2)))

    window = (float(wT[0]), float(wT[-1]))
    if res_exp < res_poly and be > 0:
        return GrowthReport("exponential", None, float(be), res_exp, window)
    degree = max(0, int(round(bp)))
    return GrowthReport("polynomial", degree, None, res_poly, window)


# ---------------------------------------------------------------------------
# loop-space homology catalog and the growth inequality
# ---------------------------------------------------------------------------

def loop_space_betti_partial_sums(space: str, n: int, k: int) -> int:
    """Partial sum of the rational Betti numbers of the based loop space.

    Catalog: spheres only.  The loop space of the n-sphere has one rational
    class in every degree divisible by n-1, so the sum over degrees < k is
    floor((k-1)/(n-1)) + 1.
    """
    if space != "sphere":
        raise CatalogError(
            f"counting.loop_space_betti_partial_sums: space='{space}' not in "
            "catalog {'sphere'}")
    if n < 2:
        raise InputError(f"counting.loop_space_betti_partial_sums: n={n} must be >= 2")
    if k < 1:
        raise InputError(f"counting.loop_space_betti_partial_sums: k={k} must be >= 1")
    return (k - 1) // (n - 1) + 1


@dataclass(frozen=True)
class GromovCheck:
    """Outcome of comparing Betti partial sums with the counting integral."""

    n: int
    K: int
    C: float
    holds: bool
    first_failure_k: int | None
    lhs: np.ndarray
    rhs: np.ndarray

    def to_dict(self) -> dict:
        return {
            "n": self.n, "K": self.K, "C": self.C, "holds": self.holds,
            "first_failure_k": self.first_failure_k,
            "lhs": self.lhs.tolist(), "rhs": [float(r) for r in self.rhs],
        }


def _gromov_from_cumulative(grid, totals, volume, n, K, C):
    ks = np.arange(1, K + 1)
    lhs = np.array([loop_space_betti_partial_sums("sphere", n, int(k)) for k in ks])
    rhs = np.interp(C * ks, grid, totals) / volume
    ok = lhs <= rhs * (1 + 1e-9) + 1e-9
    first = None if bool(np.all(ok)) else int(ks[np.argmin(ok)])
    return GromovCheck(n, K, float(C), bool(np.all(ok)), first, lhs, rhs)


def check_gromov_inequality(n: int, K: int, C: float, quad_order: int = 64,
                            step: float = 1e-2, seed: int = 0) -> GromovCheck:
    """Check Betti partial sums against the normalized counting integral on
    the unit round sphere, for every k <= K at cutoff T = C*k."""
    if C <= 0:
        raise InputError(f"counting.check_gromov_inequality: C={C} must be positive")
    spec = mf.constant_curvature(1.0, n)
    x = mf.canonical_point(spec)
    scheme = "product_gauss" if n <= 4 else "monte_carlo"
    quad = mf.unit_sphere_quadrature(n, scheme, quad_order, seed)
    grid, totals = _counting_cumulative(spec, x, C * K, quad, step)
    return _gromov_from_cumulative(grid, totals, spec.volume, n, K, C)


def search_gromov_constant(n: int, K: int, c_grid, quad_order: int = 64,
                           step: float = 1e-2, seed: int = 0) -> dict:
    """Smallest constant on a grid for which the inequality holds up to K.

    A single propagation to the largest cutoff serves every grid value.
    """
    c_grid = sorted(float(c) for c in c_grid)
    if not c_grid or c_grid[0] <= 0:
        raise InputError("counting.search_gromov_constant: c_grid must be positive")
    spec = mf.constant_curvature(1.0, n)
    x = mf.canonical_point(spec)
    scheme = "product_gauss" if n <= 4 else "monte_carlo"
    quad = mf.unit_sphere_quadrature(n, scheme, quad_order, seed)
    grid, totals = _counting_cumulative(spec, x, c_grid[-1] * K, quad, step)
    checks = [_gromov_from_cumulative(grid, totals, spec.volume, n, K, C)
              for C in c_grid]
    minimal = next((chk.C for chk in checks if chk.holds), None)
    return {"n": n, "K": K, "c_grid": c_grid, "minimal_passing_C": minimal,
            "checks": checks}
