"""Sampling geometries: shifted lattices, two-progression structured sets, point clouds.

Conventions
-----------
Shifted lattice ``z0 + omega1 Z + omega2 Z`` with covolume
``|Im(omega1 conj(omega2))|``; its lower Beurling density is ``1 / covolume``.
The canonical pair of progressions lies on ``L1 = z0 + omega2 R`` and
``L2 = z0 + omega1 + omega2 R``, at distance ``covolume / |omega2|``.

Threshold conditions are strict: a quantity equal to its bound fails.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from fockphase.errors import (
    DegenerateLatticeError,
    InsufficientCoverageError,
    SchemaError,
    TooFewPointsError,
)

# relative tolerance for boundary membership in enumerate()
_BOUNDARY_RTOL = 1e-12


def _cplx(v) -> list:
    v = complex(v)
    return [v.real, v.imag]


def _parse_cplx(v) -> complex:
    try:
        if isinstance(v, (int, float)):
            return complex(v)
        re, im = v
        return complex(float(re), float(im))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"expected [re, im], got {v!r}") from exc


@dataclass(frozen=True)
class ShiftedLattice:
    z0: complex
    omega1: complex
    omega2: complex

    def __post_init__(self):
        for name in ("z0", "omega1", "omega2"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @property
    def signed_area(self) -> float:
        return (self.omega1 * self.omega2.conjugate()).imag

    def rotated(self, angle: float) -> "ShiftedLattice":
        r = cmath.exp(1j * angle)
        return ShiftedLattice(self.z0 * r, self.omega1 * r, self.omega2 * r)

    def translated(self, shift: complex) -> "ShiftedLattice":
        return ShiftedLattice(self.z0 + shift, self.omega1, self.omega2)

    def to_json(self) -> dict:
        return {"z0": _cplx(self.z0), "omega1": _cplx(self.omega1), "omega2": _cplx(self.omega2)}

    @classmethod
    def from_json(cls, doc: dict) -> "ShiftedLattice":
        try:
            return cls(_parse_cplx(doc.get("z0", [0.0, 0.0])), _parse_cplx(doc["omega1"]), _parse_cplx(doc["omega2"]))
        except KeyError as exc:
            raise SchemaError(f"lattice JSON missing {exc}") from exc

    @classmethod
    def square(cls, a: float, z0: complex = 0.0) -> "ShiftedLattice":
        """``z0 + a Z + i a Z`` with omega2 = a horizontal, omega1 = i a."""
        return cls(z0, 1j * a, a)


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=complex)).ravel().copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def to_csv(self) -> str:
        return "re,im\n" + "".join(f"{float(z.real)!r},{float(z.imag)!r}\n" for z in self.points)

    @classmethod
    def from_csv(cls, text: str) -> "PointSet":
        pts = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#") or line.lower().startswith("re"):
                continue
            try:
                re, im = line.split(",")[:2]
                pts.append(complex(float(re), float(im)))
            except ValueError as exc:
                raise SchemaError(f"bad point row {line!r}") from exc
        return cls(np.array(pts, dtype=complex))


@dataclass(frozen=True)
class StructuredSet:
    """Two arithmetic progressions on parallel lines plus filler points.

    Progression k is ``zk + rhok * exp(i theta) * n`` for ``n in [-N, N]``.
    """

    z1: complex
    z2: complex
    theta: float
    rho1: float
    rho2: float
    extra: tuple = field(default=())
    truncation: int = 20

    def __post_init__(self):
        object.__setattr__(self, "z1", complex(self.z1))
        object.__setattr__(self, "z2", complex(self.z2))
        object.__setattr__(self, "extra", tuple(complex(e) for e in self.extra))
        if self.rho1 <= 0 or self.rho2 <= 0:
            raise ValueError("progression spacings must be positive")
        if self.truncation < 1:
            raise ValueError("truncation must be a positive integer")
        if abs(self.line_offset.imag) == 0.0:
            raise ValueError("the two progressions must lie on distinct parallel lines")

    @property
    def direction(self) -> complex:
        return cmath.exp(1j * self.theta)

    @property
    def line_offset(self) -> complex:
        """``z2`` in the frame where L1 is the real axis and z1 the origin."""
        return (self.z2 - self.z1) / self.direction

    @property
    def line_distance(self) -> float:
        return abs(self.line_offset.imag)

    def to_normalized(self, z):
        """Rigid motion sending L1 to R and z1 to 0."""
        return (np.asarray(z, dtype=complex) - self.z1) / self.direction

    def from_normalized(self, w):
        return np.asarray(w, dtype=complex) * self.direction + self.z1

    def progression(self, which: int) -> np.ndarray:
        n = np.arange(-self.truncation, self.truncation + 1)
        if which == 1:
            return self.z1 + self.rho1 * self.direction * n
        if which == 2:
            return self.z2 + self.rho2 * self.direction * n
        raise ValueError("which must be 1 or 2")

    def points(self) -> np.ndarray:
        return np.concatenate([self.progression(1), self.progression(2), np.array(self.extra, dtype=complex)])

    def as_point_set(self) -> PointSet:
        return PointSet(self.points())

    def transformed(self, rotation: float, shift: complex) -> "StructuredSet":
        """Image under ``z -> exp(i rotation) z + shift``."""
        r = cmath.exp(1j * rotation)
        theta = math.remainder(self.theta + rotation, 2 * math.pi)
        if theta <= -math.pi:
            theta += 2 * math.pi
        return StructuredSet(
            self.z1 * r + shift,
            self.z2 * r + shift,
            theta,
            self.rho1,
            self.rho2,
            tuple(e * r + shift for e in self.extra),
            self.truncation,
        )

    def conjugated(self) -> "StructuredSet":
        """Complex-conjugate set (the reflection linking Gabor and Bargmann samples)."""
        return StructuredSet(
            self.z1.conjugate(),
            self.z2.conjugate(),
            -self.theta if self.theta != math.pi else math.pi,
            self.rho1,
            self.rho2,
            tuple(e.conjugate() for e in self.extra),
            self.truncation,
        )

    def to_json(self) -> dict:
        return {
            "z1": _cplx(self.z1),
            "z2": _cplx(self.z2),
            "theta": self.theta,
            "rho1": self.rho1,
            "rho2": self.rho2,
            "extra": [_cplx(e) for e in self.extra],
            "truncation": self.truncation,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "StructuredSet":
        try:
            return cls(
                _parse_cplx(doc["z1"]),
                _parse_cplx(doc["z2"]),
                float(doc["theta"]),
                float(doc["rho1"]),
                float(doc["rho2"]),
                tuple(_parse_cplx(e) for e in doc.get("extra", [])),
                int(doc.get("truncation", 20)),
            )
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"malformed structured set JSON: {exc}") from exc


@dataclass(frozen=True)
class ConditionReport:
    covolume: float
    exact_density: float
    line_distance: float
    spacing: float
    density_ok: bool
    spacing_ok: bool
    distance_ok: bool
    tau_lower: float
    kappa: float

    @property
    def verdict(self) -> bool:
        return self.density_ok and self.spacing_ok and self.distance_ok

    def to_json(self) -> dict:
        return {
            "covolume": self.covolume,
            "exact_density": self.exact_density,
            "line_distance": self.line_distance,
            "spacing": self.spacing,
            "density_ok": self.density_ok,
            "spacing_ok": self.spacing_ok,
            "distance_ok": self.distance_ok,
            "verdict": self.verdict,
            "tau_lower": self.tau_lower,
            "kappa": self.kappa,
        }


def covolume(L: ShiftedLattice) -> float:
    area = abs(L.signed_area)
    if area == 0.0 or not math.isfinite(area):
        raise DegenerateLatticeError(f"generators {L.omega1} and {L.omega2} are real-collinear")
    return area


def exact_lower_density(L: ShiftedLattice) -> float:
    return 1.0 / covolume(L)


def _threshold(x: float) -> float:
    """``pi / (2 x)``, infinite for x == 0."""
    return math.inf if x == 0 else math.pi / (2.0 * x)


def check_lattice_conditions(L: ShiftedLattice, tau_lower: float, kappa: float) -> ConditionReport:
    """Density, spacing and line-distance hypotheses for uniqueness on a shifted lattice."""
    if tau_lower < 0 or kappa < 0:
        raise ValueError("tau_lower and kappa must be nonnegative")
    cov = covolume(L)
    spacing = abs(L.omega2)
    dist = cov / spacing
    bound = _threshold(kappa)
    return ConditionReport(
        covolume=cov,
        exact_density=1.0 / cov,
        line_distance=dist,
        spacing=spacing,
        density_ok=cov < _threshold(tau_lower),
        spacing_ok=spacing < bound,
        distance_ok=dist < bound,
        tau_lower=tau_lower,
        kappa=kappa,
    )


def canonical_progressions(L: ShiftedLattice, truncation: int = 20, filler_radius: float | None = None) -> StructuredSet:
    """The progressions ``z0 + omega2 Z`` and ``z0 + omega1 + omega2 Z``.

    With ``filler_radius`` the remaining lattice points in that disc are added
    as filler points.
    """
    covolume(L)
    theta = cmath.phase(L.omega2)
    rho = abs(L.omega2)
    extra = ()
    if filler_radius is not None:
        pts = enumerate_points(L, filler_radius).points
        # lattice coordinates (m, n) of each point; m in {0, 1} are the two progressions
        m = np.rint(((pts - L.z0) * L.omega2.conjugate()).imag / L.signed_area)
        n_idx = np.rint(((pts - L.z0) * L.omega1.conjugate()).imag / -L.signed_area)
        on_lines = ((m == 0) | (m == 1)) & (np.abs(n_idx) <= truncation)
        extra = tuple(pts[~on_lines])
    return StructuredSet(L.z0, L.z0 + L.omega1, theta, rho, rho, extra, truncation)


def enumerate_points(L: ShiftedLattice, radius: float) -> PointSet:
    """All lattice points with ``|z| <= radius``."""
    covolume(L)
    # coefficient functionals: m = <row_m, z - z0>, bounded by |row| * (|z0| + radius)
    basis = np.array([[L.omega1.real, L.omega2.real], [L.omega1.imag, L.omega2.imag]])
    inv = np.linalg.inv(basis)
    c0 = inv @ np.array([-L.z0.real, -L.z0.imag])
    half = np.linalg.norm(inv, axis=1) * radius
    lo = np.floor(c0 - half).astype(int)
    hi = np.ceil(c0 + half).astype(int)
    m = np.arange(lo[0], hi[0] + 1)
    n = np.arange(lo[1], hi[1] + 1)
    mm, nn = np.meshgrid(m, n, indexing="ij")
    pts = (L.z0 + mm * L.omega1 + nn * L.omega2).ravel()
    keep = np.abs(pts) <= radius * (1.0 + _BOUNDARY_RTOL)
    return PointSet(pts[keep])


def separation(P: PointSet | np.ndarray) -> float:
    """Minimum pairwise distance (0 if there are duplicates)."""
    pts = P.points if isinstance(P, PointSet) else np.asarray(P, dtype=complex).ravel()
    if len(pts) < 2:
        raise TooFewPointsError("separation needs at least two points")
    xy = np.column_stack([pts.real, pts.imag])
    dist, _ = cKDTree(xy).query(xy, k=2)
    return float(np.min(dist[:, 1]))


def _window_counts(xs: np.ndarray, ys_sorted_by_x: np.ndarray, centers: np.ndarray, side: float) -> np.ndarray:
    """Counts of points in closed axis-aligned squares of the given side."""
    half = 0.5 * side
    counts = np.empty(len(centers), dtype=np.int64)
    for k, c in enumerate(centers):
        lo = np.searchsorted(xs, c.real - half, side="left")
        hi = np.searchsorted(xs, c.real + half, side="right")
        ys = ys_sorted_by_x[lo:hi]
        counts[k] = np.count_nonzero((ys >= c.imag - half) & (ys <= c.imag + half))
    return counts


def estimate_lower_density(
    P: PointSet | np.ndarray,
    radii,
    grid_step: float,
    center: complex | None = None,
    scan_extent: float = 2.0,
    check_coverage: bool = True,
) -> float:
    """Finite-window proxy for the lower Beurling density.

    For each side length ``r`` the point count of the closed square ``r K + z0``
    is minimised over translates ``z0`` on a grid of step ``grid_step`` filling a
    square of side ``scan_extent`` around ``center``; the result is the minimum
    over ``r`` of ``count / r**2``.

    ``scan_extent`` should cover one period of the set. With ``check_coverage``
    every scanned window must fit in the bounding box of the points.
    """
    pts = P.points if isinstance(P, PointSet) else np.asarray(P, dtype=complex).ravel()
    radii = [float(r) for r in radii]
    if not radii or any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly increasing")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    if len(pts) == 0:
        raise TooFewPointsError("empty point set")
    if center is None:
        center = complex(0.5 * (pts.real.min() + pts.real.max()), 0.5 * (pts.imag.min() + pts.imag.max()))
    if check_coverage:
        reach = 0.5 * (radii[-1] + scan_extent)
        box = (pts.real.min(), pts.real.max(), pts.imag.min(), pts.imag.max())
        if (center.real - reach < box[0] or center.real + reach > box[1]
                or center.imag - reach < box[2] or center.imag + reach > box[3]):
            raise InsufficientCoverageError(
                f"windows of side {radii[-1]} around {center} leave the bounding box of the points"
            )
    offsets = np.arange(-0.5 * scan_extent, 0.5 * scan_extent + 0.5 * grid_step, grid_step)
    gx, gy = np.meshgrid(offsets, offsets, indexing="ij")
    centers = center + (gx + 1j * gy).ravel()
    order = np.argsort(pts.real, kind="stable")
    xs, ys = pts.real[order], pts.imag[order]
    best = math.inf
    for r in radii:
        counts = _window_counts(xs, ys, centers, r)
        best = min(best, counts.min() / (r * r))
    return float(best)

