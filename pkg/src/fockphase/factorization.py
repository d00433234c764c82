"""Zero multisets and numerical factorisation.

Polynomial roots come from an Aberth-Ehrlich simultaneous iteration. Multiple
roots split into clusters of size ~eps**(1/m) in floating point; clusters are
merged first at a fixed relative distance and then, more aggressively, only
when the merged factorisation still reproduces the input coefficients.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from fockphase.errors import NonConvergenceError, SchemaError, TruncationTooShortError
from fockphase.fock_core import FockPolynomial

CLUSTER_RTOL = 1e-7
MULTIPLICITY_TOL = 1e-9
MAX_SWEEPS = 500
_FLOOR_SWEEPS = 40
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ZeroMultiset:
    """Multiset of complex zeros as ``(location, multiplicity)`` entries."""

    entries: tuple = ()

    def __post_init__(self):
        clean = []
        for loc, m in self.entries:
            m = int(m)
            if m < 1:
                raise ValueError("multiplicities must be positive")
            clean.append((complex(loc), m))
        object.__setattr__(self, "entries", tuple(clean))

    @classmethod
    def from_points(cls, points) -> "ZeroMultiset":
        """One unit of multiplicity per listed point; exact duplicates are combined."""
        counts: dict[complex, int] = {}
        for z in np.atleast_1d(np.asarray(points, dtype=complex)):
            counts[complex(z)] = counts.get(complex(z), 0) + 1
        return cls(tuple(counts.items()))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def total(self) -> int:
        return sum(m for _, m in self.entries)

    @property
    def locations(self) -> np.ndarray:
        return np.array([z for z, _ in self.entries], dtype=complex)

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([m for _, m in self.entries], dtype=int)

    def expanded(self) -> np.ndarray:
        """Locations repeated by multiplicity."""
        if not self.entries:
            return np.zeros(0, dtype=complex)
        return np.repeat(self.locations, self.multiplicities)

    def sorted_by_modulus(self) -> "ZeroMultiset":
        return ZeroMultiset(tuple(sorted(self.entries, key=lambda e: (abs(e[0]), e[0].real, e[0].imag))))

    def union(self, other: "ZeroMultiset") -> "ZeroMultiset":
        return ZeroMultiset(self.entries + other.entries)

    def mapped(self, fn) -> "ZeroMultiset":
        return ZeroMultiset(tuple((fn(z), m) for z, m in self.entries))

    def to_json(self) -> dict:
        return {"zeros": [{"z": [z.real, z.imag], "m": m} for z, m in self.entries]}

    @classmethod
    def from_json(cls, doc: dict) -> "ZeroMultiset":
        try:
            return cls(tuple((complex(*e["z"]), int(e["m"])) for e in doc["zeros"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed zero multiset: {exc}") from exc


# ---------------------------------------------------------------------------
# Weierstrass primary factors and Hadamard products


def primary_factor(u, p: int):
    """``E(u; p) = (1 - u) exp(u + u**2/2 + ... + u**p/p)``."""
    if p not in (0, 1, 2):
        raise ValueError("genus must be 0, 1 or 2")
    u = np.asarray(u, dtype=complex)
    expo = sum(u**j / j for j in range(1, p + 1)) if p else 0.0
    out = (1.0 - u) * np.exp(expo)
    return complex(out) if out.ndim == 0 else out


def log_primary_factor(u, p: int):
    """Principal ``log E(u; p)``; ``-inf`` real part at ``u == 1``."""
    u = np.asarray(u, dtype=complex)
    with np.errstate(divide="ignore"):
        out = np.log(1.0 - u) + (sum(u**j / j for j in range(1, p + 1)) if p else 0.0)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class HadamardData:
    """``z**k exp(P(z)) prod E(z / z_j; genus)`` with caller-declared genus."""

    k: int
    P_coeffs: tuple
    zeros: ZeroMultiset
    genus: int
    order: float = 2.0

    def __post_init__(self):
        P = tuple(complex(c) for c in self.P_coeffs) or (0j,)
        object.__setattr__(self, "P_coeffs", P)
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if self.genus not in (0, 1, 2):
            raise ValueError("genus must be 0, 1 or 2")
        if len(P) - 1 > 2 or len(P) - 1 > self.order:
            raise ValueError("deg P must not exceed 2 or the declared order")
        if np.any(self.zeros.locations == 0):
            raise ValueError("zeros at the origin belong in k")


@dataclass(frozen=True)
class HadamardValue:
    value: complex
    log_abs: float
    tail: float


def hadamard_eval(H: HadamardData, z: complex, N: int | None = None, tail_tol: float | None = None) -> HadamardValue:
    """Truncated Hadamard product using the ``N`` zeros of smallest modulus.

    Accumulates ``log`` of every factor so large products do not overflow.
    ``tail`` is the sum of ``|z / z_j|**(genus + 1)`` over the listed zeros left
    out; exceeding ``tail_tol`` raises :class:`TruncationTooShortError`.
    """
    z = complex(z)
    zs = H.zeros.sorted_by_modulus().expanded()
    if N is None:
        N = len(zs)
    if N > len(zs) or N < 0:
        raise ValueError(f"N={N} exceeds the {len(zs)} listed zeros")
    used, rest = zs[:N], zs[N:]
    tail = float(np.sum(np.abs(z / rest) ** (H.genus + 1))) if len(rest) else 0.0
    if tail_tol is not None and tail > tail_tol:
        raise TruncationTooShortError(f"tail estimate {tail:.3g} exceeds {tail_tol:.3g}")
    if np.any(used == z) or (H.k > 0 and z == 0):
        return HadamardValue(0j, -math.inf, tail)
    logsum = complex(np.sum(log_primary_factor(z / used, H.genus))) if N else 0j
    P = np.polynomial.polynomial.polyval(z, np.array(H.P_coeffs))
    total = (H.k * cmath.log(z) if H.k else 0j) + P + logsum
    return HadamardValue(cmath.exp(total), total.real, tail)


# ---------------------------------------------------------------------------
# polynomial roots


def _horner_all(c: np.ndarray, z: np.ndarray):
    """p(z), p'(z) and the scale sum |c_k| |z|**k."""
    p = np.full(z.shape, c[-1], dtype=complex)
    dp = np.zeros(z.shape, dtype=complex)
    az = np.abs(z)
    scale = np.full(z.shape, abs(c[-1]))
    for ck in c[-2::-1]:
        dp = dp * z + p
        p = p * z + ck
        scale = scale * az + abs(ck)
    return p, dp, scale


def _aberth(c: np.ndarray, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    q = len(c) - 1
    if q == 1:
        return np.array([-c[0] / c[1]])
    radius = (abs(c[0]) / abs(c[-1])) ** (1.0 / q)
    j = np.arange(q)
    z = radius * (1.0 + 0.1 * j) * np.exp(1j * (2.0 * np.pi * j / q + 0.4))
    active = np.ones(q, dtype=bool)
    floor_sweeps = 0
    for sweep in range(max_sweeps):
        idx = np.nonzero(active)[0]
        za = z[idx]
        p, dp, scale = _horner_all(c, za)
        at_floor = np.abs(p) <= 4.0 * q * _EPS * scale
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = za[:, None] - z[None, :]
            diff[np.arange(len(idx)), idx] = np.inf
            s = np.sum(1.0 / diff, axis=1)
            step = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(step)
        if np.any(bad):
            step[bad] = 1e-3 * (1.0 + np.abs(za[bad])) * np.exp(1j * (sweep + 1.0))
        z[idx] = za - step
        small = np.abs(step) <= 2.0 * _EPS * np.abs(za)
        active[idx[small]] = False
        if not active.any():
            return z
        # clustered (multiple) roots never reach tiny steps; mutual repulsion
        # still centres each cluster on the true root, so keep sweeping a while
        floor_sweeps += bool(np.all(at_floor | small))
        if floor_sweeps >= _FLOOR_SWEEPS:
            return z
    raise NonConvergenceError(f"Aberth iteration did not converge in {max_sweeps} sweeps (ill-conditioned?)")


def _newton_polish(c: np.ndarray, z: np.ndarray, steps: int = 2) -> np.ndarray:
    z = z.copy()
    for _ in range(steps):
        p, dp, _ = _horner_all(c, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = z - p / dp
        pc, _, _ = _horner_all(c, np.where(np.isfinite(cand), cand, z))
        better = np.isfinite(cand) & (np.abs(pc) < np.abs(p))
        z[better] = cand[better]
    return z


def _cluster_labels(roots: np.ndarray, rtol: float) -> np.ndarray:
    """Single-linkage clusters of roots closer than rtol * (1 + |root|)."""
    n = len(roots)
    parent = np.arange(n)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= rtol * (1.0 + max(abs(roots[i]), abs(roots[j]))):
                parent[find(i)] = find(j)
    return np.array([find(i) for i in range(n)])


def _merge(roots: np.ndarray, labels: np.ndarray, c: np.ndarray | None = None) -> list[tuple[complex, int]]:
    """Cluster centroids with sizes; with ``c`` each m-cluster is refined as a root of p^(m-1)."""
    out = []
    for lab in dict.fromkeys(labels.tolist()):
        members = roots[labels == lab]
        centre = complex(np.mean(members))
        if c is not None and len(members) > 1:
            centre = _refine_multiple(c, centre, len(members))
        out.append((centre, len(members)))
    return out


def _refine_multiple(c: np.ndarray, z: complex, m: int, steps: int = 4) -> complex:
    """Newton on the (m-1)-th derivative, where an m-fold root is simple."""
    d = np.polynomial.polynomial.polyder(c, m - 1)
    if len(d) < 2:
        return z
    for _ in range(steps):
        val, dval, _ = _horner_all(d, np.array([z]))
        if dval[0] == 0 or not np.isfinite(val[0] / dval[0]):
            break
        cand = z - complex(val[0] / dval[0])
        if abs(_horner_all(d, np.array([cand]))[0][0]) >= abs(val[0]):
            break
        z = cand
    return z


def _backward_error(c: np.ndarray, entries, s: float) -> float:
    """Max coefficient deviation of the factorised form, in the variable z / s."""
    rebuilt = roots_to_poly(ZeroMultiset(tuple(entries)), c[-1]).coeffs
    if len(rebuilt) != len(c):
        return math.inf
    w = s ** np.arange(len(c))
    return float(np.max(np.abs(rebuilt - c) * w) / np.max(np.abs(c) * w))


def poly_roots(
    p: FockPolynomial,
    cluster_rtol: float = CLUSTER_RTOL,
    multiplicity_tol: float = MULTIPLICITY_TOL,
) -> ZeroMultiset:
    """All roots of ``p`` with multiplicities.

    Aberth-Ehrlich sweeps from a perturbed circle of radius ``|c0/cq|**(1/q)``,
    Newton polish, then clustering: roots within ``cluster_rtol * (1 + |r|)``
    are always merged; wider single-linkage merges are accepted only if the
    merged factorisation matches the coefficients to ``multiplicity_tol``
    (relative, after scaling z by max(1, max |root|)).
    """
    c = np.asarray(p.coeffs, dtype=complex)
    q = len(c) - 1
    if q < 1 or p.is_zero:
        raise ValueError("poly_roots needs a polynomial of degree >= 1")
    nz = int(np.argmax(c != 0))
    entries: list[tuple[complex, int]] = [(0j, nz)] if nz else []
    c_red = c[nz:]
    if len(c_red) == 1:
        return ZeroMultiset(tuple(entries))
    roots = _newton_polish(c_red, _aberth(c_red))
    labels = _cluster_labels(roots, cluster_rtol)
    merged = _merge(roots, labels, c_red)

    if len(merged) > 1 and multiplicity_tol > 0:
        s = max(1.0, float(np.max(np.abs(roots))))
        best = merged
        # single-linkage levels on distances relative to the root scale
        cents = np.repeat([z for z, _ in merged], [m for _, m in merged])
        xy = np.column_stack([cents.real, cents.imag]) / s
        tree = linkage(xy, method="single")
        for height in tree[:, 2]:
            if height == 0:
                continue
            lab = fcluster(tree, t=height * (1 + 1e-12), criterion="distance")
            cand = _merge(cents, lab, c_red)
            if len(cand) < len(best) and _backward_error(c_red, cand, s) <= multiplicity_tol:
                best = cand
        merged = best
    return ZeroMultiset(tuple(entries + merged))


def root_residuals(p: FockPolynomial, Z: ZeroMultiset) -> np.ndarray:
    """``|p(r)| / sum |c_k| |r|**k`` for each root location."""
    vals, _, scale = _horner_all(np.asarray(p.coeffs, dtype=complex), Z.locations)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(scale > 0, np.abs(vals) / scale, 0.0)


def roots_to_poly(Z: ZeroMultiset, leading: complex = 1.0) -> FockPolynomial:
    """Coefficients of ``leading * prod (z - z_j)**m_j``."""
    out = np.array([complex(leading)])
    for z in Z.expanded():
        out = np.convolve(out, np.array([-z, 1.0]))
    return FockPolynomial(out)


# ---------------------------------------------------------------------------
# reflections and matching


def reflect_point(w, anchor: complex, angle: float):
    """Mirror image across the line ``anchor + exp(i angle) R``."""
    d = cmath.exp(1j * angle)
    w = np.asarray(w, dtype=complex)
    out = anchor + d * np.conj((w - anchor) / d)
    return complex(out) if out.ndim == 0 else out


def reflect_conjugate(Z: ZeroMultiset, anchor: complex = 0.0, angle: float = 0.0) -> ZeroMultiset:
    """Reflect every zero across the given line; multiplicities are kept."""
    return Z.mapped(lambda w: reflect_point(w, anchor, angle))


@dataclass
class MatchReport:
    pairs: list = field(default_factory=list)
    unmatched_a: ZeroMultiset = field(default_factory=ZeroMultiset)
    unmatched_b: ZeroMultiset = field(default_factory=ZeroMultiset)

    @property
    def complete(self) -> bool:
        return self.unmatched_a.total == 0 and self.unmatched_b.total == 0

    @property
    def max_distance(self) -> float:
        return max((abs(a - b) for a, b, _ in self.pairs), default=0.0)


def multiset_match(A: ZeroMultiset, B: ZeroMultiset, tol: float) -> MatchReport:
    """Greedy nearest-pair matching with multiplicity accounting.

    Candidate pairs within ``tol`` are consumed in order of increasing distance
    (ties by index), each absorbing as many multiplicity units as both sides
    still have.
    """
    la, lb = A.locations, B.locations
    ca, cb = A.multiplicities.copy(), B.multiplicities.copy()
    pairs = []
    if len(la) and len(lb):
        d = np.abs(la[:, None] - lb[None, :])
        ii, jj = np.nonzero(d <= tol)
        order = np.lexsort((jj, ii, d[ii, jj]))
        for k in order:
            i, j = ii[k], jj[k]
            m = min(ca[i], cb[j])
            if m:
                pairs.append((complex(la[i]), complex(lb[j]), int(m)))
                ca[i] -= m
                cb[j] -= m
    left_a = ZeroMultiset(tuple((complex(z), int(m)) for z, m in zip(la, ca) if m))
    left_b = ZeroMultiset(tuple((complex(z), int(m)) for z, m in zip(lb, cb) if m))
    return MatchReport(pairs, left_a, left_b)
