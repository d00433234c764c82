"""Recovery up to a global phase from magnitudes on two parallel progressions.

Pipeline for a polynomial ``F`` of degree ``q`` (normalised frame: L1 = R,
z1 = 0, L2 = R + i d):

1. On each line the squared modulus ``x -> |F(s + rho x)|**2`` is a real
   polynomial of degree 2q in the node index; fit it from the samples.
2. Its roots are the zeros of F together with their mirror images in that
   line (conjugates for L1, reflections across L2 for L2).
3. For each conjugate pair from L1 keep the member that is consistent with the
   L2 root multiset; unresolved pairs are settled by enumeration against all
   samples.
4. ``|leading|`` comes from the leading coefficient of the L1 fit; the phase
   is fixed by making the leading coefficient real positive.

The estimate is finally polished by Gauss-Newton on log-magnitudes over the
progression samples, which removes the root-finding error of near-double roots.
Samples off the two lines only enter the reported residual.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from fockphase.errors import (
    ConditioningError,
    ConjugateClosureError,
    DegreeMismatchError,
    DegreeOverflowError,
    DensityHypothesisError,
    NoConsistentAssignmentError,
    SchemaError,
)
from fockphase.factorization import (
    ZeroMultiset,
    multiset_match,
    poly_roots,
    reflect_conjugate,
    roots_to_poly,
)
from fockphase.fock_core import (
    ClosedFormFunction,
    FockPolynomial,
    ShiftedSine,
    eval_log_magnitude,
    eval_poly,
)
from fockphase.lattice_geometry import (
    PointSet,
    ShiftedLattice,
    StructuredSet,
    covolume,
    enumerate_points,
    exact_lower_density,
)

MAX_LINE_DEGREE = 30
DEGREE_TOL = 1e-8
MATCH_RTOL = 1e-6
MAX_AMBIGUOUS = 12
# relative log-residual above which no zero assignment is accepted
CONSISTENCY_TOL = 1e-2
EARL_SLACK = 0.15
# relative rounding floor for magnitudes in the final refinement
POLISH_NOISE = 1e-13
# coarser floor while zeros are still at root-finding accuracy
SCORE_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class MagnitudeSamples:
    """Magnitude records ``(point, |f(point)|)``, optionally tied to a structured set."""

    points: np.ndarray
    magnitudes: np.ndarray
    structure: StructuredSet | None = None

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=complex)).ravel().copy()
        mags = np.atleast_1d(np.asarray(self.magnitudes, dtype=float)).ravel().copy()
        if pts.shape != mags.shape:
            raise ValueError("points and magnitudes differ in length")
        if np.any(mags < 0) or not np.all(np.isfinite(mags)):
            raise ValueError("magnitudes must be finite and nonnegative")
        pts.setflags(write=False)
        mags.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "magnitudes", mags)

    def __len__(self):
        return len(self.points)

    @property
    def frame(self) -> dict | None:
        """Rigid motion ``w = exp(-i theta) (z - anchor)`` to the normalised frame."""
        if self.structure is None:
            return None
        return {"theta": self.structure.theta, "anchor": [self.structure.z1.real, self.structure.z1.imag]}

    def to_csv(self) -> str:
        rows = ["re,im,magnitude\n"]
        rows += [f"{float(z.real)!r},{float(z.imag)!r},{float(m)!r}\n" for z, m in zip(self.points, self.magnitudes)]
        return "".join(rows)

    @classmethod
    def from_csv(cls, text: str, structure: StructuredSet | None = None) -> "MagnitudeSamples":
        pts, mags = [], []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#") or line.lower().startswith("re"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise SchemaError(f"expected 're,im,magnitude', got {line!r}")
            try:
                re, im, m = (float(v) for v in parts)
            except ValueError as exc:
                raise SchemaError(f"non-numeric sample row {line!r}") from exc
            pts.append(complex(re, im))
            mags.append(m)
        return cls(np.array(pts, dtype=complex), np.array(mags), structure)


def forward_sample(p: FockPolynomial, S: StructuredSet | PointSet) -> MagnitudeSamples:
    """``|p|`` at every point of the set."""
    if isinstance(S, StructuredSet):
        pts, structure = S.points(), S
    else:
        pts, structure = S.points, None
    return MagnitudeSamples(pts, np.abs(eval_poly(p, pts)), structure)


def samples_from_gabor(tf_points, gabor_mags, tf_structure: StructuredSet | None = None) -> MagnitudeSamples:
    """Bargmann magnitudes from Gabor magnitudes at time-frequency points ``x + i omega``.

    ``|Bf(x - i omega)| = |Gf(x, omega)| exp(pi/2 (x**2 + omega**2))``, so the
    samples live on the conjugate set.
    """
    tf = np.asarray(tf_points, dtype=complex)
    mags = np.asarray(gabor_mags, dtype=float) * np.exp(0.5 * math.pi * np.abs(tf) ** 2)
    structure = tf_structure.conjugated() if tf_structure is not None else None
    return MagnitudeSamples(np.conj(tf), mags, structure)


# ---------------------------------------------------------------------------
# line fits


@dataclass(frozen=True)
class LineFit:
    poly: FockPolynomial
    heldout_residual: float
    scale: float
    min_fitted: float


def _weighted_fit(nodes: np.ndarray, values: np.ndarray, deg: int) -> np.ndarray:
    """Least squares with relative weights in the variable n / max|n|; monomial coefficients in n."""
    span = max(1.0, float(np.max(np.abs(nodes))))
    t = nodes / span
    # exact zeros at nodes would otherwise dominate the weighting
    floor = 1e-10 * float(np.max(values)) if np.max(values) > 0 else 1.0
    w = 1.0 / np.maximum(values, floor)
    A = np.polynomial.polynomial.polyvander(t, deg) * w[:, None]
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    sol, *_ = np.linalg.lstsq(A / norms, values * w, rcond=None)
    return sol / norms / span ** np.arange(deg + 1)


def _heldout_mask(count: int, deg: int) -> np.ndarray:
    """Every fourth node held out when enough remain, otherwise only the last."""
    mask = np.zeros(count, dtype=bool)
    mask[1::4] = True
    if count - mask.sum() < deg + 1:
        mask[:] = False
        mask[-1] = True
    return mask


def interpolate_squared_modulus(nodes, magnitudes, q: int, tol: float = DEGREE_TOL) -> LineFit:
    """Degree-2q real polynomial through ``magnitude**2`` at integer progression nodes.

    The held-out residual (fit on a subset, max error on the rest) must not
    exceed ``tol * max(magnitude**2)``; otherwise :class:`DegreeMismatchError`.
    The returned polynomial is the relative-weighted fit on all nodes.
    """
    nodes = np.asarray(nodes, dtype=float)
    vals = np.asarray(magnitudes, dtype=float) ** 2
    deg = 2 * q
    if q < 0:
        raise ValueError("degree bound must be nonnegative")
    if deg > MAX_LINE_DEGREE:
        raise ConditioningError(f"degree {q} exceeds the supported bound {MAX_LINE_DEGREE // 2}")
    if len(nodes) < deg + 2:
        raise DegreeMismatchError(f"need at least {deg + 2} samples for degree {q}, got {len(nodes)}")
    order = np.argsort(nodes)
    nodes, vals = nodes[order], vals[order]
    scale = float(np.max(vals))
    if scale == 0.0:
        return LineFit(FockPolynomial([0.0]), 0.0, 0.0, 0.0)
    hold = _heldout_mask(len(nodes), deg)
    c_train = _weighted_fit(nodes[~hold], vals[~hold], deg)
    resid = float(np.max(np.abs(np.polynomial.polynomial.polyval(nodes[hold], c_train) - vals[hold])))
    if resid > tol * scale:
        raise DegreeMismatchError(f"held-out residual {resid / scale:.3g} (relative) for degree {q}")
    c = _weighted_fit(nodes, vals, deg)
    imag_part = np.max(np.abs(np.imag(c))) if np.iscomplexobj(c) else 0.0
    assert imag_part <= 1e-9 * np.max(np.abs(c))
    fitted = np.polynomial.polynomial.polyval(nodes, c)
    return LineFit(FockPolynomial(np.real(c)), resid, scale, float(np.min(fitted)))


def zero_pairs_from_line(F1: FockPolynomial, rho: float, anchor: complex = 0.0, match_rtol: float = MATCH_RTOL) -> ZeroMultiset:
    """Roots of a line fit mapped to the normalised frame: ``anchor + rho * x``.

    The roots are checked for conjugate closure in the node variable.
    """
    if F1.degree == 0:
        return ZeroMultiset()
    roots = poly_roots(F1)
    tol = match_rtol * (1.0 + float(np.max(np.abs(roots.locations))))
    closure = multiset_match(roots, reflect_conjugate(roots), tol)
    if not closure.complete:
        raise ConjugateClosureError(
            f"line roots are not closed under conjugation (left over: {closure.unmatched_a.total})"
        )
    return roots.mapped(lambda x: anchor + rho * x)


# ---------------------------------------------------------------------------
# zero disambiguation


def _floored_log_residuals(zeros, mult, lead_abs: float, w: np.ndarray, mags: np.ndarray, floor: float) -> np.ndarray:
    """``log(|F| + eps) - log(m + eps)`` with ``eps = floor * lead * prod(|w| + |z_j|)**m_j``."""
    log_model = np.full(len(w), math.log(lead_abs) if lead_abs > 0 else -math.inf)
    log_scale = log_model.copy()
    with np.errstate(divide="ignore"):
        for z, m in zip(zeros, mult):
            log_model = log_model + m * np.log(np.abs(w - z))
            log_scale = log_scale + m * np.log(np.abs(w) + abs(z))
        log_eps = math.log(floor) + log_scale
        return np.logaddexp(log_model, log_eps) - np.logaddexp(np.log(mags), log_eps)


def _assignment_score(zeros: np.ndarray, lead_abs: float, samples: MagnitudeSamples) -> float:
    if len(samples) == 0:
        return 0.0
    r = _floored_log_residuals(zeros, np.ones(len(zeros)), lead_abs, samples.points, samples.magnitudes, SCORE_FLOOR)
    return float(np.max(np.abs(r))) if np.all(np.isfinite(r)) else math.inf


def _conjugate_classes(S1: ZeroMultiset, tol: float):
    """Split L1 roots into real zeros (fixed) and upper-half classes ``(w, count)``."""
    units = S1.expanded()
    real = np.sort(units[np.abs(units.imag) <= tol].real)
    upper = units[units.imag > tol]
    lower = units[units.imag < -tol]
    if len(real) % 2 or len(upper) != len(lower):
        raise ConjugateClosureError("L1 roots do not pair under conjugation")
    fixed = [complex(0.5 * (real[k] + real[k + 1])) for k in range(0, len(real), 2)]
    classes: list[list] = []
    for w in upper:
        for cls in classes:
            if abs(cls[0] - w) <= tol:
                cls[1] += 1
                break
        else:
            classes.append([complex(w), 1])
    return fixed, [(w, c) for w, c in classes]


def disambiguate_zeros(
    S1: ZeroMultiset,
    S2: ZeroMultiset,
    line2: tuple[complex, float],
    all_samples: MagnitudeSamples,
    q: int,
    lead_abs: float = 1.0,
    match_rtol: float = MATCH_RTOL,
) -> tuple[ZeroMultiset, bool]:
    """Pick one zero out of each conjugate pair from L1 using the L2 roots.

    ``S1 = Z + conj(Z)`` and ``S2 = Z + mirror(Z)`` (mirror across ``line2 =
    (anchor, angle)``). A member ``w`` of a pair is kept outright when only it,
    and not its partner, occurs in ``S2``. Pairs where both or neither occur
    are enumerated (at most 2**12 assignments); an assignment reproducing S2
    exactly is preferred, ties go to the smallest log-residual on
    ``all_samples`` (normalised-frame points). Returns the zeros and whether
    enumeration was needed.
    """
    if S1.total != 2 * q or S2.total != 2 * q:
        raise NoConsistentAssignmentError(f"expected {2 * q} roots per line, got {S1.total} and {S2.total}")
    if q == 0:
        return ZeroMultiset(), False
    scale = 1.0 + max(float(np.max(np.abs(S1.locations))), float(np.max(np.abs(S2.locations))))
    tol = match_rtol * scale
    fixed, classes = _conjugate_classes(S1, tol)
    s2 = S2.locations

    def present(w):
        return bool(np.min(np.abs(s2 - w)) <= tol)

    resolved = list(fixed)
    open_classes = []
    for w, count in classes:
        has_w, has_wb = present(w), present(w.conjugate())
        if has_w and not has_wb:
            resolved += [w] * count
        elif has_wb and not has_w:
            resolved += [w.conjugate()] * count
        else:
            open_classes.append((w, count))

    if not open_classes:
        return ZeroMultiset.from_points(resolved), False

    n_choices = math.prod(c + 1 for _, c in open_classes)
    if n_choices > 2**MAX_AMBIGUOUS:
        raise NoConsistentAssignmentError(f"{n_choices} zero assignments exceed the enumeration cap")
    anchor, angle = line2
    best = None
    for idx, choice in enumerate(itertools.product(*(range(c + 1) for _, c in open_classes))):
        zs = list(resolved)
        for (w, count), k in zip(open_classes, choice):
            zs += [w] * k + [w.conjugate()] * (count - k)
        Z = ZeroMultiset.from_points(zs)
        image = Z.union(reflect_conjugate(Z, anchor, angle))
        exact = multiset_match(image, S2, tol).complete
        score = _assignment_score(np.array(zs), lead_abs, all_samples)
        key = (not exact, score, idx)
        if best is None or key < best[0]:
            best = (key, Z)
    (_, score, _), Z = best
    if not score <= CONSISTENCY_TOL:
        raise NoConsistentAssignmentError(
            f"best zero assignment leaves log-residual {score:.3g}; samples are not |F| for a degree-{q} polynomial"
        )
    return Z, True


# ---------------------------------------------------------------------------
# reconstruction


@dataclass(frozen=True)
class RetrievalResult:
    recovered: FockPolynomial
    residual: float
    ambiguity_flag: bool
    detected_degree: int
    zeros: ZeroMultiset = field(default_factory=ZeroMultiset)
    frame: dict | None = None

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "basis": "monomial",
            "coeffs": [[float(c.real), float(c.imag)] for c in self.recovered.coeffs],
            "residual": self.residual,
            "detected_degree": self.detected_degree,
            "ambiguity_flag": self.ambiguity_flag,
            "frame": self.frame,
            "zeros": self.zeros.to_json()["zeros"],
        }


def _progression_nodes(w: np.ndarray, offset: complex, rho: float, tol: float):
    """Indices of normalised points of the form ``offset + rho * n`` and their n."""
    rel = w - offset
    n = np.rint(rel.real / rho)
    on = (np.abs(rel.imag) <= tol) & (np.abs(rel.real - rho * n) <= tol)
    return np.nonzero(on)[0], n[on]


def split_progressions(samples: MagnitudeSamples):
    """Normalised points plus node indices of the samples on L1 and L2."""
    S = samples.structure
    if S is None:
        raise ValueError("reconstruction needs samples tied to a StructuredSet")
    w = S.to_normalized(samples.points)
    tol = 1e-9 * (1.0 + float(np.max(np.abs(w))))
    on1 = _progression_nodes(w, 0j, S.rho1, tol)
    on2 = _progression_nodes(w, S.line_offset, S.rho2, tol)
    return w, on1, on2


def _detect_degree(nodes, mags, q_max: int):
    for q in range(q_max + 1):
        try:
            return q, interpolate_squared_modulus(nodes, mags, q)
        except DegreeMismatchError:
            continue
    raise DegreeOverflowError(f"no degree <= {q_max} fits the samples on the first line")


def _polish(zeros: ZeroMultiset, lead_abs: float, w: np.ndarray, mags: np.ndarray):
    """Levenberg-Marquardt on log-magnitudes; multiplicities stay fixed.

    Each sample gets a noise floor ``eps_k`` at the rounding level of evaluating
    the current estimate there, and the residual is
    ``log(|F(w_k)| + eps_k) - log(m_k + eps_k)``, so samples sitting on a zero
    neither blow up nor dominate.
    """
    if lead_abs <= 0 or len(w) == 0:
        return zeros, lead_abs
    locs, mult = zeros.locations, zeros.multiplicities
    log_scale = math.log(lead_abs) + sum(m * np.log(np.abs(w) + abs(z)) for z, m in zip(locs, mult))
    log_eps = math.log(POLISH_NOISE) + np.asarray(log_scale, dtype=float)
    with np.errstate(divide="ignore"):
        target = np.logaddexp(np.log(mags), log_eps)

    def unpack(x):
        return x[0], x[1::2] + 1j * x[2::2]

    def log_model(x):
        loglead, z = unpack(x)
        out = np.full(len(w), loglead)
        with np.errstate(divide="ignore"):
            for zj, mj in zip(z, mult):
                out = out + mj * np.log(np.abs(w - zj))
        return out

    def resid(x):
        return np.logaddexp(log_model(x), log_eps) - target

    def jac(x):
        _, z = unpack(x)
        lm = log_model(x)
        weight = np.exp(lm - np.logaddexp(lm, log_eps))
        J = np.empty((len(w), len(x)))
        J[:, 0] = weight
        for j, (zj, mj) in enumerate(zip(z, mult)):
            d = w - zj
            with np.errstate(divide="ignore", invalid="ignore"):
                inv = np.where(weight > 0, weight * mj / (d.real**2 + d.imag**2), 0.0)
            J[:, 1 + 2 * j] = -d.real * inv
            J[:, 2 + 2 * j] = -d.imag * inv
        return J

    x0 = np.empty(1 + 2 * len(locs))
    x0[0] = math.log(lead_abs)
    x0[1::2], x0[2::2] = locs.real, locs.imag
    r0 = resid(x0)
    if not np.all(np.isfinite(r0)):
        return zeros, lead_abs
    sol = least_squares(resid, x0, jac=jac, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if not np.all(np.isfinite(sol.fun)) or np.max(np.abs(sol.fun)) > np.max(np.abs(r0)):
        return zeros, lead_abs
    loglead, z = unpack(sol.x)
    return ZeroMultiset(tuple((complex(zj), int(mj)) for zj, mj in zip(z, mult))), math.exp(loglead)


def reconstruct(samples: MagnitudeSamples, q_max: int, polish: bool = True) -> RetrievalResult:
    """Recover the sampled polynomial up to a global phase.

    ``samples`` must carry the :class:`StructuredSet` they were taken on, with
    at least ``2 q_max + 2`` points on each progression. The result has its
    leading coefficient real positive.
    """
    S = samples.structure
    w, (idx1, n1), (idx2, n2) = split_progressions(samples)
    mags = samples.magnitudes
    need = 2 * q_max + 2
    if len(idx1) < need or len(idx2) < need:
        raise DegreeMismatchError(
            f"need {need} samples on each progression, found {len(idx1)} and {len(idx2)}"
        )
    if np.max(mags) == 0.0:
        return RetrievalResult(FockPolynomial([0.0]), 0.0, False, 0, ZeroMultiset(), samples.frame)

    q, fit1 = _detect_degree(n1, mags[idx1], q_max)
    fit2 = interpolate_squared_modulus(n2, mags[idx2], q)
    lead_abs = math.sqrt(max(fit1.poly.leading.real, 0.0) / S.rho1 ** (2 * q))
    normalized = MagnitudeSamples(w, mags)

    ambiguous = False
    Z = ZeroMultiset()
    if q > 0:
        S1 = zero_pairs_from_line(fit1.poly, S.rho1)
        S2 = zero_pairs_from_line(fit2.poly, S.rho2, S.line_offset)
        line2 = (complex(0.0, S.line_offset.imag), 0.0)
        Z, ambiguous = disambiguate_zeros(S1, S2, line2, normalized, q, lead_abs)
    if polish:
        on_lines = np.concatenate([idx1, idx2])
        Z, lead_abs = _polish(Z, lead_abs, w[on_lines], mags[on_lines])

    # back to the sampling frame: zeros move rigidly, |leading| is unchanged
    Z_raw = Z.mapped(lambda v: complex(S.from_normalized(v)))
    recovered = roots_to_poly(Z_raw, lead_abs)
    residual = float(np.max(np.abs(np.abs(eval_poly(recovered, samples.points)) - mags)))
    return RetrievalResult(recovered, residual, ambiguous, q, Z_raw, samples.frame)


def canonical_phase(p: FockPolynomial) -> FockPolynomial:
    """Representative with real positive leading coefficient."""
    if p.is_zero:
        return p
    lead = p.leading
    return p.scaled(abs(lead) / lead)


def phase_equivalent(a: FockPolynomial, b: FockPolynomial, tol: float) -> tuple[bool, complex | None]:
    """Whether ``a = tau * b`` for a unit-modulus ``tau`` (relative tolerance ``tol``)."""
    if a.is_zero or b.is_zero:
        return (True, 1.0 + 0j) if (a.is_zero and b.is_zero) else (False, None)
    if a.degree != b.degree:
        return False, None
    k = int(np.argmax(np.abs(b.coeffs)))
    tau = complex(a.coeffs[k] / b.coeffs[k])
    if abs(abs(tau) - 1.0) > tol:
        return False, None
    dev = np.max(np.abs(a.coeffs - tau * b.coeffs))
    if dev > tol * max(np.max(np.abs(a.coeffs)), np.max(np.abs(b.coeffs))):
        return False, None
    return True, tau


# ---------------------------------------------------------------------------
# counterexamples


def counterexample_pair(a: float) -> tuple[ShiftedSine, ShiftedSine]:
    """``sin(pi/4 +- pi z / 2a)``: equal moduli on ``aZ + iR``, exponential type ``pi / 2a``."""
    if a <= 0:
        raise ValueError("a must be positive")
    s = math.pi / (2.0 * a)
    return ShiftedSine(s, math.pi / 4), ShiftedSine(-s, math.pi / 4)


@dataclass(frozen=True)
class CounterexampleReport:
    online_gap: float
    offline_separation: float
    n_points: int
    tol: float

    @property
    def moduli_agree(self) -> bool:
        return self.online_gap <= self.tol

    @property
    def phase_distinct(self) -> bool:
        return self.offline_separation > 0.1

    @property
    def verdict(self) -> bool:
        return self.moduli_agree and self.phase_distinct

    def to_json(self) -> dict:
        return {
            "online_gap": self.online_gap,
            "offline_separation": self.offline_separation,
            "n_points": self.n_points,
            "tol": self.tol,
            "moduli_agree": self.moduli_agree,
            "phase_distinct": self.phase_distinct,
            "verdict": self.verdict,
        }


def _line_frame(points, rotation: float, anchor: complex):
    return anchor + np.exp(1j * rotation) * np.asarray(points, dtype=complex)


def verify_counterexample(
    pair,
    a: float,
    n_points: int = 1000,
    tol: float = 1e-12,
    rotation: float = 0.0,
    anchor: complex = 0.0,
    k_range: int = 12,
    n_phases: int = 360,
) -> CounterexampleReport:
    """Check equal moduli on ``aZ + i[-5, 5]`` and that no global phase links the pair.

    Points are taken in the frame ``anchor + exp(i rotation) * (a k + i y)``,
    which matches pairs built with ``ShiftedSine.rotated(rotation, anchor)``.
    ``offline_separation`` is ``min over tau of max |f+ - tau f-|`` over points
    midway between the lines.
    """
    fp, fm = pair
    ks = np.arange(-k_range, k_range + 1)
    ny = max(1, math.ceil(n_points / len(ks)))
    ys = np.linspace(-5.0, 5.0, ny)
    grid = (a * ks[:, None] + 1j * ys[None, :]).ravel()[:n_points]
    z_on = _line_frame(grid, rotation, anchor)
    gap = float(np.max(np.abs(np.abs(fp(z_on)) - np.abs(fm(z_on)))))

    off = (a * (np.arange(-2, 3)[:, None] + 0.5) + 1j * np.array([-1.0, 0.0, 1.0])[None, :]).ravel()
    z_off = _line_frame(off, rotation, anchor)
    vp, vm = fp(z_off), fm(z_off)
    taus = np.exp(2j * math.pi * np.arange(n_phases) / n_phases)
    sup = np.max(np.abs(vp[None, :] - taus[:, None] * vm[None, :]), axis=1)
    return CounterexampleReport(gap, float(np.min(sup)), len(z_on), tol)


@dataclass(frozen=True)
class LatticeCounterexample:
    pair: tuple
    a: float
    rotation: float
    anchor: complex
    exponential_type: float
    condition: str


def lattice_counterexample(L: ShiftedLattice, condition: str = "spacing") -> LatticeCounterexample:
    """Counterexample pair whose moduli agree on the whole lattice.

    ``"spacing"``: lines along omega1 through the points ``n omega2``;
    ``"distance"``: lines along omega2 through ``m omega1``. The pair is
    ``f_{a,+-}`` rotated so its vertical lines become these lattice lines, with
    ``a`` their perpendicular spacing, so the exponential type is ``pi / 2a``.
    For the spacing case ``a = |omega2|`` exactly when the generators are
    orthogonal.
    """
    cov = covolume(L)
    if condition == "spacing":
        direction, a = L.omega1, cov / abs(L.omega1)
    elif condition == "distance":
        direction, a = L.omega2, cov / abs(L.omega2)
    else:
        raise ValueError("condition must be 'spacing' or 'distance'")
    rotation = math.atan2(direction.imag, direction.real) - math.pi / 2
    fp, fm = counterexample_pair(a)
    pair = (fp.rotated(rotation, L.z0), fm.rotated(rotation, L.z0))
    return LatticeCounterexample(pair, a, rotation, L.z0, math.pi / (2 * a), condition)


# ---------------------------------------------------------------------------
# growth diagnostics

H_FUNCTIONS = {
    "linear": lambda r: np.asarray(r, dtype=float),
    "log": lambda r: np.log1p(np.asarray(r, dtype=float)),
}


@dataclass(frozen=True)
class GrowthEstimate:
    order_used: float
    type_estimate: float
    per_radius: list
    H: str
    monotone_tail: bool

    def to_json(self) -> dict:
        return {
            "order_used": self.order_used,
            "type_estimate": self.type_estimate,
            "per_radius": [[r, v] for r, v in self.per_radius],
            "H": self.H,
            "monotone_tail": self.monotone_tail,
        }


def _circle_max(f: ClosedFormFunction, r: float, angle_count: int) -> float:
    z = r * np.exp(2j * math.pi * np.arange(angle_count) / angle_count)
    vals = np.asarray(eval_log_magnitude(f, z), dtype=float)
    return float(np.max(vals))


def growth_type_estimate(f: ClosedFormFunction, rho: float, radii, angle_count: int = 720) -> GrowthEstimate:
    """``max_{|z|=r} log|f(z)| / r**rho`` on each radius; the last one is the estimate."""
    radii = [float(r) for r in radii]
    if len(radii) < 3 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("need at least three strictly increasing radii")
    if angle_count < 360:
        raise ValueError("angle_count must be at least 360")
    per = [(r, _circle_max(f, r, angle_count) / r**rho) for r in radii]
    tail = [v for _, v in per[-3:]]
    monotone = all(b <= a for a, b in zip(tail, tail[1:])) or all(b >= a for a, b in zip(tail, tail[1:]))
    return GrowthEstimate(rho, per[-1][1], per, f"r^{rho:g}", monotone)


@dataclass(frozen=True)
class EarlReport:
    kappa_lattice: float
    kappa_global: float
    slack: float
    H: str
    radius: float
    density: float
    tau_lower: float

    @property
    def verdict(self) -> bool:
        return self.kappa_global <= self.kappa_lattice * (1.0 + self.slack)

    def to_json(self) -> dict:
        return {
            "kappa_lattice": self.kappa_lattice,
            "kappa_global": self.kappa_global,
            "slack": self.slack,
            "H": self.H,
            "radius": self.radius,
            "density": self.density,
            "tau_lower": self.tau_lower,
            "verdict": self.verdict,
        }


def earl_bound_check(
    f: ClosedFormFunction,
    L: ShiftedLattice,
    H: str = "linear",
    radius: float = 50.0,
    slack: float = EARL_SLACK,
    angle_count: int = 3600,
) -> EarlReport:
    """Finite-radius proxy for recovering growth from lattice samples.

    ``kappa_lattice`` is the max of ``log|f(l)| / H(|l|)`` over lattice points
    with ``2 <= |l| <= radius``; ``kappa_global`` the same ratio maximised on
    the circle ``|z| = radius``. The verdict compares them with ``slack``.
    """
    if H not in H_FUNCTIONS:
        raise ValueError(f"H must be one of {sorted(H_FUNCTIONS)}")
    hfun = H_FUNCTIONS[H]
    tau = float(f.order2_type)
    density = exact_lower_density(L)
    if not density > 2.0 * tau / math.pi:
        raise DensityHypothesisError(f"lattice density {density:.4g} does not exceed 2*tau/pi = {2 * tau / math.pi:.4g}")
    pts = enumerate_points(L, radius).points
    pts = pts[np.abs(pts) >= 2.0]
    logs = np.asarray(eval_log_magnitude(f, pts), dtype=float)
    ok = np.isfinite(logs)
    kappa_lat = float(np.max(logs[ok] / hfun(np.abs(pts[ok]))))
    kappa_glob = _circle_max(f, radius, angle_count) / float(hfun(radius))
    return EarlReport(kappa_lat, kappa_glob, slack, H, radius, density, tau)
