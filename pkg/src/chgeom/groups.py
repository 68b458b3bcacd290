"""Finitely generated isometry groups: orbits, packings, limit sets.

A group is given by labeled generators; inverse labels are the swapcase of
the generator label, and labels listed as involutive are their own inverse.
Word enumeration is breadth-first over reduced words with deterministic
lexicographic ordering, deduplicating group elements by a rounded projective
matrix key, and is vectorized over stacked matrices.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from . import core
from . import heisenberg as hb
from .errors import (
    BudgetExceededError,
    CertificateError,
    DegenerateInputError,
    DimensionError,
    InvalidPackingError,
    PointAtInfinityError,
    PoleError,
)

DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True, eq=False)
class GroupGens:
    """Labeled generating set of a subgroup of PU(n,1).

    labels are single symbols; the inverse of label 'a' is written 'A'
    (swapcase), except labels in `involutive`, which square to the identity
    and serve as their own inverse.
    """

    labels: tuple
    isometries: tuple
    involutive: frozenset = frozenset()

    def __init__(self, generators, involutive=()):
        labels = []
        isos = []
        for label, iso in generators:
            if len(label) != 1:
                raise ValueError(f"label {label!r} is not a single symbol")
            if not isinstance(iso, core.Isometry):
                iso = core.Isometry(np.asarray(iso, dtype=complex))
            labels.append(label)
            isos.append(iso)
        if len(set(labels)) != len(labels):
            raise ValueError("generator labels must be unique")
        inv = frozenset(involutive)
        for label in labels:
            if label not in inv and label.swapcase() == label:
                raise ValueError(
                    f"label {label!r} has no case pair; declare it involutive"
                )
            if label not in inv and label.swapcase() in labels:
                raise ValueError(f"label {label!r} collides with an inverse label")
        unknown = inv - set(labels)
        if unknown:
            raise ValueError(f"involutive labels {sorted(unknown)} are not generators")
        object.__setattr__(self, "labels", tuple(labels))
        object.__setattr__(self, "isometries", tuple(isos))
        object.__setattr__(self, "involutive", inv)

    @property
    def dim(self):
        return self.isometries[0].matrix.shape[0]

    def alphabet(self):
        """Sorted (symbol, matrix) pairs for generators and their inverses."""
        entries = {}
        for label, iso in zip(self.labels, self.isometries):
            entries[label] = iso.matrix
            if label not in self.involutive:
                entries[label.swapcase()] = iso.inverse().matrix
        return sorted(entries.items())

    def inverse_label(self, label):
        return label if label in self.involutive else label.swapcase()


@dataclass(frozen=True)
class OrbitRecord:
    """One orbit point: the shortest word reaching it and its distance."""

    word: str
    point: core.ProjectivePoint
    word_length: int
    distance: float


class HeisCloud:
    """Columnar batch of boundary points; indexes like a list of HeisPoint."""

    __slots__ = ("xi", "v")

    def __init__(self, xi, v):
        self.xi = np.atleast_2d(np.asarray(xi, dtype=complex))
        self.v = np.asarray(v, dtype=float)
        if self.xi.shape[0] != self.v.shape[0]:
            raise DimensionError("xi and v batches disagree in length")

    def __len__(self):
        return self.v.shape[0]

    def __getitem__(self, i):
        return hb.HeisPoint(self.xi[i], self.v[i])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]


def _canonical_rows(flat, digits=9):
    """Scale-and-phase canonical rounded rows for projective dedup.

    Each row is divided by its pivot entry (first within a whisker of the
    row maximum), then rounded; equal projective objects then produce
    identical rows up to rounding-boundary luck.
    """
    mag = np.abs(flat)
    mx = np.max(mag, axis=1)
    pivot = np.argmax(mag >= (1.0 - 1e-6) * mx[:, None], axis=1)
    pv = flat[np.arange(flat.shape[0]), pivot]
    canon = flat / pv[:, None]
    return np.round(canon.view(float), digits)


def element_ball(gens, max_len, budget=DEFAULT_BUDGET, dedup=True):
    """Breadth-first reduced-word ball of group elements.

    Returns (levels, completed) where levels[k] = (words, matrix stack) for
    word length k, ordered lexicographically, and completed is the largest
    length fully enumerated (== max_len unless the budget ran out).
    Element dedup keeps the first (shortest, then lexicographically first)
    word for each group element.
    """
    alpha = gens.alphabet()
    symbols = [s for s, _ in alpha]
    mats = np.stack([m for _, m in alpha])
    inv_idx = np.array(
        [symbols.index(gens.inverse_label(s)) for s in symbols], dtype=int
    )
    d = gens.dim

    # seen: rounded key -> list of matrices sharing it (collision fallback)
    seen = {}

    def register(keys, cand_m):
        keep = []
        for i in range(len(cand_m)):
            key = keys[i].tobytes()
            bucket = seen.get(key)
            if bucket is None:
                seen[key] = [cand_m[i]]
                keep.append(i)
                continue
            if all(core.projective_matrix_gap(cand_m[i], m) > 1e-6 for m in bucket):
                bucket.append(cand_m[i])
                keep.append(i)
        return keep

    ident = np.eye(d, dtype=complex)
    levels = [(("",), ident[None, :, :])]
    words = [""]
    stack = ident[None, :, :]
    last = np.array([-1])
    total = 1
    if dedup:
        register(_canonical_rows(ident.reshape(1, -1)), ident[None, :, :])

    for length in range(1, max_len + 1):
        parts_w = []
        parts_m = []
        parts_order = []
        for si in range(len(symbols)):
            mask = last != inv_idx[si]
            if not np.any(mask):
                continue
            idx = np.nonzero(mask)[0]
            parts_m.append(stack[idx] @ mats[si])
            parts_w.append([words[i] + symbols[si] for i in idx])
            parts_order.append(idx * len(symbols) + si)
        if not parts_m:
            return levels, max_len
        cand_m = np.concatenate(parts_m)
        cand_w = [w for part in parts_w for w in part]
        order = np.argsort(np.concatenate(parts_order), kind="stable")
        cand_m = cand_m[order]
        cand_w = [cand_w[i] for i in order]

        if total + len(cand_w) > budget:
            return levels, length - 1
        if dedup:
            keep = register(_canonical_rows(cand_m.reshape(len(cand_m), -1)), cand_m)
            if not keep:
                return levels, max_len
            cand_m = cand_m[keep]
            cand_w = [cand_w[i] for i in keep]
        total += len(cand_w)
        levels.append((tuple(cand_w), cand_m))
        words = cand_w
        stack = cand_m
        last = np.array([symbols.index(w[-1]) for w in cand_w])
    return levels, max_len


def _stack_distances(lifts, base):
    # lifts are isometry images of base, so <w, w> = <base, base> exactly;
    # recomputing it squares the lift norm and loses everything to rounding
    # once distances pass ~35
    j = np.ones(base.shape[0])
    j[-1] = -1.0
    inner = (lifts * j) @ np.conj(base)
    bnorm = float(np.sum(j * base * np.conj(base)).real)
    ratio = np.abs(inner) ** 2 / (bnorm * bnorm)
    ratio = np.maximum(ratio, 1.0)
    return 2.0 * np.arccosh(np.sqrt(ratio))


def orbit_enumerate(gens, max_len, basepoint, budget=DEFAULT_BUDGET):
    """Orbit of the basepoint under reduced words of length <= max_len.

    Points are deduplicated projectively, so each orbit point appears once,
    labeled by the first word (breadth-first, lexicographic) that reaches
    it.  Raises BudgetExceededError carrying the completed radius and the
    partial records when the enumeration budget runs out.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if core.point_class(basepoint) != "negative":
        raise DegenerateInputError("basepoint must be an interior point")

    levels, completed = element_ball(gens, max_len, budget=budget)
    records = []
    seen = {}
    for length, (words, stack) in enumerate(levels):
        if length > completed:
            break
        lifts = stack @ basepoint.lift
        dists = _stack_distances(lifts, basepoint.lift)
        keys = _canonical_rows(lifts)
        for i, w in enumerate(words):
            key = keys[i].tobytes()
            bucket = seen.get(key)
            if bucket is not None:
                point = core.ProjectivePoint(lifts[i])
                if any(point.projectively_equal(p) for p in bucket):
                    continue
                bucket.append(point)
            else:
                point = core.ProjectivePoint(lifts[i])
                seen[key] = [point]
            records.append(
                OrbitRecord(
                    word=w,
                    point=point,
                    word_length=length,
                    distance=float(dists[i]),
                )
            )
    if completed < max_len:
        raise BudgetExceededError(
            f"enumeration budget exhausted at radius {completed}",
            completed_radius=completed,
            partial=records,
        )
    return records


def word_metric_profile(gens, max_len, basepoint=None, budget=DEFAULT_BUDGET):
    """Per word length, (length, min distance, max distance) to the base orbit."""
    if basepoint is None:
        origin = np.zeros(gens.dim, dtype=complex)
        origin[-1] = 1.0
        basepoint = core.ProjectivePoint(origin)
    records = orbit_enumerate(gens, max_len, basepoint, budget=budget)
    rows = []
    for length in range(max_len + 1):
        dists = [r.distance for r in records if r.word_length == length]
        if not dists:
            continue
        rows.append((length, min(dists), max(dists)))
    return rows


@dataclass(frozen=True)
class SpherePacking:
    """Disjoint closed Cygan balls on the Heisenberg boundary."""

    spheres: tuple

    def __init__(self, spheres):
        items = []
        for center, radius in spheres:
            if not isinstance(center, hb.HeisPoint):
                center = hb.HeisPoint(*center)
            radius = float(radius)
            if radius <= 0:
                raise InvalidPackingError("radii must be positive")
            items.append((center, radius))
        object.__setattr__(self, "spheres", tuple(items))


@dataclass(frozen=True)
class PingPongCertificate:
    """Sampled evidence that the sphere inversions play ping-pong."""

    pairs_checked: int
    samples_per_ball: int
    min_margin: float


def sphere_inversion(center, radius):
    """Inversion in the Cygan sphere S(center, radius) as an Isometry."""
    t = hb.embed_translation(center)
    d = hb.embed_dilation(radius, n=center.n)
    i0 = hb.inversion_matrix(center.n)
    return t @ d @ i0 @ d.inverse() @ t.inverse()


def _unit_sphere_samples(count, n=2):
    """Quasi-random points on the unit Cygan sphere (low-discrepancy)."""
    sampler = qmc.Halton(d=2 * (n - 1), scramble=False)
    pts = sampler.random(count)
    v = 2.0 * pts[:, 0] - 1.0
    xi = np.empty((count, n - 1), dtype=complex)
    r = (1.0 - v**2) ** 0.25
    phases = 2 * np.pi * pts[:, 1:]
    # first coordinate carries the radius, the rest only phases
    xi[:, 0] = r * np.exp(1j * phases[:, 0])
    for k in range(1, n - 1):
        xi[:, k] = 0.0
    return xi, v


def packing_inversion_group(packing, samples=1000):
    """Inversion generators for a sphere packing, with a sampled certificate.

    One involutive generator per sphere; the certificate checks that each
    inversion maps sample points of every other ball strictly inside its
    own ball, which is the ping-pong evidence for discreteness and the
    free-product structure.
    """
    spheres = packing.spheres
    if not spheres:
        raise InvalidPackingError("empty packing")
    for i in range(len(spheres)):
        for j in range(i + 1, len(spheres)):
            (ci, ri), (cj, rj) = spheres[i], spheres[j]
            if hb.cygan_dist(ci, cj) <= ri + rj:
                raise InvalidPackingError(
                    f"balls {i} and {j} are not disjoint"
                )

    labels = "123456789"
    if len(spheres) > len(labels):
        raise InvalidPackingError("too many spheres for single-symbol labels")
    gens = GroupGens(
        [(labels[i], sphere_inversion(c, r)) for i, (c, r) in enumerate(spheres)],
        involutive=labels[: len(spheres)],
    )

    n = spheres[0][0].n
    unit_xi, unit_v = _unit_sphere_samples(samples, n=n)
    min_margin = np.inf
    pairs = 0
    for j, (cj, rj) in enumerate(spheres):
        # boundary samples of ball j
        batch = [
            hb.heis_mul(cj, hb.heis_dilate(hb.HeisPoint(unit_xi[k], unit_v[k]), rj))
            for k in range(samples)
        ]
        for i, (ci, ri) in enumerate(spheres):
            if i == j:
                continue
            inv = gens.isometries[i]
            pairs += 1
            for p in batch:
                lift = hb.horo_to_projective(p)
                image = core.projective_apply(inv, lift)
                q = hb.projective_to_horo(image).boundary()
                margin = ri - hb.cygan_dist(q, ci)
                if margin < min_margin:
                    min_margin = margin
                if margin <= 0:
                    raise CertificateError(
                        f"inversion {i} failed to capture a sample of ball {j}",
                        pair=(i, j),
                    )
    if len(spheres) == 1:
        min_margin = np.inf
    return gens, PingPongCertificate(
        pairs_checked=pairs,
        samples_per_ball=samples,
        min_margin=float(min_margin),
    )


def identity_word_probe(gens, max_len=8, tol=1e-6, budget=DEFAULT_BUDGET):
    """Scan nonempty reduced words for hidden relations.

    Returns (passed, min_gap): the smallest projective gap to the identity
    over all reduced words of length <= max_len, without element dedup, and
    whether it stays above tol.
    """
    levels, completed = element_ball(gens, max_len, budget=budget, dedup=False)
    if completed < max_len:
        raise BudgetExceededError(
            f"probe budget exhausted at radius {completed}",
            completed_radius=completed,
        )
    min_gap = np.inf
    for length, (_, stack) in enumerate(levels):
        if length == 0:
            continue
        for mat in stack:
            gap = core.identity_gap(mat)
            if gap < min_gap:
                min_gap = gap
    return bool(min_gap > tol), float(min_gap)


def _boundary_from_lifts(lifts, tol=1e-9):
    """Heisenberg coordinates of finite boundary lifts; drops points at infinity."""
    c = lifts[:, -2] + lifts[:, -1]
    scale = np.max(np.abs(lifts), axis=1)
    finite = np.abs(c) > tol * scale
    w = lifts[finite] / c[finite, None]
    xi = w[:, :-2]
    v = np.imag(w[:, -2] - w[:, -1])
    return xi, v


def limit_set_sample(gens, depth, seeds, budget=DEFAULT_BUDGET):
    """Boundary images of the seeds under all words of length == depth.

    Long words push interior or boundary seeds toward the limit set; the
    images are reported in Heisenberg coordinates (the single point at
    infinity, if hit exactly, is dropped).  Deterministic for fixed input.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    levels, completed = element_ball(gens, depth, budget=budget)
    if completed < depth:
        raise BudgetExceededError(
            f"enumeration budget exhausted at radius {completed}",
            completed_radius=completed,
        )
    _, stack = levels[depth] if depth < len(levels) else ((), None)
    if stack is None or len(stack) == 0:
        raise DegenerateInputError("no reduced words at the requested depth")
    xi_parts = []
    v_parts = []
    for seed in seeds:
        lifts = stack @ seed.lift
        xi, v = _boundary_from_lifts(lifts)
        xi_parts.append(xi)
        v_parts.append(v)
    return HeisCloud(np.concatenate(xi_parts), np.concatenate(v_parts))


@dataclass(frozen=True)
class BoxDimFit:
    """Least-squares box-counting fit: slope, max log-residual, raw counts."""

    slope: float
    residual: float
    counts: tuple


def boxdim_estimate(points, scales):
    """Box-counting dimension of a boundary point set in the Cygan metric.

    Cells are anisotropic to match the metric scaling: size eps in each
    real coordinate of xi and eps^2 in v.  Returns the least-squares slope
    of log N(eps) against log(1/eps).
    """
    if isinstance(points, HeisCloud):
        xi, v = points.xi, points.v
    else:
        xi = np.stack([p.xi for p in points])
        v = np.array([p.v for p in points])
    if len(v) < 1000:
        raise ValueError("need at least 1000 points")
    scales = np.asarray(sorted(scales, reverse=True), dtype=float)
    if len(scales) < 4 or scales[0] / scales[-1] < 10.0:
        raise ValueError("need >= 4 scales spanning at least a decade")

    coords = np.column_stack([xi.real, xi.imag, v[:, None]])
    spread = coords.max(axis=0) - coords.min(axis=0)
    if float(np.max(spread)) <= 1e-12:
        raise DegenerateInputError("all points coincide")

    counts = []
    for eps in scales:
        cell = np.empty_like(coords)
        cell[:, :-1] = np.floor(coords[:, :-1] / eps)
        cell[:, -1] = np.floor(coords[:, -1] / eps**2)
        counts.append(len(np.unique(cell.astype(np.int64), axis=0)))
    logs = np.log(np.asarray(counts, dtype=float))
    x = np.log(1.0 / scales)
    slope, intercept = np.polyfit(x, logs, 1)
    residual = float(np.max(np.abs(slope * x + intercept - logs)))
    return BoxDimFit(slope=float(slope), residual=residual, counts=tuple(counts))


def cusp_neighborhood_contains(p, cusp_point, invariant_model, r):
    """Membership in the standard cusp neighborhood of radius r at a cusp.

    Inverts at the cusp point and tests whether the image sits at Cygan
    distance >= 1/r from the invariant subgroup model (the vertical axis or
    the real horizontal line).
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    p = hb._horo(p)
    if hb.cygan_dist(p, cusp_point) <= 1e-12:
        raise PoleError("query point coincides with the cusp point")
    inv = sphere_inversion(cusp_point, 1.0)
    try:
        image = hb.projective_to_horo(
            core.projective_apply(inv, hb.horo_to_projective(p))
        )
    except PointAtInfinityError:
        raise PoleError("query point inverts to infinity") from None
    if invariant_model == "vertical-axis":
        dist = hb.dist_to_vertical_axis(image)
    elif invariant_model == "horizontal-line":
        dist = _dist_to_horizontal_line(image)
    else:
        raise ValueError(f"unknown invariant model {invariant_model!r}")
    return bool(dist >= 1.0 / r)


def _dist_to_horizontal_line(p):
    """Cygan distance from p to the real horizontal line {(x, 0): x real}."""
    from scipy.optimize import minimize_scalar

    def objective(x):
        return hb.cygan_dist(hb.HeisPoint(np.array([x + 0j]), 0.0), p)

    span = 2.0 + 2.0 * float(np.max(np.abs(p.xi))) + abs(p.v) + p.u
    res = minimize_scalar(objective, bounds=(-span, span), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.fun)
