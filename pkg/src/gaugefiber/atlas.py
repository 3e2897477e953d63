"""Charts, frames, transition maps and the structural-group audit.

Every bundle is trivialized by an atlas-wide reference frame at each sample
point.  Metric components and frame basis matrices are both written in that
reference frame; column ``i`` of a basis matrix holds the components of the
frame's ``i``-th section.  The transition from frame ``a`` to frame ``b``
at a point is therefore ``inv(B_a) @ B_b``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    AtlasError,
    DimensionMismatch,
    NoOverlap,
    NotConcordant,
    NotSquare,
    SingularMatrix,
    UnknownFrame,
    GaugeFiberError,
)
from .metrics import (
    DEFAULT_TOL,
    HermitianMetric,
    SkewMetric,
    is_concordant,
    is_orthonormal,
    transform_hermitian,
    transform_skew,
)
from .report import AuditReport, CheckRecord
from .tensor import Bundle, Transition

_SINGULAR_TOL = 1e-12


class Group(str, enum.Enum):
    U1 = "U1"
    SU2 = "SU2"
    SU3 = "SU3"
    UNITARY = "Unitary"
    GENERAL_LINEAR = "GeneralLinear"

    def __str__(self) -> str:
        return self.value


STRUCTURAL_GROUP = {Bundle.U1: Group.U1, Bundle.SU2: Group.SU2, Bundle.SU3: Group.SU3}


def _frozen(m) -> np.ndarray:
    m = np.array(m, dtype=complex)
    m.flags.writeable = False
    return m


def _is_singular(m: np.ndarray) -> bool:
    scale = np.abs(m).max()
    return scale == 0 or abs(np.linalg.det(m / scale)) <= _SINGULAR_TOL


@dataclass(frozen=True)
class Chart:
    id: str
    points: tuple[str, ...]

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise AtlasError(f"chart {self.id!r} has no points")
        if len(set(pts)) != len(pts):
            raise AtlasError(f"chart {self.id!r} lists a point twice")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True, eq=False)
class Frame:
    id: str
    chart: str
    bundle: Bundle
    basis: Mapping[str, np.ndarray]

    def __post_init__(self):
        object.__setattr__(self, "bundle", Bundle.parse(self.bundle))
        if self.bundle not in STRUCTURAL_GROUP:
            raise AtlasError(f"frame {self.id!r}: frames are supported on U1, SU2, SU3 only")
        n = self.bundle.dim
        basis = {}
        for p, m in self.basis.items():
            m = _frozen(m)
            if m.shape != (n, n):
                raise AtlasError(f"frame {self.id!r} at {p!r}: basis must be {n}x{n}, got {m.shape}")
            if _is_singular(m):
                raise AtlasError(f"frame {self.id!r} at {p!r}: basis matrix is singular")
            basis[p] = m
        object.__setattr__(self, "basis", basis)


@dataclass(frozen=True, eq=False)
class TransitionMap:
    source: str
    target: str
    bundle: Bundle
    matrices: Mapping[str, np.ndarray]

    def __post_init__(self):
        object.__setattr__(self, "bundle", Bundle.parse(self.bundle))
        n = self.bundle.dim
        mats = {}
        for p, m in self.matrices.items():
            m = _frozen(m)
            if m.shape != (n, n):
                raise AtlasError(f"transition {self.source}->{self.target} at {p!r}: must be {n}x{n}")
            if _is_singular(m):
                raise AtlasError(f"transition {self.source}->{self.target} at {p!r} is singular")
            mats[p] = m
        object.__setattr__(self, "matrices", mats)

    def at(self, point: str, chart: str | None = None) -> Transition:
        return Transition(self.source, self.target, self.matrices[point], self.bundle, chart)


@dataclass(frozen=True)
class MetricSample:
    hermitian: HermitianMetric
    skew: SkewMetric | None = None


@dataclass(frozen=True, eq=False)
class Atlas:
    charts: Mapping[str, Chart]
    frames: Mapping[str, Frame] = field(default_factory=dict)
    metrics: Mapping[Bundle, Mapping[str, MetricSample]] = field(default_factory=dict)
    transitions: Mapping[tuple[str, str], TransitionMap] = field(default_factory=dict)

    @classmethod
    def build(cls, charts: Iterable[Chart], frames: Iterable[Frame] = (),
              metrics: Mapping[Bundle | str, Mapping[str, MetricSample]] | None = None,
              transitions: Iterable[TransitionMap] = ()) -> Atlas:
        chart_map: dict[str, Chart] = {}
        for c in charts:
            if c.id in chart_map:
                raise AtlasError(f"duplicate chart id {c.id!r}")
            chart_map[c.id] = c
        frame_map: dict[str, Frame] = {}
        for f in frames:
            if f.id in frame_map:
                raise AtlasError(f"duplicate frame id {f.id!r}")
            frame_map[f.id] = f
        metric_map = {Bundle.parse(k): dict(v) for k, v in (metrics or {}).items()}
        trans_map: dict[tuple[str, str], TransitionMap] = {}
        for t in transitions:
            key = (t.source, t.target)
            if key in trans_map or key[::-1] in trans_map:
                raise AtlasError(f"transition between {t.source!r} and {t.target!r} given twice")
            trans_map[key] = t
        return cls(chart_map, frame_map, metric_map, trans_map)

    def __post_init__(self):
        for f in self.frames.values():
            if f.chart not in self.charts:
                raise AtlasError(f"frame {f.id!r} refers to unknown chart {f.chart!r}")
            points = self.charts[f.chart].points
            missing = [p for p in points if p not in f.basis]
            if missing:
                raise AtlasError(f"frame {f.id!r} has no basis at point(s) {', '.join(missing)}")
            extra = [p for p in f.basis if p not in points]
            if extra:
                raise AtlasError(f"frame {f.id!r} has a basis at point(s) outside its chart: {', '.join(extra)}")
            samples = self.metrics.get(f.bundle, {})
            for p in points:
                if p not in samples:
                    raise AtlasError(f"no {f.bundle} metric at point {p!r} (needed by frame {f.id!r})")
        for bundle, samples in self.metrics.items():
            for p, s in samples.items():
                if s.hermitian.dim != bundle.dim:
                    raise AtlasError(f"{bundle} metric at {p!r} has dimension {s.hermitian.dim}")
                if bundle.dim == 1 and s.skew is not None:
                    raise AtlasError(f"the U1 bundle carries no skew metric (point {p!r})")
                if bundle.dim > 1 and (s.skew is None or s.skew.dim != bundle.dim):
                    raise AtlasError(f"{bundle} metric at {p!r} needs a {bundle.dim}-dimensional skew metric")
        for (a, b), t in self.transitions.items():
            fa, fb = self.frame(a), self.frame(b)
            if not fa.bundle is fb.bundle is t.bundle:
                raise AtlasError(f"transition {a}->{b} mixes bundles")
            shared = set(self.overlap(a, b))
            stray = [p for p in t.matrices if p not in shared]
            if stray:
                raise AtlasError(f"transition {a}->{b} given at point(s) outside the overlap: {', '.join(stray)}")

    def frame(self, frame_id: str) -> Frame:
        try:
            return self.frames[frame_id]
        except KeyError:
            raise UnknownFrame(f"unknown frame {frame_id!r}") from None

    def overlap(self, *frame_ids: str) -> list[str]:
        """Sample points shared by the charts of all given frames, in chart order."""
        frames = [self.frame(f) for f in frame_ids]
        first = self.charts[frames[0].chart].points
        rest = [set(self.charts[f.chart].points) for f in frames[1:]]
        return [p for p in first if all(p in s for s in rest)]

    def metric(self, bundle: Bundle, point: str) -> MetricSample:
        return self.metrics[bundle][point]

    def frames_of(self, bundle: Bundle) -> list[Frame]:
        return sorted((f for f in self.frames.values() if f.bundle is bundle), key=lambda f: f.id)

    def imported(self, a: str, b: str, point: str) -> np.ndarray | None:
        """The file-supplied transition a->b at ``point``, inverting b->a if needed."""
        if (a, b) in self.transitions and point in self.transitions[a, b].matrices:
            return self.transitions[a, b].matrices[point]
        if (b, a) in self.transitions and point in self.transitions[b, a].matrices:
            return np.linalg.inv(self.transitions[b, a].matrices[point])
        return None


def same_bundle(atlas: Atlas, *frame_ids: str) -> Bundle:
    bundles = {atlas.frame(f).bundle for f in frame_ids}
    if len(bundles) != 1:
        raise DimensionMismatch(f"frames {', '.join(frame_ids)} belong to different bundles")
    return bundles.pop()


def transition_matrix(atlas: Atlas, a: str, b: str, point: str) -> np.ndarray:
    """``S`` with ``b_i = sum_j S[j, i] a_j``, from the stored basis matrices."""
    bundle = same_bundle(atlas, a, b)
    if point not in atlas.overlap(a, b):
        raise NoOverlap(f"point {point!r} is not in the overlap of frames {a!r} and {b!r}")
    if a == b:
        return np.eye(bundle.dim, dtype=complex)
    return np.linalg.solve(atlas.frame(a).basis[point], atlas.frame(b).basis[point])


def resolved_transition(atlas: Atlas, a: str, b: str, point: str) -> np.ndarray:
    """The imported transition when the document supplies one, else the computed one."""
    m = atlas.imported(a, b, point) if a != b else None
    return transition_matrix(atlas, a, b, point) if m is None else m


def unitarity_residual(s: np.ndarray) -> float:
    s = np.asarray(s, dtype=complex)
    return float(np.abs(s.conj().T @ s - np.eye(s.shape[0])).max())


def determinant_residual(s: np.ndarray) -> float:
    return float(abs(np.linalg.det(np.asarray(s, dtype=complex)) - 1))


def classify_group(s, tol: float = DEFAULT_TOL) -> Group:
    """Smallest of U1 / SU2 / SU3 / Unitary / GeneralLinear containing ``s``."""
    s = np.asarray(s, dtype=complex)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {s.shape}")
    n = s.shape[0]
    if n not in (1, 2, 3):
        raise DimensionMismatch(f"classification covers dimensions 1 to 3, got {n}")
    if _is_singular(s):
        raise SingularMatrix("matrix is singular")
    if n == 1:
        return Group.U1 if abs(abs(s[0, 0]) - 1) <= tol else Group.GENERAL_LINEAR
    if unitarity_residual(s) > tol:
        return Group.GENERAL_LINEAR
    if determinant_residual(s) <= tol:
        return Group.SU2 if n == 2 else Group.SU3
    return Group.UNITARY


def orthonormalize(D: HermitianMetric, d: SkewMetric | None = None,
                   tol: float = DEFAULT_TOL) -> np.ndarray:
    """Transition matrix from the current frame to an orthonormal one.

    Modified Gram-Schmidt on the current frame vectors in index order makes
    ``D`` the identity; a unit phase on the first vector then sets the skew
    scalar to one.  Refuses pairs that are not concordant.
    """
    n = D.dim
    if n == 1:
        if d is not None:
            raise DimensionMismatch("the U(1) bundle has no skew metric")
        return np.array([[1 / np.sqrt(D.components[0, 0].real)]], dtype=complex)
    if d is None or d.dim != n:
        raise DimensionMismatch(f"a {n}-dimensional skew metric is required")
    if d.contravariant:
        raise DimensionMismatch("orthonormalize expects the covariant skew metric")
    check = is_concordant(D, d, tol)
    if not check:
        raise NotConcordant("metric pair is not concordant", check.residual)

    gram = D.components
    c = np.eye(n, dtype=complex)
    for k in range(n):
        v = c[:, k].copy()
        for j in range(k):
            v -= (c[:, j].conj() @ gram @ v) * c[:, j]
        c[:, k] = v / np.sqrt((v.conj() @ gram @ v).real)
    # new D is S^T D conj(S), so the D-orthonormal columns are conj(S)
    s = c.conj()
    skew = np.linalg.det(s) * d.scalar
    s[:, 0] *= np.conj(skew) / abs(skew)
    return s


def transform_sample(sample: MetricSample, matrix: np.ndarray) -> MetricSample:
    skew = None if sample.skew is None else transform_skew(sample.skew, matrix)
    return MetricSample(transform_hermitian(sample.hermitian, matrix), skew)


def metric_in_frame(atlas: Atlas, frame_id: str, point: str) -> MetricSample:
    f = atlas.frame(frame_id)
    return transform_sample(atlas.metric(f.bundle, point), f.basis[point])


def orthonormal_basis(atlas: Atlas, frame_id: str, point: str, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Basis matrix (in the reference frame) of the orthonormalized ``frame_id``."""
    local = metric_in_frame(atlas, frame_id, point)
    return atlas.frame(frame_id).basis[point] @ orthonormalize(local.hermitian, local.skew, tol)


def orthonormalize_frame(atlas: Atlas, frame_id: str, tol: float = DEFAULT_TOL,
                         new_id: str | None = None) -> tuple[Frame, TransitionMap]:
    """Orthonormalize a frame at every point of its chart."""
    f = atlas.frame(frame_id)
    new_id = new_id or f"{frame_id}~"
    mats = {}
    for p in atlas.charts[f.chart].points:
        local = metric_in_frame(atlas, frame_id, p)
        mats[p] = orthonormalize(local.hermitian, local.skew, tol)
    frame = Frame(new_id, f.chart, f.bundle, {p: f.basis[p] @ m for p, m in mats.items()})
    return frame, TransitionMap(frame_id, new_id, f.bundle, mats)


@dataclass(frozen=True)
class CocycleResult:
    consistent: bool
    residual: float
    residuals: Mapping[str, float]
    passed: Mapping[str, bool]

    def __bool__(self) -> bool:
        return self.consistent


def check_cocycle(atlas: Atlas, a: str, b: str, c: str, tol: float = DEFAULT_TOL) -> CocycleResult:
    """Check ``S_ac == S_ab @ S_bc`` at every point of the triple overlap.

    Uses imported transitions where the document has them.  Residuals are
    spectral norms of the difference, compared to ``tol`` times
    ``max(1, |S_ac|)``.
    """
    same_bundle(atlas, a, b, c)
    points = atlas.overlap(a, b, c)
    if not points:
        raise NoOverlap(f"frames {a!r}, {b!r}, {c!r} have no common point")
    residuals, passed = {}, {}
    for p in points:
        s_ac = resolved_transition(atlas, a, c, p)
        product = resolved_transition(atlas, a, b, p) @ resolved_transition(atlas, b, c, p)
        residuals[p] = float(np.linalg.norm(s_ac - product, 2))
        passed[p] = residuals[p] <= tol * max(1.0, float(np.linalg.norm(s_ac, 2)))
    return CocycleResult(all(passed.values()), max(residuals.values()), residuals, passed)


def _concordance_records(atlas: Atlas, bundle: Bundle, tol: float) -> list[CheckRecord]:
    samples = atlas.metrics.get(bundle, {})
    if bundle.dim == 1:
        return []
    out = []
    for chart in sorted(atlas.charts.values(), key=lambda c: c.id):
        for p in sorted(q for q in chart.points if q in samples):
            s = samples[p]
            res = is_concordant(s.hermitian, s.skew, tol)
            out.append(CheckRecord("concordance", (str(bundle), chart.id, p), res.concordant, res.residual,
                                   message="" if res else f"NotConcordant on chart {chart.id}"))
    return out


def concordance_report(atlas: Atlas, tol: float = DEFAULT_TOL) -> AuditReport:
    """Concordance of the SU2 / SU3 metric pairs at every point of every chart."""
    return AuditReport.of(r for b in sorted(atlas.metrics, key=lambda b: b.order)
                          for r in _concordance_records(atlas, b, tol))


def audit_atlas(atlas: Atlas, tol: float = DEFAULT_TOL) -> AuditReport:
    """Run every structural check on the atlas and collect the results.

    Checks: concordance of the metric pair at each chart point, that every
    frame can be orthonormalized, that transitions between orthonormalized
    frames lie in U(1) / SU(2) / SU(3), that imported transitions agree with
    the basis matrices, and the cocycle condition on triples touching an
    imported transition.
    """
    records: list[CheckRecord] = []
    bundles = sorted(set(atlas.metrics) | {f.bundle for f in atlas.frames.values()},
                     key=lambda b: b.order)
    for bundle in bundles:
        records.extend(_concordance_records(atlas, bundle, tol))
        frames = atlas.frames_of(bundle)
        ortho: dict[tuple[str, str], np.ndarray] = {}
        for f in frames:
            for p in sorted(atlas.charts[f.chart].points):
                loc = (str(bundle), f.id, p)
                try:
                    local = metric_in_frame(atlas, f.id, p)
                    s = orthonormalize(local.hermitian, local.skew, tol)
                except NotConcordant as exc:
                    records.append(CheckRecord("orthonormalize", loc, False, exc.residual,
                                               message=f"NotConcordant on chart {f.chart}"))
                    continue
                except GaugeFiberError as exc:
                    records.append(CheckRecord("orthonormalize", loc, False, message=f"{exc.code}: {exc}"))
                    continue
                after = transform_sample(local, s)
                check = is_orthonormal(after.hermitian, after.skew, tol)
                residual = max(check.hermitian_residual, check.skew_residual or 0.0)
                records.append(CheckRecord("orthonormalize", loc, check.orthonormal, residual))
                ortho[f.id, p] = f.basis[p] @ s

        expected = STRUCTURAL_GROUP[bundle]
        for fa, fb in itertools.combinations(frames, 2):
            for p in sorted(atlas.overlap(fa.id, fb.id)):
                if (fa.id, p) not in ortho or (fb.id, p) not in ortho:
                    continue
                t = np.linalg.solve(ortho[fa.id, p], ortho[fb.id, p])
                group = classify_group(t, tol)
                residual = unitarity_residual(t) if bundle.dim == 1 else max(
                    unitarity_residual(t), determinant_residual(t))
                records.append(CheckRecord("structural-group", (str(bundle), fa.id, fb.id, p),
                                           group is expected, residual, str(group)))

        for (a, b), tmap in sorted(atlas.transitions.items()):
            if tmap.bundle is not bundle:
                continue
            for p in sorted(tmap.matrices):
                computed = transition_matrix(atlas, a, b, p)
                r = float(np.linalg.norm(tmap.matrices[p] - computed, 2))
                ok = r <= tol * max(1.0, float(np.linalg.norm(computed, 2)))
                records.append(CheckRecord("imported-transition", (str(bundle), a, b, p), ok, r,
                                           message="" if ok else f"frame pair {a}->{b} disagrees with basis matrices"))

        imported_edges = {frozenset(k) for k, t in atlas.transitions.items() if t.bundle is bundle}
        for fa, fb, fc in itertools.combinations(frames, 3):
            edges = {frozenset((fa.id, fb.id)), frozenset((fb.id, fc.id)), frozenset((fa.id, fc.id))}
            if not edges & imported_edges or not atlas.overlap(fa.id, fb.id, fc.id):
                continue
            res = check_cocycle(atlas, fa.id, fb.id, fc.id, tol)
            records.append(CheckRecord("cocycle", (str(bundle), fa.id, fb.id, fc.id), res.consistent,
                                       res.residual))
    return AuditReport.of(records)
