import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import (
    random_invertible,
    random_positive_definite,
    random_special_unitary,
    random_unitary,
    synthetic_atlas,
)
from gaugefiber.atlas import (
    Atlas,
    Chart,
    Frame,
    Group,
    MetricSample,
    TransitionMap,
    audit_atlas,
    check_cocycle,
    classify_group,
    metric_in_frame,
    orthonormal_basis,
    orthonormalize,
    orthonormalize_frame,
    transition_matrix,
)
from gaugefiber.errors import (
    AtlasError,
    NoOverlap,
    NotConcordant,
    NotPositiveDefinite,
    NotSquare,
    SingularMatrix,
    UnknownFrame,
)
from gaugefiber.metrics import HermitianMetric, SkewMetric, is_orthonormal, transform_hermitian, transform_skew
from gaugefiber.tensor import Bundle

seeds = st.integers(0, 2**32 - 1)
THREE_CHARTS = {"U": ["a", "b", "c", "d"], "V": ["b", "c", "d", "e"], "W": ["c", "d", "e", "f"]}


def concordant_pair(rng, n):
    """A random concordant (D, delta): the canonical pair seen from a random frame."""
    s = random_invertible(rng, n, max_cond=30)
    D = transform_hermitian(HermitianMetric(np.eye(n)), s)
    return D, (transform_skew(SkewMetric(n, 1), s) if n > 1 else None)


class TestClassify:
    def test_examples(self):
        assert classify_group([[np.exp(0.7j)]]) is Group.U1
        assert classify_group(np.diag([np.exp(0.7j), np.exp(-0.7j)])) is Group.SU2
        assert classify_group(np.diag([2, 1, 1])) is Group.GENERAL_LINEAR
        assert classify_group(np.diag([1j, 1j])) is Group.UNITARY
        assert classify_group([[2.0]]) is Group.GENERAL_LINEAR

    def test_errors(self):
        with pytest.raises(NotSquare):
            classify_group(np.ones((2, 3)))
        with pytest.raises(SingularMatrix):
            classify_group([[1, 1], [1, 1]])

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.sampled_from([2, 3]))
    def test_special_unitary_and_scaled(self, seed, n):
        rng = np.random.default_rng(seed)
        s = random_special_unitary(rng, n)
        expected = Group.SU2 if n == 2 else Group.SU3
        assert classify_group(s) is expected
        assert classify_group(s * 1.001) is not expected
        u = random_unitary(rng, n)
        if abs(np.linalg.det(u) - 1) > 1e-6:
            assert classify_group(u) is Group.UNITARY


class TestOrthonormalize:
    def test_already_orthonormal(self):
        np.testing.assert_array_equal(orthonormalize(HermitianMetric(np.eye(2)), SkewMetric(2, 1)), np.eye(2))

    def test_2d_worked_example(self):
        D, d = HermitianMetric(np.diag([4.0, 1.0])), SkewMetric(2, 2j)
        s = orthonormalize(D, d)
        np.testing.assert_allclose(s, np.diag([-0.5j, 1]), atol=1e-15)
        np.testing.assert_allclose(oracles.transform_hermitian(D.components, s), np.eye(2), atol=1e-15)
        lowered = oracles.transform_covariant_form(oracles.levi_civita(2, 2j), s)
        assert lowered[0, 1] == pytest.approx(1, abs=1e-15)

    def test_3d_worked_example(self):
        D, d = HermitianMetric(np.diag([1.0, 1.0, 4.0])), SkewMetric(3, 2)
        s = orthonormalize(D, d)
        np.testing.assert_allclose(s, np.diag([1, 1, 0.5]), atol=1e-15)
        form = oracles.transform_covariant_form(oracles.levi_civita(3, 2), s)
        assert form[0, 1, 2] == pytest.approx(1, abs=1e-15)

    def test_u1(self):
        np.testing.assert_allclose(orthonormalize(HermitianMetric([[4.0]])), [[0.5]])

    def test_refuses_non_concordant(self):
        with pytest.raises(NotConcordant) as info:
            orthonormalize(HermitianMetric(np.eye(3)), SkewMetric(3, 2))
        assert info.value.residual == pytest.approx(1.5)

    @settings(max_examples=80, deadline=None)
    @given(seeds, st.sampled_from([1, 2, 3]))
    def test_result_is_orthonormal(self, seed, n):
        rng = np.random.default_rng(seed)
        D, d = concordant_pair(rng, n)
        s = orthonormalize(D, d)
        after = is_orthonormal(transform_hermitian(D, s), None if d is None else transform_skew(d, s))
        assert after.orthonormal

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.sampled_from([2, 3]))
    def test_two_orthonormal_frames_differ_by_structural_group(self, seed, n):
        rng = np.random.default_rng(seed)
        D, d = concordant_pair(rng, n)
        b1, b2 = random_invertible(rng, n, 30), random_invertible(rng, n, 30)
        o1 = b1 @ orthonormalize(transform_hermitian(D, b1), transform_skew(d, b1))
        o2 = b2 @ orthonormalize(transform_hermitian(D, b2), transform_skew(d, b2))
        assert classify_group(np.linalg.solve(o1, o2)) is (Group.SU2 if n == 2 else Group.SU3)


def two_frame_atlas(rng):
    ba, bb = random_invertible(rng, 2), random_invertible(rng, 2)
    D, d = concordant_pair(rng, 2)
    return Atlas.build(
        [Chart("U", ("p", "q")), Chart("V", ("q", "r")), Chart("X", ("x",))],
        [Frame("A", "U", Bundle.SU2, {"p": ba, "q": ba}), Frame("B", "V", Bundle.SU2, {"q": bb, "r": bb}),
         Frame("C", "X", Bundle.SU2, {"x": np.eye(2)})],
        {Bundle.SU2: {p: MetricSample(D, d) for p in "pqrx"}},
    ), ba, bb


class TestTransition:
    def test_identity_and_matrix_oracle(self, rng):
        atlas, ba, bb = two_frame_atlas(rng)
        np.testing.assert_array_equal(transition_matrix(atlas, "A", "A", "p"), np.eye(2))
        s = transition_matrix(atlas, "A", "B", "q")
        np.testing.assert_allclose(s, np.linalg.inv(ba) @ bb, atol=1e-12)
        # B's section i = sum_j S[j, i] * A's section j, column by column in reference components
        for i in range(2):
            combo = sum(s[j, i] * ba[:, j] for j in range(2))
            np.testing.assert_allclose(combo, bb[:, i], atol=1e-12)

    def test_errors(self, rng):
        atlas, _, _ = two_frame_atlas(rng)
        with pytest.raises(NoOverlap):
            transition_matrix(atlas, "A", "C", "p")
        with pytest.raises(NoOverlap):
            transition_matrix(atlas, "A", "B", "p")
        with pytest.raises(UnknownFrame):
            transition_matrix(atlas, "A", "Z", "q")

    def test_metric_in_frame(self, rng):
        atlas, ba, _ = two_frame_atlas(rng)
        local = metric_in_frame(atlas, "A", "p")
        D = atlas.metric(Bundle.SU2, "p").hermitian.components
        np.testing.assert_allclose(local.hermitian.components, oracles.transform_hermitian(D, ba), rtol=1e-11)

    def test_orthonormalize_frame(self, rng):
        atlas, _, _ = two_frame_atlas(rng)
        frame, tmap = orthonormalize_frame(atlas, "A")
        assert frame.id == "A~" and tmap.source == "A"
        for p in ("p", "q"):
            np.testing.assert_allclose(frame.basis[p], orthonormal_basis(atlas, "A", p), atol=1e-12)


class TestAtlasValidation:
    def test_frame_needs_metric(self):
        with pytest.raises(AtlasError, match="no SU2 metric"):
            Atlas.build([Chart("U", ("p",))], [Frame("A", "U", Bundle.SU2, {"p": np.eye(2)})], {})

    def test_frame_needs_basis_everywhere(self):
        sample = MetricSample(HermitianMetric(np.eye(2)), SkewMetric(2, 1))
        with pytest.raises(AtlasError, match="no basis"):
            Atlas.build([Chart("U", ("p", "q"))], [Frame("A", "U", Bundle.SU2, {"p": np.eye(2)})],
                        {Bundle.SU2: {"p": sample, "q": sample}})

    def test_singular_basis(self):
        with pytest.raises(AtlasError, match="singular"):
            Frame("A", "U", Bundle.SU2, {"p": np.zeros((2, 2))})

    def test_empty_chart(self):
        with pytest.raises(AtlasError):
            Chart("U", ())


class TestCocycle:
    def test_identity_triple(self, rng):
        atlas = synthetic_atlas(rng, 2, {"U": ["p"]})
        assert check_cocycle(atlas, "U0", "U0", "U0", tol=0).residual == 0

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_basis_derived_transitions_pass(self, rng, n):
        atlas = synthetic_atlas(rng, n, THREE_CHARTS)
        res = check_cocycle(atlas, "U0", "V0", "W0", tol=1e-12)
        assert res and set(res.residuals) == {"c", "d"}

    def test_general_linear_frames_pass(self, rng):
        charts = [Chart(c, tuple(p)) for c, p in THREE_CHARTS.items()]
        frames = [Frame(f"{c}0", c, Bundle.SU3, {p: random_invertible(rng, 3) for p in pts})
                  for c, pts in THREE_CHARTS.items()]
        D, d = concordant_pair(rng, 3)
        atlas = Atlas.build(charts, frames, {Bundle.SU3: {p: MetricSample(D, d) for p in "abcdef"}})
        assert check_cocycle(atlas, "U0", "V0", "W0", tol=1e-12)

    def test_corruption_detected(self, rng):
        base = synthetic_atlas(rng, 2, THREE_CHARTS)
        bad = transition_matrix(base, "U0", "V0", "c").copy()
        bad[1, 0] += 1e-3
        corrupted = Atlas(base.charts, base.frames, base.metrics,
                          {("U0", "V0"): TransitionMap("U0", "V0", Bundle.SU2, {"c": bad})})
        res = check_cocycle(corrupted, "U0", "V0", "W0", tol=1e-9)
        assert not res and not res.passed["c"] and res.passed["d"]
        assert res.residual == pytest.approx(1e-3, rel=0.1)

    def test_reverse_import_is_inverted(self, rng):
        base = synthetic_atlas(rng, 2, THREE_CHARTS)
        rev = transition_matrix(base, "V0", "U0", "c")
        atlas = Atlas(base.charts, base.frames, base.metrics,
                      {("V0", "U0"): TransitionMap("V0", "U0", Bundle.SU2, {"c": rev})})
        assert check_cocycle(atlas, "U0", "V0", "W0", tol=1e-12)

    def test_no_triple_overlap(self, rng):
        atlas = synthetic_atlas(rng, 2, {"U": ["a"], "V": ["a", "b"], "W": ["b"]})
        with pytest.raises(NoOverlap):
            check_cocycle(atlas, "U0", "V0", "W0")


class TestAudit:
    @pytest.mark.parametrize("n,group", [(1, "U1"), (2, "SU2"), (3, "SU3")])
    def test_canonical_metric_random_group_frames(self, rng, n, group):
        atlas = synthetic_atlas(rng, n, THREE_CHARTS, frames_per_chart=2)
        report = audit_atlas(atlas)
        assert report.passed
        groups = {r.group for r in report.records if r.check == "structural-group"}
        assert groups == {group}

    def test_random_concordant_metric_and_general_frames(self, rng):
        D, d = concordant_pair(rng, 3)
        charts = [Chart(c, tuple(p)) for c, p in THREE_CHARTS.items()]
        frames = [Frame(f"{c}{k}", c, Bundle.SU3, {p: random_invertible(rng, 3) for p in pts})
                  for c, pts in THREE_CHARTS.items() for k in range(2)]
        atlas = Atlas.build(charts, frames, {Bundle.SU3: {p: MetricSample(D, d) for p in "abcdef"}})
        assert audit_atlas(atlas).passed

    def test_single_frame_is_vacuous(self, rng):
        report = audit_atlas(synthetic_atlas(rng, 2, {"U": ["p"]}))
        assert report.passed
        assert {r.check for r in report.records} <= {"concordance", "orthonormalize"}

    def test_non_concordant_metric_flags_chart(self, rng):
        def sample(p):
            delta = 1.2 if p == "f" else 1.0
            return MetricSample(HermitianMetric(np.eye(2)), SkewMetric(2, delta))

        report = audit_atlas(synthetic_atlas(rng, 2, THREE_CHARTS, metric_sample=sample))
        assert not report.passed
        failures = report.failures
        assert {r.location for r in failures if r.check == "concordance"} == {("SU2", "W", "f")}
        assert all("chart W" in r.message for r in failures)

    def test_non_positive_metric_rejected_at_construction(self):
        with pytest.raises(NotPositiveDefinite):
            HermitianMetric(-np.eye(2))

    def test_records_are_sorted(self, rng):
        report = audit_atlas(synthetic_atlas(rng, 2, THREE_CHARTS, frames_per_chart=2))
        keys = [(r.check, r.location) for r in report.records]
        assert keys == sorted(keys)

    def test_random_positive_definite_off_locus(self, rng):
        D = HermitianMetric(random_positive_definite(rng, 2))
        d = SkewMetric(2, 1.05 * np.sqrt(np.linalg.det(D.components).real))
        atlas = synthetic_atlas(rng, 2, {"U": ["p"]}, metric_sample=lambda p: MetricSample(D, d))
        report = audit_atlas(atlas)
        assert [r.check for r in report.failures] == ["concordance", "orthonormalize"]
