from fractions import Fraction

import oracles
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from strategies import masses, resegmented

from evalsub import segmetrics as sm
from evalsub.core import BoundaryTag, SegmentedText, to_masses

EOL, EOB = BoundaryTag.EOL, BoundaryTag.EOB


def bm(n, d):
    return SegmentedText(("w",) * n, d).boundary_map()


def from_masses(ms, tag=EOB):
    return bm(sum(ms), {p: tag for p in oracles.positions(ms)})


# -- precision / recall ---------------------------------------------------------

def test_prf_identity():
    r = bm(6, {2: EOB, 5: EOL})
    s = sm.precision_recall_f1(r, r)
    assert (s.precision, s.recall, s.f1) == (1, 1, 1)


def test_prf_hand_count():
    s = sm.precision_recall_f1(bm(6, {2: EOB, 5: EOL}), bm(6, {2: EOB, 4: EOL}))
    assert (s.precision, s.recall, s.f1) == (0.5, 0.5, 0.5)


def test_prf_type_sensitivity():
    r, h = bm(3, {2: EOB}), bm(3, {2: EOL})
    typed = sm.precision_recall_f1(r, h, type_sensitive=True)
    assert (typed.precision, typed.recall, typed.f1) == (0, 0, 0)
    plain = sm.precision_recall_f1(r, h)
    assert (plain.precision, plain.recall) == (1, 1)


def test_prf_empty_hypothesis_convention():
    s = sm.precision_recall_f1(bm(4, {2: EOB}), bm(4, {}))
    assert (s.precision, s.recall, s.f1) == (1.0, 0.0, 0.0)
    s = sm.precision_recall_f1(bm(4, {}), bm(4, {}))
    assert (s.precision, s.recall, s.f1) == (1.0, 1.0, 1.0)


def test_prf_length_mismatch():
    with pytest.raises(sm.LengthMismatchError, match="project"):
        sm.precision_recall_f1(bm(4, {}), bm(5, {}))


@given(resegmented())
def test_precision_recall_swap(pair):
    a, b = pair
    ab = sm.precision_recall_f1(a.boundary_map(), b.boundary_map())
    ba = sm.precision_recall_f1(b.boundary_map(), a.boundary_map())
    if a.boundaries and b.boundaries:
        assert ab.precision == ba.recall


# -- window metrics ---------------------------------------------------------------

def test_window_examples():
    assert sm.pk([2, 2], [4], 2).value == 1.0
    assert sm.window_diff([2, 2], [4], 2).value == 1.0
    assert sm.pk([3, 4, 2], [3, 4, 2]).value == 0.0
    assert sm.window_diff([3, 4, 2], [3, 4, 2]).value == 0.0


def test_window_too_short():
    with pytest.raises(ValueError, match="no probes"):
        sm.pk([1, 1], [2], 2)
    with pytest.raises(sm.LengthMismatchError):
        sm.window_diff([3, 3], [5], 2)


def test_default_window_rounding():
    # half the mean segment size, ties to even, floor of 2
    assert sm.default_window([10]) == 5
    assert sm.default_window([3, 2]) == 2
    assert sm.default_window([5, 4]) == 2
    assert sm.default_window([7, 4]) == 3
    assert sm.default_window([1, 1, 1]) == 2


def test_window_parity_with_reference_scorer(parity):
    checked = 0
    for case in parity["segeval"]:
        ref, hyp = case["ref"], case["hyp"]
        assert sm.default_window(ref) == case["window_default"]
        for k in (2, 3):
            if f"pk_{k}" not in case:
                continue
            p, w = sm.pk(ref, hyp, k), sm.window_diff(ref, hyp, k)
            assert [p.penalties, p.probe_count] == case[f"pk_{k}"]
            assert [w.penalties, w.probe_count] == case[f"wd_{k}"]
            checked += 1
        if sum(ref) > case["window_default"]:
            assert sm.pk(ref, hyp).value == pytest.approx(float(case["pk_default"]), abs=1e-12)
    assert checked > 500


@given(st.integers(3, 16).flatmap(lambda n: st.tuples(masses(n), masses(n))),
       st.integers(1, 4))
def test_window_metrics_match_definition(pair, k):
    ref, hyp = pair
    assume(sum(ref) > k)
    p, w = sm.pk(ref, hyp, k), sm.window_diff(ref, hyp, k)
    assert (p.penalties, p.probe_count) == oracles.pk_by_definition(ref, hyp, k)
    assert (w.penalties, w.probe_count) == oracles.window_diff_by_definition(ref, hyp, k)


@given(st.integers(3, 20).flatmap(lambda n: st.tuples(masses(n), masses(n))))
def test_pk_never_exceeds_window_diff(pair):
    ref, hyp = pair
    assume(sum(ref) > sm.default_window(ref))
    p, w = sm.pk(ref, hyp), sm.window_diff(ref, hyp)
    assert 0 <= p.value <= w.value <= 1


# -- edit-based similarities ------------------------------------------------------

def test_similarity_examples():
    s = sm.segmentation_similarity([3, 3], [2, 4])
    assert s.transpositions == 1 and s.additions == 0
    assert s.value == pytest.approx(float(oracles.segmentation_similarity([3, 3], [2, 4])))
    b = sm.boundary_similarity(bm(3, {2: EOB}), bm(3, {2: EOL}))
    assert b.substitutions == 1 and b.additions == 0
    assert b.value == pytest.approx(float(oracles.boundary_similarity([(2, "b")], [(2, "l")])))
    assert sm.segmentation_similarity([4], [4]).value == 1.0
    assert sm.boundary_similarity(bm(4, {}), bm(4, {})).value == 1.0


def test_near_miss_is_cheaper_than_deletion():
    ref = [3, 3, 3]
    shifted = sm.segmentation_similarity(ref, [4, 2, 3]).value
    deleted = sm.segmentation_similarity(ref, [6, 3]).value
    assert deleted < shifted < 1
    r = from_masses(ref)
    assert (sm.boundary_similarity(r, from_masses([6, 3])).value
            < sm.boundary_similarity(r, from_masses([4, 2, 3])).value < 1)


def test_one_wrong_boundary_is_partial():
    r = bm(9, {3: EOL, 6: EOB, 9: EOB})
    h = bm(9, {3: EOL, 6: EOB, 9: EOL})
    assert 0 < sm.boundary_similarity(r, h).value < 1


def test_similarity_parity_with_reference_scorer(parity):
    n = 0
    for case in parity["segeval"]:
        if "S" not in case:
            continue
        ref, hyp = case["ref"], case["hyp"]
        assert sm.segmentation_similarity(ref, hyp).value == pytest.approx(float(case["S"]),
                                                                           abs=1e-12)
        b = sm.boundary_similarity(from_masses(ref), from_masses(hyp))
        assert b.value == pytest.approx(float(case["B"]), abs=1e-12)
        n += 1
    assert n > 300


def test_multitype_parity_with_reference_scorer(parity):
    tag = {1: EOL, 2: EOB}
    for case in parity["segeval_multitype"]:
        npb = len(case["a"])

        def to_map(s):
            return bm(npb + 1, {i + 1: tag[x[0]] for i, x in enumerate(s) if x})
        got = sm.boundary_similarity(to_map(case["a"]), to_map(case["b"]))
        assert Fraction(got.numerator).limit_denominator(100) == Fraction(case["num"])
        assert got.denominator == int(Fraction(case["den"]))
        assert got.value == pytest.approx(float(Fraction(case["B"])), abs=1e-12)


def _small_cases():
    import random
    rng = random.Random(11)
    for _ in range(1200):
        n = rng.randint(1, 8)
        def draw():
            gaps = rng.sample(range(1, n + 1), rng.randint(0, min(3, n)))
            return {g: rng.choice((EOL, EOB)) for g in gaps}
        yield n, draw(), draw()


def test_boundary_similarity_matches_exhaustive_oracle():
    for n, a, b in _small_cases():
        got = sm.boundary_similarity(bm(n, a), bm(n, b))
        want = oracles.boundary_similarity([(g, t.value) for g, t in a.items()],
                                           [(g, t.value) for g, t in b.items()])
        assert Fraction(got.value).limit_denominator(10_000) == want, (n, a, b)


def test_segmentation_similarity_matches_exhaustive_oracle():
    for n, a, b in _small_cases():
        ma = to_masses(SegmentedText(("w",) * n, a))
        mb = to_masses(SegmentedText(("w",) * n, b))
        got = sm.segmentation_similarity(ma, mb)
        assert Fraction(got.value).limit_denominator(10_000) == \
            oracles.segmentation_similarity(ma, mb), (ma, mb)


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(
    st.just(n),
    st.dictionaries(st.integers(1, n), st.sampled_from("lb"), max_size=3),
    st.dictionaries(st.integers(1, n), st.sampled_from("lb"), max_size=3))),
    st.integers(1, 4), st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(1)]))
def test_boundary_edits_other_weights(case, n_t, w):
    n, a, b = case
    ed = sm.boundary_edits(sorted(a.items()), sorted(b.items()), n_t, float(w))
    want = oracles.min_edits(sorted(a.items()), sorted(b.items()), n_t, w)
    assert Fraction(ed.weighted).limit_denominator(1000) == want[0]
    assert (len(ed.additions), len(ed.substitutions), len(ed.transpositions), ed.matches) \
        == want[1:]


@given(resegmented())
def test_reflexive(pair):
    a, _ = pair
    m = to_masses(a)
    assert sm.segmentation_similarity(m, m).value == 1.0
    assert sm.boundary_similarity(a.boundary_map(), a.boundary_map()).value == 1.0
    if sum(m) > sm.default_window(m):
        assert sm.pk(m, m).value == 0.0 and sm.window_diff(m, m).value == 0.0


@given(resegmented())
def test_similarities_bounded(pair):
    a, b = pair
    s = sm.segmentation_similarity(to_masses(a), to_masses(b)).value
    bs = sm.boundary_similarity(a.boundary_map(), b.boundary_map()).value
    assert 0 <= s <= 1 and 0 <= bs <= 1


def test_pooling_versus_mean():
    a = sm.WindowScore(0.5, 2, 2, 1)
    b = sm.WindowScore(0.0, 2, 8, 0)
    assert sm.pool_window([a, b]) == 0.1
    assert sm.mean_value([a.value, b.value]) == 0.25
    p = sm.pool_prf1([sm.PRF1.from_counts(1, 2, 1), sm.PRF1.from_counts(0, 0, 3)])
    assert (p.precision, p.recall) == (0.5, 0.25)
