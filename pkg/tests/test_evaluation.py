import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aggression.evaluation import (
    confusion,
    emit_report,
    random_baseline,
    random_predictions,
    read_confusion,
    read_metrics,
    score,
    weighted_f1,
    write_predictions,
)
from aggression.numerics import Rng
from oracles import monte_carlo_baseline, recount_weighted_f1

labels = st.lists(st.integers(0, 2), min_size=1, max_size=80)


def test_confusion_identity():
    np.testing.assert_array_equal(confusion([0, 1, 2], [0, 1, 2]), np.eye(3, dtype=int))


def test_confusion_single_off_diagonal():
    m = confusion([0], [2])
    assert m[0, 2] == 1 and m.sum() == 1


def test_confusion_errors():
    with pytest.raises(ValueError):
        confusion([0, 1], [0])
    with pytest.raises(ValueError):
        confusion([], [])


@settings(max_examples=100)
@given(st.data())
def test_confusion_rows_are_supports(data):
    gold = data.draw(labels)
    pred = data.draw(st.lists(st.integers(0, 2), min_size=len(gold), max_size=len(gold)))
    m = confusion(gold, pred)
    assert m.sum() == len(gold)
    np.testing.assert_array_equal(m.sum(axis=1), np.bincount(gold, minlength=3))
    np.testing.assert_array_equal(m.sum(axis=0), np.bincount(pred, minlength=3))


def test_perfect_is_one():
    assert score([0, 1, 2, 2, 1], [0, 1, 2, 2, 1]).weighted_f1 == 1.0
    assert score([1], [1]).weighted_f1 == 1.0


def test_all_one_class_balanced():
    n = 7
    gold = [0] * n + [1] * n + [2] * n
    for c in range(3):
        r = score(gold, [c] * (3 * n))
        assert abs(r.f1[c] - 0.5) < 1e-12
        assert abs(r.weighted_f1 - 1 / 6) <= 1e-12


def test_zero_division_is_zero():
    r = score([0, 0], [1, 1])
    assert r.precision.tolist() == [0.0, 0.0, 0.0]
    assert r.weighted_f1 == 0.0


def test_weighted_f1_rejects_empty_matrix():
    with pytest.raises(ValueError):
        weighted_f1(np.zeros((3, 3), dtype=int))


def test_brute_force_recount_1000_vectors():
    rng = Rng(77)
    for _ in range(1000):
        n = 1 + rng.randint(60)
        gold, pred = rng.randint(3, n), rng.randint(3, n)
        counts, expected = recount_weighted_f1(gold, pred)
        np.testing.assert_array_equal(confusion(gold, pred), counts)
        assert score(gold, pred).weighted_f1 == expected


@settings(max_examples=100)
@given(st.data(), st.permutations([0, 1, 2]))
def test_relabel_invariance(data, perm):
    gold = data.draw(labels)
    pred = data.draw(st.lists(st.integers(0, 2), min_size=len(gold), max_size=len(gold)))
    a = score(gold, pred).weighted_f1
    b = score([perm[g] for g in gold], [perm[p] for p in pred]).weighted_f1
    assert abs(a - b) <= 1e-12


@settings(max_examples=100)
@given(st.data())
def test_scores_in_unit_interval(data):
    gold = data.draw(labels)
    pred = data.draw(st.lists(st.integers(0, 2), min_size=len(gold), max_size=len(gold)))
    r = score(gold, pred)
    for v in (r.weighted_f1, r.accuracy, *r.precision, *r.recall, *r.f1):
        assert 0.0 <= v <= 1.0
    np.testing.assert_allclose(r.weighted_f1, (r.support * r.f1).sum() / r.support.sum(), rtol=0, atol=1e-15)


def test_random_baseline_deterministic():
    gold = [0] * 30 + [1] * 20 + [2] * 10
    assert random_baseline(gold, seed=4, trials=50) == random_baseline(gold, seed=4, trials=50)
    assert random_baseline(gold, seed=4, trials=50) != random_baseline(gold, seed=5, trials=50)


def test_random_predictions_depend_on_seed_and_trial():
    a = random_predictions(100, 1, 0)
    np.testing.assert_array_equal(a, random_predictions(100, 1, 0))
    assert not np.array_equal(a, random_predictions(100, 1, 1))
    assert set(a.tolist()) == {0, 1, 2}


def test_random_baseline_matches_monte_carlo_recount():
    gold = [0] * 13 + [1] * 11 + [2] * 7
    assert abs(random_baseline(gold, seed=3, trials=40) - monte_carlo_baseline(gold, 3, 40)) <= 1e-9


def test_random_baseline_single_class_gold():
    # expected per-trial F1 for the gold class is 2 p r / (p + r) with p = 1, r ~ 1/3, i.e. ~0.5
    gold = [1] * 300
    mean = random_baseline(gold, seed=0, trials=200)
    assert 0.45 < mean < 0.55
    assert abs(mean - monte_carlo_baseline(gold, 0, 200)) <= 1e-9


def test_random_baseline_contract():
    with pytest.raises(ValueError):
        random_baseline([0, 1], trials=0)


def test_report_round_trip(tmp_path):
    gold = [0, 0, 1, 2, 2, 2, 1, 0]
    pred = [0, 1, 1, 2, 0, 2, 1, 0]
    m = confusion(gold, pred)
    r = weighted_f1(m)
    prefix = tmp_path / "nested" / "out"
    written = emit_report(r, m, prefix, svg=True)
    assert prefix.is_dir()
    assert {p.name for p in written} == {"metrics.txt", "confusion.csv", "confusion.svg"}
    np.testing.assert_array_equal(read_confusion(prefix / "confusion.csv"), m)
    back = read_metrics(prefix / "metrics.txt")
    for key, value in r.as_dict().items():
        assert abs(back[key] - value) <= 1e-9
    svg = (prefix / "confusion.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<rect") == 9


def test_identity_csv_layout(tmp_path):
    m = confusion([0, 1, 2], [0, 1, 2])
    emit_report(weighted_f1(m), m, tmp_path)
    assert (tmp_path / "confusion.csv").read_text() == "gold\\pred,NAG,CAG,OAG\nNAG,1,0,0\nCAG,0,1,0\nOAG,0,0,1\n"


def test_report_io_error_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    m = confusion([0], [0])
    with pytest.raises(OSError, match="file"):
        emit_report(weighted_f1(m), m, blocker / "sub")


def test_predictions_csv(tmp_path):
    path = tmp_path / "p" / "predictions.csv"
    write_predictions(path, ["a", "b"], [0, 2], [1, 2], [np.array([0.2, 0.5, 0.3]), np.array([0.1, 0.1, 0.8])])
    lines = path.read_text().splitlines()
    assert lines[0] == "id,gold,predicted,p_NAG,p_CAG,p_OAG"
    assert lines[1] == "a,NAG,CAG,0.2,0.5,0.3"
