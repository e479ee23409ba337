import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_mattr
from segbias.corpus import Benchmark, BenchmarkEntry, FrequencyTable, load_benchmark, read_text_lines
from segbias.errors import SegbiasError
from segbias.metrics import (
    ALL,
    asymmetry,
    divergence_index,
    gender_accuracy,
    gender_isolation,
    lexical_diversity,
    length_increment,
    match_terms,
    mattr,
    token_boundaries,
    ttr,
)
from segbias.segmenters import CharModel, UnigramModel


def entry(terms, cat="1F", ref_c="x", ref_w="y", id_="e"):
    return BenchmarkEntry(id_, cat, "", ref_c, ref_w, tuple(terms))


def bench(*entries):
    return Benchmark(tuple(entries))


@pytest.fixture(scope="module")
def fixture_bench(data_dir):
    return load_benchmark(data_dir / "gender_fixture.tsv")


# gender accuracy


def test_single_term_verdicts():
    b = bench(entry([("fatiguée", "fatigué")]))
    assert gender_accuracy(b, ["je suis fatiguée"])["1F"].accuracy_pct == 100.0
    r = gender_accuracy(b, ["je suis fatigué"])["1F"]
    assert (r.correct, r.wrong, r.accuracy_pct) == (0, 1, 0.0)
    r = gender_accuracy(b, ["je suis là"])["1F"]
    assert r.not_found == 1 and r.accuracy_pct is None and r.coverage_pct == 0.0


def test_empty_hypothesis_is_all_not_found():
    r = gender_accuracy(bench(entry([("a", "b"), ("c", "d")])), [""])
    assert r[ALL].not_found == 2


def test_count_mismatch():
    with pytest.raises(SegbiasError) as exc:
        gender_accuracy(bench(entry([("a", "b")])), [])
    assert "(0)" in str(exc.value) and "(1)" in str(exc.value)


def test_fixture_hand_counts(fixture_bench, data_dir):
    hyps = read_text_lines(data_dir / "gender_fixture_hyp.txt")
    r = gender_accuracy(fixture_bench, hyps)
    got = {c: (r[c].correct, r[c].wrong, r[c].not_found) for c in ("1F", "1M", "2F", "2M", ALL)}
    assert got == {
        "1F": (2, 1, 0),
        "1M": (1, 1, 1),
        "2F": (3, 1, 0),
        "2M": (1, 0, 1),
        ALL: (7, 3, 2),
    }
    assert r["1F"].accuracy_pct == pytest.approx(200 / 3)
    assert r["1M"].accuracy_pct == 50.0
    assert r["2F"].accuracy_pct == 75.0
    assert r["2M"].accuracy_pct == 100.0
    assert r[ALL].accuracy_pct == 70.0
    # micro, not the mean of the category accuracies
    assert r[ALL].accuracy_pct != pytest.approx((200 / 3 + 50 + 75 + 100) / 4)


def test_conservation(fixture_bench, data_dir):
    hyps = read_text_lines(data_dir / "gender_fixture_hyp.txt")
    r = gender_accuracy(fixture_bench, hyps)
    assert r[ALL].total == fixture_bench.num_terms
    for cat in ("1F", "1M", "2F", "2M"):
        assert r[cat].total == sum(len(e.terms) for e in fixture_bench if e.category == cat)


def test_swap_antisymmetry(fixture_bench):
    good = gender_accuracy(fixture_bench, [e.ref_correct for e in fixture_bench])
    bad = gender_accuracy(fixture_bench, [e.ref_wrong for e in fixture_bench])
    for cat in ("1F", "1M", "2F", "2M", ALL):
        assert good[cat].wrong == 0 and good[cat].accuracy_pct == 100.0
        assert bad[cat].correct == 0 and bad[cat].accuracy_pct == 0.0


def test_token_consumption():
    # one "amie" token, two terms that both want it
    assert match_terms("une amie", [("amie", "ami"), ("amie", "ami")]) == ["correct", "not_found"]
    assert match_terms("une amie amie", [("amie", "ami"), ("amie", "ami")]) == ["correct", "correct"]


def test_correct_form_checked_first():
    assert match_terms("fatigué fatiguée", [("fatiguée", "fatigué")]) == ["correct"]


def test_multiword_terms_and_markers():
    assert match_terms("je suis un étu@@ di@@ ant", [("un étudiant", "une étudiante")]) == ["correct"]
    assert match_terms("Une Étudiante", [("un étudiant", "une étudiante")]) == ["wrong"]
    # matches are whole tokens, not substrings
    assert match_terms("fatiguées", [("fatiguée", "fatigué")]) == ["not_found"]


def test_accuracy_is_pure(fixture_bench, data_dir):
    hyps = read_text_lines(data_dir / "gender_fixture_hyp.txt")
    assert gender_accuracy(fixture_bench, hyps) == gender_accuracy(fixture_bench, hyps)


# lexical diversity


def test_ttr_examples():
    assert ttr(["a", "b", "a", "b"]) == 50.0
    assert ttr(["a", "b", "c"]) == 100.0
    with pytest.raises(SegbiasError):
        ttr([])


def test_mattr_examples():
    assert mattr(["a", "a", "b"], 2) == 75.0
    assert mattr(["a", "b"] * 500, 2) == 100.0
    assert mattr(["a", "b", "a"], 1000) == ttr(["a", "b", "a"])
    with pytest.raises(SegbiasError):
        mattr([], 5)
    with pytest.raises(SegbiasError):
        mattr(["a"], 0)


def test_mattr_matches_brute_force():
    rng = random.Random(9)
    for i in range(100):
        n = rng.randint(1, 5000)
        window = rng.randint(1, 1000)
        vocab = rng.randint(1, 400)
        tokens = [str(rng.randint(0, vocab)) for _ in range(n)]
        got = mattr(tokens, window)
        assert abs(got - brute_mattr(tokens, window)) <= 1e-12, (i, n, window)
        assert 0 < got <= 100.0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from("abcdef"), min_size=1, max_size=60), st.integers(1, 70))
def test_mattr_property(tokens, window):
    assert abs(mattr(tokens, window) - brute_mattr(tokens, window)) <= 1e-12


def test_lexical_diversity_folds_and_desegments():
    r = lexical_diversity(["Il ca@@ ne .", "il cane !"], window=3)
    assert r.token_count == 6 and r.type_count == 4
    assert r.ttr_pct == pytest.approx(100 * 4 / 6)
    stripped = lexical_diversity(["Il ca@@ ne .", "il cane !"], window=3, strip_punct=True)
    assert stripped.token_count == 4 and stripped.ttr_pct == 50.0
    with pytest.raises(SegbiasError):
        lexical_diversity(["", ""])


# length increment


def unigram_words(*pieces):
    p = math.log(1 / len(pieces))
    return UnigramModel(pieces={x: p for x in pieces})


def test_identical_references_give_zero():
    model = CharModel(alphabet=frozenset("ab"))
    r = length_increment(bench(entry([("ab", "ba")], ref_c="ab ab", ref_w="ab ab")), model)
    assert r.mean_increment_pct == 0.0


def test_increment_formula():
    # 21 feminine tokens against 20 masculine ones
    model = unigram_words("w", "x")
    fem = " ".join(["w"] * 20 + ["x"])
    masc = " ".join(["w"] * 20)
    r = length_increment(bench(entry([("x", "w")], ref_c=fem, ref_w=masc)), model)
    assert r.increments[0][1:] == (21, 20, 5.0)
    assert r.mean_increment_pct == 5.0


def test_masculine_entries_use_wrong_reference_as_feminine():
    model = CharModel(alphabet=frozenset("abc"))
    e = entry([("ab", "abc")], cat="2M", ref_c="ab", ref_w="abc")
    r = length_increment(bench(e), model)
    assert r.increments[0][1:3] == (3, 2)
    assert r.mean_increment_pct == 50.0


def test_macro_and_micro():
    model = CharModel(alphabet=frozenset("abcd"))
    e1 = entry([("a", "b")], ref_c="aa", ref_w="a", id_="e1")  # +100%
    e2 = entry([("a", "b")], ref_c="abcd", ref_w="abcd", id_="e2")  # 0%
    b = bench(e1, e2)
    assert length_increment(b, model).mean_increment_pct == 50.0
    assert length_increment(b, model, averaging="micro").mean_increment_pct == pytest.approx(100 * 1 / 5)
    with pytest.raises(ValueError):
        length_increment(b, model, averaging="median")


def test_swap_negates_numerators(fixture_bench, trained_models):
    for model in trained_models.values():
        a = length_increment(fixture_bench, model)
        b = length_increment(fixture_bench, model, swap=True)
        for (ida, fa, ma, _), (idb, fb, mb, _) in zip(a.increments, b.increments):
            assert ida == idb and fa - ma == -(fb - mb)


# isolation


def test_divergence_index():
    assert divergence_index("adoptée", "adopté") == 6
    assert divergence_index("chiesta", "chiesto") == 6
    assert divergence_index("xa", "ya") == 0
    with pytest.raises(SegbiasError):
        divergence_index("né", "né")


def test_token_boundaries():
    assert token_boundaries(["adop", "t", "é", "e"]) == [0, 4, 5, 6, 7]


class Fixed:
    """Stands in for a model with a predetermined segmentation."""

    def __init__(self, table):
        self.table = table

    def segment_word(self, word):
        return list(self.table[word])


def test_isolation_examples():
    fine = gender_isolation([("adoptée", "adopté")], Fixed({"adoptée": ["adop", "t", "é", "e"]}))
    assert fine.isolated_count == 1 and fine.verdicts[0].divergence == 6
    coarse = gender_isolation([("adoptée", "adopté")], Fixed({"adoptée": ["adop", "tée"]}))
    assert coarse.isolated_count == 0 and coarse.isolation_rate_pct == 0.0


def test_isolation_skips_multiword_pairs():
    r = gender_isolation([("une amie", "un ami"), ("amie", "ami")], CharModel(alphabet=frozenset("amie")))
    assert r.skipped_multiword == 1 and r.total_pairs == 1


def test_char_model_always_isolates(data_dir):
    from segbias.corpus import load_term_pairs

    pairs = load_term_pairs(data_dir / "term_pairs.tsv")
    r = gender_isolation(pairs, CharModel(alphabet=frozenset()))
    assert r.isolation_rate_pct == 100.0 and r.total_pairs == len(pairs)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.text("abcé", min_size=1, max_size=8), st.text("abcé", min_size=1, max_size=8)), min_size=1))
def test_char_model_isolation_property(pairs):
    pairs = [(f, m) for f, m in pairs if f != m]
    if pairs:
        assert gender_isolation(pairs, CharModel(alphabet=frozenset())).isolation_rate_pct == 100.0


# asymmetry


def test_asymmetry_examples():
    r = asymmetry([("chiesta", "chiesto")], FrequencyTable({"chiesta": 36, "chiesto": 884}))
    assert r.pct_feminine_rarer == 100.0
    r = asymmetry([("a", "b")], FrequencyTable({"a": 10, "b": 10}))
    assert r.pct_feminine_rarer == 0.0 and r.exceptions == (("a", "b", 10, 10),)
    r = asymmetry([("ae", "a"), ("b", "b")], FrequencyTable({}))
    assert r.pct_feminine_longer == 50.0
    with pytest.raises(SegbiasError):
        asymmetry([], FrequencyTable({}))


def test_asymmetry_missing_words_count_zero():
    r = asymmetry([("x", "y"), ("p", "q")], FrequencyTable({"y": 1, "p": 2}))
    assert r.pct_feminine_rarer == 50.0
    assert r.exceptions == (("p", "q", 2, 0),)
