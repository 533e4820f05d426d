import math
import random
import string

import pytest

from offtweet.errors import DataError
from offtweet.spell import (
    FrequencyDictionary,
    Segmentation,
    Suggestion,
    build_dictionary,
    damerau_levenshtein,
    delete_variants,
    levenshtein,
)
from oracles import best_split_score, levenshtein_slow, lookup_scan, osa_slow


# -- edit distance -----------------------------------------------------------

def test_distance_hand_values():
    assert damerau_levenshtein("", "") == 0
    assert damerau_levenshtein("abc", "abc") == 0
    assert damerau_levenshtein("abc", "") == 3
    assert damerau_levenshtein("kitten", "sitting") == 3
    assert damerau_levenshtein("ab", "ba") == 1  # one transposition
    assert levenshtein("ab", "ba") == 2  # two substitutions without it
    # restricted transposition: no edits may cross a swapped pair
    assert damerau_levenshtein("CA", "ABC") == 3


def test_distance_matches_reference_dp():
    rng = random.Random(101)
    for _ in range(400):
        a = "".join(rng.choices("abcd", k=rng.randint(0, 9)))
        b = "".join(rng.choices("abcd", k=rng.randint(0, 9)))
        assert damerau_levenshtein(a, b) == osa_slow(a, b), (a, b)
        assert levenshtein(a, b) == levenshtein_slow(a, b), (a, b)


def test_distance_symmetry_and_identity():
    rng = random.Random(5)
    for _ in range(100):
        a = "".join(rng.choices("abc", k=rng.randint(0, 6)))
        b = "".join(rng.choices("abc", k=rng.randint(0, 6)))
        assert damerau_levenshtein(a, b) == damerau_levenshtein(b, a)
        assert damerau_levenshtein(a, a) == 0


# -- delete variants ---------------------------------------------------------

def test_delete_variants_exact_sets():
    assert delete_variants("abc", 0) == {"abc"}
    assert delete_variants("abc", 1) == {"abc", "ab", "ac", "bc"}
    assert delete_variants("abc", 2) == {"abc", "ab", "ac", "bc", "a", "b", "c"}
    assert delete_variants("", 2) == {""}


def test_delete_variants_lengths():
    rng = random.Random(9)
    for _ in range(50):
        word = "".join(rng.choices(string.ascii_lowercase, k=rng.randint(1, 8)))
        depth = rng.randint(0, 3)
        for v in delete_variants(word, depth):
            assert len(word) - len(v) <= depth


# -- dictionary construction -------------------------------------------------

def test_dictionary_validation():
    with pytest.raises(ValueError):
        FrequencyDictionary({}, max_edit_distance=3, prefix_length=2)
    with pytest.raises(ValueError):
        FrequencyDictionary({}, metric="hamming")
    with pytest.raises(ValueError):
        FrequencyDictionary({}, unknown_penalty_base=1.0)
    with pytest.raises(ValueError):
        FrequencyDictionary({"a": 0})
    with pytest.raises(ValueError):
        FrequencyDictionary({"": 3})


def test_dictionary_basics(tiny_dict):
    assert "cat" in tiny_dict
    assert "dog" not in tiny_dict
    assert len(tiny_dict) == 4
    assert tiny_dict.count("the") == 50
    assert tiny_dict.count("dog") == 0
    assert tiny_dict.total_count == 110
    assert tiny_dict.longest_word_length == 3


def test_empty_dictionary_is_valid():
    d = FrequencyDictionary({})
    assert len(d) == 0
    assert d.lookup("anything", max_distance=2) is None
    assert d.segment("").parts == ()


def test_build_dictionary_counts_and_min_count():
    corpus = [["a", "b", "a"], ["b", "c"], ["a"]]
    d = build_dictionary(corpus)
    assert d.count("a") == 3 and d.count("b") == 2 and d.count("c") == 1
    d2 = build_dictionary(corpus, min_count=2)
    assert "c" not in d2 and "a" in d2
    assert build_dictionary([]).total_count == 0


# -- lookup ------------------------------------------------------------------

def test_lookup_exact_hit_short_circuits(tiny_dict):
    s = tiny_dict.lookup("cat", max_distance=2)
    assert s == Suggestion("cat", 0, 20)


def test_lookup_simple_corrections(tiny_dict):
    assert tiny_dict.lookup("caat", max_distance=2) == Suggestion("cat", 1, 20)
    assert tiny_dict.lookup("teh", max_distance=2) == Suggestion("the", 1, 50)  # transposition
    assert tiny_dict.lookup("zzzz", max_distance=2) is None


def test_lookup_tie_breaks():
    d = FrequencyDictionary({"cart": 5, "cast": 9, "care": 9})
    s = d.lookup("cars", max_distance=2)
    # cart/cast/care are all distance 1; higher count wins, then alphabetical
    assert s.distance == 1
    assert s.word == "care"  # count 9 ties with cast, "care" < "cast"
    d2 = FrequencyDictionary({"aa": 1, "ab": 7})
    assert d2.lookup("ac", max_distance=1).word == "ab"  # count beats alphabet


def test_lookup_max_distance_validation(tiny_dict):
    with pytest.raises(ValueError):
        tiny_dict.lookup("cat", max_distance=3)  # beyond the index depth
    assert tiny_dict.lookup("cat", max_distance=0) == Suggestion("cat", 0, 20)
    assert tiny_dict.lookup("cxt", max_distance=0) is None


def test_lookup_respects_metric_flag():
    dl = FrequencyDictionary({"ba": 3}, metric="damerau")
    lev = FrequencyDictionary({"ba": 3}, metric="levenshtein")
    assert dl.lookup("ab", max_distance=1) == Suggestion("ba", 1, 3)
    assert lev.lookup("ab", max_distance=1) is None  # needs 2 substitutions


def _random_dictionary(rng: random.Random, size: int, alphabet: str) -> dict[str, int]:
    counts = {}
    for _ in range(size):
        w = "".join(rng.choices(alphabet, k=rng.randint(1, 10)))
        counts[w] = rng.randint(1, 1000)
    return counts


def _mutate(rng: random.Random, word: str, alphabet: str) -> str:
    word = list(word)
    for _ in range(rng.randint(0, 3)):
        op = rng.randint(0, 3)
        pos = rng.randint(0, max(len(word) - 1, 0))
        if op == 0 and word:
            word.pop(pos)
        elif op == 1:
            word.insert(pos, rng.choice(alphabet))
        elif op == 2 and word:
            word[pos] = rng.choice(alphabet)
        elif op == 3 and pos + 1 < len(word):
            word[pos], word[pos + 1] = word[pos + 1], word[pos]
    return "".join(word)


def test_lookup_agrees_with_full_scan():
    """Candidate generation through the delete index must never miss the
    best dictionary word a full scan finds."""
    rng = random.Random(2024)
    for metric in ("damerau", "levenshtein"):
        for _ in range(12):
            counts = _random_dictionary(rng, rng.randint(5, 300), "abcde")
            d = FrequencyDictionary(counts, metric=metric)
            queries = []
            words = list(counts)
            for _ in range(25):
                if rng.random() < 0.6:
                    queries.append(_mutate(rng, rng.choice(words), "abcde"))
                else:
                    queries.append("".join(rng.choices("abcde", k=rng.randint(1, 11))))
            for q in queries:
                med = rng.randint(0, 2)
                got = d.lookup(q, max_distance=med)
                want = lookup_scan(q, counts, med, metric)
                if want is None:
                    assert got is None, (q, med, got)
                else:
                    assert got == Suggestion(*want), (q, med, got, want)


def test_adding_a_word_never_hurts():
    rng = random.Random(77)
    counts = _random_dictionary(rng, 60, "abc")
    d = FrequencyDictionary(counts)
    queries = ["".join(rng.choices("abc", k=rng.randint(1, 8))) for _ in range(40)]
    before = {q: d.lookup(q, max_distance=2) for q in queries}
    counts2 = dict(counts)
    counts2["abcab"] = 5
    d2 = FrequencyDictionary(counts2)
    for q in queries:
        after = d2.lookup(q, max_distance=2)
        if before[q] is not None:
            assert after is not None
            assert after.distance <= before[q].distance


# -- segmentation ------------------------------------------------------------

def test_segment_worked_example(tiny_dict):
    seg = tiny_dict.segment("thecatonthemat")
    assert seg.parts == ("the", "cat", "on", "the", "mat")
    expected = sum(
        math.log(tiny_dict.count(w) / tiny_dict.total_count)
        for w in ("the", "cat", "on", "the", "mat")
    )
    assert seg.score == pytest.approx(expected, rel=1e-12)


def test_segment_empty_and_single(tiny_dict):
    assert tiny_dict.segment("") == Segmentation((), 0.0)
    assert tiny_dict.segment("cat").parts == ("cat",)


def test_segment_applies_correction(tiny_dict):
    # "teh" corrects to "the" (distance 1) inside the split
    seg = tiny_dict.segment("thecatonteh")
    assert seg.parts == ("the", "cat", "on", "the")


def test_segment_unknown_parts_scored_but_kept():
    d = FrequencyDictionary({"abcdef": 10})
    seg = d.segment("xyzqrs")
    assert seg.parts  # something comes back
    assert seg.score < 0


def test_unknown_logp_formula(tiny_dict):
    n = tiny_dict.total_count
    assert tiny_dict.unknown_logp(3) == pytest.approx(-math.log(n) - 3 * math.log(10))
    empty = FrequencyDictionary({})
    assert empty.unknown_logp(2) == pytest.approx(-math.log(1) - 2 * math.log(10))


def test_segment_matches_exhaustive_split():
    rng = random.Random(424)
    for _ in range(20):
        words = set()
        for _ in range(rng.randint(4, 12)):
            words.add("".join(rng.choices("ab", k=rng.randint(1, 5))))
        counts = {w: rng.randint(1, 100) for w in words}
        d = FrequencyDictionary(counts)
        inputs = []
        wl = list(words)
        for _ in range(15):
            k = rng.randint(1, 3)
            inputs.append("".join(rng.choice(wl) for _ in range(k))[:12])
        inputs += ["".join(rng.choices("ab", k=rng.randint(1, 9))) for _ in range(5)]
        for text in inputs:
            got = d.segment(text)
            want = best_split_score(text, d)
            assert got.score == pytest.approx(want, rel=1e-12, abs=1e-12), (text, counts)


# -- persistence -------------------------------------------------------------

def test_save_load_round_trip(tmp_path, tiny_dict):
    path = str(tmp_path / "dict.txt")
    tiny_dict.save(path)
    loaded = FrequencyDictionary.load(path)
    assert dict(loaded.items()) == dict(tiny_dict.items())
    assert loaded.lookup("caat", max_distance=2) == tiny_dict.lookup("caat", max_distance=2)


def test_save_emits_comments_and_load_skips_them(tmp_path, tiny_dict):
    path = str(tmp_path / "dict.txt")
    tiny_dict.save(path, comments=["KEY = VALUE"])
    with open(path) as fh:
        first = fh.readline()
    assert first == "# KEY = VALUE\n"
    assert len(FrequencyDictionary.load(path)) == 4


def test_load_rejects_malformed_lines(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("ok 3\nbroken\n")
    with pytest.raises(DataError, match="line 2"):
        FrequencyDictionary.load(str(path))
    path.write_text("word notanumber\n")
    with pytest.raises(DataError, match="line 1"):
        FrequencyDictionary.load(str(path))
    path.write_text("word -4\n")
    with pytest.raises(DataError):
        FrequencyDictionary.load(str(path))
