import math

import numpy as np
import pytest

from topicforge.sentiment import (
    EXCLAIM_INCREMENT,
    NORMALIZATION_ALPHA,
    Lexicon,
    SentimentError,
    classify,
    daily_score,
    load_external_scores,
    load_lexicon,
    score_comment,
)


@pytest.fixture(scope="module")
def lex():
    return load_lexicon()


def compound(text, lex):
    return score_comment(text, lex).compound


class TestLoadLexicon:
    def test_bundled_published_value(self, lex):
        assert lex.entries["good"] == 1.9
        assert len(lex.entries) > 100
        assert lex.boosters and lex.negators

    def test_duplicate_token_last_wins_with_warning(self, tmp_path):
        p = tmp_path / "lex.txt"
        p.write_text("alpha\t1.0\nalpha\t2.0\n")
        with pytest.warns(UserWarning, match="duplicate"):
            out = load_lexicon(p)
        assert out.entries["alpha"] == 2.0

    def test_empty_file_errors(self, tmp_path):
        p = tmp_path / "lex.txt"
        p.write_text("")
        with pytest.raises(SentimentError, match="no entries"):
            load_lexicon(p)

    def test_out_of_range_valence(self, tmp_path):
        p = tmp_path / "lex.txt"
        p.write_text("big\t4.5\n")
        with pytest.raises(SentimentError, match="out of"):
            load_lexicon(p)


class TestScoreComment:
    def test_empty_text_all_neutral(self, lex):
        s = score_comment("", lex)
        assert (s.pos, s.neu, s.neg, s.compound) == (0.0, 1.0, 0.0, 0.0)

    def test_negation_flips(self, lex):
        assert compound("not good", lex) < 0

    def test_caps_emphasis(self, lex):
        assert compound("GOOD stock", lex) > compound("good stock", lex)

    def test_all_caps_text_gets_no_emphasis(self, lex):
        assert compound("GOOD STOCK", lex) == compound("good stock", lex)

    def test_exclamations_amplify(self, lex):
        assert compound("good!!!", lex) > compound("good", lex)

    def test_exclamation_sum_by_hand(self, lex):
        s = 1.9 + 3 * EXCLAIM_INCREMENT
        assert compound("good!!!", lex) == pytest.approx(s / math.sqrt(s * s + NORMALIZATION_ALPHA), abs=1e-12)

    def test_exclamations_cap_at_four(self, lex):
        assert compound("good!!!!", lex) == compound("good!!!!!!!!", lex)

    def test_booster_amplifies(self, lex):
        assert compound("very good", lex) > compound("good", lex)

    def test_dampener_attenuates(self, lex):
        assert 0 < compound("slightly good", lex) < compound("good", lex)

    def test_booster_on_negative_word(self, lex):
        assert compound("very bad", lex) < compound("bad", lex) < 0

    def test_proportions_sum_to_one(self, lex):
        for text in ("good bad neutral words here", "so very GOOD!!", "nothing matches here", "terrible loss"):
            s = score_comment(text, lex)
            assert s.pos + s.neu + s.neg == pytest.approx(1.0, abs=1e-9)

    def test_compound_strictly_inside_unit_interval(self, lex):
        text = " ".join(["best"] * 50) + "!!!!"
        assert abs(compound(text, lex)) < 1.0

    def test_monotone_in_summed_valence(self, lex):
        values = [compound(" ".join(["good"] * n), lex) for n in range(1, 8)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_odd_under_valence_negation(self, tmp_path):
        base = "gain loss big GAIN not loss really gain!!"
        plus = tmp_path / "plus.txt"
        minus = tmp_path / "minus.txt"
        plus.write_text("gain\t1.9\nloss\t-2.2\nbig\t1.0\n")
        minus.write_text("gain\t-1.9\nloss\t2.2\nbig\t-1.0\n")
        s_plus = score_comment(base, load_lexicon(plus))
        s_minus = score_comment(base, load_lexicon(minus))
        assert s_plus.compound == pytest.approx(-s_minus.compound, abs=1e-12)
        assert s_plus.pos == pytest.approx(s_minus.neg, abs=1e-12)


class TestClassify:
    def test_zero_neutral(self):
        assert classify(0.0) == "Neutral"

    def test_positive_boundary_inclusive(self):
        assert classify(0.05) == "Positive"
        assert classify(0.049999) == "Neutral"

    def test_negative(self):
        assert classify(-0.5) == "Negative"
        assert classify(-0.05) == "Negative"

    def test_mirror_labels(self, lex):
        for x in (0.05, 0.2, 0.9):
            a, b = classify(x), classify(-x)
            assert {a, b} == {"Positive", "Negative"}


class TestDailyScore:
    def S(self, c):
        from topicforge.sentiment import SentimentScore

        return SentimentScore(0, 1, 0, c)

    def test_empty_day_neutral(self):
        assert daily_score([]) == 0.0

    def test_symmetry(self):
        assert daily_score([self.S(0.4), self.S(-0.4)]) == 0.0

    def test_arithmetic(self):
        assert daily_score([self.S(0.3), self.S(0.6), self.S(0.9)]) == pytest.approx(0.6)

    def test_permutation_invariant_and_bounded(self):
        rng = np.random.default_rng(0)
        vals = rng.uniform(-1, 1, 9).tolist()
        scores = [self.S(v) for v in vals]
        rev = list(reversed(scores))
        assert daily_score(scores) == pytest.approx(daily_score(rev), abs=1e-12)
        assert min(vals) <= daily_score(scores) <= max(vals)

    def test_weighted_mean(self):
        assert daily_score([self.S(1.0), self.S(0.0)], weights=[3, 1]) == pytest.approx(0.75)


class TestExternalScores:
    def test_three_row_file(self, tmp_path):
        p = tmp_path / "scores.csv"
        p.write_text("comment_id,compound\n1,0.5\n2,-0.25\n3,0.0\n")
        provider = load_external_scores(p)
        assert len(provider) == 3
        assert provider.compound("2") == -0.25

    def test_out_of_range_names_row(self, tmp_path):
        p = tmp_path / "scores.csv"
        p.write_text("comment_id,compound\n1,0.5\n2,1.5\n")
        with pytest.raises(SentimentError, match="row 2"):
            load_external_scores(p)

    def test_duplicate_id(self, tmp_path):
        p = tmp_path / "scores.csv"
        p.write_text("comment_id,compound\n1,0.5\n1,0.4\n")
        with pytest.raises(SentimentError, match="duplicate"):
            load_external_scores(p)

    def test_unknown_id_lookup(self, tmp_path):
        p = tmp_path / "scores.csv"
        p.write_text("comment_id,compound\n1,0.5\n")
        provider = load_external_scores(p)
        with pytest.raises(SentimentError, match="no external score"):
            provider.compound("99")
