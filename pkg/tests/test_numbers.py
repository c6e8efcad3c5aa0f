from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indicscore.errors import ConfigurationError, DataError
from indicscore.numbers import (
    ENGLISH_TABLE,
    MultiplierTable,
    load_language_table,
    load_lexicon,
    parse_amount_text,
    parse_currency_expression,
    parse_latin_numeral,
    parse_number_words,
    rewrite_digit_runs,
    spell_number,
)

EN = ENGLISH_TABLE
TE = load_language_table("te")
TA = load_language_table("ta")
HI = load_language_table("hi")
ALL_TABLES = {"en": EN, "te": TE, "ta": TA, "hi": HI}


def words_value(text, table=EN):
    parsed = parse_number_words(text.split(), table)
    return None if parsed is None else parsed.value


# ---------------------------------------------------------------------------
# Latin numerals
# ---------------------------------------------------------------------------

def test_plain_numerals():
    assert parse_latin_numeral("0").value == 0
    assert parse_latin_numeral("500000").value == 500000
    assert parse_latin_numeral("500000").source_form == "latin_numeral"


def test_western_grouping():
    assert parse_latin_numeral("500,000").value == 500000
    assert parse_latin_numeral("1,234,567").value == 1234567


def test_indian_grouping():
    assert parse_latin_numeral("5,00,000").value == 500000
    assert parse_latin_numeral("1,23,45,678").value == 12345678
    assert parse_latin_numeral("50,000").value == 50000


def test_bad_grouping_rejected():
    for bad in ("5,000,00", "12,34", "1,2345", ",500", "500,", "1,,000"):
        assert parse_latin_numeral(bad) is None


def test_decimals():
    assert parse_latin_numeral("12.50").value == Fraction(25, 2)
    assert parse_latin_numeral("1,00,000.25").value == Fraction(10000025, 100)
    assert parse_latin_numeral("12.") is None


def test_exactness():
    # 0.1 is not representable in binary floating point; Fractions are exact
    assert parse_latin_numeral("0.1").value == Fraction(1, 10)
    assert parse_latin_numeral("0.1").value != 0.1000000000000001


def test_non_latin_digits_rejected():
    assert parse_latin_numeral("५००") is None
    assert parse_latin_numeral("౫౦") is None


# ---------------------------------------------------------------------------
# Word grammar
# ---------------------------------------------------------------------------

def test_small_numbers():
    assert words_value("zero") == 0
    assert words_value("seven") == 7
    assert words_value("nineteen") == 19
    assert words_value("twenty") == 20
    assert words_value("twenty five") == 25
    assert words_value("ninety nine") == 99


def test_hundreds():
    assert words_value("one hundred") == 100
    assert words_value("two hundred fifty three") == 253
    assert words_value("nineteen hundred") == 1900
    assert words_value("nine hundred ninety nine") == 999


def test_bare_hundred_needs_count():
    assert words_value("hundred") is None
    assert words_value("hundred five") is None


def test_multiplier_groups():
    assert words_value("five lakh") == 500000
    assert words_value("five hundred thousand") == 500000
    assert words_value("twenty lakh thirty thousand") == 2030000
    assert words_value("three crore five") == 30000005
    assert words_value("one lakh one") == 100001
    assert words_value("twelve crore thirty four lakh") == 123400000


def test_multipliers_must_descend():
    assert words_value("five thousand two lakh") is None
    assert words_value("five lakh five lakh") is None


def test_multipliers_need_counts():
    assert words_value("thousand lakh") is None
    assert words_value("lakh") is None
    assert words_value("thousand") is None


def test_crore_compound():
    assert words_value("one thousand crore") == 10**10
    assert words_value("five lakh crore") == 5 * 10**12
    assert words_value("one lakh crore") == 10**12
    # compounding is crore-only; the same shape with lakh stays invalid
    assert words_value("one thousand lakh") is None


def test_two_plain_numerals_never_fuse():
    assert words_value("five six") is None
    assert words_value("fifty ten") is None
    assert words_value("zero five") is None
    assert words_value("twenty nineteen") is None


def test_compose_after_hundred_limits():
    assert words_value("one hundred ninety nine") == 199
    assert words_value("one hundred hundred") is None


def test_hyphenated_compounds():
    assert words_value("twenty-five") == 25
    assert words_value("ninety-nine lakh") == 9900000


def test_hindi_words():
    assert words_value("पाँच लाख", HI) == 500000
    assert words_value("पांच लाख", HI) == 500000
    assert words_value("एक हज़ार", HI) == 1000
    assert words_value("निन्यानवे", HI) == 99
    assert words_value("सात सौ तिरसठ", HI) == 763


def test_telugu_words():
    assert words_value("ఐదు లక్షలు", TE) == 500000
    assert words_value("ఇరవై లక్షల", TE) == 2000000
    assert words_value("మూడు వేల ఐదు వందల", TE) == 3500
    assert words_value("తొంభై తొమ్మిది", TE) == 99


def test_tamil_words():
    assert words_value("ஐந்து லட்சம்", TA) == 500000
    assert words_value("இரண்டு கோடி", TA) == 20000000
    assert words_value("தொண்ணூறு ஒன்பது", TA) == 99


def test_romanized_loans_work_in_native_tables():
    assert words_value("పది hazaar", TE) == 10000
    assert words_value("పది లక్షల", TE) == 1000000


def test_casefolding_in_lookup():
    assert words_value("Five LAKH") == 500000


# ---------------------------------------------------------------------------
# Amount parsing (markers, scanning)
# ---------------------------------------------------------------------------

def test_parse_amount_text_with_markers():
    assert parse_amount_text("₹ five lakh", EN).value == 500000
    assert parse_amount_text("rupees five hundred", EN).value == 500
    assert parse_amount_text("five lakh rupees", EN).value == 500000
    assert parse_amount_text("₹5,00,000", EN).value == 500000


def test_parse_amount_text_whole_input_only():
    assert parse_amount_text("about five lakh total", EN) is None
    assert parse_amount_text("", EN) is None


def test_parse_currency_expression_scans():
    amounts = parse_currency_expression("pay ₹500 or maybe five lakh later", EN)
    assert [a.value for a in amounts] == [500, 500000]


def test_parse_currency_expression_takes_longest_run():
    amounts = parse_currency_expression("two hundred fifty thousand exactly", EN)
    assert [a.value for a in amounts] == [250000]


def test_parse_currency_expression_empty():
    assert parse_currency_expression("no numbers here", EN) == []


def test_parse_currency_expression_native():
    amounts = parse_currency_expression("మొత్తం ఐదు లక్షల రూపాయలు అయ్యింది", TE)
    assert [a.value for a in amounts] == [500000]


# ---------------------------------------------------------------------------
# Spelling
# ---------------------------------------------------------------------------

def test_spell_basic():
    assert spell_number(0, EN) == ["zero"]
    assert spell_number(7, EN) == ["seven"]
    assert spell_number(25, EN) == ["twenty-five"]
    assert spell_number(100, EN) == ["one", "hundred"]
    assert spell_number(500000, EN) == ["five", "lakh"]
    assert spell_number(2030000, EN) == ["twenty", "lakh", "thirty", "thousand"]


def test_spell_uses_indian_grouping():
    assert spell_number(10**7, EN) == ["one", "crore"]
    assert spell_number(123456789, EN) == [
        "twelve", "crore", "thirty-four", "lakh", "fifty-six", "thousand",
        "seven", "hundred", "eighty-nine",
    ]


def test_spell_large_crore_counts():
    # crore counts up to 99999 are spelled as their own number
    words = spell_number(99999 * 10**7, EN)
    assert words[:5] == ["ninety-nine", "thousand", "nine", "hundred", "ninety-nine"]
    assert words[5] == "crore"


def test_spell_rejects_out_of_range():
    with pytest.raises(ValueError):
        spell_number(-1, EN)
    with pytest.raises(ValueError):
        spell_number(10**12, EN)
    with pytest.raises(ValueError):
        spell_number(1.5, EN)


def test_spell_boundary_value():
    words = spell_number(10**12 - 1, EN)
    assert parse_number_words(words, EN).value == 10**12 - 1


def test_spell_telugu_two_word_tens():
    # tables without single words for 21..99 fall back to tens + ones
    assert spell_number(25, TE) == ["ఇరవై", "ఐదు"]
    assert spell_number(99, TE) == ["తొంభై", "తొమ్మిది"]


def test_spell_hindi_single_word_tens():
    assert spell_number(25, HI) == ["पच्चीस"]
    assert spell_number(99, HI) == ["निन्यानवे"]


@settings(max_examples=300)
@given(st.integers(min_value=0, max_value=10**12 - 1), st.sampled_from(sorted(ALL_TABLES)))
def test_spell_parse_round_trip(value, lang):
    table = ALL_TABLES[lang]
    parsed = parse_number_words(spell_number(value, table), table)
    assert parsed is not None
    assert parsed.value == value


# ---------------------------------------------------------------------------
# Digit-run rewriting
# ---------------------------------------------------------------------------

def test_rewrite_grouped():
    assert rewrite_digit_runs("pay 500000 now", EN) == "pay five lakh now"
    assert rewrite_digit_runs("pin 500081", EN, "digit_by_digit") == (
        "pin five zero zero zero eight one"
    )


def test_rewrite_single_digits_always_unit_words():
    assert rewrite_digit_runs("room 5", EN) == "room five"
    assert rewrite_digit_runs("room 5", EN, "digit_by_digit") == "room five"


def test_rewrite_leading_zero_runs_go_digit_by_digit():
    assert rewrite_digit_runs("code 054", EN) == "code zero five four"


def test_rewrite_preserves_non_digit_text():
    text = "ఖాతా 123 లో ₹500 జమ"
    out = rewrite_digit_runs(text, TE)
    assert "123" not in out and "500" not in out
    assert out.startswith("ఖాతా ") and " జమ" in out


def test_rewrite_mode_validated():
    with pytest.raises(ConfigurationError):
        rewrite_digit_runs("5", EN, "fancy")


def test_rewrite_huge_run_grouped_rejected():
    with pytest.raises(ValueError):
        rewrite_digit_runs("1000000000000", EN)
    # digit_by_digit has no magnitude limit
    out = rewrite_digit_runs("1000000000000", EN, "digit_by_digit")
    assert out.split()[0] == "one" and set(out.split()[1:]) == {"zero"}


def test_rewrite_round_trips_through_parser():
    for value in (7, 42, 500, 500081, 123456789):
        out = rewrite_digit_runs(str(value), EN)
        assert parse_number_words(out.split(), EN).value == value


# ---------------------------------------------------------------------------
# Lexicon files and tables
# ---------------------------------------------------------------------------

def test_load_lexicon_round_trip(tmp_path):
    path = tmp_path / "xx.tsv"
    path.write_text(
        "# demo lexicon\n"
        "zero\t0\tunit\tlatin\n"
        "five\t5\tunit\tlatin\n"
        "lakh\t100000\tmultiplier\tlatin\n"
        "rs\t0\tcurrency_marker\tlatin\n",
        encoding="utf-8",
    )
    table = load_lexicon(str(path), "xx")
    assert table.units["five"] == 5
    assert table.multipliers["lakh"] == 100000
    assert "rs" in table.currency_markers


def test_load_lexicon_reports_all_problems(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text(
        "five\t5\tunit\tlatin\n"
        "six\tsix\tunit\tlatin\n"
        "seven\t7\tverb\tlatin\n"
        "eight\t8\tunit\n",
        encoding="utf-8",
    )
    with pytest.raises(DataError) as exc:
        load_lexicon(str(path), "xx")
    message = str(exc.value)
    assert "line 2" in message and "line 3" in message and "line 4" in message


def test_table_rejects_duplicate_words():
    with pytest.raises(ConfigurationError):
        MultiplierTable.from_entries(
            "xx",
            [("five", 5, "unit", "latin"), ("five", 6, "unit", "latin")],
        )


def test_table_rejects_non_power_multiplier():
    with pytest.raises(ConfigurationError):
        MultiplierTable.from_entries("xx", [("gross", 144, "multiplier", "latin")])
    with pytest.raises(ConfigurationError):
        MultiplierTable.from_entries("xx", [("hundred", 100, "multiplier", "latin")])


def test_table_rejects_out_of_range_unit():
    with pytest.raises(ConfigurationError):
        MultiplierTable.from_entries("xx", [("gross", 144, "unit", "latin")])


def test_first_spelling_wins():
    table = MultiplierTable.from_entries(
        "xx",
        [("five", 5, "unit", "latin"), ("fiver", 5, "unit", "latin")],
    )
    assert table.spell_units[5] == "five"
    assert parse_number_words(["fiver"], table).value == 5


def test_merged_with_prefers_own_entries():
    merged = TE.merged_with(EN)
    assert parse_number_words(["five", "lakh"], merged).value == 500000
    assert parse_number_words(["ఐదు", "లక్షలు"], merged).value == 500000
    # spelling stays native
    assert spell_number(5, merged) == ["ఐదు"]


def test_merged_with_conflicting_values_raise():
    other = MultiplierTable.from_entries("xx", [("ఐదు", 6, "unit", "latin")])
    with pytest.raises(ConfigurationError):
        TE.merged_with(other)


def test_bundled_tables_load_and_parse():
    for lang, sample, value in (
        ("te", "ఐదు లక్షలు", 500000),
        ("ta", "ஐந்து லட்சம்", 500000),
        ("hi", "पाँच लाख", 500000),
    ):
        table = load_language_table(lang)
        assert words_value(sample, table) == value
    with pytest.raises(ConfigurationError):
        load_language_table("fr")
