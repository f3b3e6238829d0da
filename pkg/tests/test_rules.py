import pytest

from fuzzysched.fuzzy import default_rulebase
from fuzzysched.rules import RuleParseError, parse_rulebase, render_rulebase
from fuzzysched.workload_io import fixture_path

# the rule table typed out by hand, independent of the package copy
RULE_TABLE = """
# priority      exec time    new priority
very_low        very_small   very_high
low             very_small   very_high
medium          very_small   very_high
high            very_small   very_high
very_high       very_small   very_high
very_low        small        medium
low             small        medium
medium          small        high
high            small        high
very_high       small        very_high
very_low        medium       very_low
low             medium       low
medium          medium       medium
high            medium       medium
very_high       medium       medium
very_low        long         very_low
low             long         very_low
medium          long         low
high            long         low
very_high       long         low
very_low        very_long    very_low
low             very_long    very_low
medium          very_long    very_low
high            very_long    low
very_high       very_long    low
"""


def _table_as_dsl():
    lines = []
    for row in RULE_TABLE.strip().splitlines():
        if row.startswith("#"):
            continue
        pp, et, out = row.split()
        lines.append(f"IF priority IS {pp} AND exec_time IS {et} THEN new_priority IS {out}")
    return "\n".join(lines)


def test_single_rule():
    rb = parse_rulebase("IF priority IS high AND exec_time IS small THEN new_priority IS high")
    assert len(rb) == 1
    assert rb.rules[0].antecedents == (("priority", "high"), ("exec_time", "small"))
    assert rb.rules[0].consequent == ("new_priority", "high")


def test_table_rendering_equals_default():
    rb = parse_rulebase(_table_as_dsl())
    assert len(rb) == 25
    assert rb == default_rulebase()


def test_render_round_trip_and_shipped_file():
    rb = default_rulebase()
    assert parse_rulebase(render_rulebase(rb)) == rb
    assert parse_rulebase(fixture_path("default.rules").read_text()) == rb


def test_keywords_case_insensitive_comments_blank_lines():
    text = """
    # leading comment

    if priority is low and exec_time is long then new_priority is very_low  # trailing
    If exec_time IS small AnD priority Is medium THEN new_priority iS high
    """
    rb = parse_rulebase(text)
    assert len(rb) == 2
    assert rb.lookup("medium", "small") == "high"


def test_single_antecedent():
    rb = parse_rulebase("IF exec_time IS very_small THEN new_priority IS very_high")
    assert rb.rules[0].antecedents == (("exec_time", "very_small"),)


def test_unknown_term_names_token():
    with pytest.raises(RuleParseError) as err:
        parse_rulebase("IF priority IS enormous AND exec_time IS small THEN new_priority IS high")
    assert err.value.token == "enormous"
    assert (err.value.line, err.value.column) == (1, 16)
    assert "enormous" in str(err.value)


def test_unknown_variable():
    with pytest.raises(RuleParseError) as err:
        parse_rulebase("\n\nIF urgency IS high THEN new_priority IS high")
    assert err.value.line == 3 and err.value.token == "urgency"


@pytest.mark.parametrize(
    "text,column",
    [
        ("IF priority high THEN new_priority IS high", 13),
        ("priority IS high THEN new_priority IS high", 1),
        ("IF priority IS high AND", 24),
        ("IF priority IS high THEN new_priority IS high extra", 47),
        ("IF priority IS high OR exec_time IS small THEN new_priority IS high", 21),
        ("IF priority IS high THEN priority IS low", 26),
        ("IF new_priority IS high THEN new_priority IS low", 4),
        ("IF priority IS high AND priority IS low THEN new_priority IS low", 25),
    ],
)
def test_syntax_errors_have_positions(text, column):
    with pytest.raises(RuleParseError) as err:
        parse_rulebase(text)
    assert err.value.line == 1
    assert err.value.column == column


def test_duplicate_antecedents():
    text = (
        "IF priority IS high AND exec_time IS small THEN new_priority IS high\n"
        "IF exec_time IS small AND priority IS high THEN new_priority IS low\n"
    )
    with pytest.raises(RuleParseError, match="duplicate") as err:
        parse_rulebase(text)
    assert err.value.line == 2
