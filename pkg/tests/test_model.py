"""Core model: money, ratings, profiles, validation, serialization."""

import json
from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qber import (
    BusinessProfile,
    BusinessUnit,
    ControlImplementation,
    MaturityLevel,
    Money,
    QberError,
    Rating,
    RatingMapping,
    Segment,
    ThreatExposure,
    load_profile,
    profile_from_json,
    profile_to_json,
    validate_profile,
)
from qber.model import as_fraction, as_weight, normalize, rating_to_weight

from conftest import make_worked_profile


# ---------------------------------------------------------------------------
# Scalar validators
# ---------------------------------------------------------------------------

def test_weight_bounds():
    assert as_weight(0) == 0.0
    assert as_weight(10) == 10.0
    for bad in (-0.1, 10.1, float("nan")):
        with pytest.raises(ValueError):
            as_weight(bad)


def test_fraction_bounds():
    assert as_fraction(0.5) == 0.5
    for bad in (-1e-9, 1.0000001):
        with pytest.raises(ValueError):
            as_fraction(bad)


def test_normalize_maps_weight_scale_to_fractions():
    assert normalize(5.0) == 0.5
    assert normalize(0.0) == 0.0
    assert normalize(10.0) == 1.0


# ---------------------------------------------------------------------------
# Ratings
# ---------------------------------------------------------------------------

def test_default_rating_weights():
    assert rating_to_weight(Rating.LOW) == 2.5
    assert rating_to_weight(Rating.MEDIUM) == 5.0
    assert rating_to_weight(Rating.HIGH) == 8.0


def test_rating_from_str_case_insensitive():
    assert Rating.from_str("High") is Rating.HIGH
    with pytest.raises(ValueError):
        Rating.from_str("extreme")


def test_rating_mapping_must_increase():
    with pytest.raises(ValueError):
        RatingMapping(low=5.0, medium=5.0, high=8.0)
    with pytest.raises(ValueError):
        RatingMapping(low=6.0, medium=5.0, high=8.0)


def test_maturity_from_str_accepts_spaced_names():
    assert MaturityLevel.from_str("Not Implemented") is MaturityLevel.NOT_IMPLEMENTED
    assert MaturityLevel.from_str("optimized") is MaturityLevel.OPTIMIZED
    with pytest.raises(ValueError):
        MaturityLevel.from_str("legendary")


# ---------------------------------------------------------------------------
# Money
# ---------------------------------------------------------------------------

def test_money_decimal_construction():
    m = Money.from_float(0.1, "USD")
    assert m.amount == Decimal("0.1")  # no binary-float smear


def test_money_rejects_negative_and_bad_currency():
    with pytest.raises(ValueError):
        Money.from_float(-1.0, "USD")
    with pytest.raises(ValueError):
        Money.from_float(1.0, "usd")
    with pytest.raises(ValueError):
        Money.from_float(1.0, "US")


def test_money_currency_mismatch_is_hard_error():
    usd = Money.from_float(1.0, "USD")
    eur = Money.from_float(1.0, "EUR")
    with pytest.raises(QberError) as exc_info:
        usd.plus(eur)
    assert exc_info.value.code == "CURRENCY_MISMATCH"
    with pytest.raises(QberError):
        usd < eur


def test_money_arithmetic():
    m = Money.from_float(100.0, "USD")
    assert m.times(0.5) == Money.from_float(50.0, "USD")
    assert m.plus(m) == Money.from_float(200.0, "USD")
    with pytest.raises(ValueError):
        m.times(-0.1)


@given(st.floats(min_value=0, max_value=1e12, allow_nan=False, allow_infinity=False))
def test_money_json_round_trip(value):
    m = Money.from_float(value, "USD")
    assert Money.from_json(m.to_json()) == m


def test_money_equality_is_currency_aware():
    assert Money.from_float(1.0, "USD") != Money.from_float(1.0, "EUR")
    assert Money.from_float(1.0, "USD") != 1.0


# ---------------------------------------------------------------------------
# Profile structure
# ---------------------------------------------------------------------------

def test_duplicate_control_ids_rejected():
    with pytest.raises(ValueError):
        Segment(
            name="S",
            revenue_share=0.5,
            implemented_controls=(
                ControlImplementation("C-1", MaturityLevel.INITIAL),
                ControlImplementation("C-1", MaturityLevel.DEFINED),
            ),
            threat_exposures=(),
        )


def test_duplicate_segment_and_unit_names_rejected():
    seg = Segment(name="S", revenue_share=0.4, implemented_controls=(),
                  threat_exposures=())
    with pytest.raises(ValueError):
        BusinessUnit(name="U", revenue_share=1.0, segments=(seg, seg))
    unit = BusinessUnit(name="U", revenue_share=0.5, segments=(seg,))
    with pytest.raises(ValueError):
        BusinessProfile(
            name="P", sector="BFSI", country="India",
            yearly_revenue=Money.from_float(1000.0, "USD"),
            employee_count=1, units=(unit, unit),
        )


def test_profile_requires_a_unit():
    with pytest.raises(ValueError):
        BusinessProfile(
            name="P", sector="BFSI", country="India",
            yearly_revenue=Money.from_float(1000.0, "USD"),
            employee_count=1, units=(),
        )


# ---------------------------------------------------------------------------
# Validation against a catalog
# ---------------------------------------------------------------------------

def test_worked_profile_validates(worked_profile, fixture_catalog):
    assert validate_profile(worked_profile, fixture_catalog).ok


def _profile_with_segment(segment: Segment, unit_share=1.0) -> BusinessProfile:
    return BusinessProfile(
        name="P", sector="BFSI", country="India",
        yearly_revenue=Money.from_float(1_000_000.0, "USD"),
        employee_count=10,
        units=(BusinessUnit(name="U", revenue_share=unit_share,
                            segments=(segment,)),),
    )


def test_unknown_ids_reported_not_raised(fixture_catalog):
    profile = _profile_with_segment(Segment(
        name="S", revenue_share=0.5,
        implemented_controls=(ControlImplementation("C-GHOST", MaturityLevel.INITIAL),),
        threat_exposures=(ThreatExposure("T-GHOST", 5.0, Rating.LOW, Rating.LOW),),
    ))
    report = validate_profile(profile, fixture_catalog)
    codes = {v.code for v in report.violations}
    assert codes == {"UNKNOWN_CONTROL", "UNKNOWN_THREAT"}
    paths = [v.path for v in report.violations]
    assert all(p.startswith("units[0].segments[0].") for p in paths)


def test_share_sum_violations(fixture_catalog):
    seg = Segment(name="A", revenue_share=0.7, implemented_controls=(),
                  threat_exposures=())
    seg2 = Segment(name="B", revenue_share=0.7, implemented_controls=(),
                   threat_exposures=())
    profile = BusinessProfile(
        name="P", sector="BFSI", country="India",
        yearly_revenue=Money.from_float(1000.0, "USD"), employee_count=1,
        units=(BusinessUnit(name="U", revenue_share=1.0, segments=(seg, seg2)),),
    )
    report = validate_profile(profile, fixture_catalog)
    assert any(v.code == "SHARE_SUM_EXCEEDED" for v in report.violations)


def test_empty_unit_flagged(fixture_catalog):
    profile = BusinessProfile(
        name="P", sector="BFSI", country="India",
        yearly_revenue=Money.from_float(1000.0, "USD"), employee_count=1,
        units=(BusinessUnit(name="U", revenue_share=1.0, segments=()),),
    )
    report = validate_profile(profile, fixture_catalog)
    assert any(v.code == "EMPTY_UNIT" for v in report.violations)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def test_profile_json_round_trip(worked_profile):
    doc = profile_to_json(worked_profile)
    rebuilt = profile_from_json(doc)
    assert profile_to_json(rebuilt) == doc


def test_profile_from_json_rejects_future_schema():
    doc = profile_to_json(make_worked_profile())
    doc["schema_version"] = "2.0.0"
    with pytest.raises(QberError) as exc_info:
        profile_from_json(doc)
    assert exc_info.value.code == "SCHEMA_VERSION_UNSUPPORTED"


def test_profile_from_json_reports_missing_fields():
    with pytest.raises(QberError) as exc_info:
        profile_from_json({"schema_version": "1.0.0"})
    assert exc_info.value.code == "MALFORMED"


def test_load_profile_reports_parse_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"name": "x", ')
    with pytest.raises(QberError) as exc_info:
        load_profile(path)
    assert exc_info.value.code == "MALFORMED"
    assert "byte_offset" in exc_info.value.details[0]


def test_listed_company_extension_survives_round_trip(worked_profile):
    doc = profile_to_json(worked_profile)
    doc["listed_company"] = {"exchange": "NSE", "ticker": "WEB"}
    rebuilt = profile_from_json(doc)
    assert profile_to_json(rebuilt)["listed_company"] == {
        "exchange": "NSE", "ticker": "WEB",
    }
