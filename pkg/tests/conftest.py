"""Shared fixtures and the acceptance-criteria terminal summary."""

from __future__ import annotations

import json

import pytest

from qber import (
    BusinessProfile,
    BusinessUnit,
    ControlImplementation,
    MaturityLevel,
    Money,
    Rating,
    Segment,
    ThreatExposure,
    load_catalog,
    load_default_catalog,
)

# ---------------------------------------------------------------------------
# Catalog fixtures
# ---------------------------------------------------------------------------

# Minimal catalog for hand-traceable numbers: one threat, one control that
# only shapes the CIA posture, one control that only protects the threat.
FIXTURE_CATALOG_DOC = {
    "schema_version": "1.0.0",
    "catalog_version": "fixture-1",
    "threats": [
        {"id": "T-BREACH", "name": "Customer Data Breach"},
    ],
    "domains": [
        {"id": "D-PAW", "name": "People and Awareness"},
        {"id": "D-EPT", "name": "Endpoint Protection"},
    ],
    "controls": [
        {
            "id": "C-POSTURE",
            "name": "Baseline Hardening",
            "capex": {"amount": 30000, "currency": "USD"},
            "opex_annual": {"amount": 20000, "currency": "USD"},
            "base_efficacy": {},
            "cia_contribution": {
                "confidentiality": 0.9, "integrity": 0.6, "availability": 0.6,
            },
            "domains": ["D-EPT"],
        },
        {
            "id": "C-UPGRADE",
            "name": "Breach Prevention Suite",
            "capex": {"amount": 0, "currency": "USD"},
            "opex_annual": {"amount": 100000, "currency": "USD"},
            "base_efficacy": {"T-BREACH": 0.8},
            "cia_contribution": {
                "confidentiality": 0.0, "integrity": 0.0, "availability": 0.0,
            },
            "domains": ["D-PAW"],
        },
    ],
    "threat_domain_weights": [
        {"threat_id": "T-BREACH", "domain_id": "D-PAW", "weight": 9},
    ],
    "rcvar_factors": [
        {"sector": "BFSI", "country": "India", "size_band": "medium",
         "factors": [0.7, 0.5, 0.6]},
        {"default": True, "factors": [0.55, 0.5, 0.5]},
    ],
    "maturity_multipliers": {
        "not_implemented": 1.25,
        "initial": 0.65,
        "repeatable": 0.55,
        "defined": 0.45,
        "managed": 0.31,
        "optimized": 0.25,
    },
}


@pytest.fixture(scope="session")
def default_catalog():
    return load_default_catalog()


@pytest.fixture(scope="session")
def fixture_catalog():
    return load_catalog(json.dumps(FIXTURE_CATALOG_DOC))


def make_worked_profile() -> BusinessProfile:
    """The hand-traceable company: $10M revenue, one 60%-share segment.

    The posture control is fully mature so its CIA contribution applies
    unattenuated; the prevention control runs at Initial maturity and is
    the interesting upgrade candidate.
    """
    return BusinessProfile(
        name="Worked Example Bank",
        sector="BFSI",
        country="India",
        yearly_revenue=Money.from_float(10_000_000, "USD"),
        employee_count=500,
        units=(
            BusinessUnit(
                name="Digital",
                revenue_share=1.0,
                segments=(
                    Segment(
                        name="Sales Platform",
                        revenue_share=0.6,
                        implemented_controls=(
                            ControlImplementation("C-POSTURE", MaturityLevel.OPTIMIZED),
                            ControlImplementation("C-UPGRADE", MaturityLevel.INITIAL),
                        ),
                        threat_exposures=(
                            ThreatExposure(
                                threat_id="T-BREACH",
                                risk_weight=5.0,
                                operational=Rating.HIGH,
                                financial=Rating.HIGH,
                            ),
                        ),
                    ),
                ),
                regulations=("RBI",),
            ),
        ),
    )


@pytest.fixture
def worked_profile() -> BusinessProfile:
    return make_worked_profile()


# ---------------------------------------------------------------------------
# Acceptance summary: one line per criterion at the end of the run
# ---------------------------------------------------------------------------

ACCEPTANCE_LABELS = {
    "test_maturity_table_exactness": "maturity table exactness",
    "test_equation_oracle_suite": "equation oracle suite (1000 cases per equation)",
    "test_chain_bound_property": "chain bound over 10,000 random profiles",
    "test_worked_end_to_end_trace": "worked end-to-end trace",
    "test_scale_invariance": "currency scale invariance (x1000)",
    "test_simulation_convergence": "simulation convergence and quantile sanity",
    "test_determinism_and_round_trips": "determinism and round-trips",
    "test_api_conformance": "API contract conformance",
}

_acceptance_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if name not in ACCEPTANCE_LABELS:
        return
    if report.when == "call":
        _acceptance_results[name] = report.outcome
    elif report.when == "setup" and report.outcome != "passed":
        _acceptance_results[name] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, label in ACCEPTANCE_LABELS.items():
        outcome = _acceptance_results.get(name)
        if outcome is None:
            continue
        flag = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"[{flag}] {label}")
