"""Core domain model: rating scales, money, business profiles, validation.

Weights live on a 0-10 scale; all equation arithmetic downstream happens on
normalized [0,1] fractions so that products of weights stay inside [0,1] and
monetary outputs never exceed the revenue they are derived from.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from enum import Enum

from .errors import CURRENCY_MISMATCH, MALFORMED, SCHEMA_VERSION_UNSUPPORTED, QberError

PROFILE_SCHEMA_VERSION = "1.0.0"

_CURRENCY_RE = re.compile(r"^[A-Z]{3}$")


# ---------------------------------------------------------------------------
# Scales and ratings
# ---------------------------------------------------------------------------

def as_weight(value: float) -> float:
    """Validate a weight on the 0-10 scale and return it as a float."""
    w = float(value)
    if not 0.0 <= w <= 10.0:
        raise ValueError(f"weight {w} outside [0, 10]")
    return w


def as_fraction(value: float) -> float:
    """Validate a normalized fraction in [0, 1] and return it as a float."""
    f = float(value)
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fraction {f} outside [0, 1]")
    return f


def normalize(weight: float) -> float:
    """Map a 0-10 weight onto [0, 1]. Monotone and bijective on the scale."""
    return as_weight(weight) / 10.0


class Rating(Enum):
    """Qualitative three-level rating used for impacts."""

    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"

    @classmethod
    def from_str(cls, raw: str) -> "Rating":
        try:
            return cls(raw.strip().lower())
        except ValueError:
            raise ValueError(f"unknown rating {raw!r}") from None


@dataclass(frozen=True)
class RatingMapping:
    """Numeric anchors for Low/Medium/High on the 0-10 scale.

    Must be strictly increasing so normalization preserves rating order.
    """

    low: float = 2.5
    medium: float = 5.0
    high: float = 8.0

    def __post_init__(self):
        for name in ("low", "medium", "high"):
            as_weight(getattr(self, name))
        if not (self.low < self.medium < self.high):
            raise ValueError("rating mapping must be strictly increasing")

    def weight_for(self, rating: Rating) -> float:
        return {Rating.LOW: self.low, Rating.MEDIUM: self.medium, Rating.HIGH: self.high}[rating]

    def to_json(self) -> dict:
        return {"low": self.low, "medium": self.medium, "high": self.high}

    @classmethod
    def from_json(cls, doc: dict) -> "RatingMapping":
        return cls(low=float(doc["low"]), medium=float(doc["medium"]), high=float(doc["high"]))


DEFAULT_RATING_MAPPING = RatingMapping()


def rating_to_weight(rating: Rating, mapping: RatingMapping = DEFAULT_RATING_MAPPING) -> float:
    """Return the configured 0-10 weight for a qualitative rating."""
    return mapping.weight_for(rating)


class MaturityLevel(Enum):
    """Implementation maturity of a security control, worst to best."""

    NOT_IMPLEMENTED = "not_implemented"
    INITIAL = "initial"
    REPEATABLE = "repeatable"
    DEFINED = "defined"
    MANAGED = "managed"
    OPTIMIZED = "optimized"

    @classmethod
    def from_str(cls, raw: str) -> "MaturityLevel":
        normalized = raw.strip().lower().replace(" ", "_").replace("-", "_")
        try:
            return cls(normalized)
        except ValueError:
            raise ValueError(f"unknown maturity level {raw!r}") from None


# ---------------------------------------------------------------------------
# Money
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=False)
class Money:
    """Non-negative monetary amount tagged with an ISO-4217 currency code.

    Arithmetic and comparison are only defined between identical currencies;
    mixing currencies raises rather than silently converting.
    """

    amount: Decimal
    currency: str = "USD"

    def __post_init__(self):
        if isinstance(self.amount, float):
            object.__setattr__(self, "amount", Decimal(str(self.amount)))
        elif not isinstance(self.amount, Decimal):
            try:
                object.__setattr__(self, "amount", Decimal(self.amount))
            except (InvalidOperation, TypeError):
                raise ValueError(f"unparseable money amount {self.amount!r}") from None
        if self.amount < 0:
            raise ValueError(f"money amount {self.amount} is negative")
        if not _CURRENCY_RE.match(self.currency):
            raise ValueError(f"invalid currency code {self.currency!r}")

    @classmethod
    def from_float(cls, value: float, currency: str) -> "Money":
        return cls(Decimal(str(float(value))), currency)

    def as_float(self) -> float:
        return float(self.amount)

    def times(self, factor: float) -> "Money":
        """Scale by a non-negative factor (fraction arithmetic stays in float)."""
        if factor < 0:
            raise ValueError("cannot scale money by a negative factor")
        return Money.from_float(self.as_float() * factor, self.currency)

    def plus(self, other: "Money") -> "Money":
        self._check_currency(other)
        return Money(self.amount + other.amount, self.currency)

    def _check_currency(self, other: "Money"):
        if self.currency != other.currency:
            raise QberError(
                CURRENCY_MISMATCH,
                f"cannot combine {self.currency} with {other.currency}",
            )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Money):
            return NotImplemented
        return self.currency == other.currency and self.amount == other.amount

    def __hash__(self):
        return hash((self.currency, self.amount))

    def __le__(self, other: "Money") -> bool:
        self._check_currency(other)
        return self.amount <= other.amount

    def __lt__(self, other: "Money") -> bool:
        self._check_currency(other)
        return self.amount < other.amount

    def to_json(self) -> dict:
        return {"amount": float(self.amount), "currency": self.currency}

    @classmethod
    def from_json(cls, doc: dict) -> "Money":
        if not isinstance(doc, dict) or "amount" not in doc or "currency" not in doc:
            raise ValueError(f"money must be an object with amount and currency, got {doc!r}")
        return cls(Decimal(str(doc["amount"])), str(doc["currency"]))

    def __str__(self) -> str:  # pragma: no cover
        return f"{self.currency} {self.amount:,.2f}"


# ---------------------------------------------------------------------------
# CIA posture
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CiaPosture:
    """Confidentiality / integrity / availability posture, each in [0, 1]."""

    confidentiality: float
    integrity: float
    availability: float

    def __post_init__(self):
        for name in ("confidentiality", "integrity", "availability"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))

    def mean(self) -> float:
        return (self.confidentiality + self.integrity + self.availability) / 3.0

    def to_json(self) -> dict:
        return {
            "confidentiality": self.confidentiality,
            "integrity": self.integrity,
            "availability": self.availability,
        }


# ---------------------------------------------------------------------------
# Business profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ControlImplementation:
    control_id: str
    maturity: MaturityLevel


@dataclass(frozen=True)
class ThreatExposure:
    """A threat the segment is exposed to, with likelihood and impact ratings."""

    threat_id: str
    risk_weight: float  # 0-10 scale, normalized by the engine
    operational: Rating
    financial: Rating

    def __post_init__(self):
        object.__setattr__(self, "risk_weight", as_weight(self.risk_weight))


@dataclass(frozen=True)
class Segment:
    """A revenue-bearing information asset or service within a business unit."""

    name: str
    revenue_share: float  # fraction of the unit's revenue dependent on it
    implemented_controls: tuple[ControlImplementation, ...] = ()
    threat_exposures: tuple[ThreatExposure, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "revenue_share", as_fraction(self.revenue_share))
        # Controls and exposures are id-keyed sets; order is canonicalized so
        # equal segments serialize identically no matter how they were built.
        object.__setattr__(
            self,
            "implemented_controls",
            tuple(sorted(self.implemented_controls, key=lambda c: c.control_id)),
        )
        object.__setattr__(
            self,
            "threat_exposures",
            tuple(sorted(self.threat_exposures, key=lambda t: t.threat_id)),
        )
        seen = set()
        for impl in self.implemented_controls:
            if impl.control_id in seen:
                raise ValueError(f"duplicate control {impl.control_id!r} in segment {self.name!r}")
            seen.add(impl.control_id)
        threat_ids = [t.threat_id for t in self.threat_exposures]
        if len(threat_ids) != len(set(threat_ids)):
            raise ValueError(f"duplicate threat exposure in segment {self.name!r}")


@dataclass(frozen=True)
class BusinessUnit:
    """A division of the company with its own revenue share and segments."""

    name: str
    revenue_share: float  # fraction of company revenue
    segments: tuple[Segment, ...] = ()
    regulations: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "revenue_share", as_fraction(self.revenue_share))
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "regulations", tuple(self.regulations))
        names = [s.name for s in self.segments]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate segment names in unit {self.name!r}")


@dataclass(frozen=True)
class BusinessProfile:
    name: str
    sector: str
    country: str
    yearly_revenue: Money
    employee_count: int
    units: tuple[BusinessUnit, ...]
    listed_company: dict | None = None  # reserved extension, schema undefined

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))
        if not self.units:
            raise ValueError("profile must have at least one business unit")
        if self.employee_count < 0:
            raise ValueError("employee_count must be >= 0")
        names = [u.name for u in self.units]
        if len(names) != len(set(names)):
            raise ValueError("duplicate business unit names")

    def find_unit(self, unit_name: str) -> BusinessUnit | None:
        for unit in self.units:
            if unit.name == unit_name:
                return unit
        return None


# ---------------------------------------------------------------------------
# Profile validation
# ---------------------------------------------------------------------------

# Violation codes reported by validate_profile
UNKNOWN_THREAT = "UNKNOWN_THREAT"
UNKNOWN_CONTROL = "UNKNOWN_CONTROL"
SHARE_SUM_EXCEEDED = "SHARE_SUM_EXCEEDED"
NEGATIVE_REVENUE = "NEGATIVE_REVENUE"
EMPTY_UNIT = "EMPTY_UNIT"


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    path: str

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message, "path": self.path}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> list[dict]:
        return [v.to_json() for v in self.violations]


def validate_profile(profile: BusinessProfile, catalog) -> ValidationReport:
    """Check a profile against a catalog; reports violations, never raises.

    An empty report means the profile is safe to assess: every referenced id
    resolves and no share budget is exceeded.
    """
    violations: list[Violation] = []

    if profile.yearly_revenue.amount < 0:  # unreachable via Money, kept as a guard
        violations.append(Violation(NEGATIVE_REVENUE, "yearly revenue is negative", "yearly_revenue"))

    unit_share_sum = sum(u.revenue_share for u in profile.units)
    if unit_share_sum > 1.0 + 1e-9:
        violations.append(Violation(
            SHARE_SUM_EXCEEDED,
            f"unit revenue shares sum to {unit_share_sum:.4f} > 1",
            "units",
        ))

    for ui, unit in enumerate(profile.units):
        upath = f"units[{ui}]"
        if not unit.segments:
            violations.append(Violation(EMPTY_UNIT, f"unit {unit.name!r} has no segments", upath))
        seg_share_sum = sum(s.revenue_share for s in unit.segments)
        if seg_share_sum > 1.0 + 1e-9:
            violations.append(Violation(
                SHARE_SUM_EXCEEDED,
                f"segment revenue shares in unit {unit.name!r} sum to {seg_share_sum:.4f} > 1",
                f"{upath}.segments",
            ))
        for si, seg in enumerate(unit.segments):
            spath = f"{upath}.segments[{si}]"
            for impl in seg.implemented_controls:
                if impl.control_id not in catalog.controls:
                    violations.append(Violation(
                        UNKNOWN_CONTROL,
                        f"control {impl.control_id!r} not in catalog",
                        f"{spath}.implemented_controls",
                    ))
            for exp in seg.threat_exposures:
                if exp.threat_id not in catalog.threats:
                    violations.append(Violation(
                        UNKNOWN_THREAT,
                        f"threat {exp.threat_id!r} not in catalog",
                        f"{spath}.threat_exposures",
                    ))

    return ValidationReport(tuple(violations))


# ---------------------------------------------------------------------------
# Profile serialization (versioned JSON document)
# ---------------------------------------------------------------------------

def profile_to_json(profile: BusinessProfile) -> dict:
    return {
        "schema_version": PROFILE_SCHEMA_VERSION,
        "name": profile.name,
        "sector": profile.sector,
        "country": profile.country,
        "yearly_revenue": profile.yearly_revenue.to_json(),
        "employee_count": profile.employee_count,
        "units": [
            {
                "name": u.name,
                "revenue_share": u.revenue_share,
                "regulations": list(u.regulations),
                "segments": [
                    {
                        "name": s.name,
                        "revenue_share": s.revenue_share,
                        "implemented_controls": [
                            {"control_id": c.control_id, "maturity": c.maturity.value}
                            for c in s.implemented_controls
                        ],
                        "threat_exposures": [
                            {
                                "threat_id": t.threat_id,
                                "risk_weight": t.risk_weight,
                                "operational": t.operational.value,
                                "financial": t.financial.value,
                            }
                            for t in s.threat_exposures
                        ],
                    }
                    for s in u.segments
                ],
            }
            for u in profile.units
        ],
        "listed_company": profile.listed_company,
    }


def _require(doc: dict, key: str, context: str):
    if key not in doc:
        raise QberError(MALFORMED, f"{context} is missing required field {key!r}")
    return doc[key]


def profile_from_json(doc: dict) -> BusinessProfile:
    """Parse a versioned profile document. Raises QberError on bad input."""
    if not isinstance(doc, dict):
        raise QberError(MALFORMED, "profile document must be a JSON object")
    version = _require(doc, "schema_version", "profile")
    major = str(version).split(".")[0]
    if major != PROFILE_SCHEMA_VERSION.split(".")[0]:
        raise QberError(
            SCHEMA_VERSION_UNSUPPORTED,
            f"profile schema_version {version!r} unsupported (expected major "
            f"{PROFILE_SCHEMA_VERSION.split('.')[0]})",
        )
    try:
        units = []
        for udoc in _require(doc, "units", "profile"):
            segments = []
            for sdoc in udoc.get("segments", []):
                controls = [
                    ControlImplementation(
                        control_id=str(_require(cdoc, "control_id", "control")),
                        maturity=MaturityLevel.from_str(_require(cdoc, "maturity", "control")),
                    )
                    for cdoc in sdoc.get("implemented_controls", [])
                ]
                exposures = [
                    ThreatExposure(
                        threat_id=str(_require(tdoc, "threat_id", "threat exposure")),
                        risk_weight=float(_require(tdoc, "risk_weight", "threat exposure")),
                        operational=Rating.from_str(_require(tdoc, "operational", "threat exposure")),
                        financial=Rating.from_str(_require(tdoc, "financial", "threat exposure")),
                    )
                    for tdoc in sdoc.get("threat_exposures", [])
                ]
                segments.append(Segment(
                    name=str(_require(sdoc, "name", "segment")),
                    revenue_share=float(_require(sdoc, "revenue_share", "segment")),
                    implemented_controls=tuple(controls),
                    threat_exposures=tuple(exposures),
                ))
            units.append(BusinessUnit(
                name=str(_require(udoc, "name", "unit")),
                revenue_share=float(_require(udoc, "revenue_share", "unit")),
                segments=tuple(segments),
                regulations=tuple(str(r) for r in udoc.get("regulations", [])),
            ))
        return BusinessProfile(
            name=str(_require(doc, "name", "profile")),
            sector=str(_require(doc, "sector", "profile")),
            country=str(_require(doc, "country", "profile")),
            yearly_revenue=Money.from_json(_require(doc, "yearly_revenue", "profile")),
            employee_count=int(_require(doc, "employee_count", "profile")),
            units=tuple(units),
            listed_company=doc.get("listed_company"),
        )
    except QberError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise QberError(MALFORMED, f"invalid profile document: {exc}") from exc


def load_profile(path) -> BusinessProfile:
    """Read and parse a profile JSON file."""
    with open(path, "rb") as handle:
        raw = handle.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise QberError(MALFORMED, f"profile JSON parse error: {exc.msg}",
                        details=[{"byte_offset": exc.pos}]) from exc
    return profile_from_json(doc)
