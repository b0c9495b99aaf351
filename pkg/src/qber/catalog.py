"""Catalog data layer: threats, domains, controls, factor tables.

Catalogs are data, not code: they load from versioned JSON documents so
security teams can extend threat/control mappings without touching the
engine. A loaded catalog is immutable; reloading produces a new value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import (
    DANGLING_REFERENCE,
    MALFORMED,
    NO_FACTOR_ROW,
    SCHEMA_VERSION_UNSUPPORTED,
    UNKNOWN_ID,
    QberError,
)
from .model import BusinessProfile, MaturityLevel, Money, as_fraction, as_weight

CATALOG_SCHEMA_VERSION = "1.0.0"

# Per-maturity coefficients converting promised control efficacy into actual
# efficacy. The adjustment applied is (1.25 - multiplier), so NotImplemented
# zeroes a control and Optimized passes it through at full strength.
DEFAULT_MATURITY_MULTIPLIERS: dict[MaturityLevel, float] = {
    MaturityLevel.NOT_IMPLEMENTED: 1.25,
    MaturityLevel.INITIAL: 0.65,
    MaturityLevel.REPEATABLE: 0.55,
    MaturityLevel.DEFINED: 0.45,
    MaturityLevel.MANAGED: 0.31,
    MaturityLevel.OPTIMIZED: 0.25,
}

# Revenue thresholds (catalog currency-agnostic convention) splitting
# profiles into the size bands used to key factor rows.
SIZE_BAND_SMALL_MAX = 2_000_000
SIZE_BAND_MEDIUM_MAX = 50_000_000


@dataclass(frozen=True)
class Threat:
    id: str
    name: str
    taxonomy_ref: str | None = None


@dataclass(frozen=True)
class SecurityDomain:
    id: str
    name: str


@dataclass(frozen=True)
class ControlDef:
    """A deployable security control with costs and per-threat efficacy."""

    id: str
    name: str
    capex: Money
    opex_annual: Money
    base_efficacy: dict[str, float]  # threat id -> promised efficacy in [0,1]
    cia_contribution: tuple[float, float, float]
    domains: tuple[str, ...] = ()


@dataclass(frozen=True)
class RcvarFactorRow:
    """Externally estimated risk factors keyed by profile descriptor."""

    factors: tuple[float, ...]
    sector: str | None = None
    country: str | None = None
    size_band: str | None = None
    default: bool = False


@dataclass(frozen=True)
class Catalog:
    version: str
    threats: dict[str, Threat]
    domains: dict[str, SecurityDomain]
    controls: dict[str, ControlDef]
    threat_domain_weights: dict[tuple[str, str], float]
    rcvar_rows: tuple[RcvarFactorRow, ...]
    maturity_multipliers: dict[MaturityLevel, float] = field(
        default_factory=lambda: dict(DEFAULT_MATURITY_MULTIPLIERS)
    )

    def maturity_multiplier(self, level: MaturityLevel) -> float:
        return self.maturity_multipliers[level]


def maturity_multiplier(level: MaturityLevel, catalog: Catalog | None = None) -> float:
    """Quantitative maturity score for a control; defaults to the shipped table."""
    if catalog is not None:
        return catalog.maturity_multiplier(level)
    return DEFAULT_MATURITY_MULTIPLIERS[level]


def threat_domain_weight(threat_id: str, domain_id: str, catalog: Catalog) -> float:
    """How relevant a threat is for a domain (0-10). Missing mapping means 0."""
    if threat_id not in catalog.threats:
        raise QberError(UNKNOWN_ID, f"unknown threat id {threat_id!r}")
    if domain_id not in catalog.domains:
        raise QberError(UNKNOWN_ID, f"unknown domain id {domain_id!r}")
    return catalog.threat_domain_weights.get((threat_id, domain_id), 0.0)


def size_band(revenue: Money) -> str:
    """Bucket yearly revenue into small / medium / large."""
    amount = revenue.as_float()
    if amount < SIZE_BAND_SMALL_MAX:
        return "small"
    if amount < SIZE_BAND_MEDIUM_MAX:
        return "medium"
    return "large"


def rcvar_factors(profile: BusinessProfile, catalog: Catalog) -> list[float]:
    """Look up the factor vector for (sector, country, size band).

    Falls back to the catalog's declared default row; raises NO_FACTOR_ROW
    when neither an exact match nor a default exists.
    """
    band = size_band(profile.yearly_revenue)
    sector = profile.sector.strip().lower()
    country = profile.country.strip().lower()
    for row in catalog.rcvar_rows:
        if row.default:
            continue
        if (row.sector or "").lower() == sector and (row.country or "").lower() == country \
                and (row.size_band or "").lower() == band:
            return list(row.factors)
    for row in catalog.rcvar_rows:
        if row.default:
            return list(row.factors)
    raise QberError(
        NO_FACTOR_ROW,
        f"no factor row for (sector={profile.sector!r}, country={profile.country!r}, "
        f"size_band={band!r}) and catalog declares no default row",
    )


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def _malformed(msg: str) -> QberError:
    return QberError(MALFORMED, f"invalid catalog document: {msg}")


def load_catalog(source) -> Catalog:
    """Parse and fully validate a catalog from bytes or a binary stream.

    All cross-references are resolved here so downstream lookups can trust
    every id in the catalog.
    """
    raw = source.read() if hasattr(source, "read") else source
    if isinstance(raw, str):
        raw = raw.encode("utf-8")
    if not raw or not raw.strip():
        raise _malformed("empty document")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise QberError(MALFORMED, f"catalog JSON parse error: {exc.msg}",
                        details=[{"byte_offset": exc.pos}]) from exc
    return catalog_from_json(doc)


def catalog_from_json(doc: dict) -> Catalog:
    if not isinstance(doc, dict):
        raise _malformed("top level must be a JSON object")
    version = doc.get("schema_version")
    if version is None:
        raise _malformed("missing schema_version")
    if str(version).split(".")[0] != CATALOG_SCHEMA_VERSION.split(".")[0]:
        raise QberError(
            SCHEMA_VERSION_UNSUPPORTED,
            f"catalog schema_version {version!r} unsupported",
        )
    for key in ("threats", "domains", "controls", "threat_domain_weights",
                "rcvar_factors", "maturity_multipliers"):
        if key not in doc:
            raise _malformed(f"missing top-level key {key!r}")

    try:
        threats: dict[str, Threat] = {}
        for tdoc in doc["threats"]:
            threat = Threat(
                id=str(tdoc["id"]),
                name=str(tdoc["name"]),
                taxonomy_ref=tdoc.get("taxonomy_ref"),
            )
            if threat.id in threats:
                raise _malformed(f"duplicate threat id {threat.id!r}")
            threats[threat.id] = threat

        domains: dict[str, SecurityDomain] = {}
        for ddoc in doc["domains"]:
            domain = SecurityDomain(id=str(ddoc["id"]), name=str(ddoc["name"]))
            if domain.id in domains:
                raise _malformed(f"duplicate domain id {domain.id!r}")
            domains[domain.id] = domain

        controls: dict[str, ControlDef] = {}
        for cdoc in doc["controls"]:
            cia = cdoc["cia_contribution"]
            control = ControlDef(
                id=str(cdoc["id"]),
                name=str(cdoc["name"]),
                capex=Money.from_json(cdoc["capex"]),
                opex_annual=Money.from_json(cdoc["opex_annual"]),
                base_efficacy={str(t): as_fraction(v) for t, v in cdoc["base_efficacy"].items()},
                cia_contribution=(
                    as_fraction(cia["confidentiality"]),
                    as_fraction(cia["integrity"]),
                    as_fraction(cia["availability"]),
                ),
                domains=tuple(str(d) for d in cdoc.get("domains", [])),
            )
            if control.id in controls:
                raise _malformed(f"duplicate control id {control.id!r}")
            controls[control.id] = control

        weights: dict[tuple[str, str], float] = {}
        for wdoc in doc["threat_domain_weights"]:
            key = (str(wdoc["threat_id"]), str(wdoc["domain_id"]))
            weights[key] = as_weight(wdoc["weight"])

        rows = []
        for rdoc in doc["rcvar_factors"]:
            factors = tuple(as_fraction(f) for f in rdoc["factors"])
            if not factors:
                raise _malformed("rcvar factor row with empty factors")
            rows.append(RcvarFactorRow(
                factors=factors,
                sector=rdoc.get("sector"),
                country=rdoc.get("country"),
                size_band=rdoc.get("size_band"),
                default=bool(rdoc.get("default", False)),
            ))

        multipliers: dict[MaturityLevel, float] = {}
        for key, value in doc["maturity_multipliers"].items():
            multipliers[MaturityLevel.from_str(key)] = float(value)
        missing = [lv.value for lv in MaturityLevel if lv not in multipliers]
        if missing:
            raise _malformed(f"maturity_multipliers missing levels: {missing}")
    except QberError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise _malformed(str(exc)) from exc

    # Cross-reference checks: every id referenced anywhere must exist.
    for control in controls.values():
        for threat_id in control.base_efficacy:
            if threat_id not in threats:
                raise QberError(
                    DANGLING_REFERENCE,
                    f"control {control.id!r} references missing threat {threat_id!r}",
                    details=[{"id": threat_id}],
                )
        for domain_id in control.domains:
            if domain_id not in domains:
                raise QberError(
                    DANGLING_REFERENCE,
                    f"control {control.id!r} references missing domain {domain_id!r}",
                    details=[{"id": domain_id}],
                )
    for threat_id, domain_id in weights:
        if threat_id not in threats:
            raise QberError(DANGLING_REFERENCE,
                            f"weight row references missing threat {threat_id!r}",
                            details=[{"id": threat_id}])
        if domain_id not in domains:
            raise QberError(DANGLING_REFERENCE,
                            f"weight row references missing domain {domain_id!r}",
                            details=[{"id": domain_id}])

    return Catalog(
        version=str(doc.get("catalog_version", "unversioned")),
        threats=threats,
        domains=domains,
        controls=controls,
        threat_domain_weights=weights,
        rcvar_rows=tuple(rows),
        maturity_multipliers=multipliers,
    )


def catalog_to_json(catalog: Catalog) -> dict:
    """Serialize back to the document schema; load(to_json) round-trips."""
    return {
        "schema_version": CATALOG_SCHEMA_VERSION,
        "catalog_version": catalog.version,
        "threats": [
            {"id": t.id, "name": t.name, "taxonomy_ref": t.taxonomy_ref}
            for t in catalog.threats.values()
        ],
        "domains": [{"id": d.id, "name": d.name} for d in catalog.domains.values()],
        "controls": [
            {
                "id": c.id,
                "name": c.name,
                "capex": c.capex.to_json(),
                "opex_annual": c.opex_annual.to_json(),
                "base_efficacy": dict(c.base_efficacy),
                "cia_contribution": {
                    "confidentiality": c.cia_contribution[0],
                    "integrity": c.cia_contribution[1],
                    "availability": c.cia_contribution[2],
                },
                "domains": list(c.domains),
            }
            for c in catalog.controls.values()
        ],
        "threat_domain_weights": [
            {"threat_id": t, "domain_id": d, "weight": w}
            for (t, d), w in catalog.threat_domain_weights.items()
        ],
        "rcvar_factors": [
            {
                key: value
                for key, value in (
                    ("sector", r.sector),
                    ("country", r.country),
                    ("size_band", r.size_band),
                    ("factors", list(r.factors)),
                    ("default", r.default or None),
                )
                if value is not None
            }
            for r in catalog.rcvar_rows
        ],
        "maturity_multipliers": {
            level.value: mult for level, mult in catalog.maturity_multipliers.items()
        },
    }


def load_catalog_path(path) -> Catalog:
    """Load a catalog from a JSON file, or from catalog.json inside a directory."""
    p = Path(path)
    if p.is_dir():
        candidate = p / "catalog.json"
        if not candidate.exists():
            json_files = sorted(p.glob("*.json"))
            if len(json_files) != 1:
                raise QberError(
                    MALFORMED,
                    f"catalog directory {p} must contain catalog.json or exactly one *.json file",
                )
            candidate = json_files[0]
        p = candidate
    with open(p, "rb") as handle:
        return load_catalog(handle)


def load_default_catalog() -> Catalog:
    """Load the catalog shipped with the package."""
    data = resources.files("qber").joinpath("data/catalog/default.json").read_bytes()
    return load_catalog(data)
