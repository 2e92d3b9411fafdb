# bundles/schema.py
"""Pydantic models of the JSON bundle format (``"format": 1``).

Every structure is written with expressions in the parser grammar: module
elements as strings over basis symbols (``"(d + 2*l1)*L"``) or as coordinate
lists, maps as rows of d-only polynomials, table keys as comma-separated basis
names (``"L,L"``). Singular keys such as ``algebra`` are shorthand for the entry
``"default"`` of the matching plural collection.
"""
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

ValueSpec = Union[str, List[str]]
MatrixSpec = List[List[str]]
MapRef = Union[str, MatrixSpec]
TableSpec = Dict[str, ValueSpec]

SINGULAR_KEYS = {
    "algebra": "algebras",
    "rep": "reps",
    "two_term": "two_terms",
    "crossed": "crossed_modules",
    "cocycle": "cocycles",
    "extension": "extensions",
    "aut_pair": "aut_pairs",
}


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class AlgebraSpec(StrictModel):
    name: Optional[str] = None
    kind: Literal["lie", "assoc"] = "lie"
    basis: List[str] = Field(min_length=1)
    bracket: TableSpec = Field(default_factory=dict)
    operator: Optional[MapRef] = None


class RepSpec(StrictModel):
    """A module; with ``phi`` and ``operator`` it is also an averaging module."""

    algebra: str = "default"
    module_basis: List[str] = Field(min_length=1)
    action: TableSpec = Field(default_factory=dict)
    phi: Optional[MapRef] = None
    operator: Optional[MapRef] = None


class CochainSpec(StrictModel):
    """Values on basis tuples; ``algebra`` selects the adjoint module, ``rep`` a named one."""

    degree: int = Field(ge=1)
    algebra: Optional[str] = None
    rep: Optional[str] = None
    values: TableSpec = Field(default_factory=dict)
    symmetrize: bool = False

    @model_validator(mode="after")
    def _one_module(self) -> "CochainSpec":
        if self.algebra is not None and self.rep is not None:
            raise ValueError("give either 'algebra' or 'rep', not both")
        return self


class PairSpec(StrictModel):
    f: str
    g: str


class TwoTermSpec(StrictModel):
    name: Optional[str] = None
    basis0: List[str] = Field(min_length=1)
    basis1: List[str] = Field(min_length=1)
    d: MapRef
    bracket00: TableSpec = Field(default_factory=dict)
    bracket01: TableSpec = Field(default_factory=dict)
    l3: TableSpec = Field(default_factory=dict)
    P0: MapRef
    P1: MapRef
    P2: TableSpec = Field(default_factory=dict)


class MorphismSpec(StrictModel):
    source: str = "default"
    target: str = "default"
    f0: MapRef
    f1: MapRef
    f2: TableSpec = Field(default_factory=dict)


class CrossedSpec(StrictModel):
    upper: str
    lower: str
    d: MapRef
    action: TableSpec = Field(default_factory=dict)


class CocycleSpec(StrictModel):
    base: str
    fiber: str
    chi: TableSpec = Field(default_factory=dict)
    rho: TableSpec = Field(default_factory=dict)
    Phi: Optional[MapRef] = None


class ExtensionSpec(StrictModel):
    """Either ``cocycle`` (the extension is built from it) or the explicit data."""

    cocycle: Optional[str] = None
    base: Optional[str] = None
    fiber: Optional[str] = None
    total: Optional[str] = None
    inclusion: Optional[MapRef] = None
    projection: Optional[MapRef] = None
    section: Optional[MapRef] = None

    @model_validator(mode="after")
    def _complete(self) -> "ExtensionSpec":
        explicit = [self.base, self.fiber, self.total, self.inclusion, self.projection, self.section]
        if self.cocycle is not None:
            if any(item is not None for item in explicit):
                raise ValueError("'cocycle' excludes the explicit extension fields")
        elif any(item is None for item in explicit):
            raise ValueError("explicit extensions need base, fiber, total, inclusion, projection, section")
        return self


class AutPairSpec(StrictModel):
    alpha: MapRef
    beta: MapRef


class BundleSpec(StrictModel):
    format: Literal[1]
    algebra: Optional[AlgebraSpec] = None
    algebras: Dict[str, AlgebraSpec] = Field(default_factory=dict)
    maps: Dict[str, MatrixSpec] = Field(default_factory=dict)
    rep: Optional[RepSpec] = None
    reps: Dict[str, RepSpec] = Field(default_factory=dict)
    cochains: Dict[str, CochainSpec] = Field(default_factory=dict)
    pairs: Dict[str, PairSpec] = Field(default_factory=dict)
    two_term: Optional[TwoTermSpec] = None
    two_terms: Dict[str, TwoTermSpec] = Field(default_factory=dict)
    morphisms: Dict[str, MorphismSpec] = Field(default_factory=dict)
    crossed: Optional[CrossedSpec] = None
    crossed_modules: Dict[str, CrossedSpec] = Field(default_factory=dict)
    cocycle: Optional[CocycleSpec] = None
    cocycles: Dict[str, CocycleSpec] = Field(default_factory=dict)
    extension: Optional[ExtensionSpec] = None
    extensions: Dict[str, ExtensionSpec] = Field(default_factory=dict)
    aut_pair: Optional[AutPairSpec] = None
    aut_pairs: Dict[str, AutPairSpec] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _fold_singular(self) -> "BundleSpec":
        """Move every singular entry into its collection under "default"."""
        for single, plural in SINGULAR_KEYS.items():
            value = getattr(self, single)
            if value is None:
                continue
            collection = getattr(self, plural)
            if "default" in collection:
                raise ValueError(f"'{single}' and '{plural}.default' both given")
            collection["default"] = value
            setattr(self, single, None)
        return self
