"""
Housing-quality indicator taxonomy and its loader.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from hqlens.errors import TaxonomyParseError, TaxonomyValidationError

from .unit import IndicatorId

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class Category:
    """
    Top-level grouping of indicators.
    """

    id: int
    """
    Category ordinal.
    """

    name: str
    """
    Display name.
    """

    name_local: str | None = None
    """
    Optional name in the corpus language.
    """


@dataclass(frozen=True, slots=True)
class Indicator:
    """
    Leaf node of the taxonomy.
    """

    id: IndicatorId
    """
    Dotted id, e.g. 4.1.
    """

    name: str
    """
    Display name.
    """

    category_id: int
    """
    Owning category ordinal.
    """

    keywords: tuple[str, ...]
    """
    Substrings that signal the indicator to the rule-based backend.
    """

    name_local: str | None = None
    """
    Optional name in the corpus language.
    """


@dataclass(frozen=True, slots=True)
class Taxonomy:
    """
    Validated set of categories and indicators.

    Indicators are kept in numeric id order.
    """

    categories: tuple[Category, ...]
    """
    Categories in id order.
    """

    indicators: tuple[Indicator, ...]
    """
    Indicators in id order.
    """

    _by_id: dict[IndicatorId, Indicator] = field(
        init=False, repr=False, compare=False
    )
    """
    Index of indicators by id.
    """

    _categories_by_id: dict[int, Category] = field(
        init=False, repr=False, compare=False
    )
    """
    Index of categories by id.
    """

    def __post_init__(self) -> None:
        """
        Build lookup indices.
        """
        object.__setattr__(self, "_by_id", {ind.id: ind for ind in self.indicators})
        object.__setattr__(
            self, "_categories_by_id", {cat.id: cat for cat in self.categories}
        )

    def has_indicator(self, indicator_id: IndicatorId) -> bool:
        """
        Test whether an indicator id exists.

        Parameters
        ----------
        indicator_id : IndicatorId
            Id to look up.

        Returns
        -------
        bool
            True if present.
        """
        return indicator_id in self._by_id

    def indicator(self, indicator_id: IndicatorId) -> Indicator:
        """
        Look up an indicator.

        Parameters
        ----------
        indicator_id : IndicatorId
            Id to look up.

        Returns
        -------
        Indicator
            The indicator.

        Raises
        ------
        KeyError
            If the id is unknown.
        """
        return self._by_id[indicator_id]

    def category(self, category_id: int) -> Category:
        """
        Look up a category.

        Parameters
        ----------
        category_id : int
            Category ordinal.

        Returns
        -------
        Category
            The category.
        """
        return self._categories_by_id[category_id]

    def indicator_ids(self) -> list[IndicatorId]:
        """
        List all indicator ids in numeric order.

        Returns
        -------
        list[IndicatorId]
            Ordered ids.
        """
        return [ind.id for ind in self.indicators]

    def indicators_in(self, category_id: int) -> list[Indicator]:
        """
        List the indicators of one category.

        Parameters
        ----------
        category_id : int
            Category ordinal.

        Returns
        -------
        list[Indicator]
            Indicators in id order.
        """
        return [ind for ind in self.indicators if ind.category_id == category_id]

    @classmethod
    def from_wire(cls, obj: Any) -> Taxonomy:
        """
        Build and validate a taxonomy from its JSON document.

        Parameters
        ----------
        obj : Any
            Decoded document with "categories" and "indicators" keys.

        Returns
        -------
        Taxonomy
            Validated taxonomy.

        Raises
        ------
        TaxonomyParseError
            If the document shape is wrong.
        TaxonomyValidationError
            If ids are duplicated, a category is missing, or keywords are empty.
        """
        if not isinstance(obj, dict):
            raise TaxonomyParseError("taxonomy document must be a JSON object")
        raw_categories = obj.get("categories")
        raw_indicators = obj.get("indicators")
        if not isinstance(raw_categories, list) or not isinstance(raw_indicators, list):
            raise TaxonomyParseError(
                "taxonomy document needs list-valued 'categories' and 'indicators'"
            )

        categories: dict[int, Category] = {}
        for raw in raw_categories:
            try:
                cat = Category(
                    id=int(raw["id"]),
                    name=str(raw["name"]),
                    name_local=raw.get("name_local"),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise TaxonomyParseError(f"bad category record {raw!r}") from exc
            if cat.id < 1:
                raise TaxonomyValidationError(str(cat.id), "category id must be >= 1")
            if cat.id in categories:
                raise TaxonomyValidationError(str(cat.id), "duplicate category id")
            categories[cat.id] = cat

        indicators: dict[IndicatorId, Indicator] = {}
        for raw in raw_indicators:
            try:
                ind_id = IndicatorId.parse(raw["id"])
                category_id = int(raw["category"])
                keywords = raw.get("keywords", [])
                name = str(raw["name"])
            except (KeyError, TypeError, ValueError) as exc:
                raise TaxonomyParseError(f"bad indicator record {raw!r}") from exc

            key = str(ind_id)
            if ind_id in indicators:
                raise TaxonomyValidationError(key, "duplicate indicator id")
            if category_id not in categories:
                raise TaxonomyValidationError(
                    key, f"references missing category {category_id}"
                )
            if ind_id.category != category_id:
                raise TaxonomyValidationError(
                    key, f"id does not belong to category {category_id}"
                )
            if not isinstance(keywords, list) or not all(
                isinstance(k, str) and k.strip() for k in keywords
            ):
                raise TaxonomyValidationError(key, "keywords must be non-empty strings")
            if not keywords:
                raise TaxonomyValidationError(key, "empty keyword list")

            indicators[ind_id] = Indicator(
                id=ind_id,
                name=name,
                category_id=category_id,
                keywords=tuple(k.strip() for k in keywords),
                name_local=raw.get("name_local"),
            )

        return cls(
            categories=tuple(categories[k] for k in sorted(categories)),
            indicators=tuple(indicators[k] for k in sorted(indicators)),
        )


def default_taxonomy_path() -> Path:
    """
    Path of the shipped 11-category / 46-indicator taxonomy.

    Returns
    -------
    Path
        Location of taxonomy.json inside the package.
    """
    return Path(str(resources.files("hqlens.data").joinpath("taxonomy.json")))


def load_taxonomy(path: str | Path) -> Taxonomy:
    """
    Load and validate a taxonomy file.

    Parameters
    ----------
    path : str | Path
        JSON document with "categories" and "indicators".

    Returns
    -------
    Taxonomy
        Validated taxonomy.

    Raises
    ------
    TaxonomyParseError
        If the file is missing or not valid JSON.
    TaxonomyValidationError
        If a structural invariant is violated.
    """
    p = Path(path)
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise TaxonomyParseError(f"cannot read taxonomy {p}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise TaxonomyParseError(f"malformed taxonomy {p}: {exc}") from exc

    taxonomy = Taxonomy.from_wire(obj)
    logger.debug(
        "Loaded taxonomy %s: %d categories, %d indicators",
        p,
        len(taxonomy.categories),
        len(taxonomy.indicators),
    )
    return taxonomy
