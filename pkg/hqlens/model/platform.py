"""
Source platforms of resident posts.
"""

from __future__ import annotations

from enum import StrEnum


class Platform(StrEnum):
    """
    Canonical platform kinds.

    The concrete site (e.g. a particular review site) is carried separately
    as a free-form source label on each entry.
    """

    REVIEW_SITE = "review_site"
    MICROBLOG = "microblog"
    GOV_BOARD = "gov_board"
