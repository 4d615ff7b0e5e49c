from __future__ import annotations

import logging
from typing import Sequence

from clonekit.config import Budget
from clonekit.core.sorts import Context, Sort
from clonekit.core.terms import Term
from clonekit.free.algebra import FreeAlgebraClone
from clonekit.free.equality import NormalizerEquality, SearchFreeEquality
from clonekit.second_order.syntax import SoPresentation, stlc_presentation
from clonekit.stlc.nbe import nbe_normalize
from clonekit.stlc.set_model import separate_in_model
from clonekit.stlc.variants import Variant, make_variant
from clonekit.stlc.witness import witness_normalize

logger = logging.getLogger(__name__)

STRATEGIES = ("normalizer", "search")


def stlc_free(
    variant: Variant | str = "stlc",
    values: Sequence[str] | None = None,
    strategy: str = "normalizer",
    presentation: SoPresentation | None = None,
    budget: Budget | None = None,
) -> FreeAlgebraClone:
    """The free STLC algebra over a variant's base clone, decided by NbE or by bounded search."""
    if isinstance(variant, str):
        variant = make_variant(variant, values)
    presentation = presentation or stlc_presentation(variant.base.clone.sorts)
    if strategy == "search":
        equality = SearchFreeEquality(budget)
    elif strategy == "normalizer":

        def separate(free: FreeAlgebraClone, left: Term, right: Term, context: Context, sort: Sort) -> dict | None:
            return separate_in_model(variant, free, left, right, context, sort)

        equality = NormalizerEquality(nbe_normalize, witness_normalize, separate)
    else:
        raise ValueError(f"Unknown strategy {strategy!r}; expected one of {', '.join(STRATEGIES)}")
    free = FreeAlgebraClone(variant.base, presentation, equality)
    logger.debug("Built %s with the %s strategy", free.name, strategy)
    return free


def gs_normalize(values: Sequence[str], term: Term, context: Context = (), sort: Sort | None = None) -> Term:
    """NbE over global state: every base-sort result is a full get(put..) form."""
    return nbe_normalize(stlc_free("gs", values), term, context, sort)
