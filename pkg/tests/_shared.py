"""Expensive objects shared across test modules (computed once per session)."""

from functools import lru_cache

from cmfactor.pipeline import Config, Context
from cmfactor.quadclass import class_group


@lru_cache(maxsize=None)
def ctx():
    return Context(Config(terms=300, use_cache=False))


@lru_cache(maxsize=None)
def G23():
    return class_group(23)


@lru_cache(maxsize=None)
def example_f(P=300):
    return ctx().example_f(P)


@lru_cache(maxsize=None)
def preimage(P=300):
    return ctx().preimage(P)


@lru_cache(maxsize=None)
def heegner_polys():
    from cmfactor import golden

    return ctx().heegner_many(golden.heegner_table())
