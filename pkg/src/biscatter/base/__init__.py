from .interface import BaseInterface
from .report import BoundReport
from .types import (
    EquationKind,
    RecipeKind,
    NormKind,
    FitModel,
    AblationVariant,
    Subcommand,
    ProfileKind,
    enum_from_alias,
)
from . import exceptions


__all__ = [
    "BaseInterface",
    "BoundReport",
    "EquationKind",
    "RecipeKind",
    "NormKind",
    "FitModel",
    "AblationVariant",
    "Subcommand",
    "ProfileKind",
    "enum_from_alias",
    "exceptions"
]
