from enum import Enum


class EquationKind(Enum):
    """The two flows compared by the workbench"""
    CUBIC = "cubic-NLS"
    HARTREE = "hartree-NLS"


class RecipeKind(Enum):
    """Initial data recipes"""
    SMOOTH_RANDOM = "smooth-random"
    HQ_LIMITED = "hq-limited"
    SINGLE_MODE = "single-mode"
    RESONANT = "resonant"


class NormKind(Enum):
    """Norms reported by the norms module"""
    HS = "Hs"
    DS = "Ds"
    LT_INF_HX1 = "LtInfHx1"
    LT2_LX6 = "Lt2Lx6"


class FitModel(Enum):
    """Rate fit models"""
    PURE_POWER = "pure-power"
    POWER_WITH_LOGLOG = "power-with-loglog"


class AblationVariant(Enum):
    """Variants of the resonant datum"""
    NONE = "none"
    MIRROR = "mirror"
    UNPAIRED = "unpaired"


class Subcommand(Enum):
    """Batch subcommands"""
    SOLVE = "solve"
    COMPARE = "compare"
    SWEEP = "sweep"
    RESONANCE = "resonance"
    BOARDGAME = "boardgame"
    HIERARCHY = "hierarchy"
    CONVRATE = "convrate"


def enum_from_alias(enum_type: type[Enum], alias: str | Enum) -> Enum:
    """Looks an enum member up by value or by name, case-insensitively

    Args:
        enum_type (type[Enum]): The enum to search
        alias (str | Enum): The value, name or member

    Returns:
        Enum: The matching member

    Raises:
        ValueError: If no member matches
    """
    if isinstance(alias, enum_type):
        return alias
    if isinstance(alias, str):
        query = alias.strip().lower().replace("_", "-")
        for member in enum_type:
            if query in (member.value.lower(), member.name.lower().replace("_", "-")):
                return member
    raise ValueError(f"{alias!r} is not one of {[member.value for member in enum_type]}")


class ProfileKind(Enum):
    """Built-in interaction profiles"""
    GAUSSIAN = "gaussian"
    SHIFTED_GAUSSIAN = "shifted-gaussian"
    BUMP = "bump"
    DELTA = "delta"
