from attrs import define, field, validators, Factory

from .interface import BaseInterface


@define(frozen=True, slots=True, weakref_slot=False)
class BoundReport(BaseInterface):
    """The outcome of checking lhs <= rhs

    Args:
        lhs (float): The measured side
        rhs (float): The bound
        passed (bool): The verdict
        details (dict): Extra context for manifests
    """
    lhs: float = field(
        converter=float)

    rhs: float = field(
        converter=float)

    passed: bool = field(
        validator=validators.instance_of(bool))

    details: dict = field(
        default=Factory(dict),
        validator=validators.instance_of(dict))

    @classmethod
    def compare(cls, lhs: float, rhs: float, slack: float = 1e-12, **details) -> 'BoundReport':
        """Builds a report, passing when lhs <= rhs * (1 + slack)"""
        return cls(lhs, rhs, bool(lhs <= rhs * (1.0 + slack)), dict(details))
