"""Exception types shared across the package."""
from __future__ import annotations


class OntoplotError(Exception):
    """Base class for all errors raised by this package."""


class OwlSyntaxError(OntoplotError):
    """Malformed functional-syntax input; carries the 1-based source line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class FormatError(OntoplotError):
    """Malformed native JSON document (bad JSON, bad shape, bad field)."""


class CycleError(OntoplotError):
    """The subclass graph contains a cycle; `cycle` lists one as class ids."""

    def __init__(self, cycle: list[str]):
        super().__init__("subclass cycle: " + " -> ".join(cycle))
        self.cycle = cycle


class EmptyOntologyError(OntoplotError):
    pass


class UnknownClassError(OntoplotError):
    def __init__(self, class_id: str):
        super().__init__(f"unknown class: {class_id}")
        self.class_id = class_id


class UnknownPropertyError(OntoplotError):
    def __init__(self, property_id: str):
        super().__init__(f"unknown property: {property_id}")
        self.property_id = property_id


class UnknownOccurrenceError(OntoplotError):
    def __init__(self, occ_id: int):
        super().__init__(f"unknown occurrence: {occ_id}")
        self.occ_id = occ_id


class NoCommonAncestorError(OntoplotError):
    pass


class RootCollapseError(OntoplotError):
    pass


class InconsistentPlanError(OntoplotError):
    pass
