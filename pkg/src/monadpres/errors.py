"""Exception types shared across the package."""

from __future__ import annotations


class ContractViolation(ValueError):
    """An operation was called outside its precondition."""


class BudgetExceeded(RuntimeError):
    """An enumeration or search ran past its caller-supplied cap."""

    def __init__(self, what: str, limit: int):
        super().__init__(f"{what} exceeded budget of {limit}")
        self.what = what
        self.limit = limit


class NotFound(KeyError):
    def __init__(self, name: str, available: list[str]):
        super().__init__(name)
        self.name = name
        self.available = available

    def __str__(self) -> str:
        return f"unknown entry {self.name!r}; available: {', '.join(self.available)}"
