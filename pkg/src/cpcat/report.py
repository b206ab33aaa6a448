"""Check reports: named residuals with pass flags, shared by all checkers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckItem:
    name: str
    passed: bool
    residual: float
    eps: float
    detail: str = ""


@dataclass(frozen=True)
class CheckReport:
    title: str
    items: tuple[CheckItem, ...] = ()
    details: tuple[tuple[str, str], ...] = ()

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    @property
    def max_residual(self) -> float:
        return max((item.residual for item in self.items), default=0.0)

    def item(self, name: str) -> CheckItem:
        for entry in self.items:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def failures(self) -> tuple[CheckItem, ...]:
        return tuple(item for item in self.items if not item.passed)


class ReportBuilder:
    """Accumulates CheckItems; residual-vs-eps items via `residual_item`."""

    def __init__(self, title: str):
        self.title = title
        self._items: list[CheckItem] = []
        self._details: list[tuple[str, str]] = []

    def residual_item(self, name: str, residual: float, eps: float, detail: str = "") -> None:
        self._items.append(CheckItem(name, residual <= eps, float(residual), float(eps), detail))

    def flag_item(self, name: str, passed: bool, detail: str = "") -> None:
        self._items.append(CheckItem(name, bool(passed), 0.0 if passed else 1.0, 0.0, detail))

    def note(self, key: str, value: str) -> None:
        self._details.append((key, value))

    def build(self) -> CheckReport:
        return CheckReport(self.title, tuple(self._items), tuple(self._details))
