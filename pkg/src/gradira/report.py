"""Line-oriented verification reports: one check per line, PASS/FAIL prefix."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def render(self):
        status = "PASS" if self.passed else "FAIL"
        if self.detail:
            return f"{status} {self.name}: {self.detail}"
        return f"{status} {self.name}"


@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, name, passed, detail=""):
        self.checks.append(Check(name, passed, detail))

    def extend(self, other):
        self.checks.extend(other.checks)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def render(self):
        return "\n".join(c.render() for c in sorted(self.checks, key=lambda c: c.name))

    def __str__(self):
        return self.render()
