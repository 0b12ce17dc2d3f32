"""Report assembly for the command-line interface.

A report gathers named check sections, a JSON-ready payload, and the job
parameters.  Rendering is deterministic: the JSON form has sorted keys and
no timing data, so identical jobs (including the seed) produce
byte-identical output.

Exit codes: ``0`` all checks pass, ``1`` at least one determined failure,
``2`` input error (raised before a report exists), ``3`` no failures but
some verdicts were left undetermined by the search budget.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

from .io import atomic_write

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_UNDETERMINED = 3


@dataclass
class Section:
    title: str
    checks: list[tuple[str, bool, str]]

    @property
    def ok(self) -> bool:
        return all(okk for _, okk, _ in self.checks)


@dataclass
class Report:
    command: str
    source: dict
    params: dict
    sections: list[Section] = dc_field(default_factory=list)
    payload: dict = dc_field(default_factory=dict)
    undetermined: list[str] = dc_field(default_factory=list)

    def add(self, title: str, checks) -> Section:
        sec = Section(title, [(str(n), bool(o), str(d)) for n, o, d in checks])
        self.sections.append(sec)
        return sec

    def mark_undetermined(self, note: str) -> None:
        self.undetermined.append(note)

    @property
    def failed(self) -> list[str]:
        return [f"{s.title}: {name}" for s in self.sections
                for name, okk, _ in s.checks if not okk]

    def exit_code(self) -> int:
        if self.failed:
            return EXIT_FAIL
        if self.undetermined:
            return EXIT_UNDETERMINED
        return EXIT_OK

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "source": self.source,
            "params": self.params,
            "sections": [{
                "title": s.title,
                "ok": s.ok,
                "checks": [{"name": n, "ok": o, "detail": d}
                           for n, o, d in s.checks],
            } for s in self.sections],
            "payload": self.payload,
            "undetermined": list(self.undetermined),
            "exit_code": self.exit_code(),
        }

    def render_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def render_text(self) -> str:
        lines = [f"# {self.command} — " + ", ".join(
            f"{k}={v}" for k, v in sorted(self.source.items()))]
        if self.params:
            lines.append("  " + ", ".join(f"{k}={v}" for k, v in
                                          sorted(self.params.items())))
        for key in sorted(self.payload):
            val = self.payload[key]
            if isinstance(val, (str, int, float, bool)) or val is None:
                lines.append(f"  {key}: {val}")
            elif isinstance(val, (list, dict)):
                text = json.dumps(val, sort_keys=True)
                lines.append(f"  {key}: {text if len(text) <= 72 else '...'}")
        for s in self.sections:
            lines.append(f"== {s.title} ==")
            for name, okk, detail in s.checks:
                line = f"[{'PASS' if okk else 'FAIL'}] {name}"
                if detail:
                    line += f" — {detail}"
                lines.append(line)
        for note in self.undetermined:
            lines.append(f"[UNDETERMINED] {note}")
        code = self.exit_code()
        word = {EXIT_OK: "PASS", EXIT_FAIL: "FAIL",
                EXIT_UNDETERMINED: "UNDETERMINED"}[code]
        lines.append(f"RESULT: {word} (exit {code})")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        return self.render_json() if fmt == "json" else self.render_text()


def emit(report: Report, fmt: str, out: str | None, echo) -> int:
    """Render and either print or atomically write; returns the exit code."""
    text = report.render(fmt)
    if out:
        atomic_write(out, text)
        echo(f"report written to {out} (exit {report.exit_code()})")
    else:
        echo(text, nl=False)
    return report.exit_code()
