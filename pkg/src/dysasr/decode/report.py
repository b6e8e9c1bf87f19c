"""WER result tables (TSV + Markdown), deterministic bytes for fixed input."""

from __future__ import annotations

from dataclasses import dataclass

COLUMNS = ("architecture", "feature", "strategy", "adapt_bn", "adapt_am",
           "seed", "wer")


@dataclass
class ResultRow:
    architecture: str
    feature: str = "-"
    strategy: str = "-"
    adapt_bn: str = "-"
    adapt_am: str = "-"
    seed: int | None = None
    wer: float | None = None

    def cells(self) -> list[str]:
        return [
            self.architecture,
            self.feature,
            self.strategy,
            self.adapt_bn,
            self.adapt_am,
            "-" if self.seed is None else str(self.seed),
            "-" if self.wer is None else f"{self.wer:.2f}",
        ]


def render_tsv(rows: list[ResultRow]) -> str:
    lines = ["\t".join(COLUMNS)]
    lines += ["\t".join(r.cells()) for r in rows]
    return "\n".join(lines) + "\n"


def render_markdown(rows: list[ResultRow]) -> str:
    header = "| " + " | ".join(COLUMNS) + " |"
    rule = "|" + "|".join(["---"] * len(COLUMNS)) + "|"
    lines = [header, rule]
    lines += ["| " + " | ".join(r.cells()) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def write_report(rows: list[ResultRow], tsv_path: str, md_path: str | None = None) -> None:
    with open(tsv_path, "w", encoding="utf-8") as f:
        f.write(render_tsv(rows))
    if md_path:
        with open(md_path, "w", encoding="utf-8") as f:
            f.write(render_markdown(rows))
