"""Print markdown tables from the CSV/JSON files written by run_experiments.py.

    python scripts/make_tables.py results
"""
import csv
import json
import sys
from pathlib import Path


def table(rows, cols, fmt=None):
    fmt = fmt or {}
    out = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    for r in rows:
        out.append("| " + " | ".join(fmt.get(c, str)(r[c]) for c in cols) + " |")
    return "\n".join(out)


def f3(v):
    try:
        return f"{float(v):.3f}"
    except ValueError:
        return v


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def main(argv=None) -> int:
    root = Path((argv or sys.argv[1:] or ["results"])[0])
    for csv_path in sorted(root.glob("*.csv")):
        rows = read(csv_path)
        if not rows:
            continue
        cols = list(rows[0])
        print(f"### {csv_path.stem}\n")
        print(table(rows, cols, {c: f3 for c in cols if c not in ("statistic", "function", "R", "n", "degenerate")}))
        print()
    for js in sorted(root.glob("*.json")):
        doc = json.loads(js.read_text())
        if doc.get("summary"):
            print(f"### {js.stem} summary\n")
            for k, v in sorted(doc["summary"].items()):
                print(f"- {k}: {v}")
            print()
        for w in doc.get("warnings", []):
            print(f"> warning ({js.stem}): {w}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
