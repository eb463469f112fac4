import csv
import io
from pathlib import Path

HEADER = "# tool: qcsens 0.1.0\n# note: synthetic fixture\n"


def write_table(path: Path, columns: list[str], rows: list[dict]) -> Path:
    """Write a row CSV the way the generator does: # header, then a table."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row.get(column, "") for column in columns])
    path.write_text(HEADER + buf.getvalue())
    return path
