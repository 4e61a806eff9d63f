"""Scenario CSV schema shared with the plotting scripts (no compiled code needed)."""

import csv

CSV_COLUMNS = (
    "scenario",
    "seed",
    "N",
    "M",
    "g",
    "Jprime",
    "Delta",
    "kappa",
    "gamma_P",
    "gamma_out",
    "gamma_sp",
    "gamma_deph",
    "deltaJ",
    "observable_name",
    "t_or_none",
    "value",
)

_INTEGER = {"N", "M"}
_TEXT = {"scenario", "seed", "observable_name"}


class SchemaError(ValueError):
    """The table does not follow the scenario CSV schema."""


def read_table(path):
    """Rows of a scenario CSV as dicts with typed values.

    ``t_or_none`` becomes ``None`` when the observable has no time. Raises
    SchemaError naming the first missing or unexpected column, and on empty
    tables.
    """
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty table, missing header")
        for position, column in enumerate(CSV_COLUMNS):
            if position >= len(header) or header[position] != column:
                raise SchemaError(f"{path}: missing column {column}")
        if len(header) > len(CSV_COLUMNS):
            raise SchemaError(f"{path}: unexpected column {header[len(CSV_COLUMNS)]}")
        rows = []
        for line, fields in enumerate(reader, start=2):
            if len(fields) != len(CSV_COLUMNS):
                raise SchemaError(f"{path}: line {line} has {len(fields)} fields")
            row = {}
            for column, text in zip(CSV_COLUMNS, fields):
                if column in _TEXT:
                    row[column] = text
                elif column in _INTEGER:
                    row[column] = int(text)
                elif column == "t_or_none":
                    row[column] = None if text == "none" else float(text)
                else:
                    row[column] = float(text)
            rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows
