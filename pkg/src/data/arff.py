# src/data/arff.py
# ARFF reading on top of scipy.io.arff, with line/column positions for parse errors.

import os
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.io import arff

from src.errors import ParseError
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

MISSING = "?"
NUMERIC_TYPES = ("numeric", "real", "integer")


@dataclass(frozen=True)
class ArffAttribute:
    name: str
    nominal_values: Optional[Tuple[str, ...]]  # None for numeric attributes
    line: int


@dataclass
class ArffTable:
    """Decoded data section: numeric columns as float (NaN for '?'), nominal columns as str."""
    relation: str = ""
    attributes: List[ArffAttribute] = field(default_factory=list)
    frame: pd.DataFrame = field(default_factory=pd.DataFrame)
    row_lines: List[int] = field(default_factory=list)


@dataclass
class _Layout:
    attribute_lines: List[int] = field(default_factory=list)
    attribute_text: List[str] = field(default_factory=list)
    data_lines: List[int] = field(default_factory=list)
    data_cells: List[List[str]] = field(default_factory=list)


def _cells(text: str) -> List[str]:
    return [c.strip().strip("'\"") for c in text.split(",")]


def _scan_layout(path: str) -> _Layout:
    """
    Line numbers of the @attribute declarations and data rows.

    Rejects what loadarff would misreport or silently accept: a missing @data
    section, sparse rows and rows whose arity differs from the header.
    """
    layout = _Layout()
    in_data = False
    with open(path, "r", encoding="utf-8", errors="replace") as f:
        for line_no, raw in enumerate(f, start=1):
            text = raw.strip()
            if not text or text.startswith("%"):
                continue
            if not in_data:
                lowered = text.lower()
                if lowered.startswith("@attribute"):
                    layout.attribute_lines.append(line_no)
                    layout.attribute_text.append(text)
                elif lowered.startswith("@data"):
                    if not layout.attribute_lines:
                        raise ParseError("@data section before any @attribute", line=line_no)
                    in_data = True
                continue
            if text.startswith("{"):
                raise ParseError("Sparse ARFF rows are not supported", line=line_no)
            cells = _cells(text)
            if len(cells) != len(layout.attribute_lines):
                raise ParseError(f"Expected {len(layout.attribute_lines)} values, found {len(cells)}",
                                 line=line_no)
            layout.data_lines.append(line_no)
            layout.data_cells.append(cells)
    if not in_data:
        raise ParseError(f"ARFF file {path} has no @data section")
    return layout


def _locate_bad_cell(layout: _Layout) -> Tuple[Optional[int], Optional[int]]:
    """(line, column) of the first unsupported declaration or offending data cell, else (None, None)."""
    nominal = []
    for line_no, declaration in zip(layout.attribute_lines, layout.attribute_text):
        if "{" in declaration and declaration.rstrip().endswith("}"):
            nominal.append(tuple(_cells(declaration[declaration.index("{") + 1:declaration.rindex("}")])))
        elif declaration.split()[-1].lower() in NUMERIC_TYPES:
            nominal.append(None)
        else:
            return line_no, None
    for line_no, cells in zip(layout.data_lines, layout.data_cells):
        for col, (cell, values) in enumerate(zip(cells, nominal), start=1):
            if cell == MISSING:
                continue
            if values is not None:
                if cell not in values:
                    return line_no, col
                continue
            try:
                float(cell)
            except ValueError:
                return line_no, col
    return None, None


def read_arff(path: str) -> ArffTable:
    """Loads a dense ARFF file with scipy; nominal bytes are decoded to str."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"File not found: {path}")
    layout = _scan_layout(path)
    try:
        data, meta = arff.loadarff(path)
    except (arff.ParseArffError, ValueError, NotImplementedError) as e:
        line, column = _locate_bad_cell(layout)
        raise ParseError(f"Malformed ARFF file {path}: {e}", line=line, column=column) from e

    frame = pd.DataFrame(data)
    attributes = []
    for name, line_no in zip(meta.names(), layout.attribute_lines):
        kind, values = meta[name]
        if kind == "nominal":
            frame[name] = frame[name].str.decode("utf-8")
            attributes.append(ArffAttribute(name, tuple(values), line_no))
        elif kind == "numeric":
            frame[name] = frame[name].astype(np.float64)
            attributes.append(ArffAttribute(name, None, line_no))
        else:
            raise ParseError(f"Unsupported attribute type '{kind}' for '{name}'", line=line_no)

    table = ArffTable(relation=meta.name.strip("'\""), attributes=attributes, frame=frame,
                      row_lines=layout.data_lines)
    logger.debug(f"Read ARFF relation '{table.relation}': {len(attributes)} attributes, {len(frame)} rows")
    return table
