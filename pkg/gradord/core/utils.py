"""
Utility functions for converting between documents and domain objects, and for text reports.
"""
from typing import Any, List, Optional, Sequence, Tuple

from gradord.core.graduated_orders import GraduatedOrder, IdealMatrix, build_order
from gradord.core.ideal_arith import FracIdeal, format_ideal, parse_ideal
from gradord.core.schemas import (
    IdealMatrixDocument,
    OrderDocument,
)


def convert_document_to_parts(document: OrderDocument) -> Tuple[List[int], List[List[FracIdeal]], FracIdeal]:
    """
    Parse the ideal strings of an order document.

    Args:
        document: The order document

    Returns:
        (blocks, ideal matrix, d_omega)
    """
    backend = document.backend
    ideals = [[parse_ideal(text, backend) for text in row] for row in document.ideals]
    return list(document.blocks), ideals, parse_ideal(document.d_omega, backend)


def convert_document_to_order(document: OrderDocument) -> GraduatedOrder:
    """
    Build a validated standard form from an order document.

    Raises:
        StandardFormError: If the ideals violate (i), (ii) or (iii)
    """
    blocks, ideals, d_omega = convert_document_to_parts(document)
    return build_order(blocks, ideals, d_omega)


def convert_matrix_to_document(blocks: Sequence[int], ideals: IdealMatrix) -> IdealMatrixDocument:
    return IdealMatrixDocument(
        blocks=list(blocks),
        backend=ideals[0][0].backend,
        ideals=[[format_ideal(entry) for entry in row] for row in ideals],
    )


def convert_order_to_document(order: GraduatedOrder) -> OrderDocument:
    return OrderDocument(
        blocks=list(order.blocks),
        backend=order.backend,
        ideals=[[format_ideal(entry) for entry in row] for row in order.ideals],
        d_omega=format_ideal(order.d_omega),
    )


# ============================================================================
# Text reports
# ============================================================================

def format_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """
    Render rows as a left-aligned text table.

    Args:
        headers: Column titles
        rows: One sequence of cells per row; None renders as '-'

    Returns:
        The table with a header rule, without a trailing newline
    """
    cells = [[str(h) for h in headers]] + [["-" if c is None else str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def format_ideal_matrix(ideals: IdealMatrix, blocks: Optional[Sequence[int]] = None) -> str:
    """An ideal matrix as a table with one row per block."""
    t = len(ideals)
    headers = [""] + [str(j) for j in range(t)]
    rows = []
    for i, row in enumerate(ideals):
        label = f"{i} (n={blocks[i]})" if blocks is not None else str(i)
        rows.append([label] + [format_ideal(entry) for entry in row])
    return format_table(headers, rows)


def format_order(order: GraduatedOrder) -> str:
    header = f"blocks {list(order.blocks)}  backend {order.backend.value}  d_omega {format_ideal(order.d_omega)}"
    return header + "\n" + format_ideal_matrix(order.ideals, order.blocks)
