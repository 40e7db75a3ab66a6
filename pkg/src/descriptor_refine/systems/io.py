"""Reading and writing system, controller and point files."""

import json
import logging
from pathlib import Path
from typing import TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from src.descriptor_refine.core.numkit import as_matrix, as_vector
from src.descriptor_refine.systems.models import Controller, DescriptorSystem, InitialSet, InitialSetKind
from src.descriptor_refine.systems.schemas import (
    ControllerFile,
    InitialSetPayload,
    MatrixBlock,
    PointsFile,
    SystemFile,
)
from src.descriptor_refine.utils.exceptions import DimensionMismatchError, ParseError

logger = logging.getLogger(__name__)
SchemaT = TypeVar("SchemaT", bound=BaseModel)


def _format_location(loc: tuple) -> str:
    text = ""
    for part in loc:
        text += f"[{part}]" if isinstance(part, int) else (f".{part}" if text else str(part))
    return text


def read_payload(path: str | Path, schema: type[SchemaT]) -> SchemaT:
    """Parse a JSON file into ``schema``, reporting line or field on failure."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(path), "file", str(exc)) from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(path), f"line {exc.lineno} column {exc.colno}", exc.msg) from exc
    try:
        return schema.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = _format_location(tuple(part for part in first["loc"] if not _is_union_tag(part)))
        raise ParseError(str(path), f"field {location or '<root>'}", first["msg"]) from exc


def _is_union_tag(part: object) -> bool:
    # pydantic inserts the union member name ("list[list[...]]", "MatrixBlock") into error locations
    return isinstance(part, str) and (part.startswith("list[") or part == "MatrixBlock")


def write_payload(path: str | Path, payload: BaseModel):
    """Write a schema instance as indented JSON."""
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(payload.model_dump_json(indent=2, exclude_none=True), encoding="utf-8")
    logger.debug("wrote %s", output_path)


def matrix_from_payload(
    payload: list[list[float]] | MatrixBlock,
    name: str,
    path: str | Path = "<memory>",
) -> np.ndarray:
    """Matrix from a list of rows or an explicit-shape block."""
    if isinstance(payload, MatrixBlock):
        if len(payload.data) != payload.rows * payload.cols:
            detail = f"block holds {len(payload.data)} entries, shape needs {payload.rows * payload.cols}"
            raise ParseError(str(path), f"field {name}", detail)
        return as_matrix(np.reshape(payload.data, (payload.rows, payload.cols)), name)
    widths = {len(row) for row in payload}
    if len(widths) > 1:
        raise ParseError(str(path), f"field {name}", f"rows have different lengths {sorted(widths)}")
    if not payload:
        raise ParseError(str(path), f"field {name}", "matrix without rows needs the {rows, cols, data} form")
    return as_matrix(payload, name)


def matrix_to_payload(m: np.ndarray) -> list[list[float]] | MatrixBlock:
    """List of rows, or an explicit-shape block when there are no rows."""
    m = np.asarray(m, dtype=float)
    if m.shape[0] == 0:
        return MatrixBlock(rows=0, cols=m.shape[1], data=[])
    return m.tolist()


def init_from_payload(payload: InitialSetPayload | None, dim: int, path: str | Path = "<memory>") -> InitialSet:
    """Initial set of dimension ``dim`` from its file descriptor."""
    if payload is None:
        return InitialSet.full_space(dim)
    if payload.dim is not None and payload.dim != dim:
        msg = f"{path}: init.dim is {payload.dim}, system has {dim} states"
        raise DimensionMismatchError(msg)
    kind = InitialSetKind(payload.kind)
    try:
        if kind is InitialSetKind.FULL:
            init = InitialSet.full_space(dim)
        elif kind is InitialSetKind.SUBSPACE:
            init = InitialSet.subspace(matrix_from_payload(_required(payload.basis, "basis", path), "init.basis", path))
        elif kind is InitialSetKind.BOX:
            init = InitialSet.box(_required(payload.lower, "lower", path), _required(payload.upper, "upper", path))
        else:
            init = InitialSet.from_points(matrix_from_payload(_required(payload.points, "points", path), "init.points", path))
    except ValueError as exc:
        raise ParseError(str(path), "field init", str(exc)) from exc
    if init.dim != dim:
        msg = f"{path}: initial set has dimension {init.dim}, system has {dim} states"
        raise DimensionMismatchError(msg)
    return init


def _required(value: object, name: str, path: str | Path) -> object:
    if value is None:
        raise ParseError(str(path), f"field init.{name}", "required for this kind")
    return value


def init_to_payload(init: InitialSet) -> InitialSetPayload:
    """File descriptor of an initial set."""
    if init.kind is InitialSetKind.FULL:
        return InitialSetPayload(kind=init.kind.value, dim=init.dim)
    if init.kind is InitialSetKind.SUBSPACE:
        return InitialSetPayload(kind=init.kind.value, basis=matrix_to_payload(init.basis))
    if init.kind is InitialSetKind.BOX:
        return InitialSetPayload(kind=init.kind.value, lower=init.lower.tolist(), upper=init.upper.tolist())
    return InitialSetPayload(kind=init.kind.value, points=init.points.tolist())


def load_system(path: str | Path) -> DescriptorSystem:
    """Load a descriptor system file."""
    payload = read_payload(path, SystemFile)
    e = matrix_from_payload(payload.E, "E", path)
    sys = DescriptorSystem(
        E=e,
        A=matrix_from_payload(payload.A, "A", path),
        B=matrix_from_payload(payload.B, "B", path),
        C=matrix_from_payload(payload.C, "C", path),
        init=init_from_payload(payload.init, e.shape[0], path),
    )
    logger.debug("loaded system %s: n=%d p=%d k=%d", path, sys.n, sys.p, sys.k)
    return sys


def save_system(sys: DescriptorSystem, path: str | Path):
    """Write a descriptor system file."""
    write_payload(
        path,
        SystemFile(
            E=matrix_to_payload(sys.E),
            A=matrix_to_payload(sys.A),
            B=matrix_to_payload(sys.B),
            C=matrix_to_payload(sys.C),
            init=init_to_payload(sys.init),
        ),
    )


def load_controller(path: str | Path) -> Controller:
    """Load a controller file."""
    payload = read_payload(path, ControllerFile)
    return Controller(
        Ec=matrix_from_payload(payload.Ec, "Ec", path),
        Ac=matrix_from_payload(payload.Ac, "Ac", path),
        Bc=matrix_from_payload(payload.Bc, "Bc", path),
    )


def save_controller(ctrl: Controller, path: str | Path):
    """Write a controller file."""
    write_payload(
        path,
        ControllerFile(
            Ec=matrix_to_payload(ctrl.Ec),
            Ac=matrix_to_payload(ctrl.Ac),
            Bc=matrix_to_payload(ctrl.Bc),
        ),
    )


def load_points(path: str | Path, dim: int) -> np.ndarray:
    """Load a batch of initial states, one per row."""
    payload = read_payload(path, PointsFile)
    if not payload.points:
        return np.zeros((0, dim))
    return np.vstack([as_vector(point, "point", dim) for point in payload.points])


def parse_vector(text: str, dim: int) -> np.ndarray:
    """Vector from comma-separated decimals."""
    try:
        values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise ParseError("<argument>", "x0", str(exc)) from exc
    return as_vector(values, "x0", dim)
