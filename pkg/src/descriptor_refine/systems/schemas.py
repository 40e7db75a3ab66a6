"""Pydantic schemas for system, controller and relation files."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, FiniteFloat


class MatrixBlock(BaseModel):
    """Explicit-shape matrix, used when a matrix has no rows."""

    model_config = ConfigDict(extra="forbid")

    rows: int = Field(ge=0)
    cols: int = Field(ge=0)
    data: list[FiniteFloat] = Field(default_factory=list)


MatrixPayload = list[list[FiniteFloat]] | MatrixBlock


class InitialSetPayload(BaseModel):
    """Initial-state set descriptor."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["full", "subspace", "box", "points"]
    dim: int | None = Field(default=None, ge=1)
    basis: MatrixPayload | None = None
    lower: list[FiniteFloat] | None = None
    upper: list[FiniteFloat] | None = None
    points: list[list[FiniteFloat]] | None = None


class SystemFile(BaseModel):
    """Descriptor system file: E, A, B, C and the initial set."""

    model_config = ConfigDict(extra="forbid")

    E: MatrixPayload
    A: MatrixPayload
    B: MatrixPayload
    C: MatrixPayload
    init: InitialSetPayload | None = None


class ControllerFile(BaseModel):
    """Controller file: Ec, Ac, Bc."""

    model_config = ConfigDict(extra="forbid")

    Ec: MatrixPayload
    Ac: MatrixPayload
    Bc: MatrixPayload


class DrivingVariableFile(BaseModel):
    """Driving-variable system file."""

    model_config = ConfigDict(extra="forbid")

    Ad: MatrixPayload
    Bd: MatrixPayload
    Cu: MatrixPayload
    Du: MatrixPayload
    C: MatrixPayload
    init: InitialSetPayload | None = None


class RelationFile(BaseModel):
    """Graph relation file: x_a = H x."""

    model_config = ConfigDict(extra="forbid")

    H: MatrixPayload


class RefinedControllerFile(BaseModel):
    """Refined controller file, flattened into closed-form matrices."""

    model_config = ConfigDict(extra="forbid")

    Kz: MatrixPayload
    P: MatrixPayload
    G: MatrixPayload
    drift: MatrixPayload
    Bda: MatrixPayload
    Bd: MatrixPayload
    Ad: MatrixPayload
    Cu: MatrixPayload
    Du: MatrixPayload
    H: MatrixPayload


class PointsFile(BaseModel):
    """Batch of initial states."""

    model_config = ConfigDict(extra="forbid")

    points: list[list[FiniteFloat]]
