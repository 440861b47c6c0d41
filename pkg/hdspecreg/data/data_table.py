"""
Column-labelled sample container and CSV ingestion for hdspecreg.
"""

import logging
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from hdspecreg.common.exceptions import DataError

logger = logging.getLogger(__name__)


class Role(str, Enum):
    """
    Role of a column in the estimation pipeline.
    """

    OUTCOME = "outcome"
    SPECIAL_REGRESSOR = "special_regressor"
    REGRESSOR = "regressor"
    INSTRUMENT = "instrument"
    OTHER = "other"


RoleLike = Union[Role, str]


class DataTable:
    """
    Immutable, column-labelled numeric sample.

    Holds ``y``, ``v``, regressor and instrument columns side by side, each a
    read-only float64 array of the same length.

    Parameters
    ----------
    columns : Mapping[str, Sequence[float]]
        Column name to values, in display order.
    roles : Mapping[str, Role or str], optional
        Role per column; unlisted columns get ``Role.OTHER``.

    Raises
    ------
    DataError
        If lengths differ, ``n_rows < 2``, a value is not finite, more than one
        outcome or special regressor is tagged, a role refers to an unknown
        column, or the outcome is not binary.

    Examples
    --------
    .. code-block:: python

        table = DataTable(
            {"y": [0, 1, 1], "v": [0.2, -1.0, 3.1], "x1": [1.0, 2.0, 0.5]},
            roles={"y": "outcome", "v": "special_regressor", "x1": "regressor"},
        )
        X = table.matrix(table.names_with_role(Role.REGRESSOR))
    """

    def __init__(self, columns: Mapping[str, Sequence[float]], roles: Optional[Mapping[str, RoleLike]] = None) -> None:
        names = list(columns.keys())
        if len(set(names)) != len(names):
            raise DataError(f"duplicate column name in {names}")

        self._columns: Dict[str, np.ndarray] = {}
        n_rows: Optional[int] = None
        for name in names:
            values = np.array(columns[name], dtype=np.float64).ravel()
            if n_rows is None:
                n_rows = values.shape[0]
            elif values.shape[0] != n_rows:
                raise DataError(f"column '{name}' has {values.shape[0]} rows, expected {n_rows}")
            if not np.all(np.isfinite(values)):
                bad = int(np.flatnonzero(~np.isfinite(values))[0])
                raise DataError(f"non-finite value in column '{name}' at row {bad}")
            values.setflags(write=False)
            self._columns[name] = values

        if n_rows is None or n_rows < 2:
            raise DataError(f"n_rows < 2 (got {n_rows or 0})")
        self.n_rows: int = n_rows

        roles = dict(roles or {})
        unknown = [name for name in roles if name not in self._columns]
        if unknown:
            raise DataError(f"role assigned to unknown column(s): {unknown}")
        self._roles: Dict[str, Role] = {name: Role(roles.get(name, Role.OTHER)) for name in names}

        for role in (Role.OUTCOME, Role.SPECIAL_REGRESSOR):
            tagged = self.names_with_role(role)
            if len(tagged) > 1:
                raise DataError(f"more than one column tagged {role.value}: {tagged}")

        outcome = self.names_with_role(Role.OUTCOME)
        if outcome and not np.all(np.isin(self._columns[outcome[0]], (0.0, 1.0))):
            raise DataError(f"non-binary outcome in column '{outcome[0]}'")

    @property
    def names(self) -> List[str]:
        return list(self._columns.keys())

    @property
    def roles(self) -> Dict[str, Role]:
        return dict(self._roles)

    def __len__(self) -> int:
        return self.n_rows

    def __contains__(self, name: object) -> bool:
        return name in self._columns

    def column(self, name: str) -> np.ndarray:
        """
        Return the read-only values of one column.

        Raises
        ------
        DataError
            If the column does not exist.
        """
        try:
            return self._columns[name]
        except KeyError:
            raise DataError(f"unknown column '{name}'") from None

    def names_with_role(self, role: RoleLike) -> List[str]:
        role = Role(role)
        return [name for name, r in self._roles.items() if r is role]

    def matrix(self, names: Iterable[str]) -> np.ndarray:
        """
        Stack the requested columns into an ``n_rows x k`` array (a copy).
        """
        names = list(names)
        if not names:
            return np.empty((self.n_rows, 0))
        return np.column_stack([self.column(name) for name in names])

    @property
    def y(self) -> np.ndarray:
        return self.column(self._single(Role.OUTCOME))

    @property
    def v(self) -> np.ndarray:
        return self.column(self._single(Role.SPECIAL_REGRESSOR))

    def _single(self, role: Role) -> str:
        tagged = self.names_with_role(role)
        if len(tagged) != 1:
            raise DataError(f"exactly one column must be tagged {role.value}, found {len(tagged)}")
        return tagged[0]

    def with_column(self, name: str, values: Sequence[float], role: RoleLike = Role.OTHER) -> "DataTable":
        """
        Return a new table with one column appended (or replaced).
        """
        columns: Dict[str, Sequence[float]] = dict(self._columns)
        roles: Dict[str, RoleLike] = dict(self._roles)
        columns[name] = values
        roles[name] = role
        return DataTable(columns, roles)

    def subset(self, rows: np.ndarray) -> "DataTable":
        """
        Return the table restricted to the given row indices.
        """
        return DataTable({name: col[rows] for name, col in self._columns.items()}, self._roles)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({name: np.asarray(col) for name, col in self._columns.items()})

    def save_csv(self, path: Union[str, Path]) -> Path:
        """
        Write the table as CSV with 17 significant digits so that
        :func:`load_csv` restores every value bit-exactly.

        Parameters
        ----------
        path : str or Path
            Destination file; parent directories are created.

        Returns
        -------
        Path
            The written path.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        logger.debug("Saved %d x %d table to %s", self.n_rows, len(self._columns), path)
        return path

    def __repr__(self) -> str:
        tags = ", ".join(f"{n}:{r.value}" for n, r in self._roles.items())
        return f"DataTable(n_rows={self.n_rows}, columns=[{tags}])"


def load_csv(path: Union[str, Path], role_map: Optional[Mapping[str, RoleLike]] = None) -> DataTable:
    """
    Read a comma-separated file with a header row into a :class:`DataTable`.

    Parameters
    ----------
    path : str or Path
        UTF-8 CSV file, ``.`` as decimal point.
    role_map : Mapping[str, Role or str], optional
        Column name to role.

    Returns
    -------
    DataTable
        Column order as in the file.

    Raises
    ------
    DataError
        Missing file, duplicate column name, empty or non-numeric cell (row and
        column reported, rows counted from 1 after the header), non-binary
        outcome, or fewer than two data rows.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing file: {path}")

    try:
        raw = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise DataError(f"n_rows < 2: {path} is empty") from None

    header = [str(h).strip() for h in raw.iloc[0].tolist()]
    duplicates = sorted({h for h in header if header.count(h) > 1})
    if duplicates:
        raise DataError(f"duplicate column name(s) {duplicates} in {path}")

    body = raw.iloc[1:]
    columns: Dict[str, np.ndarray] = {}
    for pos, name in enumerate(header):
        cells = body.iloc[:, pos].str.strip()
        values = pd.to_numeric(cells, errors="coerce").to_numpy(dtype=np.float64)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            row = int(bad[0])
            raise DataError(f"non-numeric cell {cells.iloc[row]!r} at row {row + 1}, column '{name}'")
        # float() is correctly rounded, so saved tables reload bit-exactly
        columns[name] = np.array([float(c) for c in cells], dtype=np.float64)

    table = DataTable(columns, role_map)
    logger.info("Loaded %s: %r", path, table)
    return table
