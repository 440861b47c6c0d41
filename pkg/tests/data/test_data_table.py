"""
Unit tests for DataTable and load_csv.
"""

import tempfile
import unittest
from pathlib import Path

import numpy as np

from hdspecreg.common.exceptions import DataError
from hdspecreg.data import DataTable, Role, load_csv


class TestDataTable(unittest.TestCase):
    """
    Test cases for the column-labelled sample container.
    """

    def setUp(self) -> None:
        self.table = DataTable(
            {"y": [0, 1, 1, 0], "v": [0.2, -1.0, 3.1, 0.5], "x1": [1.0, 2.0, 0.5, 4.0], "z1": [3.0, 1.0, 2.0, 0.0]},
            roles={"y": "outcome", "v": Role.SPECIAL_REGRESSOR, "x1": "regressor", "z1": "instrument"},
        )

    def test_roles_and_accessors(self) -> None:
        self.assertEqual(self.table.n_rows, 4)
        self.assertEqual(len(self.table), 4)
        self.assertIn("x1", self.table)
        self.assertNotIn("x2", self.table)
        np.testing.assert_array_equal(self.table.y, [0, 1, 1, 0])
        np.testing.assert_array_equal(self.table.v, [0.2, -1.0, 3.1, 0.5])
        self.assertEqual(self.table.names_with_role(Role.REGRESSOR), ["x1"])
        self.assertEqual(self.table.names_with_role("instrument"), ["z1"])

    def test_columns_are_read_only(self) -> None:
        with self.assertRaises(ValueError):
            self.table.column("x1")[0] = 10.0

    def test_matrix(self) -> None:
        m = self.table.matrix(["x1", "z1"])
        self.assertEqual(m.shape, (4, 2))
        self.assertEqual(self.table.matrix([]).shape, (4, 0))

    def test_with_column_and_subset(self) -> None:
        extended = self.table.with_column("c", np.ones(4))
        self.assertEqual(extended.roles["c"], Role.OTHER)
        self.assertNotIn("c", self.table)
        sub = extended.subset(np.array([0, 2]))
        self.assertEqual(sub.n_rows, 2)
        np.testing.assert_array_equal(sub.column("x1"), [1.0, 0.5])

    def test_non_binary_outcome(self) -> None:
        with self.assertRaisesRegex(DataError, "non-binary outcome"):
            DataTable({"y": [0, 2], "v": [1.0, 2.0]}, roles={"y": "outcome"})

    def test_too_few_rows(self) -> None:
        with self.assertRaisesRegex(DataError, "n_rows < 2"):
            DataTable({"y": [1]})

    def test_length_mismatch_and_non_finite(self) -> None:
        with self.assertRaises(DataError):
            DataTable({"a": [1.0, 2.0], "b": [1.0]})
        with self.assertRaises(DataError):
            DataTable({"a": [1.0, np.nan]})

    def test_duplicate_roles(self) -> None:
        with self.assertRaises(DataError):
            DataTable({"a": [0, 1], "b": [1, 0]}, roles={"a": "outcome", "b": "outcome"})

    def test_unknown_column(self) -> None:
        with self.assertRaises(DataError):
            self.table.column("nope")
        with self.assertRaises(DataError):
            DataTable({"a": [1.0, 2.0]}, roles={"b": "outcome"})


class TestLoadCsv(unittest.TestCase):
    """
    Test cases for CSV ingestion and the bit-exact save/load cycle.
    """

    def setUp(self) -> None:
        self.temp_dir = tempfile.TemporaryDirectory()
        self.dir = Path(self.temp_dir.name)

    def tearDown(self) -> None:
        self.temp_dir.cleanup()

    def test_missing_file(self) -> None:
        with self.assertRaisesRegex(DataError, "missing file"):
            load_csv(self.dir / "absent.csv")

    def test_non_numeric_cell_reports_row_and_column(self) -> None:
        path = self.dir / "bad.csv"
        path.write_text("y,v\n0,1.5\n1,abc\n")
        with self.assertRaisesRegex(DataError, r"row 2, column 'v'"):
            load_csv(path)

    def test_empty_cell(self) -> None:
        path = self.dir / "empty.csv"
        path.write_text("y,v\n0,1.5\n1,\n")
        with self.assertRaises(DataError):
            load_csv(path)

    def test_duplicate_header(self) -> None:
        path = self.dir / "dup.csv"
        path.write_text("y,y\n0,1\n1,0\n")
        with self.assertRaisesRegex(DataError, "duplicate"):
            load_csv(path)

    def test_save_and_reload_is_bit_exact(self) -> None:
        """
        Values written with 17 significant digits reload to the same doubles.
        """
        rng = np.random.default_rng(3)
        table = DataTable(
            {"y": rng.integers(0, 2, 50), "v": rng.normal(size=50) * 1e-3, "x": rng.standard_t(3, size=50) * 1e5},
            roles={"y": "outcome", "v": "special_regressor"},
        )
        path = table.save_csv(self.dir / "out" / "t.csv")
        loaded = load_csv(path, {"y": "outcome", "v": "special_regressor"})
        self.assertEqual(loaded.names, ["y", "v", "x"])
        for name in table.names:
            np.testing.assert_array_equal(loaded.column(name), table.column(name))


if __name__ == "__main__":
    unittest.main()
