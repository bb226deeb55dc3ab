from __future__ import annotations

"""Tests for the plain-text matrix reader and writer."""

import sys
import tempfile
import unittest
from pathlib import Path

import numpy as np
from numpy.testing import assert_array_equal

# Ensure project src is on path
PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC = PROJECT_ROOT / "src"
sys.path.insert(0, str(SRC))

from lindblad_lab.errors import MatrixParseError, NotHermitianError, ValidationError  # noqa: E402
from lindblad_lab.matrix_io import format_matrix, load_matrices, load_matrix, parse_matrices, save_matrices  # noqa: E402

from helpers import GOLDEN, LOWER  # noqa: E402


class ParseTests(unittest.TestCase):
    def test_golden_identity(self) -> None:
        m = load_matrix(GOLDEN / "identity2.txt", hermitian=True)
        assert_array_equal(m, np.eye(2))

    def test_unequal_rows_are_rejected(self) -> None:
        with self.assertRaises(MatrixParseError) as ctx:
            parse_matrices("2 2\n1 0 0 0 0 0\n1 0\n")
        self.assertEqual(ctx.exception.line, 2)
        self.assertEqual(ctx.exception.column, 9)
        with self.assertRaises(MatrixParseError) as ctx:
            parse_matrices("2 2\n1 0 0 0\n1 0\n")
        self.assertEqual(ctx.exception.line, 3)
        self.assertIn("expected 4", str(ctx.exception))

    def test_comments_and_blank_lines_are_skipped(self) -> None:
        text = "# comment\n\n2 1\n1 2\n\n3 -4\n"
        (m,) = parse_matrices(text)
        assert_array_equal(m, np.array([[1 + 2j], [3 - 4j]]))

    def test_several_matrices(self) -> None:
        text = "1 1\n5 0\n1 2\n1 0 0 1\n"
        first, second = parse_matrices(text)
        self.assertEqual(first.shape, (1, 1))
        assert_array_equal(second, np.array([[1, 1j]]))

    def test_bad_number_reports_position(self) -> None:
        with self.assertRaises(MatrixParseError) as ctx:
            parse_matrices("1 1\n1.0 abc\n")
        self.assertEqual(ctx.exception.line, 2)
        self.assertEqual(ctx.exception.column, 5)
        self.assertIn("line 2, column 5", str(ctx.exception))

    def test_header_must_be_on_one_line(self) -> None:
        with self.assertRaises(MatrixParseError) as ctx:
            parse_matrices("2\n2\n")
        self.assertEqual(ctx.exception.line, 1)

    def test_truncated_file(self) -> None:
        with self.assertRaises(MatrixParseError) as ctx:
            parse_matrices("2 2\n1 0 0 0\n")
        self.assertIn("expected 2 rows", str(ctx.exception))

    def test_non_positive_dimension(self) -> None:
        with self.assertRaises(MatrixParseError):
            parse_matrices("0 2\n")


class FileTests(unittest.TestCase):
    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self.root = Path(self._tmp.name)

    def tearDown(self) -> None:
        self._tmp.cleanup()

    def test_save_then_load_is_exact(self) -> None:
        rng = np.random.default_rng(7)
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        path = save_matrices(self.root / "nested" / "m.txt", [m, LOWER], comment="two\nmatrices")
        loaded = load_matrices(path)
        self.assertEqual(len(loaded), 2)
        assert_array_equal(loaded[0], m)
        assert_array_equal(loaded[1], LOWER)

    def test_golden_file_round_trips_byte_for_byte(self) -> None:
        golden = GOLDEN / "identity2.txt"
        path = save_matrices(self.root / "copy.txt", load_matrices(golden))
        self.assertEqual(path.read_bytes(), golden.read_bytes())

    def test_format_writes_one_row_per_line(self) -> None:
        lines = format_matrix(np.eye(3)).splitlines()
        self.assertEqual(lines[0], "3 3")
        self.assertEqual(len(lines), 4)
        self.assertEqual(len(lines[1].split()), 6)

    def test_load_matrix_checks_the_slot(self) -> None:
        path = save_matrices(self.root / "lower.txt", [LOWER])
        with self.assertRaises(NotHermitianError):
            load_matrix(path, hermitian=True)
        rect = save_matrices(self.root / "rect.txt", [np.ones((2, 3))])
        with self.assertRaises(ValidationError):
            load_matrix(rect)
        self.assertEqual(load_matrix(rect, square=False).shape, (2, 3))
        pair = save_matrices(self.root / "pair.txt", [LOWER, LOWER])
        with self.assertRaises(ValidationError):
            load_matrix(pair)

    def test_missing_and_empty_files(self) -> None:
        with self.assertRaises(ValidationError):
            load_matrices(self.root / "missing.txt")
        empty = self.root / "empty.txt"
        empty.write_text("# nothing here\n", encoding="utf-8")
        with self.assertRaises(MatrixParseError):
            load_matrices(empty)


if __name__ == "__main__":
    unittest.main()
