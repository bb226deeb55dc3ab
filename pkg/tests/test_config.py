from __future__ import annotations

"""Tests for runtime settings and tolerance overrides."""

import sys
import unittest
from pathlib import Path

# Ensure project src is on path
PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC = PROJECT_ROOT / "src"
sys.path.insert(0, str(SRC))

from lindblad_lab.config import DIM_CAP_ENV, Settings, Tolerances  # noqa: E402
from lindblad_lab.errors import ConfigError, DimensionCapError  # noqa: E402


class ToleranceTests(unittest.TestCase):
    def test_defaults(self) -> None:
        tols = Tolerances()
        self.assertEqual(tols.null_space, 1e-10)
        self.assertIn("closure", Tolerances.names())

    def test_overrides(self) -> None:
        tols = Tolerances().with_overrides({"product": "1e-6"})
        self.assertEqual(tols.product, 1e-6)
        self.assertEqual(tols.as_dict()["hermitian"], 1e-12)

    def test_invalid_overrides(self) -> None:
        for overrides, field in (
            ({"fuzz": 1.0}, "tolerances.fuzz"),
            ({"product": 0.0}, "tolerances.product"),
            ({"product": "tight"}, "tolerances.product"),
            ({"product": float("inf")}, "tolerances.product"),
        ):
            with self.subTest(overrides=overrides):
                with self.assertRaises(ConfigError) as ctx:
                    Tolerances().with_overrides(overrides)
                self.assertEqual(ctx.exception.field, field)


class SettingsTests(unittest.TestCase):
    def test_from_env(self) -> None:
        self.assertEqual(Settings.from_env({}).dim_cap, 64)
        self.assertEqual(Settings.from_env({DIM_CAP_ENV: "128"}).dim_cap, 128)
        with self.assertRaises(ConfigError):
            Settings.from_env({DIM_CAP_ENV: "lots"})
        with self.assertRaises(ConfigError):
            Settings.from_env({DIM_CAP_ENV: "1"})

    def test_caps(self) -> None:
        settings = Settings(dim_cap=64)
        self.assertEqual(settings.superop_cap, 4096)
        self.assertEqual(settings.max_chain_length, 6)
        settings.check_dimension(64)
        with self.assertRaises(DimensionCapError):
            settings.check_dimension(65)

    def test_with_tolerances(self) -> None:
        settings = Settings(dim_cap=16).with_tolerances({"stationary": 1e-6})
        self.assertEqual(settings.dim_cap, 16)
        self.assertEqual(settings.tolerances.stationary, 1e-6)


if __name__ == "__main__":
    unittest.main()
