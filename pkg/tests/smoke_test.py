#!/usr/bin/env python3
"""
Smoke test script for lorentzlab package artifacts.

Checks that a built wheel or source distribution imports and that the shipped
exemplars run end to end.

Usage:
    uv run --isolated --no-project --with dist/*.whl tests/smoke_test.py
    uv run --isolated --no-project --with dist/*.tar.gz tests/smoke_test.py
"""

import sys
import tempfile
import traceback
from pathlib import Path


def test_basic_import():
    """Test that lorentzlab can be imported."""
    try:
        import lorentzlab  # noqa # pylint: disable=unused-import
        from lorentzlab import SpaceDescription  # noqa # pylint: disable=unused-import

        print("✓ lorentzlab imported successfully")
        return True
    except ImportError as e:
        print(f"✗ Failed to import lorentzlab: {e}")
        return False


def test_checkers():
    """Test that the checker modules import."""
    try:
        from lorentzlab.Axioms import check_axioms  # noqa # pylint: disable=unused-import
        from lorentzlab.Curvature import check_curvature_bound  # noqa # pylint: disable=unused-import
        from lorentzlab.Extension import check_extension  # noqa # pylint: disable=unused-import

        print("✓ Checkers imported successfully")
        return True
    except ImportError as e:
        print(f"✗ Failed to import checkers: {e}")
        return False


def test_fan_tau():
    """τ through the apex of the fan."""
    from lorentzlab import ExemplarSpec, build_exemplar

    try:
        fan = build_exemplar(ExemplarSpec(kind="fan_space"))
        tau = fan.tau[fan.index_of((-2, 0, 0)), fan.index_of((0, 0, 3))]
        assert abs(tau - 5.0) < 1e-9, tau

        print("✓ Fan exemplar test passed")
        return True
    except Exception as e:
        print(f"✗ Fan exemplar test failed: {e}")
        traceback.print_exc()
        return False


def test_catalog_round_trip():
    """Save a space to a catalog and read it back."""
    from lorentzlab import Catalog, ExemplarSpec, build_exemplar

    try:
        space = build_exemplar(ExemplarSpec(kind="toy_dag"))
        with tempfile.TemporaryDirectory() as temp_dir:
            catalog = Catalog(Path(temp_dir))
            key = catalog.save(space)
            fetched = catalog.fetch(key)
            assert fetched.n == 5
            assert fetched.tau[0, 4] == 4.0

        print("✓ Catalog test passed")
        return True
    except Exception as e:
        print(f"✗ Catalog test failed: {e}")
        traceback.print_exc()
        return False


def main():
    """Run all smoke tests."""
    print("Running lorentzlab smoke tests...")

    tests = [
        test_basic_import,
        test_checkers,
        test_fan_tau,
        test_catalog_round_trip,
    ]

    passed = 0
    failed = 0

    for test in tests:
        try:
            if test():
                passed += 1
            else:
                failed += 1
        except Exception as e:
            print(f"✗ Test {test.__name__} crashed: {e}")
            traceback.print_exc()
            failed += 1

    print(f"\nResults: {passed} passed, {failed} failed")

    if failed > 0:
        print("✗ Some tests failed")
        sys.exit(1)
    else:
        print("✓ All smoke tests passed")
        sys.exit(0)


if __name__ == "__main__":
    main()
