"""Catalog listing and adapter error behavior (no catalog installed)."""

import importlib.util

import pytest

from gridcase_export import (
    CASE_NAMES,
    EXPECTED_COUNTS,
    CatalogUnavailableError,
    UnknownCaseError,
    load_raw_case,
)

catalog_installed = importlib.util.find_spec("pandapower") is not None


class TestListing:
    def test_twenty_six_cases(self):
        assert len(CASE_NAMES) == 26
        assert len(set(CASE_NAMES)) == 26

    def test_every_case_has_a_reference_row(self):
        assert set(EXPECTED_COUNTS) == set(CASE_NAMES)

    def test_reference_rows_are_count_triples(self):
        for name, (n, m, n_gen) in EXPECTED_COUNTS.items():
            assert n > 0 and m > 0, name
            assert n_gen >= 0, name

    def test_unknown_case_rejected_before_catalog_import(self):
        # name validation must not require the catalog dependency
        with pytest.raises(UnknownCaseError, match="unknown case 'case99'"):
            load_raw_case("case99")


@pytest.mark.skipif(
    catalog_installed, reason="catalog installed; error path not reachable"
)
class TestMissingCatalog:
    def test_loading_raises_descriptive_error(self):
        with pytest.raises(CatalogUnavailableError) as excinfo:
            load_raw_case("case9")
        message = str(excinfo.value)
        assert "pandapower" in message
        assert "install" in message
