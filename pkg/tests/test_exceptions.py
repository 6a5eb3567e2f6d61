"""Tests for exception hierarchy."""

from __future__ import annotations

import pytest

from relaxpolar.exceptions import (
    ChannelError,
    CodecError,
    ConfigurationError,
    ConstructionError,
    DomainError,
    RelaxPolarError,
    ReliabilityError,
    ResourceLimitError,
    VerificationError,
)


class TestExceptionHierarchy:
    def test_base_exception(self):
        exc = RelaxPolarError("test")
        assert str(exc) == "test"
        assert isinstance(exc, Exception)

    @pytest.mark.parametrize(
        "cls",
        [ConfigurationError, ChannelError, ConstructionError, ResourceLimitError, CodecError, VerificationError],
    )
    def test_subclasses(self, cls):
        assert isinstance(cls("x"), RelaxPolarError)

    def test_reliability_is_construction_error(self):
        assert isinstance(ReliabilityError("node (3, 5)"), ConstructionError)

    def test_domain_error_is_value_error(self):
        exc = DomainError("beta out of range")
        assert isinstance(exc, ValueError)
        assert isinstance(exc, RelaxPolarError)

    def test_catch_base(self):
        with pytest.raises(RelaxPolarError):
            raise CodecError("length mismatch")
