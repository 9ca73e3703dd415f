"""
Tests for retry utilities module.

Tests the jittered retry used when a base point lands on a lift endpoint.

Author: Harsh
"""

import pytest
from tenacity import Retrying
from currentkit.errors import DegenerateBasePoint, InputError
from currentkit.retry_utils import create_retrying, call_with_jitter


@pytest.mark.unit
class TestCreateRetrying:
    """Test retry controller creation."""

    def test_create_retrying_default_params(self):
        """Test creating a retry controller with default parameters."""
        retrying = create_retrying()

        assert isinstance(retrying, Retrying)

    def test_retries_until_success(self):
        """Test that DegenerateBasePoint triggers another attempt."""
        call_count = {'count': 0}

        def flaky():
            call_count['count'] += 1
            if call_count['count'] < 3:
                raise DegenerateBasePoint("endpoint hit")
            return "counted"

        result = create_retrying(max_attempts=5)(flaky)

        assert result == "counted"
        assert call_count['count'] == 3

    def test_other_errors_not_retried(self):
        """Test that unrelated errors propagate on the first attempt."""
        call_count = {'count': 0}

        def broken():
            call_count['count'] += 1
            raise InputError("bad word")

        with pytest.raises(InputError):
            create_retrying(max_attempts=5)(broken)

        assert call_count['count'] == 1


@pytest.mark.unit
class TestCallWithJitter:
    """Test jittered base-point retries."""

    def test_first_attempt_unperturbed(self):
        """Test that a successful first attempt sees offset zero."""
        offsets = []

        def func(offset):
            offsets.append(offset)
            return 42

        assert call_with_jitter(func) == 42
        assert offsets == [0.0]

    def test_offsets_grow_by_jitter(self):
        """Test that each failed attempt shifts the offset by one jitter."""
        offsets = []

        def func(offset):
            offsets.append(offset)
            if len(offsets) < 3:
                raise DegenerateBasePoint("endpoint hit")
            return offset

        result = call_with_jitter(func, max_attempts=5, jitter=0.01)

        assert offsets == pytest.approx([0.0, 0.01, 0.02])
        assert result == pytest.approx(0.02)

    def test_gives_up_after_max_attempts(self):
        """Test that the last DegenerateBasePoint is re-raised."""
        call_count = {'count': 0}

        def always_degenerate(offset):
            call_count['count'] += 1
            raise DegenerateBasePoint(f"endpoint hit at offset {offset}")

        with pytest.raises(DegenerateBasePoint):
            call_with_jitter(always_degenerate, max_attempts=4, jitter=0.1)

        assert call_count['count'] == 4

    def test_reproducible(self):
        """Test that reruns see the same offsets."""
        def run():
            seen = []

            def func(offset):
                seen.append(offset)
                if len(seen) < 2:
                    raise DegenerateBasePoint("endpoint hit")
                return offset
            call_with_jitter(func, jitter=1e-3)
            return seen

        assert run() == run()
