"""
Test suite for currentkit.

Tests for configuration, retries, logging, reporting, the geometry and
counting engine, and the command-line interface.

Author: Harsh
"""
