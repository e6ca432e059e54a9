"""Tests for wcsched."""
