"""Tests for the vphermite package."""
