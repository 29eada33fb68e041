"""Experiment presets shipped as TOML package data."""
