"""Tests for af-gauge."""
